#include "doctest.h"

#include "ardyn/lattes.hpp"

#include <cmath>

using namespace ardyn;

namespace {

QuadNumber q(long n, int d = 0) { return QuadNumber(BigRational(n), d); }
Poly P(std::initializer_list<QuadNumber> c, int d) { return Poly(std::vector<QuadNumber>(c), d); }
const QuadNumber i1 = QuadNumber::root(1);
const QuadNumber w3 = QuadNumber::root(3);
const QuadNumber rho = QuadNumber::rho();

using Counts = std::array<int, 4>;

}  // namespace

TEST_CASE("curves") {
  CHECK(EllipticCurveCM::E1().G() == P({q(0), q(1), q(0), q(1)}, 1));
  CHECK(EllipticCurveCM::E2().tau_im() == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK_THROWS_AS(EllipticCurveCM(P({q(0), q(0), q(0), q(1)}, 1), 1, 1.0), ArithmeticError);
  CHECK_THROWS_AS(EllipticCurveCM(P({q(1), q(1)}, 1), 1, 1.0), ArithmeticError);
  CHECK_THROWS_AS(EllipticCurveCM::by_name("E3"), UnknownMapError);
}

TEST_CASE("lattes_double") {
  RationalMap f = lattes_double(EllipticCurveCM::E1());
  RationalMap displayed = RationalMap::normalize(P({q(1), q(0), q(-2), q(0), q(1)}, 1), P({q(0), q(4), q(0), q(4)}, 1));
  CHECK(equals(f, displayed));
  CHECK(f.degree() == 4);
  // (3z^2)^2 - 8z(z^3+1) = z^4 - 8z over 4(z^3+1)
  RationalMap g = lattes_double(EllipticCurveCM::E2());
  CHECK(equals(g, RationalMap::normalize(P({q(0), q(-8), q(0), q(0), q(1)}, 3), P({q(4), q(0), q(0), q(4)}, 3))));
  CHECK(g.degree() == 4);
}

TEST_CASE("division polynomials agree with the doubling formula and with composition") {
  for (const auto& e : {EllipticCurveCM::E1(), EllipticCurveCM::E2()}) {
    CHECK(equals(lattes_multiply(e, 2), lattes_double(e)));
    CHECK(lattes_multiply(e, 3).degree() == 9);
    CHECK(lattes_multiply(e, 5).degree() == 25);
    CHECK(equals(lattes_multiply(e, 4), compose(lattes_double(e), lattes_double(e))));
    CHECK(equals(lattes_multiply(e, 6), compose(lattes_multiply(e, 3), lattes_double(e))));
  }
  // sympy: x([3]P) on y^2 = x^3 + x is z (z^4 - 6z^2 - 3)^2 / (3z^4 + 6z^2 - 1)^2
  Poly top = Poly::identity(1) * P({q(-3), q(0), q(-6), q(0), q(1)}, 1).pow(2);
  Poly bottom = P({q(-1), q(0), q(6), q(0), q(3)}, 1).pow(2);
  CHECK(equals(lattes_multiply(EllipticCurveCM::E1(), 3), RationalMap::normalize(top, bottom)));
  // [3] = [sqrt(-3)] o [sqrt(-3)] up to [-1], which acts trivially on x
  RationalMap s = catalog("phi_sqrt-3");
  CHECK(equals(compose(s, s), lattes_multiply(EllipticCurveCM::E2(), 3)));
}

TEST_CASE("catalog") {
  CHECK(equals(catalog("phi_sqrt-3"), RationalMap::normalize(-P({q(4), q(0), q(0), q(1)}, 3), P({q(0), q(0), q(3)}, 3))));
  CHECK(catalog("phi_1+2i").degree() == 5);
  CHECK(equals(catalog("pow_2"), RationalMap::power(2)));
  CHECK(catalog("pow_7").degree() == 7);
  CHECK_THROWS_AS(catalog("phi_7"), UnknownMapError);
  CHECK_THROWS_AS(catalog("pow_1"), UnknownMapError);
  try {
    catalog("nope");
  } catch (const UnknownMapError& e) {
    CHECK(std::string(e.what()).find("phi_1+i") != std::string::npos);
  }
  for (const CatalogEntry& e : catalog_entries()) {
    if (!e.lambda) continue;
    CHECK_MESSAGE(e.map.degree() == e.lambda->norm(), e.name);
  }
  CHECK(catalog_for({q(1) - i1, 1})->name == "phi_1-i");
  CHECK(catalog_for({q(-2, 1), 1})->name == "phi_2@E1");
  CHECK(catalog_for({w3, 3})->name == "phi_sqrt-3");
  CHECK_FALSE(catalog_for({q(7, 1), 1}).has_value());
}

TEST_CASE("commuting catalog pairs") {
  for (auto [a, b] : {std::pair{"phi_1+i", "phi_1-i"}, {"phi_1+2i", "phi_1-2i"}, {"phi_2+i", "phi_2-i"}})
    CHECK_MESSAGE(commute_check(catalog(a), catalog(b)), a);
  CHECK(equals(compose(catalog("phi_1+i"), catalog("phi_1-i")), lattes_double(EllipticCurveCM::E1())));
  // Lattes maps of one curve commute with each other
  for (const char* name : {"phi_1+i", "phi_1+2i", "phi_2-i", "phi_3@E1"})
    CHECK_MESSAGE(commute_check(catalog(name), catalog("phi_2@E1")), name);
  CHECK(commute_check(catalog("phi_sqrt-3"), catalog("phi_2@E2")));
  CHECK(commute_check(catalog("phi_sqrt-3"), catalog("phi_3@E2")));
}

TEST_CASE("displayed E2 pair: the unit rho breaks commutation") {
  // phi_sqrt-3*rho uses the sixth root of unity rho; only cube roots of unity
  // act on the x-line of y^2 = x^3 + 1, so this pair does not commute and no
  // composition order reproduces the displayed phi_eps.
  RationalMap s = catalog("phi_sqrt-3"), t = catalog("phi_sqrt-3*rho");
  CHECK_FALSE(commute_check(s, t));
  CHECK_FALSE(equals(compose(s, t), catalog("phi_eps")));
  CHECK_FALSE(equals(compose(t, s), catalog("phi_eps")));
  CHECK_FALSE(commute_check(t, catalog("phi_2@E2")));
  // with the cube roots of unity rho^2 and -rho the pair commutes
  for (const QuadNumber& u : {rho * rho, -rho}) {
    RationalMap tu = RationalMap::normalize(u * s.num(), s.den());
    CHECK(commute_check(s, tu));
    CHECK(equals(compose(s, tu), RationalMap::normalize(u * compose(s, s).num(), compose(s, s).den())));
  }
}

TEST_CASE("two-torsion targets") {
  auto t1 = two_torsion_targets(EllipticCurveCM::E1());
  REQUIRE(t1.size() == 4);
  CHECK(t1[0].is_infinity());
  CHECK(t1[1] == ProjPoint::affine(q(0, 1)));
  CHECK(t1[2] == ProjPoint::affine(i1));
  CHECK(t1[3] == ProjPoint::affine(-i1));
  auto t2 = two_torsion_targets(EllipticCurveCM::E2());
  CHECK(t2[1] == ProjPoint::affine(q(-1, 3)));
  CHECK(t2[2] == ProjPoint::affine(rho));
  CHECK(t2[3] == ProjPoint::affine(q(1, 3) - rho));
  // x^3 + 2 over Q(i) does not split
  EllipticCurveCM bad(P({q(2), q(0), q(0), q(1)}, 1), 1, 1.0);
  CHECK_THROWS_AS(two_torsion_targets(bad), ArithmeticError);
}

TEST_CASE("ramification profiles") {
  const auto e1 = EllipticCurveCM::E1();
  CHECK(ramification_profile(catalog("phi_2@E1"), e1).sorted() == Counts{2, 2, 2, 4});
  CHECK(ramification_profile(catalog("phi_2@E1"), e1).counts[0] == 4);
  CHECK(ramification_profile(catalog("phi_1+2i"), e1).sorted() == Counts{3, 3, 3, 3});
  CHECK(ramification_profile(catalog("phi_1+i"), e1).counts == Counts{2, 2, 1, 1});
  CHECK(ramification_profile(catalog("phi_3@E1"), e1).sorted() == Counts{5, 5, 5, 5});
  CHECK(ramification_profile(catalog("phi_sqrt-3"), EllipticCurveCM::E2()).sorted() == Counts{2, 2, 2, 2});
  // N = 5: each target has one simple and two double preimages
  for (const ProjPoint& t : two_torsion_targets(e1))
    CHECK(preimage_multiplicities(catalog("phi_1+2i"), t) == std::vector<int>{1, 2, 2});
}

TEST_CASE("table prediction") {
  CHECK(predict_profile({q(3, 1), 1}).counts == Counts{5, 5, 5, 5});
  CHECK(predict_profile({q(2, 1), 1}).counts == Counts{4, 2, 2, 2});
  CHECK(predict_profile({q(1) + i1, 1}).counts == Counts{1, 2, 1, 2});
  CHECK(predict_profile({q(1) + q(2) * i1, 1}).counts == Counts{3, 3, 3, 3});
  CHECK(predict_profile({q(4, 1), 1}).counts == Counts{10, 8, 8, 8});
  CHECK(predict_profile({q(3) + q(3) * i1, 1}).counts == Counts{9, 10, 9, 10});
  CHECK(table_row({w3, 3}) == 1);
  CHECK_THROWS_AS(predict_profile({w3 * rho, 3}), NoTableRow);
  CHECK_THROWS_AS(predict_profile({q(0, 1), 1}), NoTableRow);
}

TEST_CASE("computed profiles match the table as multisets") {
  struct Case {
    const char* map;
    Multiplier m;
  };
  for (const Case& c : {Case{"phi_2@E1", {q(2, 1), 1}}, Case{"phi_1+2i", {q(1) + q(2) * i1, 1}},
                        Case{"phi_3@E1", {q(3, 1), 1}}, Case{"phi_1+i", {q(1) + i1, 1}},
                        Case{"phi_2+i", {q(2) + i1, 1}}, Case{"phi_sqrt-3", {w3, 3}},
                        Case{"phi_2@E2", {q(2, 3), 3}}, Case{"phi_3@E2", {q(3, 3), 3}}}) {
    auto curve = EllipticCurveCM::by_name(catalog_entry(c.map).curve);
    CHECK_MESSAGE(ramification_profile(catalog(c.map), curve).same_multiset(predict_profile(c.m)), c.map);
  }
}

TEST_CASE("critical values of Lattes maps are two-torsion images") {
  for (const CatalogEntry& e : catalog_entries()) {
    if (e.curve.empty() || e.name == "phi_sqrt-3*rho" || e.name == "phi_eps") continue;
    auto curve = EllipticCurveCM::by_name(e.curve);
    int total = 0;
    for (const ProjPoint& t : two_torsion_targets(curve)) total += e.map.degree() - distinct_preimages(e.map, t);
    CHECK_MESSAGE(total == 2 * e.map.degree() - 2, e.name);
  }
}
