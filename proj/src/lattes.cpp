#include "ardyn/lattes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ardyn {

namespace {

QuadNumber q(long n, int d = 0) { return QuadNumber(BigRational(n), d); }

Poly P(std::initializer_list<QuadNumber> c, int d) { return Poly(std::vector<QuadNumber>(c), d); }

}  // namespace

EllipticCurveCM::EllipticCurveCM(Poly G, int d, double tau_im, std::string name)
    : G_(G.in_field(d)), d_(d), tau_im_(tau_im), name_(std::move(name)) {
  if (d != 1 && d != 3) throw ArithmeticError("CM curves are supported over d = 1 or d = 3");
  if (G_.degree() != 3 || !(G_.leading() == q(1))) throw ArithmeticError("G must be a monic cubic");
  if (poly_gcd(G_, G_.derivative()).degree() > 0) throw ArithmeticError("G is not squarefree (singular curve)");
  if (!(tau_im > 0)) throw ArithmeticError("Im(tau) must be positive");
}

EllipticCurveCM EllipticCurveCM::E1() { return EllipticCurveCM(P({q(0), q(1), q(0), q(1)}, 1), 1, 1.0, "E1"); }

EllipticCurveCM EllipticCurveCM::E2() { return EllipticCurveCM(P({q(1), q(0), q(0), q(1)}, 3), 3, std::sqrt(3.0) / 2, "E2"); }

EllipticCurveCM EllipticCurveCM::by_name(std::string_view name) {
  if (name == "E1") return E1();
  if (name == "E2") return E2();
  throw UnknownMapError("unknown curve '" + std::string(name) + "' (valid: E1, E2)");
}

RationalMap lattes_double(const EllipticCurveCM& curve) {
  const Poly& G = curve.G();
  Poly Gp = G.derivative();
  Poly num = Gp * Gp - q(8) * (Poly::identity(curve.field()) * G);
  return RationalMap::normalize(num, q(4) * G);
}

namespace {

// psi_n = f * y^ypow, with y^2 replaced by G.
struct YPoly {
  Poly f;
  int ypow = 0;
};

YPoly mul(const YPoly& u, const YPoly& v, const Poly& G) {
  Poly f = u.f * v.f;
  int y = u.ypow + v.ypow;
  if (y == 2) {
    f = f * G;
    y = 0;
  }
  return {f, y};
}

YPoly sub(const YPoly& u, const YPoly& v) {
  if (u.f.is_zero()) return {-v.f, v.ypow};
  if (v.f.is_zero()) return u;
  if (u.ypow != v.ypow) throw ArithmeticError("division polynomial parity mismatch");
  return {u.f - v.f, u.ypow};
}

std::vector<YPoly> division_polynomials(const Poly& G, int n_max) {
  int d = G.field();
  QuadNumber a = G[1], b = G[0];
  Poly x = Poly::identity(d);
  std::vector<YPoly> psi(static_cast<std::size_t>(std::max(n_max, 4)) + 1);
  psi[0] = {Poly({}, d), 0};
  psi[1] = {Poly::constant(q(1), d), 0};
  psi[2] = {Poly::constant(q(2), d), 1};
  psi[3] = {P({-(a * a), q(12) * b, q(6) * a, q(0), q(3)}, d), 0};
  psi[4] = {q(4) * P({-q(8) * b * b - a * a * a, -q(4) * a * b, -q(5) * a * a, q(20) * b, q(5) * a, q(0), q(1)}, d), 1};
  auto cube = [&](const YPoly& u) { return mul(mul(u, u, G), u, G); };
  auto sq = [&](const YPoly& u) { return mul(u, u, G); };
  for (int n = 5; n <= n_max; ++n) {
    std::size_t m = static_cast<std::size_t>(n / 2);
    if (n % 2 == 1) {
      psi[static_cast<std::size_t>(n)] = sub(mul(psi[m + 2], cube(psi[m]), G), mul(psi[m - 1], cube(psi[m + 1]), G));
    } else {
      YPoly inner = sub(mul(psi[m + 2], sq(psi[m - 1]), G), mul(psi[m - 2], sq(psi[m + 1]), G));
      YPoly t = mul(psi[m], inner, G);
      // t / (2y) = y * t / (2G)
      if (t.ypow != 0) throw ArithmeticError("division polynomial parity mismatch");
      auto [quo, rem] = divmod(t.f, q(2) * G);
      if (!rem.is_zero()) throw ArithmeticError("division polynomial recurrence is not exact");
      psi[static_cast<std::size_t>(n)] = {quo, 1};
    }
  }
  return psi;
}

}  // namespace

RationalMap lattes_multiply(const EllipticCurveCM& curve, int n) {
  if (n < 2) throw ArithmeticError("lattes_multiply needs n >= 2");
  const Poly& G = curve.G();
  if (!G[2].is_zero()) throw ArithmeticError("division polynomials need G = x^3 + a x + b");
  auto psi = division_polynomials(G, n + 1);
  const std::size_t k = static_cast<std::size_t>(n);
  YPoly sq = mul(psi[k], psi[k], G);
  YPoly cross = mul(psi[k - 1], psi[k + 1], G);
  Poly num = Poly::identity(curve.field()) * sq.f - cross.f;
  return RationalMap::normalize(num, sq.f);
}

namespace {

// Roots of a monic polynomial with O_K coefficients that lie in O_K.
std::vector<QuadNumber> integral_roots(Poly f) {
  int d = f.field();
  std::vector<QuadNumber> roots;
  while (f.degree() >= 1) {
    if (f[0].is_zero()) {
      roots.push_back(q(0, d));
      f = divmod(f, Poly::identity(d)).first;
      continue;
    }
    for (const QuadNumber& c : f.coeffs())
      if (!c.is_integral()) throw ArithmeticError("two-torsion search needs integral coefficients");
    // a root divides the constant term, so its norm is at most N(f(0))
    BigInt bound_norm = f[0].norm().get_num();
    long bound = static_cast<long>(std::sqrt(bound_norm.get_d())) + 1;
    bool found = false;
    for (long m = -2 * bound; m <= 2 * bound && !found; ++m) {
      for (long nn = -2 * bound; nn <= 2 * bound && !found; ++nn) {
        QuadNumber cand = d == 3 ? QuadNumber(BigRational(m, 2), BigRational(nn, 2), 3)
                                 : QuadNumber(BigRational(m), BigRational(nn), d);
        if (!cand.is_integral() || cand.norm() > bound_norm) continue;
        if (f(cand).is_zero()) {
          roots.push_back(cand);
          f = divmod(f, Poly({-cand, q(1, d)}, d)).first;
          found = true;
        }
      }
    }
    if (!found) throw ArithmeticError("G does not split over Q(sqrt(-" + std::to_string(d) + ")); supply an extension");
  }
  return roots;
}

}  // namespace

std::vector<ProjPoint> two_torsion_targets(const EllipticCurveCM& curve) {
  std::vector<QuadNumber> roots = integral_roots(curve.G());
  std::sort(roots.begin(), roots.end(), [](const QuadNumber& u, const QuadNumber& v) {
    if (u.is_rational() != v.is_rational()) return u.is_rational();
    if (u.root_part() != v.root_part()) return u.root_part() > v.root_part();
    return u.re_part() < v.re_part();
  });
  std::vector<ProjPoint> out{ProjPoint::infinity(curve.field())};
  for (const QuadNumber& r : roots) out.push_back(ProjPoint::affine(r));
  return out;
}

std::array<int, 4> RamificationProfile::sorted() const {
  std::array<int, 4> s = counts;
  std::sort(s.begin(), s.end());
  return s;
}

RamificationProfile ramification_profile(const RationalMap& map, const EllipticCurveCM& curve) {
  std::vector<ProjPoint> targets = two_torsion_targets(curve);
  RamificationProfile p;
  for (std::size_t j = 0; j < 4; ++j) p.counts[j] = distinct_preimages(map, targets[j]);
  return p;
}

namespace {

bool odd(const BigInt& v) { return mpz_odd_p(v.get_mpz_t()) != 0; }

struct Parity {
  BigInt a, b, n;
};

Parity parity_data(const Multiplier& m) {
  const QuadNumber& l = m.lambda;
  auto signature = [&] {
    std::ostringstream os;
    os << "lambda=" << l.str() << " d=" << m.d << " N=" << l.norm();
    return os.str();
  };
  if (l.re_part().get_den() != 1 || l.root_part().get_den() != 1)
    throw NoTableRow("no table row for non-integer coordinates (" + signature() + ")");
  return {l.re_part().get_num(), l.root_part().get_num(), l.norm().get_num()};
}

}  // namespace

int table_row(const Multiplier& m) {
  auto [a, b, n] = parity_data(m);
  BigInt bd = b * m.d;
  if (odd(a + bd)) return 1;
  if (!odd(a) && !odd(b)) {
    if (n > 4) return 2;
    if (n == 4) return 3;
  }
  if (odd(a) && odd(bd)) {
    if (n == 2) return 4;
    if (n > 2) return 5;
  }
  std::ostringstream os;
  os << "no table row matches: a mod 2 = " << (odd(a) ? 1 : 0) << ", b mod 2 = " << (odd(b) ? 1 : 0)
     << ", bd mod 2 = " << (odd(bd) ? 1 : 0) << ", N = " << n;
  throw NoTableRow(os.str());
}

RamificationProfile predict_profile(const Multiplier& m) {
  int row = table_row(m);
  int n = static_cast<int>(m.lambda.norm().get_num().get_si());
  switch (row) {
    case 1:
      return {{(n + 1) / 2, (n + 1) / 2, (n + 1) / 2, (n + 1) / 2}};
    case 2:
      return {{n / 2 + 2, n / 2, n / 2, n / 2}};
    case 3:
      return {{4, n / 2, n / 2, n / 2}};
    case 4:
      return {{1, n, 1, n}};
    default:
      return {{n / 2, n / 2 + 1, n / 2, n / 2 + 1}};
  }
}

namespace {

std::vector<CatalogEntry> build_catalog() {
  const QuadNumber i = QuadNumber::root(1);
  const QuadNumber w = QuadNumber::root(3);
  const QuadNumber rho = QuadNumber::rho();
  const Poly z1 = Poly::identity(1);
  std::vector<CatalogEntry> out;

  const QuadNumber c1 = (q(1) + i) * (q(1) + i);
  const Poly zz1 = P({q(1), q(0), q(1)}, 1);
  out.push_back({"phi_1+i", RationalMap::normalize(zz1, c1 * z1), "E1", q(1) + i});
  out.push_back({"phi_1-i", RationalMap::normalize(-zz1, c1 * z1), "E1", q(1) - i});

  // z (z^2 + 1 +- 2i)^2 over (5 z^2 + 1 -+ 2i)^2
  auto quintic = [&](const QuadNumber& lead, const QuadNumber& s) {
    Poly top = lead * (z1 * P({q(1) + s, q(0), q(1)}, 1).pow(2));
    Poly bottom = P({q(1) - s, q(0), q(5)}, 1).pow(2);
    return RationalMap::normalize(top, bottom);
  };
  const QuadNumber two_i = q(2) * i;
  out.push_back({"phi_1+2i", quintic(q(-3) - q(4) * i, two_i), "E1", q(1) + two_i});
  out.push_back({"phi_1-2i", quintic(q(3) + q(4) * i, two_i), "E1", q(1) - two_i});
  out.push_back({"phi_2+i", quintic(q(3) - q(4) * i, -two_i), "E1", q(2) + i});
  out.push_back({"phi_2-i", quintic(q(-3) + q(4) * i, -two_i), "E1", q(2) - i});

  const EllipticCurveCM e1 = EllipticCurveCM::E1(), e2 = EllipticCurveCM::E2();
  out.push_back({"phi_2@E1", lattes_double(e1), "E1", q(2, 1)});
  out.push_back({"phi_3@E1", lattes_multiply(e1, 3), "E1", q(3, 1)});

  // -(z^3 + 4) / (3 z^2) and its rho-multiple
  const Poly cubic = P({q(4), q(0), q(0), q(1)}, 3);
  const Poly z2 = P({q(0), q(0), q(3)}, 3);
  out.push_back({"phi_sqrt-3", RationalMap::normalize(-cubic, z2), "E2", w});
  out.push_back({"phi_sqrt-3*rho", RationalMap::normalize(-rho * cubic, z2), "E2", w * rho});
  // (z^9 - 96 z^6 + 48 z^3 + 64) / (9 rho z^2 (z^3 + 4)^2)
  const Poly nonic = P({q(64), q(0), q(0), q(48), q(0), q(0), q(-96), q(0), q(0), q(1)}, 3);
  const Poly eps_den = (q(9) * rho) * (P({q(0), q(0), q(1)}, 3) * cubic.pow(2));
  const QuadNumber eps = (q(3) - q(3) * w) / q(2);
  out.push_back({"phi_eps", RationalMap::normalize(nonic, eps_den), "E2", eps});
  out.push_back({"phi_2@E2", lattes_double(e2), "E2", q(2, 3)});
  out.push_back({"phi_3@E2", lattes_multiply(e2, 3), "E2", q(3, 3)});

  for (int k : {2, 3, 5}) out.push_back({"pow_" + std::to_string(k), RationalMap::power(k), "", std::nullopt});
  return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

CatalogEntry catalog_entry(std::string_view name) {
  for (const CatalogEntry& e : catalog_entries())
    if (e.name == name) return e;
  if (name.substr(0, 4) == "pow_") {
    std::string digits(name.substr(4));
    if (!digits.empty() && digits.size() <= 2 && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      int k = std::stoi(digits);
      if (k >= 2 && k <= 16) return {std::string(name), RationalMap::power(k), "", std::nullopt};
    }
  }
  std::string valid;
  for (const CatalogEntry& e : catalog_entries()) valid += (valid.empty() ? "" : ", ") + e.name;
  throw UnknownMapError("unknown map '" + std::string(name) + "'; valid names: " + valid + ", pow_k (2 <= k <= 16)");
}

RationalMap catalog(std::string_view name) { return catalog_entry(name).map; }

std::optional<CatalogEntry> catalog_for(const Multiplier& m) {
  std::string curve = m.d == 1 ? "E1" : "E2";
  for (const CatalogEntry& e : catalog_entries()) {
    if (e.curve != curve || !e.lambda) continue;
    if (*e.lambda == m.lambda || *e.lambda == -m.lambda) return e;
  }
  return std::nullopt;
}

}  // namespace ardyn
