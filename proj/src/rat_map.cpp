#include "ardyn/rat_map.hpp"

#include <algorithm>

namespace ardyn {

ProjPoint::ProjPoint(QuadNumber x, QuadNumber y) : x_(std::move(x)), y_(std::move(y)) {
  int d = common_field(x_.field(), y_.field());
  x_ = x_.in_field(d);
  y_ = y_.in_field(d);
  if (x_.is_zero() && y_.is_zero()) throw ArithmeticError("(0 : 0) is not a point of P^1");
}

ProjPoint ProjPoint::reduced() const {
  BigInt m = lcm(denominator(x_), denominator(y_));
  QuadNumber scale(BigRational(m), field());
  Integral X(x_ * scale), Y(y_ * scale);
  QuadNumber g = integral_gcd(X, Y).value();
  QuadNumber rx = X.value() / g, ry = Y.value() / g;
  // fix the remaining unit so that the representative is deterministic
  const QuadNumber& key = ry.is_zero() ? rx : ry;
  QuadNumber u = unit_normalize(Integral(key)).value() / key;
  return ProjPoint(rx * u, ry * u);
}

bool operator==(const ProjPoint& p, const ProjPoint& q) { return p.x_ * q.y_ == q.x_ * p.y_; }

std::string ProjPoint::str() const { return "(" + x_.str() + " : " + y_.str() + ")"; }

RationalMap RationalMap::normalize(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw ArithmeticError("zero denominator polynomial");
  int d = common_field(num.field(), den.field());
  Poly n = num.in_field(d), m = den.in_field(d);
  if (n.is_zero()) throw ArithmeticError("constant map 0 has degree 0");
  Poly g = poly_gcd(n, m);
  n = divmod(n, g).first;
  m = divmod(m, g).first;
  int degree = std::max(n.degree(), m.degree());
  if (degree < 1) throw ArithmeticError("constant map has degree 0");
  QuadNumber scale = m.degree() >= 1 ? m.leading().inverse() : n.leading().inverse();
  return RationalMap(scale * n, scale * m, degree);
}

RationalMap RationalMap::identity(int d) { return normalize(Poly::identity(d), Poly::constant(QuadNumber(1), d)); }

RationalMap RationalMap::power(int k, int d) {
  if (k < 1) throw ArithmeticError("power map needs k >= 1");
  return normalize(Poly::monomial(QuadNumber(1), k, d), Poly::constant(QuadNumber(1), d));
}

std::pair<QuadNumber, QuadNumber> RationalMap::lift(const QuadNumber& x, const QuadNumber& y) const {
  int d = common_field(field(), common_field(x.field(), y.field()));
  // powers of x and y up to the degree
  std::vector<QuadNumber> xp{QuadNumber(BigRational(1), d)}, yp{QuadNumber(BigRational(1), d)};
  for (int k = 1; k <= degree_; ++k) {
    xp.push_back(xp.back() * x);
    yp.push_back(yp.back() * y);
  }
  QuadNumber f0(BigRational(0), d), f1(BigRational(0), d);
  for (int k = 0; k <= degree_; ++k) {
    QuadNumber mono = xp[static_cast<std::size_t>(k)] * yp[static_cast<std::size_t>(degree_ - k)];
    if (!num_[k].is_zero()) f0 += num_[k] * mono;
    if (!den_[k].is_zero()) f1 += den_[k] * mono;
  }
  return {f0, f1};
}

ProjPoint RationalMap::operator()(const ProjPoint& p) const {
  auto [f0, f1] = lift(p.x(), p.y());
  return ProjPoint(f0, f1).reduced();
}

std::vector<QuadNumber> RationalMap::lift_coeffs(int which) const {
  const Poly& p = which == 0 ? num_ : den_;
  std::vector<QuadNumber> out;
  for (int k = 0; k <= degree_; ++k) out.push_back(p[k]);
  return out;
}

std::string RationalMap::str() const { return "(" + num_.str() + ")/(" + den_.str() + ")"; }

RationalMap compose(const RationalMap& f, const RationalMap& g) {
  int d = common_field(f.field(), g.field());
  const int a = f.degree();
  std::vector<Poly> pp{Poly::constant(QuadNumber(1), d)}, qp{Poly::constant(QuadNumber(1), d)};
  for (int k = 1; k <= a; ++k) {
    pp.push_back(pp.back() * g.num());
    qp.push_back(qp.back() * g.den());
  }
  Poly num({}, d), den({}, d);
  for (int k = 0; k <= a; ++k) {
    Poly mono = pp[static_cast<std::size_t>(k)] * qp[static_cast<std::size_t>(a - k)];
    num = num + f.num()[k] * mono;
    den = den + f.den()[k] * mono;
  }
  return RationalMap::normalize(num, den);
}

RationalMap iterate(const RationalMap& f, int n) {
  if (n < 1) throw ArithmeticError("iterate needs n >= 1");
  RationalMap r = f;
  for (int k = 1; k < n; ++k) r = compose(f, r);
  return r;
}

bool equals(const RationalMap& f, const RationalMap& g) {
  common_field(f.field(), g.field());
  return f.num() * g.den() == g.num() * f.den();
}

bool commute_check(const RationalMap& f, const RationalMap& g) { return equals(compose(f, g), compose(g, f)); }

Poly preimage_polynomial(const RationalMap& f, const ProjPoint& t) {
  return t.y() * f.num() - t.x() * f.den();
}

int distinct_preimages(const RationalMap& f, const ProjPoint& t) {
  Poly h = preimage_polynomial(f, t);
  return distinct_root_count(h) + (h.degree() < f.degree() ? 1 : 0);
}

std::vector<int> preimage_multiplicities(const RationalMap& f, const ProjPoint& t) {
  Poly h = preimage_polynomial(f, t);
  std::vector<int> out;
  for (const auto& [factor, k] : squarefree_decomposition(h))
    for (int i = 0; i < factor.degree(); ++i) out.push_back(k);
  if (h.degree() < f.degree()) out.push_back(f.degree() - h.degree());
  std::sort(out.begin(), out.end());
  return out;
}

PolyFraction map_derivative(const RationalMap& f) {
  Poly num = f.num().derivative() * f.den() - f.num() * f.den().derivative();
  Poly den = f.den() * f.den();
  if (num.is_zero()) return {num, Poly::constant(QuadNumber(1), den.field())};
  Poly g = poly_gcd(num, den);
  return {divmod(num, g).first, divmod(den, g).first};
}

}  // namespace ardyn
