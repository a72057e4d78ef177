#include "ardyn/poly.hpp"

#include <sstream>

namespace ardyn {

Poly::Poly(std::vector<QuadNumber> coeffs, int d) : d_(d), c_(std::move(coeffs)) {
  for (const QuadNumber& c : c_) d_ = common_field(d_, c.field());
  for (QuadNumber& c : c_) c = c.in_field(d_);
  trim();
}

Poly Poly::monomial(const QuadNumber& c, int k, int d) {
  std::vector<QuadNumber> v(static_cast<std::size_t>(k) + 1, QuadNumber(0));
  v.back() = c;
  return Poly(std::move(v), d);
}

void Poly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

QuadNumber Poly::operator[](int k) const {
  if (k < 0 || k > degree()) return QuadNumber(BigRational(0), d_);
  return c_[static_cast<std::size_t>(k)];
}

QuadNumber Poly::leading() const {
  if (is_zero()) throw ArithmeticError("leading coefficient of the zero polynomial");
  return c_.back();
}

Poly Poly::in_field(int d) const {
  std::vector<QuadNumber> v;
  v.reserve(c_.size());
  for (const QuadNumber& c : c_) v.push_back(c.in_field(d));
  return Poly(std::move(v), d);
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  return leading().inverse() * *this;
}

Poly Poly::derivative() const {
  std::vector<QuadNumber> v;
  for (int k = 1; k <= degree(); ++k) v.push_back(c_[static_cast<std::size_t>(k)] * QuadNumber(k));
  return Poly(std::move(v), d_);
}

QuadNumber Poly::operator()(const QuadNumber& z) const {
  QuadNumber acc(BigRational(0), common_field(d_, z.field()));
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly Poly::compose(const Poly& g) const {
  int d = common_field(d_, g.d_);
  Poly acc({}, d);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * g + Poly::constant(*it, d);
  return acc;
}

Poly Poly::pow(int k) const {
  Poly result = Poly::constant(QuadNumber(1), d_);
  Poly base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

Poly operator+(const Poly& f, const Poly& g) {
  int d = common_field(f.d_, g.d_);
  std::vector<QuadNumber> v(std::max(f.c_.size(), g.c_.size()), QuadNumber(BigRational(0), d));
  for (std::size_t i = 0; i < f.c_.size(); ++i) v[i] += f.c_[i];
  for (std::size_t i = 0; i < g.c_.size(); ++i) v[i] += g.c_[i];
  return Poly(std::move(v), d);
}

Poly Poly::operator-() const {
  std::vector<QuadNumber> v;
  v.reserve(c_.size());
  for (const QuadNumber& c : c_) v.push_back(-c);
  return Poly(std::move(v), d_);
}

Poly operator-(const Poly& f, const Poly& g) { return f + (-g); }

Poly operator*(const Poly& f, const Poly& g) {
  int d = common_field(f.d_, g.d_);
  if (f.is_zero() || g.is_zero()) return Poly({}, d);
  std::vector<QuadNumber> v(f.c_.size() + g.c_.size() - 1, QuadNumber(BigRational(0), d));
  for (std::size_t i = 0; i < f.c_.size(); ++i) {
    if (f.c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < g.c_.size(); ++j) v[i + j] += f.c_[i] * g.c_[j];
  }
  return Poly(std::move(v), d);
}

Poly operator*(const QuadNumber& c, const Poly& f) { return Poly::constant(c, f.d_) * f; }

bool operator==(const Poly& f, const Poly& g) {
  if (f.c_.size() != g.c_.size()) return false;
  for (std::size_t i = 0; i < f.c_.size(); ++i)
    if (!(f.c_[i] == g.c_[i])) return false;
  return true;
}

std::string Poly::str(char var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const QuadNumber& c = c_[static_cast<std::size_t>(k)];
    if (c.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    bool unit = c == QuadNumber(1);
    if (!unit || k == 0) os << (c.is_rational() ? c.str() : "(" + c.str() + ")");
    if (k > 0) {
      if (!unit) os << '*';
      os << var;
      if (k > 1) os << '^' << k;
    }
  }
  return os.str();
}

std::pair<Poly, Poly> divmod(const Poly& f, const Poly& g) {
  if (g.is_zero()) throw ArithmeticError("polynomial division by zero");
  int d = common_field(f.field(), g.field());
  Poly r = f.in_field(d);
  std::vector<QuadNumber> q(static_cast<std::size_t>(std::max(0, f.degree() - g.degree() + 1)), QuadNumber(BigRational(0), d));
  QuadNumber inv = g.leading().inverse();
  while (!r.is_zero() && r.degree() >= g.degree()) {
    int shift = r.degree() - g.degree();
    QuadNumber c = r.leading() * inv;
    q[static_cast<std::size_t>(shift)] = c;
    r = r - Poly::monomial(c, shift, d) * g;
  }
  return {Poly(std::move(q), d), r};
}

Poly poly_gcd(const Poly& f, const Poly& g) {
  if (f.is_zero() && g.is_zero()) throw ArithmeticError("gcd(0, 0) is undefined");
  Poly a = f, b = g;
  while (!b.is_zero()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f) {
  std::vector<std::pair<Poly, int>> out;
  if (f.degree() < 1) return out;
  Poly fp = f.derivative();
  Poly a = poly_gcd(f, fp);
  Poly b = divmod(f, a).first;
  Poly c = divmod(fp, a).first;
  Poly dd = c - b.derivative();
  for (int k = 1; b.degree() >= 1; ++k) {
    Poly g = poly_gcd(b, dd);
    if (g.degree() >= 1) out.emplace_back(g.monic(), k);
    b = divmod(b, g).first;
    c = divmod(dd, g).first;
    dd = c - b.derivative();
  }
  return out;
}

int distinct_root_count(const Poly& f) {
  if (f.degree() < 1) return 0;
  return f.degree() - poly_gcd(f, f.derivative()).degree();
}

}  // namespace ardyn
