#include "ardyn/exact_arith.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace ardyn {

void check_field_tag(int d) {
  if (d != 0 && d != 1 && d != 3)
    throw ArithmeticError("unsupported field tag d=" + std::to_string(d) + " (expected 0, 1 or 3)");
}

int common_field(int d1, int d2) {
  if (d1 == d2 || d2 == 0) return d1;
  if (d1 == 0) return d2;
  throw ArithmeticError("mismatched fields: d=" + std::to_string(d1) + " and d=" + std::to_string(d2));
}

QuadNumber::QuadNumber(BigRational a, int d) : d_(d), a_(std::move(a)) {
  check_field_tag(d);
  a_.canonicalize();
}

QuadNumber::QuadNumber(BigRational a, BigRational b, int d) : d_(d), a_(std::move(a)), b_(std::move(b)) {
  check_field_tag(d);
  a_.canonicalize();
  b_.canonicalize();
  if (d == 0 && sgn(b_) != 0) throw ArithmeticError("nonzero sqrt(-d) part in Q");
}

QuadNumber QuadNumber::root(int d) {
  if (d != 1 && d != 3) throw ArithmeticError("sqrt(-d) needs d in {1,3}");
  return QuadNumber(0, 1, d);
}

QuadNumber QuadNumber::rho() { return QuadNumber(BigRational(1, 2), BigRational(1, 2), 3); }

bool QuadNumber::is_integral() const {
  if (d_ == 3) {
    BigRational a2 = a_ * 2, b2 = b_ * 2;
    if (a2.get_den() != 1 || b2.get_den() != 1) return false;
    BigInt diff = a2.get_num() - b2.get_num();
    return mpz_even_p(diff.get_mpz_t()) != 0;
  }
  return a_.get_den() == 1 && b_.get_den() == 1;
}

BigRational QuadNumber::norm() const { return a_ * a_ + d_ * b_ * b_; }

double QuadNumber::imag() const { return b_.get_d() * std::sqrt(static_cast<double>(d_)); }

QuadNumber QuadNumber::inverse() const {
  if (is_zero()) throw ArithmeticError("division by zero");
  BigRational n = norm();
  return QuadNumber(a_ / n, -b_ / n, d_);
}

QuadNumber QuadNumber::in_field(int d) const {
  int c = common_field(d_, d);
  if (c != d) throw ArithmeticError("cannot move a value of Q(sqrt(-" + std::to_string(d_) + ")) into d=" + std::to_string(d));
  return QuadNumber(a_, b_, d);
}

QuadNumber operator+(const QuadNumber& x, const QuadNumber& y) {
  return QuadNumber(x.a_ + y.a_, x.b_ + y.b_, common_field(x.d_, y.d_));
}

QuadNumber operator-(const QuadNumber& x, const QuadNumber& y) {
  return QuadNumber(x.a_ - y.a_, x.b_ - y.b_, common_field(x.d_, y.d_));
}

QuadNumber operator*(const QuadNumber& x, const QuadNumber& y) {
  int d = common_field(x.d_, y.d_);
  return QuadNumber(x.a_ * y.a_ - d * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, d);
}

QuadNumber operator/(const QuadNumber& x, const QuadNumber& y) {
  common_field(x.d_, y.d_);
  return x * y.inverse();
}

bool operator==(const QuadNumber& x, const QuadNumber& y) {
  if (x.d_ != y.d_ && x.d_ != 0 && y.d_ != 0) return false;
  return x.a_ == y.a_ && x.b_ == y.b_;
}

std::string QuadNumber::str() const {
  std::ostringstream os;
  if (sgn(b_) == 0) {
    os << a_;
    return os.str();
  }
  if (sgn(a_) != 0) {
    os << a_;
    if (sgn(b_) > 0) os << '+';
  }
  if (b_ == 1) {
    os << 'w';
  } else if (b_ == -1) {
    os << "-w";
  } else {
    os << b_ << "*w";
  }
  return os.str();
}

namespace {

struct Scanner {
  std::vector<std::pair<char, std::size_t>> chars;
  std::size_t i = 0;
  std::size_t end_position = 0;

  explicit Scanner(std::string_view text) : end_position(text.size()) {
    for (std::size_t k = 0; k < text.size(); ++k)
      if (!std::isspace(static_cast<unsigned char>(text[k]))) chars.emplace_back(text[k], k);
  }
  bool done() const { return i >= chars.size(); }
  char peek() const { return done() ? '\0' : chars[i].first; }
  std::size_t pos() const { return done() ? end_position : chars[i].second; }

  BigInt integer() {
    std::string digits;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) digits += chars[i++].first;
    if (digits.empty()) throw ParseError("expected digits", pos());
    return BigInt(digits);
  }
};

}  // namespace

QuadNumber parse_quad(std::string_view text, int d) {
  check_field_tag(d);
  Scanner s(text);
  if (s.done()) throw ParseError("empty coefficient", 0);
  BigRational a(0), b(0);
  bool first = true;
  while (!s.done()) {
    int sign = 1;
    if (s.peek() == '+' || s.peek() == '-') {
      sign = s.peek() == '-' ? -1 : 1;
      ++s.i;
    } else if (!first) {
      throw ParseError("expected '+' or '-'", s.pos());
    }
    first = false;
    BigRational c(1);
    bool has_number = false;
    if (std::isdigit(static_cast<unsigned char>(s.peek()))) {
      has_number = true;
      BigInt p = s.integer();
      BigInt q(1);
      if (s.peek() == '/') {
        ++s.i;
        std::size_t at = s.pos();
        q = s.integer();
        if (q == 0) throw ParseError("zero denominator", at);
      }
      c = BigRational(p, q);
      c.canonicalize();
    }
    bool has_w = false;
    if (has_number && s.peek() == '*') {
      ++s.i;
      if (s.peek() != 'w') throw ParseError("expected 'w' after '*'", s.pos());
    }
    if (s.peek() == 'w') {
      if (d == 0) throw ParseError("'w' is not available over Q (d=0)", s.pos());
      has_w = true;
      ++s.i;
    }
    if (!has_number && !has_w) throw ParseError("expected a number or 'w'", s.pos());
    (has_w ? b : a) += sign * c;
  }
  return QuadNumber(a, b, d);
}

Integral::Integral(QuadNumber x) : x_(std::move(x)) {
  if (!x_.is_integral()) throw ArithmeticError("not an algebraic integer: " + x_.str());
}

BigInt Integral::norm() const {
  BigRational n = x_.norm();
  return n.get_num();
}

bool Integral::is_unit() const { return norm() == 1; }

namespace {

BigInt round_nearest(const BigRational& q) {
  // floor(q + 1/2)
  BigRational t = q + BigRational(1, 2);
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  return r;
}

BigInt floor_of(const BigRational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

// Element of O_K closest to q (norm of the difference < 1).
QuadNumber nearest_integral(const QuadNumber& q) {
  int d = q.field();
  if (d != 3) return QuadNumber(BigRational(round_nearest(q.re_part())), BigRational(round_nearest(q.root_part())), d);
  // O_K = {(m + n sqrt(-3))/2 : m = n mod 2}
  BigRational s2 = q.re_part() * 2, t2 = q.root_part() * 2;
  QuadNumber best;
  BigRational best_norm(-1);
  BigInt n0 = floor_of(t2);
  for (BigInt n = n0; n <= n0 + 1; ++n) {
    BigInt m0 = floor_of(s2);
    for (BigInt m = m0 - 1; m <= m0 + 2; ++m) {
      BigInt diff = m - n;
      if (!mpz_even_p(diff.get_mpz_t())) continue;
      QuadNumber cand(BigRational(m, 2), BigRational(n, 2), 3);
      BigRational nr = (q - cand).norm();
      if (best_norm < 0 || nr < best_norm) {
        best_norm = nr;
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace

std::pair<Integral, Integral> divmod(const Integral& x, const Integral& y) {
  if (y.is_zero()) throw ArithmeticError("division by zero");
  QuadNumber q = nearest_integral(x.value() / y.value());
  QuadNumber r = x.value() - q * y.value();
  return {Integral(q), Integral(r)};
}

bool divides(const Integral& y, const Integral& x) {
  if (y.is_zero()) return x.is_zero();
  return (x.value() / y.value()).is_integral();
}

std::vector<QuadNumber> units(int d) {
  check_field_tag(d);
  if (d == 0) return {QuadNumber(1), QuadNumber(-1)};
  if (d == 1) return {QuadNumber(1, 0, 1), QuadNumber(0, 1, 1), QuadNumber(-1, 0, 1), QuadNumber(0, -1, 1)};
  std::vector<QuadNumber> out;
  QuadNumber u(1, 0, 3);
  for (int k = 0; k < 6; ++k) {
    out.push_back(u);
    u *= QuadNumber::rho();
  }
  return out;
}

Integral unit_normalize(const Integral& x) {
  if (x.is_zero()) return x;
  int d = x.field();
  for (const QuadNumber& u : units(d)) {
    QuadNumber c = x.value() * u;
    const BigRational& a = c.re_part();
    const BigRational& b = c.root_part();
    bool ok = false;
    if (d == 0) ok = sgn(a) > 0;
    if (d == 1) ok = sgn(a) > 0 && sgn(b) >= 0;
    // arg in [0, pi/3): imag >= 0 and sqrt(3) b < sqrt(3) a
    if (d == 3) ok = sgn(b) >= 0 && b < a;
    if (ok) return Integral(c);
  }
  throw ArithmeticError("unit normalization failed for " + x.value().str());
}

Integral integral_gcd(const Integral& x, const Integral& y) {
  if (x.is_zero() && y.is_zero()) throw ArithmeticError("gcd(0, 0) is undefined");
  int d = common_field(x.field(), y.field());
  Integral a(x.value().in_field(d)), b(y.value().in_field(d));
  while (!b.is_zero()) {
    Integral r = divmod(a, b).second;
    a = b;
    b = r;
  }
  return unit_normalize(a);
}

BigInt denominator(const QuadNumber& x) {
  BigInt l = lcm(x.re_part().get_den(), x.root_part().get_den());
  if (x.field() == 3 && mpz_even_p(l.get_mpz_t())) {
    BigInt half = l / 2;
    if ((x * QuadNumber(BigRational(half))).is_integral()) return half;
  }
  return l;
}

}  // namespace ardyn
