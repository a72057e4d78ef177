// Exact arithmetic in Q, Q(i) and Q(sqrt(-3)).
#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ardyn {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Raised for arithmetic that has no value: division by zero, mixing two
/// different quadratic fields, non-integral input to ring operations.
class ArithmeticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the coefficient parser; `position()` is the 0-based offset of the
/// offending character in the input string.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Element a + b*sqrt(-d) of Q (d = 0), Q(i) (d = 1) or Q(sqrt(-3)) (d = 3).
///
/// A value with d = 0 is a plain rational and combines with elements of either
/// quadratic field; the result carries the nonzero tag. Values are immutable and
/// always canonically reduced (mpq canonical form).
class QuadNumber {
 public:
  QuadNumber() = default;
  QuadNumber(long n) : a_(n) {}  // NOLINT(google-explicit-constructor)
  explicit QuadNumber(BigRational a, int d = 0);
  QuadNumber(BigRational a, BigRational b, int d);

  /// sqrt(-d) in the field with tag d (d must be 1 or 3).
  static QuadNumber root(int d);
  /// rho = (1 + sqrt(-3))/2.
  static QuadNumber rho();

  int field() const { return d_; }
  const BigRational& re_part() const { return a_; }
  const BigRational& root_part() const { return b_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }
  /// Membership in the ring of integers: Z, Z[i] or Z[rho].
  bool is_integral() const;

  QuadNumber conj() const { return QuadNumber(a_, -b_, d_); }
  /// a^2 + d b^2, i.e. |x|^2 under the complex embedding with sqrt(-d) = i sqrt(d).
  BigRational norm() const;
  QuadNumber inverse() const;
  /// Same value, re-tagged into field d (only from d = 0, or to the same tag).
  QuadNumber in_field(int d) const;

  double real() const { return a_.get_d(); }
  double imag() const;

  friend QuadNumber operator+(const QuadNumber& x, const QuadNumber& y);
  friend QuadNumber operator-(const QuadNumber& x, const QuadNumber& y);
  friend QuadNumber operator*(const QuadNumber& x, const QuadNumber& y);
  friend QuadNumber operator/(const QuadNumber& x, const QuadNumber& y);
  QuadNumber operator-() const { return QuadNumber(-a_, -b_, d_); }
  QuadNumber& operator+=(const QuadNumber& y) { return *this = *this + y; }
  QuadNumber& operator-=(const QuadNumber& y) { return *this = *this - y; }
  QuadNumber& operator*=(const QuadNumber& y) { return *this = *this * y; }
  QuadNumber& operator/=(const QuadNumber& y) { return *this = *this / y; }

  /// Value equality; a rational compares equal to the same rational in any field.
  friend bool operator==(const QuadNumber& x, const QuadNumber& y);

  /// Canonical text in the coefficient grammar, e.g. "-1/2+1/2*w", "3", "2*w".
  std::string str() const;

 private:
  int d_ = 0;
  BigRational a_{0};
  BigRational b_{0};
};

/// Common field tag of two values; throws ArithmeticError when they disagree.
int common_field(int d1, int d2);
void check_field_tag(int d);

/// Parses the coefficient grammar: rationals `p/q`, terms `c*w`, `w`, sums and
/// differences of those, whitespace-insensitive. `w` denotes sqrt(-d) and is
/// rejected when d = 0.
QuadNumber parse_quad(std::string_view text, int d);

/// Element of the ring of integers O_K. Construction checks membership.
class Integral {
 public:
  explicit Integral(QuadNumber x);
  Integral(long n, int d) : Integral(QuadNumber(BigRational(n), d)) {}

  const QuadNumber& value() const { return x_; }
  int field() const { return x_.field(); }
  /// Norm as a rational integer (a^2 + d b^2).
  BigInt norm() const;
  bool is_zero() const { return x_.is_zero(); }
  bool is_unit() const;

  friend bool operator==(const Integral& x, const Integral& y) { return x.x_ == y.x_; }

 private:
  QuadNumber x_;
};

/// Euclidean division in O_K: x = q*y + r with norm(r) < norm(y).
std::pair<Integral, Integral> divmod(const Integral& x, const Integral& y);

/// True iff y divides x in O_K.
bool divides(const Integral& y, const Integral& x);

/// All units of O_K for field tag d: {+-1}, {+-1, +-i} or the sixth roots of unity.
std::vector<QuadNumber> units(int d);

/// Associate of x with argument in [0, 2pi/|units|): positive for Z, first
/// quadrant (excluding the imaginary axis) for Z[i], [0, pi/3) for Z[rho].
Integral unit_normalize(const Integral& x);

/// Generator of the ideal (x, y), unit-normalized. Throws when both are zero.
Integral integral_gcd(const Integral& x, const Integral& y);

/// Least positive integer m such that m*x is integral (denominator of x).
BigInt denominator(const QuadNumber& x);

}  // namespace ardyn
