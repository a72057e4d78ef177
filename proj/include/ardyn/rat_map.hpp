// Rational self-maps of P^1 over Q, Q(i), Q(sqrt(-3)).
#pragma once

#include <string>
#include <vector>

#include "ardyn/poly.hpp"

namespace ardyn {

/// Point (x : y) of P^1(K). Equality is projective.
class ProjPoint {
 public:
  ProjPoint(QuadNumber x, QuadNumber y);
  static ProjPoint affine(const QuadNumber& z) { return ProjPoint(z, QuadNumber(BigRational(1), z.field())); }
  static ProjPoint infinity(int d = 0) { return ProjPoint(QuadNumber(BigRational(1), d), QuadNumber(BigRational(0), d)); }

  const QuadNumber& x() const { return x_; }
  const QuadNumber& y() const { return y_; }
  int field() const { return common_field(x_.field(), y_.field()); }
  bool is_infinity() const { return y_.is_zero(); }

  /// Representative with coprime coordinates in O_K, the gcd unit-normalized.
  ProjPoint reduced() const;

  friend bool operator==(const ProjPoint& p, const ProjPoint& q);
  std::string str() const;

 private:
  QuadNumber x_, y_;
};

/// Coprime homogeneous pair (num, den) defining a map of P^1 of degree >= 1.
///
/// Canonical form: when deg den >= 1 the denominator is monic; otherwise the
/// numerator is monic and the denominator is the remaining nonzero constant.
class RationalMap {
 public:
  static RationalMap normalize(const Poly& num, const Poly& den);
  static RationalMap identity(int d = 0);
  static RationalMap power(int k, int d = 0);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  int degree() const { return degree_; }
  int field() const { return common_field(num_.field(), den_.field()); }

  /// (F0(x,y), F1(x,y)) with F0(x,y) = y^deg num(x/y), F1 likewise.
  ProjPoint operator()(const ProjPoint& p) const;
  /// Homogeneous evaluation without reduction.
  std::pair<QuadNumber, QuadNumber> lift(const QuadNumber& x, const QuadNumber& y) const;

  /// Coefficients of the homogeneous lift in the monomials x^k y^(deg-k), k = 0..deg.
  std::vector<QuadNumber> lift_coeffs(int which) const;

  std::string str() const;

 private:
  RationalMap(Poly num, Poly den, int degree) : num_(std::move(num)), den_(std::move(den)), degree_(degree) {}

  Poly num_, den_;
  int degree_ = 1;
};

RationalMap compose(const RationalMap& f, const RationalMap& g);
/// f^n (n >= 1).
RationalMap iterate(const RationalMap& f, int n);
bool equals(const RationalMap& f, const RationalMap& g);
bool commute_check(const RationalMap& f, const RationalMap& g);

/// ty*F0 - tx*F1 dehomogenized at y = 1; its roots (plus infinity when its
/// degree drops below deg f) are the solutions of f(z) = t.
Poly preimage_polynomial(const RationalMap& f, const ProjPoint& t);
/// Number of distinct z in P^1(Kbar) with f(z) = t.
int distinct_preimages(const RationalMap& f, const ProjPoint& t);
/// Ramification indices of the preimages of t, sorted ascending; sums to deg f.
std::vector<int> preimage_multiplicities(const RationalMap& f, const ProjPoint& t);

/// Reduced quotient of polynomials; may be constant, unlike RationalMap.
struct PolyFraction {
  Poly num;
  Poly den;
  QuadNumber operator()(const QuadNumber& z) const { return num(z) / den(z); }
};

/// f' by the quotient rule, with the common factor divided out.
PolyFraction map_derivative(const RationalMap& f);

}  // namespace ardyn
