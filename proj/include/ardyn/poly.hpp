// Dense univariate polynomials over Q, Q(i), Q(sqrt(-3)).
#pragma once

#include <vector>

#include "ardyn/exact_arith.hpp"

namespace ardyn {

class Poly {
 public:
  Poly() = default;
  /// Coefficients lowest degree first; trailing zeros are trimmed.
  explicit Poly(std::vector<QuadNumber> coeffs, int d = 0);
  static Poly constant(const QuadNumber& c, int d = 0) { return Poly({c}, d); }
  /// The polynomial z.
  static Poly identity(int d = 0) { return Poly({QuadNumber(0), QuadNumber(1)}, d); }
  static Poly monomial(const QuadNumber& c, int k, int d = 0);

  int field() const { return d_; }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<QuadNumber>& coeffs() const { return c_; }
  /// Coefficient of z^k (zero beyond the degree).
  QuadNumber operator[](int k) const;
  QuadNumber leading() const;

  Poly in_field(int d) const;
  Poly monic() const;
  Poly derivative() const;
  QuadNumber operator()(const QuadNumber& z) const;
  /// Substitutes a polynomial: this(g(z)).
  Poly compose(const Poly& g) const;
  Poly pow(int k) const;

  friend Poly operator+(const Poly& f, const Poly& g);
  friend Poly operator-(const Poly& f, const Poly& g);
  friend Poly operator*(const Poly& f, const Poly& g);
  friend Poly operator*(const QuadNumber& c, const Poly& f);
  Poly operator-() const;
  friend bool operator==(const Poly& f, const Poly& g);

  std::string str(char var = 'z') const;

 private:
  void trim();

  int d_ = 0;
  std::vector<QuadNumber> c_;
};

/// Division with remainder over the field: f = q*g + r, deg r < deg g.
std::pair<Poly, Poly> divmod(const Poly& f, const Poly& g);
/// Monic gcd; throws ArithmeticError when both are zero.
Poly poly_gcd(const Poly& f, const Poly& g);
/// Squarefree factorization (Yun): pairs (factor, multiplicity), factors monic,
/// squarefree and pairwise coprime.
std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f);
/// Number of distinct roots over the algebraic closure.
int distinct_root_count(const Poly& f);

}  // namespace ardyn
