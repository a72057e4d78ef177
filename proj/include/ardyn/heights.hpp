// Naive and canonical heights of points of P^1 over Q, Q(i), Q(sqrt(-3)).
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ardyn/lattes.hpp"
#include "ardyn/rat_map.hpp"

namespace ardyn {

struct Place {
  enum class Kind { archimedean, finite };
  Kind kind = Kind::archimedean;
  /// Rational prime p (finite places of Q only).
  std::optional<BigInt> prime;
  /// N_v = [K_v : Q_w].
  int local_degree = 1;
};

struct HeightValue {
  double value = 0.0;
  int iterations_used = 0;
  double error_bound = 0.0;
  /// Set when error_bound rests on an empirical constant rather than a proven one.
  bool heuristic = false;
};

struct PlaceTerm {
  Place place;
  /// N_v * log max(|x|_v, |y|_v).
  double value = 0.0;
};

struct PlaceDecomposition {
  HeightValue height;
  std::vector<PlaceTerm> terms;
};

/// log of a positive big integer, accurate for any size.
double log_abs(const BigInt& n);
double log_abs(const BigRational& r);

/// (1/[K:Q]) sum_v N_v log max(|x|_v, |y|_v). Evaluated on the coprime
/// integral representative, where only the archimedean place contributes:
/// h = log max(|x|, |y|) = 1/2 log max(N x, N y).
HeightValue naive_height(const ProjPoint& p);

/// Height of a projective vector (c_0 : ... : c_m), same conventions.
double naive_height(const std::vector<QuadNumber>& coords);

/// The same height for a point of P^1(Q) with integral coordinates, summed
/// place by place without reducing first: the archimedean term plus
/// -min(v_p(x), v_p(y)) log p for each prime dividing both coordinates.
PlaceDecomposition naive_height_by_places(const ProjPoint& p);

/// Explicit C with |h(f(Q)) - deg f * h(Q)| <= C for all Q in P^1(Kbar).
struct HeightDifferenceBound {
  /// h(coefficients of the integral lift) + log(deg + 1).
  double upper = 0.0;
  /// From the Sylvester solution of A F0 + B F1 = x^(2 deg - 1), y^(2 deg - 1).
  double lower = 0.0;
  double constant() const { return std::max(upper, lower); }
};
HeightDifferenceBound height_difference_bound(const RationalMap& f);

class HeightBudgetExceeded : public std::runtime_error {
 public:
  HeightBudgetExceeded(const std::string& what, HeightValue partial) : std::runtime_error(what), partial_(partial) {}
  const HeightValue& partial() const { return partial_; }

 private:
  HeightValue partial_;
};

struct CanonicalHeightOptions {
  double target_error = 1e-10;
  int iteration_budget = 200;
};

/// lim h(f^n P)/deg^n. The n-th term is computed exactly as an archimedean
/// escape rate of the integral lift minus the finite contents of the iterates;
/// the contents divide Res(F0, F1), so the orbit is followed modulo a power of
/// the resultant instead of in full. n is the least count whose geometric tail
/// C/((deg-1) deg^n) is below half the target. Throws HeightBudgetExceeded when
/// the budget is too small.
HeightValue canonical_height(const RationalMap& f, const ProjPoint& p, const CanonicalHeightOptions& opts = {});
HeightValue canonical_height(const RationalMap& f, const ProjPoint& p, double target_error);

/// h(f^n P)/deg^n by exact iteration with gcd reduction. Coordinates grow like
/// deg^n digits; meant for small n.
double tate_term_exact(const RationalMap& f, const ProjPoint& p, int n);

/// Canonical height of the point with x-coordinate x on the curve, through the
/// curve's doubling map. Equals the Neron-Tate height in the normalization
/// attached to the x-coordinate.
HeightValue neron_tate(const EllipticCurveCM& curve, const ProjPoint& x, const CanonicalHeightOptions& opts = {});

}  // namespace ardyn
