// CM elliptic curves, their Lattes maps on P^1, and ramification profiles.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ardyn/rat_map.hpp"

namespace ardyn {

/// y^2 = G(x) with G a monic squarefree cubic over Q(sqrt(-d)), d in {1, 3}.
class EllipticCurveCM {
 public:
  EllipticCurveCM(Poly G, int d, double tau_im, std::string name = "");

  /// y^2 = x^3 + x, CM by Z[i], square lattice.
  static EllipticCurveCM E1();
  /// y^2 = x^3 + 1, CM by Z[rho], hexagonal lattice.
  static EllipticCurveCM E2();
  /// Looks up "E1" / "E2".
  static EllipticCurveCM by_name(std::string_view name);

  const Poly& G() const { return G_; }
  int field() const { return d_; }
  double tau_im() const { return tau_im_; }
  const std::string& name() const { return name_; }

 private:
  Poly G_;
  int d_;
  double tau_im_;
  std::string name_;
};

/// ((G')^2 - 8 z G) / (4 G): the map induced by [2].
RationalMap lattes_double(const EllipticCurveCM& curve);

/// Map induced by [n], n >= 2, from division polynomials
/// x([n]P) = x - psi_{n-1} psi_{n+1} / psi_n^2. Requires G = x^3 + a x + b.
RationalMap lattes_multiply(const EllipticCurveCM& curve, int n);

/// {infinity} followed by the roots of G in the coefficient field: rational
/// roots first, then by decreasing imaginary part. Throws when G does not split.
std::vector<ProjPoint> two_torsion_targets(const EllipticCurveCM& curve);

struct RamificationProfile {
  /// r_0..r_3: distinct preimage counts over the images of the 2-torsion points.
  std::array<int, 4> counts{};

  std::array<int, 4> sorted() const;
  bool same_multiset(const RamificationProfile& other) const { return sorted() == other.sorted(); }
};

/// Counts at two_torsion_targets(curve), in that order.
RamificationProfile ramification_profile(const RationalMap& map, const EllipticCurveCM& curve);

/// lambda = a + b sqrt(-d) acting on a curve with CM by O_K.
struct Multiplier {
  QuadNumber lambda;
  int d = 1;
};

/// Thrown when no row of the ramification table applies; carries the parity
/// signature of (a, b, d, N(lambda)).
class NoTableRow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The tabulated (r_0, r_1, r_2, r_3) for lambda.
RamificationProfile predict_profile(const Multiplier& m);
/// Index (1-based) of the table row used by predict_profile.
int table_row(const Multiplier& m);

struct CatalogEntry {
  std::string name;
  RationalMap map;
  /// Curve the map is attached to ("E1"/"E2"), empty for power maps.
  std::string curve;
  /// The multiplier lambda, when the map is labelled by one.
  std::optional<QuadNumber> lambda;
};

class UnknownMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every named map: the displayed E1 and E2 maps, [2] and [3] on both curves
/// and pow_2, pow_3, pow_5. Further pow_k (2 <= k <= 16) resolve by name.
const std::vector<CatalogEntry>& catalog_entries();
CatalogEntry catalog_entry(std::string_view name);
RationalMap catalog(std::string_view name);
/// Catalog map for lambda on the curve (lambda or -lambda), if any.
std::optional<CatalogEntry> catalog_for(const Multiplier& m);

}  // namespace ardyn
