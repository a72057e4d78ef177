// Archimedean numerics: Green's functions, canonical measures, preimage
// sampling, periodic points and rasters.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ardyn/lattes.hpp"
#include "ardyn/rat_map.hpp"

namespace ardyn {

using Complex = std::complex<double>;

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complex embedding with sqrt(-d) -> i sqrt(d).
Complex embed(const QuadNumber& x);

/// Homogeneous pair (F0, F1) of degree d over C; coefficient k multiplies x^k y^(d-k).
class Lift {
 public:
  Lift(std::vector<Complex> f0, std::vector<Complex> f1);
  /// Coefficients of the normalized map, verbatim.
  static Lift from_map(const RationalMap& f);
  /// Lift of z^d, i.e. (x^d, y^d).
  static Lift power(int d);

  int degree() const { return degree_; }
  const std::vector<Complex>& f0() const { return f0_; }
  const std::vector<Complex>& f1() const { return f1_; }
  /// c*F: the same map with another isomorphism.
  Lift scaled(Complex c) const;
  std::pair<Complex, Complex> operator()(Complex x, Complex y) const;

 private:
  std::vector<Complex> f0_, f1_;
  int degree_;
};

/// Norm on C^2 the iteration starts from: the sup norm, the Euclidean
/// (Fubini-Study) norm, or `scale` times the sup norm.
struct StartMetric {
  enum class Kind { sup, euclidean, scaled };
  Kind kind = Kind::sup;
  double scale = 1.0;
};

/// G_n(x, y) = d^-n log ||F^n(x, y)||, renormalized to unit sup norm after every step.
double green_homogeneous(const Lift& lift, Complex x, Complex y, int n, StartMetric metric = {});
/// G_n(z, 1).
double green(const Lift& lift, Complex z, int n, StartMetric metric = {});

struct Window {
  double x0 = -2, x1 = 2, y0 = -2, y1 = 2;
  double dx(int nx) const { return (x1 - x0) / nx; }
  double dy(int ny) const { return (y1 - y0) / ny; }
  /// Center of cell (i, j); row j runs along the imaginary axis from y0 upward.
  Complex center(int i, int j, int nx, int ny) const {
    return {x0 + (i + 0.5) * dx(nx), y0 + (j + 0.5) * dy(ny)};
  }
};

struct GreenField {
  Window window;
  int nx = 0, ny = 0;
  int iterations = 0;
  std::vector<double> values;  // row-major, values[j*nx + i]
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

/// Green's function sampled at the cell centers. Rows are split over threads;
/// each value is computed independently, so the result does not depend on the
/// thread count.
GreenField green_field(const Lift& lift, const Window& w, int nx, int ny, int n, StartMetric metric = {});

struct DensityGrid {
  Window window;
  int nx = 0, ny = 0;
  std::vector<double> mass;  // row-major, sums to 1
  /// Share of the full measure that falls in the window, when known.
  double window_fraction = 1.0;
  double at(int i, int j) const { return mass[static_cast<std::size_t>(j) * nx + i]; }
  double total() const;
};

/// (1/2pi) times the five-point Laplacian of g times the cell area, clamped
/// at zero, boundary cells zeroed, normalized to unit mass.
DensityGrid measure_from_green(const GreenField& field);

/// All complex roots of sum c_k z^k (c ordered by increasing degree), by
/// Aberth-Ehrlich iteration followed by Newton polishing. Each root satisfies
/// |p(r)| <= 1e-10 * sum |c_k| max(1, |r|)^k.
std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs);

struct ComplexSampleSet {
  std::vector<Complex> points;
  /// Copies of the point at infinity in the generation.
  std::size_t infinity_count = 0;
  std::uint64_t seed = 0;
  int depth = 0;
  std::size_t size() const { return points.size() + infinity_count; }
};

struct PreimageOptions {
  /// Preimages kept per point; 0 keeps all deg of them. Fewer are drawn at
  /// random with the seeded generator.
  int branches = 0;
  /// Upper bound on the size of the last generation.
  std::size_t max_points = std::size_t{1} << 22;
};

/// Generation `depth` of the backward orbit of seed_point (std::nullopt is
/// infinity), with multiplicity. Targets of modulus > 2 are solved in the
/// chart 1/t, roots of modulus > 2 are polished in the chart 1/z.
ComplexSampleSet preimage_sample(const RationalMap& f, std::optional<Complex> seed_point, int depth, std::uint64_t seed,
                                 const PreimageOptions& opts = {});

/// Histogram of the finite points inside the window, normalized to unit mass;
/// window_fraction is the share of all points (infinity included) inside.
DensityGrid histogram(const ComplexSampleSet& s, const Window& w, int nx, int ny);

/// 1/|G| evaluated at z, up to the normalizing constant.
double lattes_density_at(const EllipticCurveCM& curve, Complex z);
/// Integral of 1/|G| over C: adaptive midpoint rule on [-8, 8]^2 plus the
/// exact tail of |z|^-3 outside the square.
double lattes_total_mass(const EllipticCurveCM& curve);
/// Cell masses of |G|^-1 dA; cells containing a root of G are integrated on a
/// 4x4 subgrid. Normalized to unit mass over the window.
DensityGrid lattes_density(const EllipticCurveCM& curve, const Window& w, int nx, int ny);
/// Cells that contain a root of G or touch such a cell.
std::vector<bool> singular_cells(const EllipticCurveCM& curve, const Window& w, int nx, int ny);

/// Sums factor x factor blocks; nx and ny must be multiples of factor.
DensityGrid coarsen(const DensityGrid& g, int factor);

/// 1/2 sum |a - b|.
double compare_l1(const DensityGrid& a, const DensityGrid& b);
/// Pearson correlation of the masses, skipping cells where skip is true.
double correlation(const DensityGrid& a, const DensityGrid& b, const std::vector<bool>& skip = {});

struct PeriodicPoint {
  std::optional<Complex> z;  // nullopt is infinity
  Complex multiplier;
  bool repelling() const { return std::abs(multiplier) > 1.0; }
};

/// Fixed points of f^n with multiplicity: roots of num_n - z den_n, and
/// infinity when that polynomial has degree below deg f^n + 1.
std::vector<PeriodicPoint> periodic_points(const RationalMap& f, int n);

struct Alignment {
  double mean = 0.0;
  double stddev = 0.0;
};
/// Mean and standard deviation of a - b over the grid.
Alignment align_fields(const GreenField& a, const GreenField& b);

struct Image {
  int width = 0, height = 0;
  int channels = 1;  // 1: PGM, 3: PPM
  std::vector<std::uint8_t> pixels;
  std::vector<std::string> comments;
  void write(const std::string& path) const;
};

enum class RasterMode { measure, green };

/// Grayscale raster, top row at the largest imaginary part. In measure mode
/// cells carrying mass are dark on a log scale; in green mode g is mapped
/// linearly from black (minimum) to white (maximum). color=true emits RGB.
Image julia_raster(const GreenField& field, RasterMode mode = RasterMode::measure, bool color = false);
Image julia_raster(const RationalMap& f, const Window& w, int nx, int ny, int n, RasterMode mode = RasterMode::measure,
                   bool color = false);

/// Row-major CSV, first row at y0.
void write_csv(const DensityGrid& grid, const std::string& path);
void write_csv(const GreenField& field, const std::string& path);
/// JSON metadata written next to a CSV export.
void write_sidecar(const DensityGrid& grid, const std::string& csv_path, const std::string& label);

}  // namespace ardyn
