#include "doctest.h"
#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ardyn/heights.hpp"
#include "ardyn/measures.hpp"

using namespace ardyn;

namespace {

const Window square3{-3, 3, -3, 3};

double ks_uniform_angles(const std::vector<Complex>& pts) {
  std::vector<double> u;
  for (Complex z : pts) u.push_back((std::arg(z) + std::numbers::pi) / (2 * std::numbers::pi));
  std::sort(u.begin(), u.end());
  double ks = 0;
  const double n = static_cast<double>(u.size());
  for (std::size_t k = 0; k < u.size(); ++k)
    ks = std::max({ks, std::fabs(u[k] - k / n), std::fabs(u[k] - (k + 1) / n)});
  return ks;
}

// (F0(z,1), F1(z,1)) as a point of P^1, nullopt at infinity
std::optional<Complex> map_point(const Lift& f, std::optional<Complex> z) {
  auto [a, b] = z ? f(*z, 1.0) : f(1.0, 0.0);
  if (std::abs(b) <= 1e-300 * std::abs(a)) return std::nullopt;
  return a / b;
}

ComplexSampleSet push_forward(const RationalMap& f, const ComplexSampleSet& s) {
  Lift lift = Lift::from_map(f);
  ComplexSampleSet out = s;
  out.points.clear();
  out.infinity_count = 0;
  auto add = [&](std::optional<Complex> w) {
    if (w) out.points.push_back(*w);
    else ++out.infinity_count;
  };
  for (Complex z : s.points) add(map_point(lift, z));
  for (std::size_t k = 0; k < s.infinity_count; ++k) add(map_point(lift, std::nullopt));
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("lifts") {
  Lift f = Lift::from_map(catalog("phi_2@E1"));
  CHECK(f.degree() == 4);
  auto [a, b] = f(2.0, 1.0);
  // (16 - 8 + 1)/4 over 8 + 2
  CHECK(std::abs(a - 9.0 / 4) < 1e-14);
  CHECK(std::abs(b - 10.0) < 1e-14);
  auto [c, e] = f(1.0, 0.0);
  CHECK(std::abs(c - 0.25) < 1e-15);
  CHECK(std::abs(e) < 1e-15);
  CHECK_THROWS_AS(Lift({1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}), NumericError);
  CHECK_THROWS_AS(Lift({0.0, 1.0}, {0.0, 2.0}), NumericError);
  CHECK_THROWS_AS(Lift({1.0}, {1.0}), NumericError);
}

TEST_CASE("green: power map closed form") {
  Lift sq = Lift::power(2);
  for (int n : {1, 5, 30}) CHECK(green(sq, 2.0, n) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  testing::Gen gen(3);
  for (int t = 0; t < 20; ++t) CHECK(std::fabs(green(sq, std::polar(1.0, gen.real(0, 7)), 30)) <= 1e-14);

  GreenField f = green_field(sq, Window{}, 64, 64, 20);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i)
      CHECK(std::fabs(f.at(i, j) - std::log(std::max(1.0, std::abs(f.window.center(i, j, 64, 64))))) <= 1e-12);

  // functional equation, homogeneous form G(F(P)) = d G(P)
  for (int t = 0; t < 100; ++t) {
    Complex z(gen.real(-3, 3), gen.real(-3, 3));
    auto [a, b] = sq(z, 1.0);
    CHECK(std::fabs(green_homogeneous(sq, a, b, 30) / 2 - green(sq, z, 30)) <= 1e-8);
  }
  CHECK_THROWS_AS(green(sq, 2.0, 0), NumericError);
  CHECK_THROWS_AS(green_homogeneous(sq, 0.0, 0.0, 3), NumericError);
}

TEST_CASE("green: functional equation on every catalog map") {
  testing::Gen gen(5);
  for (const CatalogEntry& e : catalog_entries()) {
    Lift f = Lift::from_map(e.map);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      Complex z(gen.real(-3, 3), gen.real(-3, 3));
      auto [a, b] = f(z, 1.0);
      worst = std::max(worst, std::fabs(green_homogeneous(f, a, b, 30) / f.degree() - green(f, z, 30)));
    }
    CHECK_MESSAGE(worst <= 1e-4, e.name);
  }
  // the dehomogenized form: g(phi(z)) + log|F1(z,1)| = d g(z)
  Lift f = Lift::from_map(catalog("phi_1+i"));
  for (int t = 0; t < 20; ++t) {
    Complex z(gen.real(-2, 2), gen.real(-2, 2));
    auto [a, b] = f(z, 1.0);
    CHECK(std::fabs(green(f, a / b, 30) + std::log(std::abs(b)) - 2 * green(f, z, 30)) <= 1e-4);
  }
}

TEST_CASE("green: refinement and starting metrics") {
  for (const char* name : {"phi_2@E1", "phi_1+2i", "phi_sqrt-3"}) {
    Lift f = Lift::from_map(catalog(name));
    const double d = f.degree();
    GreenField a = green_field(f, square3, 48, 48, 8), b = green_field(f, square3, 48, 48, 16);
    double change = 0;
    for (std::size_t k = 0; k < a.values.size(); ++k) change = std::max(change, std::fabs(a.values[k] - b.values[k]));
    double C = height_difference_bound(catalog(name)).constant();
    CHECK(change <= C / (std::pow(d, 8) * (d - 1)));

    // sup against Euclidean: the ratio of the two norms lies in [1, sqrt 2]
    for (int n : {3, 6}) {
      GreenField s = green_field(f, square3, 32, 32, n);
      GreenField e = green_field(f, square3, 32, 32, n, {StartMetric::Kind::euclidean});
      for (std::size_t k = 0; k < s.values.size(); ++k) {
        double diff = e.values[k] - s.values[k];
        CHECK(diff >= -1e-14);
        CHECK(diff <= 0.5 * std::log(2.0) / std::pow(d, n) + 1e-14);
      }
      // scaled start: exactly log(scale)/d^n
      GreenField sc = green_field(f, square3, 32, 32, n, {StartMetric::Kind::scaled, 5.0});
      for (std::size_t k = 0; k < s.values.size(); ++k)
        CHECK(std::fabs(sc.values[k] - s.values[k] - std::log(5.0) / std::pow(d, n)) <= 1e-13);
    }
  }
  // c F in place of F shifts g by log|c| (1 - d^-n)/(d - 1)
  Lift f = Lift::from_map(catalog("phi_2@E1"));
  Complex c(3.0, -1.0);
  for (int n : {4, 12}) {
    double shift = std::log(std::abs(c)) * (1 - std::pow(4.0, -n)) / 3;
    CHECK(std::fabs(green(f.scaled(c), 0.7, n) - green(f, 0.7, n) - shift) <= 1e-13);
  }
}

TEST_CASE("green: commuting maps agree up to a constant") {
  for (auto [p, q] : {std::pair{"phi_1+i", "phi_1-i"}, {"phi_2@E1", "phi_1+2i"}, {"phi_2@E1", "phi_1+i"}, {"pow_2", "pow_3"}}) {
    GreenField a = green_field(Lift::from_map(catalog(p)), square3, 64, 64, 30);
    GreenField b = green_field(Lift::from_map(catalog(q)), square3, 64, 64, 30);
    CHECK_MESSAGE(align_fields(a, b).stddev <= 1e-3, p, " ", q);
  }
  // a non-commuting pair differs by more than a constant
  GreenField a = green_field(Lift::from_map(catalog("phi_2@E1")), square3, 64, 64, 30);
  GreenField b = green_field(Lift::power(2), square3, 64, 64, 30);
  CHECK(align_fields(a, b).stddev > 0.05);
}

TEST_CASE("measure from green") {
  GreenField f = green_field(Lift::power(2), Window{}, 256, 256, 30);
  DensityGrid m = measure_from_green(f);
  CHECK(std::fabs(m.total() - 1) <= 1e-9);
  double ring = 0;
  for (int j = 0; j < 256; ++j)
    for (int i = 0; i < 256; ++i) {
      double r = std::abs(f.window.center(i, j, 256, 256));
      if (r >= 0.9 && r <= 1.1) ring += m.at(i, j);
    }
  CHECK(ring >= 0.95);
  for (double v : m.mass) CHECK(v >= 0.0);
  for (int i = 0; i < 256; ++i) {
    CHECK(m.at(i, 0) == 0.0);
    CHECK(m.at(0, i) == 0.0);
  }

  auto e1 = EllipticCurveCM::E1();
  GreenField g = green_field(Lift::from_map(catalog("phi_2@E1")), square3, 128, 128, 30);
  DensityGrid lm = measure_from_green(g);
  CHECK(correlation(lm, lattes_density(e1, square3, 128, 128), singular_cells(e1, square3, 128, 128)) >= 0.9);

  GreenField flat{Window{}, 40, 40, 1, std::vector<double>(1600, 0.25)};
  CHECK_THROWS_AS(measure_from_green(flat), NumericError);
  GreenField small{Window{}, 16, 16, 1, std::vector<double>(256, 0.0)};
  CHECK_THROWS_AS(measure_from_green(small), NumericError);
}

TEST_CASE("poly_roots") {
  auto near = [](const std::vector<Complex>& roots, Complex z) {
    return std::any_of(roots.begin(), roots.end(), [&](Complex r) { return std::abs(r - z) < 1e-12; });
  };
  auto r = poly_roots({-1.0, 0.0, 1.0});
  REQUIRE(r.size() == 2);
  CHECK(near(r, 1.0));
  CHECK(near(r, -1.0));
  r = poly_roots({0.0, 1.0, 0.0, 1.0});
  CHECK(near(r, 0.0));
  CHECK(near(r, Complex(0, 1)));
  CHECK(near(r, Complex(0, -1)));
  CHECK(poly_roots({3.0, 2.0})[0] == Complex(-1.5));

  testing::Gen gen(11);
  for (int t = 0; t < 50; ++t) {
    std::vector<Complex> p;
    for (int k = 0; k <= 9; ++k) p.emplace_back(gen.real(-1, 1), gen.real(-1, 1));
    double norm = 0;
    for (Complex c : p) norm += std::abs(c);
    for (Complex z : poly_roots(p)) {
      Complex v = 0;
      for (std::size_t k = p.size(); k-- > 0;) v = v * z + p[k];
      double scale = 0;
      for (std::size_t k = 0; k < p.size(); ++k) scale += std::abs(p[k]) * std::pow(std::max(1.0, std::abs(z)), k);
      CHECK(std::abs(v) <= 1e-10 * scale);
    }
  }
  // repeated roots still meet the residual bound
  CHECK(poly_roots({1.0, -3.0, 3.0, -1.0}).size() == 3);
  CHECK_THROWS_AS(poly_roots({1.0}), NumericError);
  CHECK_THROWS_AS(poly_roots({1.0, 2.0, 0.0}), NumericError);
}

TEST_CASE("preimage samples of z^2 are Haar distributed") {
  ComplexSampleSet s = preimage_sample(RationalMap::power(2), Complex(2.0), 10, 0);
  CHECK(s.size() == 1024);
  CHECK(s.infinity_count == 0);
  CHECK(ks_uniform_angles(s.points) <= 0.05);
  for (Complex z : s.points) CHECK(std::fabs(std::abs(z) - std::pow(2.0, 1.0 / 1024)) <= 1e-12);

  ComplexSampleSet zero = preimage_sample(RationalMap::power(2), Complex(0.3, 0.1), 0, 7);
  REQUIRE(zero.points.size() == 1);
  CHECK(zero.points[0] == Complex(0.3, 0.1));

  CHECK_THROWS_AS(preimage_sample(RationalMap::power(2), std::nullopt, 4, 0), NumericError);
  CHECK_THROWS_AS(preimage_sample(RationalMap::power(2), Complex(0.0), 4, 0), NumericError);
  CHECK_THROWS_AS(preimage_sample(RationalMap::power(2), Complex(2.0), 30, 0), NumericError);
  // 0 and infinity swap under 1/z^2
  RationalMap inv = RationalMap::normalize(Poly::constant(QuadNumber(1)), Poly::monomial(QuadNumber(1), 2));
  CHECK_THROWS_AS(preimage_sample(inv, Complex(0.0), 3, 0), NumericError);
  CHECK_THROWS_AS(preimage_sample(inv, std::nullopt, 3, 0), NumericError);
  CHECK(preimage_sample(inv, Complex(0.5), 3, 0).size() == 8);
}

TEST_CASE("preimage samples of phi_2 follow 1/|z^3 + z|") {
  auto e1 = EllipticCurveCM::E1();
  ComplexSampleSet s = preimage_sample(catalog("phi_2@E1"), Complex(2.0), 9, 0);
  CHECK(s.size() == 262144);
  DensityGrid h = histogram(s, square3, 64, 64);
  DensityGrid ld = lattes_density(e1, square3, 64, 64);
  CHECK(compare_l1(h, ld) <= 0.15);
  CHECK(correlation(h, ld, singular_cells(e1, square3, 64, 64)) >= 0.9);
  // the share of samples in the window matches the share of the density's mass
  CHECK(std::fabs(h.window_fraction - ld.window_fraction) <= 0.02);

  // infinity is not exceptional for a Lattes map and is a fine seed
  ComplexSampleSet inf = preimage_sample(catalog("phi_2@E1"), std::nullopt, 6, 0);
  CHECK(inf.size() == 4096);
}

TEST_CASE("pushforward invariance") {
  for (const char* name : {"phi_2@E1", "phi_1+i", "phi_sqrt-3"}) {
    RationalMap f = catalog(name);
    int depth = static_cast<int>(std::ceil(18 / std::log2(f.degree())));
    ComplexSampleSet s = preimage_sample(f, Complex(0.7, 0.2), depth, 0);
    CHECK(s.size() == static_cast<std::size_t>(std::pow(f.degree(), depth)));
    CHECK_MESSAGE(compare_l1(histogram(s, square3, 32, 32), histogram(push_forward(f, s), square3, 32, 32)) <= 0.05, name);
  }
}

TEST_CASE("branch selection is seeded") {
  PreimageOptions opts;
  opts.branches = 2;
  RationalMap f = catalog("phi_2@E1");
  ComplexSampleSet a = preimage_sample(f, Complex(2.0), 10, 42, opts);
  ComplexSampleSet b = preimage_sample(f, Complex(2.0), 10, 42, opts);
  ComplexSampleSet c = preimage_sample(f, Complex(2.0), 10, 43, opts);
  CHECK(a.size() == 1024);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
  CHECK(a.seed == 42);
}

TEST_CASE("two constructions of the z^2 measure agree") {
  DensityGrid h = histogram(preimage_sample(RationalMap::power(2), Complex(2.0), 12, 0), Window{}, 64, 64);
  DensityGrid m = coarsen(measure_from_green(green_field(Lift::power(2), Window{}, 256, 256, 30)), 4);
  CHECK(compare_l1(h, m) <= 0.1);
}

TEST_CASE("Lattes density") {
  auto e1 = EllipticCurveCM::E1(), e2 = EllipticCurveCM::E2();
  DensityGrid a = lattes_density(e1, square3, 64, 64);
  CHECK(std::fabs(a.total() - 1) <= 1e-9);
  CHECK(a.window_fraction > 0.5);
  CHECK(a.window_fraction < 1.0);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) CHECK(std::fabs(a.at(i, j) - a.at(63 - i, 63 - j)) <= 1e-15);

  // rotation by rho^2 = exp(2 pi i / 3)
  const int n = 256;
  DensityGrid b = lattes_density(e2, square3, n, n);
  CHECK(std::fabs(b.total() - 1) <= 1e-9);
  const Complex rot = std::polar(1.0, 2 * std::numbers::pi / 3);
  const double h = square3.dx(n);
  double worst = 0, top = *std::max_element(b.mass.begin(), b.mass.end());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Complex z = square3.center(i, j, n, n);
      if (std::abs(z) > 2.5 || std::fabs(std::abs(z) - 1) < 0.2) continue;
      // bilinear interpolation at the rotated center
      Complex w = z * rot;
      double fx = (w.real() - square3.x0) / h - 0.5, fy = (w.imag() - square3.y0) / h - 0.5;
      int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
      double tx = fx - ix, ty = fy - iy;
      double v = (1 - tx) * (1 - ty) * b.at(ix, iy) + tx * (1 - ty) * b.at(ix + 1, iy) + (1 - tx) * ty * b.at(ix, iy + 1) +
                 tx * ty * b.at(ix + 1, iy + 1);
      worst = std::max(worst, std::fabs(v - b.at(i, j)) / top);
    }
  CHECK(worst <= 1e-3);

  CHECK(lattes_density_at(e1, 2.0) == doctest::Approx(0.1));
  double total = lattes_total_mass(e1);
  CHECK(total > 10);
  CHECK(total == doctest::Approx(lattes_total_mass(e1)));
}

TEST_CASE("compare_l1 and coarsen") {
  DensityGrid a{Window{}, 2, 1, {1.0, 0.0}}, b{Window{}, 2, 1, {0.0, 1.0}};
  CHECK(compare_l1(a, a) == 0.0);
  CHECK(compare_l1(a, b) == 1.0);
  DensityGrid c{Window{}, 1, 2, {0.5, 0.5}};
  CHECK_THROWS_AS(compare_l1(a, c), NumericError);
  DensityGrid g{Window{}, 4, 4, std::vector<double>(16, 1.0 / 16)};
  DensityGrid q = coarsen(g, 2);
  CHECK(q.nx == 2);
  CHECK(q.at(1, 1) == doctest::Approx(0.25));
  CHECK_THROWS_AS(coarsen(g, 3), NumericError);
}

TEST_CASE("periodic points") {
  auto fixed = periodic_points(RationalMap::power(2), 1);
  REQUIRE(fixed.size() == 3);
  int repelling = 0, at_inf = 0;
  for (const auto& p : fixed) {
    if (!p.z) {
      ++at_inf;
      CHECK(std::abs(p.multiplier) == 0.0);
      continue;
    }
    if (std::abs(*p.z) < 1e-12) CHECK(std::abs(p.multiplier) < 1e-12);
    if (std::abs(*p.z - 1.0) < 1e-12) CHECK(std::abs(p.multiplier - 2.0) < 1e-12);
    repelling += p.repelling();
  }
  CHECK(at_inf == 1);
  CHECK(repelling == 1);

  for (const auto& p : periodic_points(RationalMap::power(2), 2))
    if (p.repelling()) {
      REQUIRE(p.z);
      CHECK(std::abs(std::pow(*p.z, 3) - 1.0) < 1e-12);
    }
  for (int n = 1; n <= 4; ++n) {
    auto pts = periodic_points(RationalMap::power(2), n);
    CHECK(pts.size() == (1u << n) + 1);
    for (const auto& p : pts)
      if (p.repelling()) CHECK(std::fabs(std::abs(*p.z) - 1) <= 1e-8);
  }

  auto lattes = periodic_points(catalog("phi_2@E1"), 2);
  CHECK(lattes.size() == 17);
  for (const auto& p : lattes) CHECK(p.repelling());
  // phi_1+i has infinity as a fixed point with multiplier lc(den)/lc(num)
  for (const auto& p : periodic_points(catalog("phi_1+i"), 1))
    if (!p.z) CHECK(std::abs(p.multiplier - Complex(0, 2)) < 1e-12);
  CHECK_THROWS_AS(periodic_points(RationalMap::power(2), 8), NumericError);
}

TEST_CASE("julia rasters") {
  Image img = julia_raster(RationalMap::power(2), Window{}, 128, 128, 30);
  REQUIRE(img.pixels.size() == 128u * 128u);
  // dark on the unit circle, white at the center and in the corners
  auto px = [&](int row, int col) { return img.pixels[static_cast<std::size_t>(row) * 128 + col]; };
  CHECK(px(64, 64) == 255);
  CHECK(px(2, 2) == 255);
  int dark_on_ring = 0, ring_cells = 0;
  for (int r = 0; r < 128; ++r)
    for (int c = 0; c < 128; ++c) {
      Complex z = Window{}.center(c, 127 - r, 128, 128);
      if (std::fabs(std::abs(z) - 1) < 0.02) {
        ++ring_cells;
        dark_on_ring += px(r, c) < 128;
      }
    }
  CHECK(dark_on_ring >= 0.9 * ring_cells);

  // commuting maps give the same picture
  Image a = julia_raster(catalog("phi_1+i"), square3, 64, 64, 30, RasterMode::green);
  Image b = julia_raster(catalog("phi_1-i"), square3, 64, 64, 30, RasterMode::green);
  CHECK(a.pixels == b.pixels);

  std::string path = "test_measures_raster.pgm";
  img.write(path);
  std::string bytes = slurp(path);
  CHECK(bytes.rfind("P5\n# map ", 0) == 0);
  CHECK(bytes.find("\n128 128\n255\n") != std::string::npos);
  CHECK(bytes.size() == bytes.find("255\n") + 4 + 128 * 128);
  img.write(path + "2");
  CHECK(slurp(path + "2") == bytes);
  Image color = julia_raster(RationalMap::power(2), Window{}, 64, 64, 30, RasterMode::measure, true);
  CHECK(color.pixels.size() == 3u * 64 * 64);
  color.write(path + ".ppm");
  CHECK(slurp(path + ".ppm").rfind("P6\n", 0) == 0);
  std::remove(path.c_str());
  std::remove((path + "2").c_str());
  std::remove((path + ".ppm").c_str());
}

TEST_CASE("csv export") {
  DensityGrid g = lattes_density(EllipticCurveCM::E1(), square3, 8, 8);
  write_csv(g, "test_measures.csv");
  write_sidecar(g, "test_measures.csv", "E1");
  std::string csv = slurp("test_measures.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
  CHECK(std::count(csv.begin(), csv.end(), ',') == 56);
  std::string meta = slurp("test_measures.csv.json");
  CHECK(meta.find("\"schema\": 1") != std::string::npos);
  CHECK(meta.find("window_fraction") != std::string::npos);
  std::remove("test_measures.csv");
  std::remove("test_measures.csv.json");
}
