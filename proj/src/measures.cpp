#include "ardyn/measures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <thread>

#include "json.hpp"

namespace ardyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Splits [0, n) into fixed chunks, one per worker. Callers write into
// preassigned slots, so output never depends on the scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::size_t>(workers, std::max<std::size_t>(1, n / 8));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(body, b, std::min(n, b + chunk));
  for (auto& t : pool) t.join();
}

double sup_norm(Complex a, Complex b) { return std::max(std::abs(a), std::abs(b)); }

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex v = 0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * z + c[k];
  return v;
}

std::vector<Complex> embed_poly(const Poly& p) {
  std::vector<Complex> out;
  for (const QuadNumber& c : p.coeffs()) out.push_back(embed(c));
  return out;
}

// |det| of the Sylvester matrix of F0, F1 scaled to unit sup norm.
double scaled_resultant(const std::vector<Complex>& f0, const std::vector<Complex>& f1, int d) {
  auto unit = [](std::vector<Complex> f) {
    double m = 0;
    for (Complex c : f) m = std::max(m, std::abs(c));
    if (m > 0)
      for (Complex& c : f) c /= m;
    return f;
  };
  std::vector<Complex> a = unit(f0), b = unit(f1);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k <= d; ++k) {
      s(j + k, j) = a[static_cast<std::size_t>(k)];
      s(j + k, d + j) = b[static_cast<std::size_t>(k)];
    }
  return std::abs(s.partialPivLu().determinant());
}

}  // namespace

Complex embed(const QuadNumber& x) { return {x.real(), x.imag()}; }

Lift::Lift(std::vector<Complex> f0, std::vector<Complex> f1) : f0_(std::move(f0)), f1_(std::move(f1)) {
  if (f0_.size() != f1_.size() || f0_.size() < 2) throw NumericError("lift needs two coefficient lists of equal length >= 2");
  degree_ = static_cast<int>(f0_.size()) - 1;
  if (scaled_resultant(f0_, f1_, degree_) < 1e-12) throw NumericError("degenerate lift: F0 and F1 have a common zero");
}

Lift Lift::from_map(const RationalMap& f) {
  std::vector<Complex> a, b;
  for (const QuadNumber& c : f.lift_coeffs(0)) a.push_back(embed(c));
  for (const QuadNumber& c : f.lift_coeffs(1)) b.push_back(embed(c));
  return Lift(std::move(a), std::move(b));
}

Lift Lift::power(int d) {
  std::vector<Complex> a(static_cast<std::size_t>(d + 1), 0.0), b = a;
  a.back() = 1.0;
  b.front() = 1.0;
  return Lift(std::move(a), std::move(b));
}

Lift Lift::scaled(Complex c) const {
  std::vector<Complex> a = f0_, b = f1_;
  for (Complex& x : a) x *= c;
  for (Complex& x : b) x *= c;
  return Lift(std::move(a), std::move(b));
}

std::pair<Complex, Complex> Lift::operator()(Complex x, Complex y) const {
  // sum c_k x^k y^(d-k), Horner in x/y or y/x whichever is bounded
  Complex v0 = 0, v1 = 0;
  if (std::abs(x) <= std::abs(y)) {
    Complex t = x / y, yd = std::pow(y, degree_);
    v0 = horner(f0_, t) * yd;
    v1 = horner(f1_, t) * yd;
  } else {
    Complex t = y / x, xd = std::pow(x, degree_);
    // sum c_k t^(d-k)
    for (int k = 0; k <= degree_; ++k) {
      v0 = v0 * t + f0_[static_cast<std::size_t>(k)];
      v1 = v1 * t + f1_[static_cast<std::size_t>(k)];
    }
    v0 *= xd;
    v1 *= xd;
  }
  return {v0, v1};
}

double green_homogeneous(const Lift& lift, Complex x, Complex y, int n, StartMetric metric) {
  if (n < 1) throw NumericError("green needs n >= 1");
  double s = sup_norm(x, y);
  if (!(s > 0) || !std::isfinite(s)) throw NumericError("green at the zero vector");
  Complex u0 = x / s, u1 = y / s;
  double acc = std::log(s), weight = 1.0;
  const double d = lift.degree();
  for (int k = 0; k < n; ++k) {
    weight /= d;
    auto [v0, v1] = lift(u0, u1);
    double norm = sup_norm(v0, v1);
    if (!(norm > 0) || !std::isfinite(norm)) throw NumericError("green iteration degenerated");
    acc += weight * std::log(norm);
    u0 = v0 / norm;
    u1 = v1 / norm;
  }
  switch (metric.kind) {
    case StartMetric::Kind::sup:
      break;
    case StartMetric::Kind::euclidean:
      acc += weight * 0.5 * std::log(std::norm(u0) + std::norm(u1));
      break;
    case StartMetric::Kind::scaled:
      acc += weight * std::log(metric.scale);
      break;
  }
  return acc;
}

double green(const Lift& lift, Complex z, int n, StartMetric metric) { return green_homogeneous(lift, z, 1.0, n, metric); }

GreenField green_field(const Lift& lift, const Window& w, int nx, int ny, int n, StartMetric metric) {
  if (nx < 1 || ny < 1 || !(w.x1 > w.x0) || !(w.y1 > w.y0)) throw NumericError("empty window");
  GreenField f{w, nx, ny, n, std::vector<double>(static_cast<std::size_t>(nx) * ny)};
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j)
      for (int i = 0; i < nx; ++i)
        f.values[j * nx + i] = green(lift, w.center(i, static_cast<int>(j), nx, ny), n, metric);
  });
  return f;
}

double DensityGrid::total() const {
  double s = 0;
  for (double m : mass) s += m;
  return s;
}

DensityGrid measure_from_green(const GreenField& field) {
  if (field.nx < 32 || field.ny < 32) throw NumericError("measure_from_green needs a resolution of at least 32");
  const int nx = field.nx, ny = field.ny;
  const double hx = field.window.dx(nx), hy = field.window.dy(ny);
  DensityGrid out{field.window, nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny, 0.0)};
  double total = 0;
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i) {
      double g = field.at(i, j);
      double lap = (field.at(i + 1, j) - 2 * g + field.at(i - 1, j)) / (hx * hx) +
                   (field.at(i, j + 1) - 2 * g + field.at(i, j - 1)) / (hy * hy);
      double m = std::max(0.0, lap * hx * hy / kTwoPi);
      out.mass[static_cast<std::size_t>(j) * nx + i] = m;
      total += m;
    }
  if (!(total > 0)) throw NumericError("Laplacian of the Green's function vanishes on the window");
  for (double& m : out.mass) m /= total;
  return out;
}

std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) throw NumericError("poly_roots needs degree >= 1");
  if (coeffs.back() == Complex(0)) throw NumericError("poly_roots: leading coefficient is zero");
  std::vector<Complex> a(coeffs);
  for (Complex& c : a) c /= coeffs.back();
  std::vector<Complex> da(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) da[static_cast<std::size_t>(k - 1)] = a[static_cast<std::size_t>(k)] * static_cast<double>(k);

  double radius = 0;
  for (int k = 0; k < n; ++k)
    radius = std::max(radius, std::pow(std::abs(a[static_cast<std::size_t>(k)]), 1.0 / (n - k)));
  if (radius == 0) radius = 1;
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = std::polar(radius, kTwoPi * k / n + 0.4);

  bool converged = false;
  for (int it = 0; it < 1000 && !converged; ++it) {
    converged = true;
    for (int k = 0; k < n; ++k) {
      Complex& zk = z[static_cast<std::size_t>(k)];
      Complex p = horner(a, zk);
      if (p == Complex(0)) continue;
      Complex ratio = p / horner(da, zk);
      Complex s = 0;
      for (int j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (zk - z[static_cast<std::size_t>(j)]);
      Complex step = ratio / (1.0 - ratio * s);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = ratio;
      zk -= step;
      if (std::abs(step) > 1e-15 * std::max(1.0, std::abs(zk))) converged = false;
    }
  }
  std::vector<double> residuals;
  bool ok = true;
  for (Complex& r : z) {
    for (int polish = 0; polish < 3; ++polish) {
      Complex dp = horner(da, r);
      if (dp == Complex(0)) break;
      Complex cand = r - horner(a, r) / dp;
      if (std::abs(horner(a, cand)) < std::abs(horner(a, r))) r = cand;
      else break;
    }
    double scale = 0, pw = 1, m = std::max(1.0, std::abs(r));
    for (Complex c : coeffs) {
      scale += std::abs(c) * pw;
      pw *= m;
    }
    double res = std::abs(horner(coeffs, r));
    residuals.push_back(res / scale);
    if (!(res <= 1e-10 * scale)) ok = false;
  }
  if (!ok) {
    std::string msg = "poly_roots did not converge; relative residuals:";
    for (double r : residuals) msg += " " + std::to_string(r);
    throw NumericError(msg);
  }
  return z;
}

namespace {

struct Preimages {
  std::vector<Complex> finite;
  int infinite = 0;
};

Preimages solve_preimages(const Lift& lift, std::optional<Complex> target) {
  // target (t0 : t1) with max(|t0|, |t1|) = 1
  Complex t0 = 1, t1 = 0;
  if (target) {
    if (std::abs(*target) <= 2.0) t0 = *target, t1 = 1;
    else t0 = 1, t1 = 1.0 / *target;
  }
  const int d = lift.degree();
  std::vector<Complex> h(static_cast<std::size_t>(d + 1));
  double hmax = 0;
  for (int k = 0; k <= d; ++k) {
    h[static_cast<std::size_t>(k)] = t1 * lift.f0()[static_cast<std::size_t>(k)] - t0 * lift.f1()[static_cast<std::size_t>(k)];
    hmax = std::max(hmax, std::abs(h[static_cast<std::size_t>(k)]));
  }
  int m = d;
  while (m >= 0 && std::abs(h[static_cast<std::size_t>(m)]) <= 1e-13 * hmax) --m;
  if (m < 0) throw NumericError("every point is a preimage: lift is degenerate");
  h.resize(static_cast<std::size_t>(m + 1));
  Preimages out;
  out.infinite = d - m;
  if (m >= 1) out.finite = poly_roots(h);
  // large roots: Newton in the chart w = 1/z on sum h_k w^(m-k)
  std::vector<Complex> rev(h.rbegin(), h.rend());
  std::vector<Complex> drev;
  for (int k = 1; k <= m; ++k) drev.push_back(rev[static_cast<std::size_t>(k)] * static_cast<double>(k));
  for (Complex& z : out.finite) {
    if (std::abs(z) <= 2.0) continue;
    Complex w = 1.0 / z;
    for (int it = 0; it < 3; ++it) {
      Complex dp = horner(drev, w);
      if (dp == Complex(0)) break;
      Complex cand = w - horner(rev, w) / dp;
      if (std::abs(horner(rev, cand)) < std::abs(horner(rev, w))) w = cand;
      else break;
    }
    if (w == Complex(0)) {
      ++out.infinite;
      z = std::numeric_limits<double>::quiet_NaN();
    } else {
      z = 1.0 / w;
    }
  }
  std::erase_if(out.finite, [](Complex z) { return std::isnan(z.real()); });
  return out;
}

using Node = std::optional<Complex>;

std::vector<Node> expand(const Lift& lift, const Node& t) {
  Preimages pre = solve_preimages(lift, t);
  std::vector<Node> out(pre.finite.begin(), pre.finite.end());
  out.insert(out.end(), static_cast<std::size_t>(pre.infinite), std::nullopt);
  return out;
}

bool same_point(const Node& a, const Node& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= 1e-6 * (1.0 + std::abs(*a));
}

// The common value when all preimages of t coincide. Centers below 1e-12 snap
// to 0 so that a second step does not amplify rounding.
std::optional<Node> single_preimage(const Lift& lift, const Node& t) {
  std::vector<Node> pre = expand(lift, t);
  for (const Node& q : pre)
    if (!same_point(q, pre.front())) return std::nullopt;
  if (!pre.front()) return Node{};
  Complex c = 0;
  for (const Node& q : pre) c += *q;
  c /= static_cast<double>(pre.size());
  return Node{std::abs(c) < 1e-12 ? Complex(0) : c};
}

}  // namespace

ComplexSampleSet preimage_sample(const RationalMap& f, std::optional<Complex> seed_point, int depth, std::uint64_t seed,
                                 const PreimageOptions& opts) {
  if (depth < 0) throw NumericError("depth must be nonnegative");
  if (f.degree() < 2) throw NumericError("preimage sampling needs a map of degree >= 2");
  const Lift lift = Lift::from_map(f);
  const int d = f.degree();
  const int kept = opts.branches <= 0 || opts.branches >= d ? d : opts.branches;
  if (depth * std::log2(static_cast<double>(kept)) > std::log2(static_cast<double>(opts.max_points)) + 1e-9)
    throw NumericError("depth too large: " + std::to_string(kept) + "^" + std::to_string(depth) + " points exceed the cap of " +
                       std::to_string(opts.max_points));

  if (depth > 0) {
    auto p = single_preimage(lift, seed_point);
    if (p && (same_point(*p, seed_point) || same_point(single_preimage(lift, *p).value_or(Node{Complex(NAN)}), seed_point)))
      throw NumericError("seed point is exceptional: its backward orbit has at most two points; choose a generic seed");
  }

  std::mt19937_64 rng(seed);
  std::vector<Node> gen{seed_point};
  for (int g = 0; g < depth; ++g) {
    std::vector<Node> all(gen.size() * static_cast<std::size_t>(d));
    parallel_for(gen.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        std::vector<Node> pre = expand(lift, gen[k]);
        std::copy(pre.begin(), pre.end(), all.begin() + static_cast<std::ptrdiff_t>(k * d));
      }
    });
    if (kept == d) {
      gen = std::move(all);
      continue;
    }
    std::vector<Node> next;
    next.reserve(gen.size() * static_cast<std::size_t>(kept));
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < gen.size(); ++k) {
      for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
      for (int i = 0; i < kept; ++i) {
        int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(d - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        next.push_back(all[k * d + static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]);
      }
    }
    gen = std::move(next);
  }

  ComplexSampleSet out;
  out.seed = seed;
  out.depth = depth;
  for (const Node& p : gen) {
    if (p) out.points.push_back(*p);
    else ++out.infinity_count;
  }
  return out;
}

DensityGrid histogram(const ComplexSampleSet& s, const Window& w, int nx, int ny) {
  DensityGrid out{w, nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny, 0.0)};
  std::size_t inside = 0;
  for (Complex z : s.points) {
    double fx = (z.real() - w.x0) / w.dx(nx), fy = (z.imag() - w.y0) / w.dy(ny);
    if (!(fx >= 0 && fx < nx && fy >= 0 && fy < ny)) continue;
    out.mass[static_cast<std::size_t>(fy) * nx + static_cast<std::size_t>(fx)] += 1.0;
    ++inside;
  }
  if (inside == 0) throw NumericError("no sample points inside the window");
  for (double& m : out.mass) m /= static_cast<double>(inside);
  out.window_fraction = static_cast<double>(inside) / static_cast<double>(s.size());
  return out;
}

double lattes_density_at(const EllipticCurveCM& curve, Complex z) { return 1.0 / std::abs(horner(embed_poly(curve.G()), z)); }

namespace {

double adaptive_cell(const std::vector<Complex>& g, double x0, double y0, double h, double coarse, int level) {
  double fine = 0;
  double q = h / 2;
  double parts[4];
  for (int k = 0; k < 4; ++k) {
    double cx = x0 + (k % 2 + 0.5) * q, cy = y0 + (k / 2 + 0.5) * q;
    parts[k] = q * q / std::abs(horner(g, Complex(cx, cy)));
    fine += parts[k];
  }
  if (level >= 16 || (std::isfinite(fine) && std::fabs(fine - coarse) <= 1e-10 + 1e-7 * fine)) return fine;
  double s = 0;
  for (int k = 0; k < 4; ++k) s += adaptive_cell(g, x0 + (k % 2) * q, y0 + (k / 2) * q, q, parts[k], level + 1);
  return s;
}

std::vector<Complex> g_roots(const EllipticCurveCM& curve) { return poly_roots(embed_poly(curve.G())); }

bool cell_has_root(const std::vector<Complex>& roots, double x0, double x1, double y0, double y1) {
  for (Complex r : roots)
    if (r.real() >= x0 - 1e-12 && r.real() <= x1 + 1e-12 && r.imag() >= y0 - 1e-12 && r.imag() <= y1 + 1e-12) return true;
  return false;
}

}  // namespace

double lattes_total_mass(const EllipticCurveCM& curve) {
  const double R = 8.0;
  const int base = 32;
  const double h = 2 * R / base;
  std::vector<Complex> g = embed_poly(curve.G());
  std::vector<double> rows(base, 0.0);
  parallel_for(base, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j)
      for (int i = 0; i < base; ++i) {
        double x0 = -R + i * h, y0 = -R + static_cast<double>(j) * h;
        double coarse = h * h / std::abs(horner(g, Complex(x0 + h / 2, y0 + h / 2)));
        rows[j] += adaptive_cell(g, x0, y0, h, std::isfinite(coarse) ? coarse : 0.0, 0);
      }
  });
  double inner = 0;
  for (double r : rows) inner += r;
  // outside [-R, R]^2, |G|^-1 ~ |z|^-3, whose integral there is 4 sqrt(2) / R
  return inner + 4.0 * std::numbers::sqrt2 / R;
}

DensityGrid lattes_density(const EllipticCurveCM& curve, const Window& w, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(w.x1 > w.x0) || !(w.y1 > w.y0)) throw NumericError("empty window");
  std::vector<Complex> g = embed_poly(curve.G());
  std::vector<Complex> roots = g_roots(curve);
  const double hx = w.dx(nx), hy = w.dy(ny);
  DensityGrid out{w, nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny, 0.0)};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double x0 = w.x0 + i * hx, y0 = w.y0 + j * hy;
      double m = 0;
      if (cell_has_root(roots, x0, x0 + hx, y0, y0 + hy)) {
        for (int b = 0; b < 4; ++b)
          for (int a = 0; a < 4; ++a)
            m += (hx * hy / 16) / std::abs(horner(g, Complex(x0 + (a + 0.5) * hx / 4, y0 + (b + 0.5) * hy / 4)));
      } else {
        m = hx * hy / std::abs(horner(g, w.center(i, j, nx, ny)));
      }
      out.mass[static_cast<std::size_t>(j) * nx + i] = m;
    }
  double window_mass = out.total();
  for (double& m : out.mass) m /= window_mass;
  out.window_fraction = std::min(1.0, window_mass / lattes_total_mass(curve));
  return out;
}

std::vector<bool> singular_cells(const EllipticCurveCM& curve, const Window& w, int nx, int ny) {
  std::vector<Complex> roots = g_roots(curve);
  const double hx = w.dx(nx), hy = w.dy(ny);
  std::vector<bool> hit(static_cast<std::size_t>(nx) * ny, false), out = hit;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      hit[static_cast<std::size_t>(j) * nx + i] = cell_has_root(roots, w.x0 + i * hx, w.x0 + (i + 1) * hx, w.y0 + j * hy, w.y0 + (j + 1) * hy);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      for (int b = std::max(0, j - 1); b <= std::min(ny - 1, j + 1); ++b)
        for (int a = std::max(0, i - 1); a <= std::min(nx - 1, i + 1); ++a)
          if (hit[static_cast<std::size_t>(b) * nx + a]) out[static_cast<std::size_t>(j) * nx + i] = true;
  return out;
}

DensityGrid coarsen(const DensityGrid& g, int factor) {
  if (factor < 1 || g.nx % factor != 0 || g.ny % factor != 0) throw NumericError("grid size is not a multiple of the factor");
  DensityGrid out{g.window, g.nx / factor, g.ny / factor, {}, g.window_fraction};
  out.mass.assign(static_cast<std::size_t>(out.nx) * out.ny, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.mass[static_cast<std::size_t>(j / factor) * out.nx + i / factor] += g.at(i, j);
  return out;
}

double compare_l1(const DensityGrid& a, const DensityGrid& b) {
  if (a.nx != b.nx || a.ny != b.ny || a.mass.size() != b.mass.size()) throw NumericError("density grids differ in shape");
  double s = 0;
  for (std::size_t k = 0; k < a.mass.size(); ++k) s += std::fabs(a.mass[k] - b.mass[k]);
  return 0.5 * s;
}

double correlation(const DensityGrid& a, const DensityGrid& b, const std::vector<bool>& skip) {
  if (a.mass.size() != b.mass.size()) throw NumericError("density grids differ in shape");
  double n = 0, sa = 0, sb = 0;
  for (std::size_t k = 0; k < a.mass.size(); ++k) {
    if (!skip.empty() && skip[k]) continue;
    n += 1;
    sa += a.mass[k];
    sb += b.mass[k];
  }
  double ma = sa / n, mb = sb / n, cab = 0, caa = 0, cbb = 0;
  for (std::size_t k = 0; k < a.mass.size(); ++k) {
    if (!skip.empty() && skip[k]) continue;
    double x = a.mass[k] - ma, y = b.mass[k] - mb;
    cab += x * y;
    caa += x * x;
    cbb += y * y;
  }
  return cab / std::sqrt(caa * cbb);
}

std::vector<PeriodicPoint> periodic_points(const RationalMap& f, int n) {
  if (n < 1) throw NumericError("period must be >= 1");
  if (n * std::log(static_cast<double>(f.degree())) > std::log(200.0) + 1e-9)
    throw NumericError("deg^n exceeds 200");
  RationalMap fn = iterate(f, n);
  const int d = f.field();
  Poly fixed = fn.num() - Poly::identity(d) * fn.den();
  if (fixed.is_zero()) throw NumericError("every point is fixed");
  std::vector<Complex> num = embed_poly(fn.num()), den = embed_poly(fn.den());
  std::vector<Complex> dnum = embed_poly(fn.num().derivative()), dden = embed_poly(fn.den().derivative());

  std::vector<PeriodicPoint> out;
  if (fixed.degree() >= 1)
    for (Complex z : poly_roots(embed_poly(fixed))) {
      Complex q = horner(den, z);
      Complex mult = (horner(dnum, z) * q - horner(num, z) * horner(dden, z)) / (q * q);
      out.push_back({z, mult});
    }
  const int at_infinity = fn.degree() + 1 - fixed.degree();
  if (at_infinity > 0) {
    int gap = fn.num().degree() - fn.den().degree();
    Complex mult = gap >= 2 ? Complex(0) : embed(fn.den().leading()) / embed(fn.num().leading());
    for (int k = 0; k < at_infinity; ++k) out.push_back({std::nullopt, mult});
  }
  return out;
}

Alignment align_fields(const GreenField& a, const GreenField& b) {
  if (a.values.size() != b.values.size()) throw NumericError("green fields differ in shape");
  const double n = static_cast<double>(a.values.size());
  double s = 0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] - b.values[k];
  Alignment r;
  r.mean = s / n;
  double v = 0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    double e = a.values[k] - b.values[k] - r.mean;
    v += e * e;
  }
  r.stddev = std::sqrt(v / n);
  return r;
}

void Image::write(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << (channels == 1 ? "P5" : "P6") << "\n";
  for (const std::string& c : comments) os << "# " << c << "\n";
  os << width << " " << height << "\n255\n";
  os.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string window_text(const Window& w) { return fmt(w.x0) + "," + fmt(w.x1) + "," + fmt(w.y0) + "," + fmt(w.y1); }

}  // namespace

Image julia_raster(const GreenField& field, RasterMode mode, bool color) {
  const int nx = field.nx, ny = field.ny;
  std::vector<double> gray(static_cast<std::size_t>(nx) * ny), greenish(gray.size());
  double lo = *std::min_element(field.values.begin(), field.values.end());
  double hi = *std::max_element(field.values.begin(), field.values.end());
  for (std::size_t k = 0; k < gray.size(); ++k) greenish[k] = hi > lo ? (field.values[k] - lo) / (hi - lo) : 0.0;
  if (mode == RasterMode::measure) {
    DensityGrid m = measure_from_green(field);
    double top = *std::max_element(m.mass.begin(), m.mass.end());
    for (std::size_t k = 0; k < gray.size(); ++k) gray[k] = 1.0 - std::log1p(1000.0 * m.mass[k] / top) / std::log1p(1000.0);
  } else {
    gray = greenish;
  }
  Image img;
  img.width = nx;
  img.height = ny;
  img.channels = color ? 3 : 1;
  img.comments = {"window " + window_text(field.window), "resolution " + std::to_string(nx) + "x" + std::to_string(ny),
                  "iterations " + std::to_string(field.iterations),
                  std::string("mode ") + (mode == RasterMode::measure ? "measure" : "green")};
  auto byte = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  for (int r = 0; r < ny; ++r)
    for (int i = 0; i < nx; ++i) {
      std::size_t k = static_cast<std::size_t>(ny - 1 - r) * nx + i;
      if (color) {
        img.pixels.push_back(byte(gray[k]));
        img.pixels.push_back(byte(gray[k] * (0.35 + 0.65 * greenish[k])));
        img.pixels.push_back(byte(gray[k] * (1.0 - 0.6 * greenish[k])));
      } else {
        img.pixels.push_back(byte(gray[k]));
      }
    }
  return img;
}

Image julia_raster(const RationalMap& f, const Window& w, int nx, int ny, int n, RasterMode mode, bool color) {
  Image img = julia_raster(green_field(Lift::from_map(f), w, nx, ny, n), mode, color);
  img.comments.insert(img.comments.begin(), "map " + f.str());
  return img;
}

namespace {

void write_rows(const std::vector<double>& v, int nx, int ny, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) os << (i ? "," : "") << fmt(v[static_cast<std::size_t>(j) * nx + i]);
    os << "\n";
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_csv(const DensityGrid& grid, const std::string& path) { write_rows(grid.mass, grid.nx, grid.ny, path); }
void write_csv(const GreenField& field, const std::string& path) { write_rows(field.values, field.nx, field.ny, path); }

void write_sidecar(const DensityGrid& grid, const std::string& csv_path, const std::string& label) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["label"] = label;
  j["csv"] = csv_path;
  j["window"] = {grid.window.x0, grid.window.x1, grid.window.y0, grid.window.y1};
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  j["layout"] = "row-major, first row at the lowest imaginary part";
  j["total"] = grid.total();
  j["window_fraction"] = grid.window_fraction;
  std::ofstream os(csv_path + ".json");
  if (!os) throw std::runtime_error("cannot open " + csv_path + ".json");
  os << j.dump(2) << "\n";
}

}  // namespace ardyn
