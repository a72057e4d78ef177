#include "ardyn/heights.hpp"

#include <cfloat>
#include <cmath>
#include <complex>

namespace ardyn {

double log_abs(const BigInt& n) {
  if (sgn(n) == 0) throw ArithmeticError("log of zero");
  long exp = 0;
  double mant = std::fabs(mpz_get_d_2exp(&exp, n.get_mpz_t()));
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

double log_abs(const BigRational& r) { return log_abs(BigInt(r.get_num())) - log_abs(BigInt(r.get_den())); }

namespace {

// Coprime integral representative of a projective vector.
std::vector<QuadNumber> primitive_integral(const std::vector<QuadNumber>& coords) {
  int d = 0;
  BigInt m(1);
  for (const QuadNumber& c : coords) {
    d = common_field(d, c.field());
    m = lcm(m, denominator(c));
  }
  std::optional<Integral> g;
  std::vector<QuadNumber> scaled;
  for (const QuadNumber& c : coords) {
    QuadNumber s = c.in_field(d) * QuadNumber(BigRational(m), d);
    scaled.push_back(s);
    if (s.is_zero()) continue;
    g = g ? integral_gcd(*g, Integral(s)) : unit_normalize(Integral(s));
  }
  if (!g) throw ArithmeticError("the zero vector has no height");
  for (QuadNumber& s : scaled) s /= g->value();
  return scaled;
}

double half_log_max_norm(const std::vector<QuadNumber>& integral) {
  BigInt best(0);
  for (const QuadNumber& c : integral) {
    BigInt n = c.norm().get_num();
    if (n > best) best = n;
  }
  return 0.5 * log_abs(best);
}

std::complex<double> embed(const QuadNumber& x) { return {x.real(), x.imag()}; }

}  // namespace

double naive_height(const std::vector<QuadNumber>& coords) { return half_log_max_norm(primitive_integral(coords)); }

HeightValue naive_height(const ProjPoint& p) {
  HeightValue h;
  h.value = naive_height(std::vector<QuadNumber>{p.x(), p.y()});
  return h;
}

namespace {

int valuation(BigInt n, const BigInt& p) {
  int v = 0;
  while (sgn(n) != 0 && mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
    n /= p;
    ++v;
  }
  return v;
}

std::vector<BigInt> prime_factors(BigInt n) {
  std::vector<BigInt> out;
  n = abs(n);
  for (BigInt p = 2; p * p <= n; ++p) {
    if (p > 10000000) break;
    if (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
      out.push_back(p);
      while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) n /= p;
    }
  }
  if (n > 1) {
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0) throw ArithmeticError("coordinate gcd too large to factor by trial division");
    out.push_back(n);
  }
  return out;
}

}  // namespace

PlaceDecomposition naive_height_by_places(const ProjPoint& p) {
  if (p.field() != 0 || !p.x().is_integral() || !p.y().is_integral())
    throw ArithmeticError("naive_height_by_places needs a point of P^1(Q) with integral coordinates");
  BigInt x = p.x().re_part().get_num(), y = p.y().re_part().get_num();
  PlaceDecomposition out;
  double arch = log_abs(BigInt(abs(x) > abs(y) ? abs(x) : abs(y)));
  out.terms.push_back({Place{Place::Kind::archimedean, std::nullopt, 1}, arch});
  double total = arch;
  BigInt g = gcd(x, y);
  for (const BigInt& prime : prime_factors(g)) {
    int vx = sgn(x) == 0 ? INT32_MAX : valuation(x, prime);
    int vy = sgn(y) == 0 ? INT32_MAX : valuation(y, prime);
    double term = -std::min(vx, vy) * log_abs(prime);
    out.terms.push_back({Place{Place::Kind::finite, prime, 1}, term});
    total += term;
  }
  out.height.value = total;
  return out;
}

namespace {

// Homogeneous lift with coefficients in O_K, made primitive.
struct IntegralLift {
  int degree = 0;
  int d = 0;
  std::vector<QuadNumber> f0, f1;  // coefficient of x^k y^(deg-k)
};

IntegralLift integral_lift(const RationalMap& f) {
  IntegralLift lift;
  lift.degree = f.degree();
  lift.d = f.field();
  std::vector<QuadNumber> all = f.lift_coeffs(0);
  std::vector<QuadNumber> den = f.lift_coeffs(1);
  all.insert(all.end(), den.begin(), den.end());
  all = primitive_integral(all);
  lift.f0.assign(all.begin(), all.begin() + lift.degree + 1);
  lift.f1.assign(all.begin() + lift.degree + 1, all.end());
  return lift;
}

// Solves M u = rhs exactly for each right-hand side; returns det(M).
QuadNumber solve_exact(std::vector<std::vector<QuadNumber>> m, std::vector<std::vector<QuadNumber>>& rhs) {
  const std::size_t n = m.size();
  QuadNumber det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n) return QuadNumber(0);
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      for (auto& r : rhs) std::swap(r[pivot], r[col]);
      det = -det;
    }
    det *= m[col][col];
    QuadNumber inv = m[col][col].inverse();
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || m[row][col].is_zero()) continue;
      QuadNumber factor = m[row][col] * inv;
      for (std::size_t k = col; k < n; ++k)
        if (!m[col][k].is_zero()) m[row][k] -= factor * m[col][k];
      for (auto& r : rhs) r[row] -= factor * r[col];
    }
  }
  for (auto& r : rhs)
    for (std::size_t row = 0; row < n; ++row) r[row] /= m[row][row];
  return det;
}

struct NullstellensatzData {
  QuadNumber resultant;
  std::vector<QuadNumber> coefficients;  // of A, B for x^(2a-1), then for y^(2a-1)
};

NullstellensatzData nullstellensatz(const IntegralLift& lift) {
  const int a = lift.degree;
  const std::size_t n = static_cast<std::size_t>(2 * a);
  std::vector<std::vector<QuadNumber>> m(n, std::vector<QuadNumber>(n, QuadNumber(0)));
  // column j (< a): x^j y^(a-1-j) * F0; column a + j: same times F1
  for (int j = 0; j < a; ++j)
    for (int k = 0; k <= a; ++k) {
      m[static_cast<std::size_t>(j + k)][static_cast<std::size_t>(j)] = lift.f0[static_cast<std::size_t>(k)];
      m[static_cast<std::size_t>(j + k)][static_cast<std::size_t>(a + j)] = lift.f1[static_cast<std::size_t>(k)];
    }
  std::vector<std::vector<QuadNumber>> rhs(2, std::vector<QuadNumber>(n, QuadNumber(0)));
  rhs[0][n - 1] = QuadNumber(1);  // x^(2a-1)
  rhs[1][0] = QuadNumber(1);      // y^(2a-1)
  NullstellensatzData out;
  out.resultant = solve_exact(std::move(m), rhs);
  if (out.resultant.is_zero()) throw ArithmeticError("numerator and denominator share a root: resultant is zero");
  for (const auto& r : rhs) out.coefficients.insert(out.coefficients.end(), r.begin(), r.end());
  return out;
}

HeightDifferenceBound bound_for(const IntegralLift& lift, const NullstellensatzData& ns) {
  HeightDifferenceBound b;
  std::vector<QuadNumber> coeffs = lift.f0;
  coeffs.insert(coeffs.end(), lift.f1.begin(), lift.f1.end());
  b.upper = naive_height(coeffs) + std::log(lift.degree + 1.0);
  std::vector<QuadNumber> g{QuadNumber(1)};
  g.insert(g.end(), ns.coefficients.begin(), ns.coefficients.end());
  b.lower = naive_height(g) + std::log(2.0 * lift.degree);
  return b;
}

QuadNumber mod(const QuadNumber& x, const QuadNumber& m) { return divmod(Integral(x), Integral(m)).second.value(); }

std::pair<QuadNumber, QuadNumber> eval_mod(const IntegralLift& lift, const QuadNumber& x, const QuadNumber& y, const QuadNumber& m) {
  const int a = lift.degree;
  std::vector<QuadNumber> xp{QuadNumber(1)}, yp{QuadNumber(1)};
  for (int k = 1; k <= a; ++k) {
    xp.push_back(mod(xp.back() * x, m));
    yp.push_back(mod(yp.back() * y, m));
  }
  QuadNumber u(0), v(0);
  for (int k = 0; k <= a; ++k) {
    QuadNumber mono = mod(xp[static_cast<std::size_t>(k)] * yp[static_cast<std::size_t>(a - k)], m);
    u += lift.f0[static_cast<std::size_t>(k)] * mono;
    v += lift.f1[static_cast<std::size_t>(k)] * mono;
  }
  return {mod(u, m), mod(v, m)};
}

struct ArchStart {
  double log_scale;
  std::complex<double> u0, u1;
};

// (x, y) = e^log_scale * (u0, u1) with max(|u0|, |u1|) = 1.
ArchStart arch_start(const QuadNumber& x, const QuadNumber& y) {
  BigInt nx = x.norm().get_num(), ny = y.norm().get_num();
  BigInt top = nx > ny ? nx : ny;
  mpf_class scale(0, 256);
  mpf_class topf(top, 256);
  scale = sqrt(topf);
  auto part = [&](const BigRational& r, double mult) {
    mpf_class v(r, 256);
    v /= scale;
    return v.get_d() * mult;
  };
  double root = std::sqrt(static_cast<double>(common_field(x.field(), y.field())));
  ArchStart s;
  s.log_scale = 0.5 * log_abs(top);
  s.u0 = {part(x.re_part(), 1.0), part(x.root_part(), root)};
  s.u1 = {part(y.re_part(), 1.0), part(y.root_part(), root)};
  return s;
}

struct TateTerm {
  double value = 0.0;
  double magnitude = 0.0;  // sum of absolute contributions, for the rounding allowance
};

TateTerm tate_term(const IntegralLift& lift, const NullstellensatzData& ns, const ProjPoint& start, int n) {
  ProjPoint p = start.reduced();
  const double alpha = lift.degree;
  std::vector<std::complex<double>> c0, c1;
  for (const QuadNumber& c : lift.f0) c0.push_back(embed(c));
  for (const QuadNumber& c : lift.f1) c1.push_back(embed(c));

  TateTerm out;
  ArchStart s = arch_start(p.x(), p.y());
  out.value = s.log_scale;
  out.magnitude = std::fabs(s.log_scale);
  std::complex<double> u0 = s.u0, u1 = s.u1;
  double weight = 1.0;
  for (int k = 0; k < n; ++k) {
    weight /= alpha;
    std::complex<double> v0 = 0, v1 = 0, mono;
    // homogeneous evaluation: sum c_j u0^j u1^(a-j)
    std::vector<std::complex<double>> p0{1.0}, p1{1.0};
    for (int j = 1; j <= lift.degree; ++j) {
      p0.push_back(p0.back() * u0);
      p1.push_back(p1.back() * u1);
    }
    for (int j = 0; j <= lift.degree; ++j) {
      mono = p0[static_cast<std::size_t>(j)] * p1[static_cast<std::size_t>(lift.degree - j)];
      v0 += c0[static_cast<std::size_t>(j)] * mono;
      v1 += c1[static_cast<std::size_t>(j)] * mono;
    }
    double norm = std::max(std::abs(v0), std::abs(v1));
    if (!(norm > 0) || !std::isfinite(norm)) throw ArithmeticError("archimedean iteration degenerated");
    out.value += weight * std::log(norm);
    out.magnitude += weight * std::fabs(std::log(norm));
    u0 = v0 / norm;
    u1 = v1 / norm;
  }

  if (Integral(ns.resultant).is_unit()) return out;
  // contents divide the resultant; follow the orbit modulo resultant^(n+2)
  QuadNumber modulus(1);
  for (int k = 0; k < n + 2; ++k) modulus *= ns.resultant;
  QuadNumber x = mod(p.x(), modulus), y = mod(p.y(), modulus);
  const Integral res(ns.resultant);
  weight = 1.0;
  for (int k = 0; k < n; ++k) {
    weight /= alpha;
    auto [u, v] = eval_mod(lift, x, y, modulus);
    Integral g = integral_gcd(integral_gcd(Integral(mod(u, res.value())), res), Integral(mod(v, res.value())));
    if (!divides(g, res)) throw ArithmeticError("content of an iterate does not divide the resultant");
    if (!g.is_unit()) {
      double term = 0.5 * log_abs(g.norm());
      out.value -= weight * term;
      out.magnitude += weight * term;
    }
    modulus /= g.value();
    x = mod(u / g.value(), modulus);
    y = mod(v / g.value(), modulus);
  }
  return out;
}

}  // namespace

HeightDifferenceBound height_difference_bound(const RationalMap& f) {
  IntegralLift lift = integral_lift(f);
  return bound_for(lift, nullstellensatz(lift));
}

HeightValue canonical_height(const RationalMap& f, const ProjPoint& p, double target_error) {
  CanonicalHeightOptions opts;
  opts.target_error = target_error;
  return canonical_height(f, p, opts);
}

HeightValue canonical_height(const RationalMap& f, const ProjPoint& p, const CanonicalHeightOptions& opts) {
  if (f.degree() < 2) throw ArithmeticError("canonical height needs a map of degree >= 2");
  if (!(opts.target_error > 0)) throw ArithmeticError("target_error must be positive");
  common_field(f.field(), p.field());
  IntegralLift lift = integral_lift(f);
  NullstellensatzData ns = nullstellensatz(lift);
  const double C = bound_for(lift, ns).constant();
  const double alpha = f.degree();
  auto tail = [&](int n) { return C / ((alpha - 1.0) * std::pow(alpha, n)); };
  int n = 1;
  while (tail(n) > opts.target_error / 2 && n <= opts.iteration_budget) ++n;
  bool exceeded = n > opts.iteration_budget;
  if (exceeded) n = opts.iteration_budget;

  TateTerm term = tate_term(lift, ns, p, n);
  HeightValue h;
  h.value = term.value;
  h.iterations_used = n;
  h.error_bound = tail(n) + 64 * DBL_EPSILON * (1.0 + term.magnitude + n);
  if (exceeded || h.error_bound > opts.target_error)
    throw HeightBudgetExceeded("iteration budget of " + std::to_string(opts.iteration_budget) +
                                   " reached before the target error; partial value " + std::to_string(h.value),
                               h);
  return h;
}

double tate_term_exact(const RationalMap& f, const ProjPoint& p, int n) {
  ProjPoint q = p.reduced();
  for (int k = 0; k < n; ++k) q = f(q);
  return naive_height(q).value / std::pow(static_cast<double>(f.degree()), n);
}

HeightValue neron_tate(const EllipticCurveCM& curve, const ProjPoint& x, const CanonicalHeightOptions& opts) {
  return canonical_height(lattes_double(curve), x, opts);
}

}  // namespace ardyn
