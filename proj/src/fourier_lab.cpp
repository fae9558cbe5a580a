#include "dlab/fourier_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dlab {

DenseFunction DenseFunction::zeros(int N, std::vector<int> lambda, const Caps &caps) {
  std::uint64_t sz = ipow_sat(N, static_cast<unsigned>(lambda.size()));
  if (sz > caps.fourier) throw CapExceeded("fourier", "N^|Lambda| = " + std::to_string(sz));
  DenseFunction f;
  f.N = N;
  f.lambda = std::move(lambda);
  f.v.assign(sz, cplx(0, 0));
  return f;
}

DenseFunction DenseFunction::zeros(int N, int dim, const Caps &caps) {
  std::vector<int> lam(dim);
  for (int i = 0; i < dim; ++i) lam[i] = i;
  return zeros(N, lam, caps);
}

static std::vector<cplx> roots(int N, int sign) {
  std::vector<cplx> w(N);
  for (int t = 0; t < N; ++t) w[t] = std::polar(1.0, sign * 2 * std::numbers::pi * t / N);
  return w;
}

// one length-N DFT along axis i for the block starting at g
static inline void pass_block(const std::vector<cplx> &in, std::vector<cplx> &out, int N,
                              std::uint64_t base, std::uint64_t stride,
                              const std::vector<cplx> &w, double scale) {
  for (int b = 0; b < N; ++b) {
    cplx acc = 0;
    for (int x = 0; x < N; ++x) acc += in[base + x * stride] * w[(b * x) % N];
    out[base + b * stride] = acc * scale;
  }
}

static DenseFunction transform(const DenseFunction &f, int sign, bool parallel) {
  const int N = f.N;
  const auto w = roots(N, sign);
  const double scale = sign < 0 ? 1.0 / N : 1.0;
  std::vector<cplx> cur = f.v, next(f.v.size());
  const std::uint64_t total = f.v.size();
  std::uint64_t stride = 1;
  for (int axis = 0; axis < f.dim(); ++axis) {
    const long long blocks = static_cast<long long>(total / N);
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (long long g = 0; g < blocks; ++g) {
        std::uint64_t hi = g / stride, lo = g % stride;
        pass_block(cur, next, N, hi * stride * N + lo, stride, w, scale);
      }
    } else {
      for (long long g = 0; g < blocks; ++g) {
        std::uint64_t hi = g / stride, lo = g % stride;
        pass_block(cur, next, N, hi * stride * N + lo, stride, w, scale);
      }
    }
    std::swap(cur, next);
    stride *= N;
  }
  DenseFunction out = f;
  out.v = std::move(cur);
  return out;
}

DenseFunction dft(const DenseFunction &f) { return transform(f, -1, true); }
DenseFunction idft(const DenseFunction &c) { return transform(c, +1, true); }
DenseFunction dft_serial(const DenseFunction &f) { return transform(f, -1, false); }
DenseFunction idft_serial(const DenseFunction &c) { return transform(c, +1, false); }

DenseFunction character(int N, int dim, const Tuple &b) {
  DenseFunction f = DenseFunction::zeros(N, dim);
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    Tuple x = index_tuple(i, N, dim);
    long s = 0;
    for (int j = 0; j < dim; ++j) s += static_cast<long>(b[j]) * x[j];
    f.v[i] = std::polar(1.0, 2 * std::numbers::pi * (s % N) / N);
  }
  return f;
}

int hamming(std::uint64_t idx, int N, int dim) {
  int w = 0;
  for (int j = 0; j < dim; ++j) {
    w += idx % N != 0;
    idx /= N;
  }
  return w;
}

double mean_real(const DenseFunction &f) {
  double s = 0;
  for (const auto &z : f.v) s += z.real();
  return s / f.size();
}

double norm_p(const DenseFunction &f, double p) {
  if (std::isinf(p)) return sup_abs(f);
  double s = 0;
  for (const auto &z : f.v) s += std::pow(std::abs(z), p);
  return std::pow(s / f.size(), 1.0 / p);
}

double sup_abs(const DenseFunction &f) {
  double m = 0;
  for (const auto &z : f.v) m = std::max(m, std::abs(z));
  return m;
}

double wiener_norm_coeffs(const DenseFunction &c) {
  double s = 0;
  for (const auto &z : c.v) s += std::abs(z);
  return s;
}

double wiener_norm(const DenseFunction &f) { return wiener_norm_coeffs(dft(f)); }

std::vector<double> level_wiener(const DenseFunction &c) {
  std::vector<double> lw(c.dim() + 1, 0.0);
  for (std::uint64_t i = 0; i < c.size(); ++i) lw[hamming(i, c.N, c.dim())] += std::abs(c.v[i]);
  return lw;
}

static DenseFunction filter_levels(const DenseFunction &f, int lo, int hi) {
  DenseFunction c = dft(f);
  for (std::uint64_t i = 0; i < c.size(); ++i) {
    int h = hamming(i, c.N, c.dim());
    if (h < lo || h > hi) c.v[i] = 0;
  }
  return idft(c);
}

DenseFunction degree_part(const DenseFunction &f, int d) { return filter_levels(f, d, d); }
DenseFunction low_degree(const DenseFunction &f, int d) { return filter_levels(f, 0, d); }

DenseFunction pointwise_product(const DenseFunction &f, const DenseFunction &g) {
  if (f.N != g.N || f.size() != g.size()) throw DomainError("product of functions on different domains");
  DenseFunction h = f;
  for (std::uint64_t i = 0; i < h.size(); ++i) h.v[i] *= g.v[i];
  return h;
}

int degree_of(const DenseFunction &f, double tol) {
  DenseFunction c = dft(f);
  int d = 0;
  for (std::uint64_t i = 0; i < c.size(); ++i)
    if (std::abs(c.v[i]) > tol) d = std::max(d, hamming(i, c.N, c.dim()));
  return d;
}

static void require_real(const DenseFunction &f) {
  for (const auto &z : f.v)
    if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z.real())))
      throw PreconditionError("function must be real-valued");
}

static CheckResult finish(double lhs, double rhs) {
  CheckResult r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.ok = lhs <= rhs * (1 + 1e-9) + 1e-12;
  return r;
}

CheckResult check_hypercontractivity(const DenseFunction &f, double q, int d) {
  if (q < 2) throw PreconditionError("q must be at least 2");
  require_real(f);
  const double scale = std::max(1.0, norm_p(f, 2));
  if (degree_of(f, 1e-10 * scale) > d) throw PreconditionError("function has degree above d");
  return finish(norm_p(f, q), std::pow(std::sqrt((q - 1) * f.N), d) * norm_p(f, 2));
}

CheckResult check_level_d(const DenseFunction &f, int d) {
  require_real(f);
  const double n1 = norm_p(f, 1), n2 = norm_p(f, 2);
  CheckResult r;
  if (n1 == 0) {
    r.skipped = true;
    r.note = "zero function";
    return r;
  }
  const double L = std::log2(n2 / n1);
  if (d < 1 || d > 2 * L) {
    r.skipped = true;
    r.note = "precondition 1 <= d <= 2 log2(|f|_2/|f|_1) fails";
    return r;
  }
  const double low = norm_p(low_degree(f, d), 2);
  return finish(low * low, n1 * n1 * std::pow(8.0 * f.N / d * L, d));
}

double growth_bound(double C, double n, int d, double s_star) {
  if (d < 1 || d > n) throw DomainError("level d must lie in [1, n]");
  return std::pow(C * std::sqrt(n * std::max(s_star, static_cast<double>(d))) / d, d / 2.0);
}

double high_degree_bound(double s_star, int N, int dim, int d) {
  double r = std::pow(2.0, s_star / 2);
  if (d > 0) r *= std::pow(3.0 * N * dim / d, d / 2.0);
  return r;
}

nlohmann::json BoundedReport::to_json() const {
  return {{"mean_ok", mean_ok},       {"levels_ok", levels_ok},   {"sup_ok", sup_ok},
          {"bounded", bounded()},     {"mean", mean},             {"sup", sup},
          {"levels_checked", levels_checked}, {"level_wiener", level_w},
          {"level_bound", level_bound}, {"worst_level", worst_level},
          {"worst_slack", worst_slack}, {"high_degree_ok", high_degree_ok}};
}

BoundedReport certify_bounded(const DenseFunction &f, const GrowthParams &p) {
  require_real(f);
  BoundedReport r;
  DenseFunction c = dft(f);
  r.mean = c.v[0].real();
  r.mean_ok = std::abs(r.mean - 1) <= p.delta + 1e-12;
  r.sup = 0;
  for (const auto &z : f.v) r.sup = std::max(r.sup, z.real());
  r.sup_ok = r.sup <= std::pow(2.0, p.s_star) * (1 + 1e-12);
  r.level_w = level_wiener(c);
  const int top = static_cast<int>(std::floor(p.n / (p.C * p.C)));
  r.levels_checked = std::max(0, std::min(top, f.dim()));
  r.worst_slack = INFINITY;
  for (int d = 1; d <= r.levels_checked; ++d) {
    double b = growth_bound(p.C, p.n, d, p.s_star);
    r.level_bound.push_back(b);
    double slack = b - r.level_w[d];
    if (slack < r.worst_slack) {
      r.worst_slack = slack;
      r.worst_level = d;
    }
    if (r.level_w[d] > b * (1 + 1e-9) + 1e-10) r.levels_ok = false;
  }
  for (int d = 0; d <= f.dim(); ++d)
    if (r.level_w[d] > high_degree_bound(p.s_star, f.N, f.dim(), d) * (1 + 1e-9) + 1e-10)
      r.high_degree_ok = false;
  return r;
}

double basic_calculus_slack(double x, double l) {
  // ln lhs = l ln(1+x) + ln(1 - l x (1+x)^-l); lhs >= 1 by Bernoulli
  const double t = l * x * std::exp(-l * std::log1p(x));
  const double ln_lhs = l * std::log1p(x) + std::log1p(-t);
  const double ln_rhs = l / 2 * std::log1p(2 * l * x * x);
  return ln_rhs - ln_lhs;
}

static double xlogx(double v) { return v * std::log(v); }

std::pair<double, double> entropy_ratio_slack(double a, double b, double c, double d) {
  const double lr = xlogx(a) + xlogx(d) - xlogx(b) - xlogx(c);
  return {lr, d * std::log(2.0) - lr};
}

ScalarReport sweep_basic_calculus(std::uint64_t samples, std::uint64_t seed) {
  ScalarReport rep;
  rep.worst_slack = INFINITY;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, s));
    double x = s % 50 == 0 ? 0.0 : std::exp(-12 + 15 * rng.uniform01());
    double l = 2 + (s % 3 == 0 ? static_cast<double>(rng.below(40)) : 60 * rng.uniform01());
    double sl = basic_calculus_slack(x, l);
    double tol = 1e-12 * (1 + l * std::log1p(x));
    ++rep.samples;
    if (sl < -tol) ++rep.violations;
    rep.worst_slack = std::min(rep.worst_slack, sl);
  }
  return rep;
}

ScalarReport sweep_entropy_ratio(std::uint64_t samples, std::uint64_t seed) {
  ScalarReport rep;
  rep.worst_slack = INFINITY;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, s));
    double a = std::exp(-6 + 10 * rng.uniform01());
    double span = std::exp(-4 + 8 * rng.uniform01());
    double b = a + span * rng.uniform01();
    double c = b + span * rng.uniform01();
    if (s % 10 == 0) c = b;  // boundary cases
    double d = b + c - a;
    auto [lo, hi] = entropy_ratio_slack(a, b, c, d);
    double tol = 1e-12 * (std::abs(xlogx(d)) + std::abs(xlogx(c)) + 1);
    ++rep.samples;
    if (lo < -tol || hi < -tol) ++rep.violations;
    rep.worst_slack = std::min({rep.worst_slack, lo, hi});
  }
  return rep;
}

std::string spectrum_csv(const DenseFunction &c, double tol) {
  std::ostringstream os;
  os.precision(17);
  os << "b,re,im\n";
  for (std::uint64_t i = 0; i < c.size(); ++i)
    if (std::abs(c.v[i]) > tol) os << i << ',' << c.v[i].real() << ',' << c.v[i].imag() << '\n';
  return os.str();
}

}  // namespace dlab
