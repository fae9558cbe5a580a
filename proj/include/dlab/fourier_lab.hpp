#pragma once

#include "dlab/common.hpp"

#include <complex>
#include <json.hpp>
#include <string>
#include <vector>

namespace dlab {

using cplx = std::complex<double>;

// function on Z_N^Lambda; index of x is sum_i x_i N^i over lambda in order
struct DenseFunction {
  int N = 2;
  std::vector<int> lambda;  // coordinate labels (e.g. ground indices)
  std::vector<cplx> v;

  int dim() const { return static_cast<int>(lambda.size()); }
  std::size_t size() const { return v.size(); }
  static DenseFunction zeros(int N, std::vector<int> lambda, const Caps &caps = default_caps());
  static DenseFunction zeros(int N, int dim, const Caps &caps = default_caps());
};

// f^(b) = E_x f(x) conj(chi_b(x)), chi_b(x) = exp(2 pi i <b,x> / N)
DenseFunction dft(const DenseFunction &f);
DenseFunction idft(const DenseFunction &c);
DenseFunction dft_serial(const DenseFunction &f);
DenseFunction idft_serial(const DenseFunction &c);
DenseFunction character(int N, int dim, const Tuple &b);

int hamming(std::uint64_t idx, int N, int dim);

double mean_real(const DenseFunction &f);
double norm_p(const DenseFunction &f, double p);
double sup_abs(const DenseFunction &f);

double wiener_norm(const DenseFunction &f);
double wiener_norm_coeffs(const DenseFunction &c);
// per level d = 0..dim, sum of |f^(b)| over |supp b| = d
std::vector<double> level_wiener(const DenseFunction &c);
DenseFunction degree_part(const DenseFunction &f, int d);
DenseFunction low_degree(const DenseFunction &f, int d);
DenseFunction pointwise_product(const DenseFunction &f, const DenseFunction &g);
int degree_of(const DenseFunction &f, double tol = 1e-10);

struct CheckResult {
  bool ok = true;
  bool skipped = false;
  double lhs = 0, rhs = 0;
  double slack = 0;  // rhs - lhs
  std::string note;
};

// ||f||_q <= (sqrt((q-1)N))^d ||f||_2 for real f of degree <= d
CheckResult check_hypercontractivity(const DenseFunction &f, double q, int d);
// ||f^{<=d}||_2^2 <= ||f||_1^2 (8N/d log2(||f||_2/||f||_1))^d
CheckResult check_level_d(const DenseFunction &f, int d);

struct GrowthParams {
  double n = 1, C = 1, s_star = 1, delta = 0;
};
double growth_bound(double C, double n, int d, double s_star);
// 2^{s*/2} (3 N |Lambda| / d)^{d/2}, with the d = 0 term read as 2^{s*/2}
double high_degree_bound(double s_star, int N, int dim, int d);

struct BoundedReport {
  bool mean_ok = true, levels_ok = true, sup_ok = true;
  bool bounded() const { return mean_ok && levels_ok && sup_ok; }
  double mean = 0, sup = 0;
  int levels_checked = 0;  // levels 1..floor(C^-2 n), capped at |Lambda|
  std::vector<double> level_w, level_bound;
  int worst_level = 0;
  double worst_slack = 0;
  bool high_degree_ok = true;  // crude bound at every level
  nlohmann::json to_json() const;
};
BoundedReport certify_bounded(const DenseFunction &f, const GrowthParams &p);

struct ScalarReport {
  std::uint64_t samples = 0, violations = 0;
  double worst_slack = 0;
};
// (1+x)^l - l x <= (1+2 l x^2)^{l/2}; returns rhs - lhs in log-safe form
double basic_calculus_slack(double x, double l);
// returns (ln ratio, d ln 2 - ln ratio), both should be >= 0
std::pair<double, double> entropy_ratio_slack(double a, double b, double c, double d);
ScalarReport sweep_basic_calculus(std::uint64_t samples, std::uint64_t seed);
ScalarReport sweep_entropy_ratio(std::uint64_t samples, std::uint64_t seed);

std::string spectrum_csv(const DenseFunction &c, double tol = 0);

}  // namespace dlab
