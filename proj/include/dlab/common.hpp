#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlab {

using Q = mpq_class;
using Z = mpz_class;
using Tuple = std::vector<int>;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// thrown when an enumeration would exceed a configured cap
struct CapExceeded : std::runtime_error {
  std::string cap;
  CapExceeded(const std::string &name, const std::string &what)
      : std::runtime_error("cap exceeded: " + name + " (" + what + ")"), cap(name) {}
};

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Caps {
  std::uint64_t enumeration = 1ull << 22;  // |Sigma|^|V|
  std::uint64_t omega = 1ull << 20;        // |Omega^{U,m}|
  std::uint64_t partial_matchings = 1ull << 16;
  std::uint64_t joint_masses = 1ull << 26;
  std::uint64_t fourier = 1ull << 24;      // N^|Lambda|
};

Caps &default_caps();

// canonicalized num/den; mpq_class(a, b) alone does not reduce
inline Q frac(long num, long den) {
  Q q(num, den);
  q.canonicalize();
  return q;
}

std::string q_str(const Q &q);
Q q_parse(const std::string &s);
double q_double(const Q &q);

// little-endian mixed radix: idx = sum t_j q^j
std::uint64_t tuple_index(const Tuple &t, int q);
Tuple index_tuple(std::uint64_t idx, int q, int k);
std::uint64_t ipow(std::uint64_t b, unsigned e);
// saturating power, returns UINT64_MAX on overflow
std::uint64_t ipow_sat(std::uint64_t b, unsigned e);

std::uint64_t splitmix64(std::uint64_t &state);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// xoshiro256** with splitmix64 seeding; draws are identical on every platform
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);
  std::uint64_t next();
  std::uint64_t below(std::uint64_t n);  // uniform in [0, n)
  double uniform01();
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }
  result_type operator()() { return next(); }

 private:
  std::uint64_t s_[4];
};

struct Interval {
  double estimate = 0, lo = 0, hi = 0;
};
// Wilson score interval for hits/trials at z standard deviations
Interval wilson(std::uint64_t hits, std::uint64_t trials, double z = 1.96);

// FNV-1a over a byte string, rendered as 16 hex digits
std::string content_hash(const std::string &bytes);

}  // namespace dlab
