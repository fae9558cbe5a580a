#include "dlab/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dlab {

Caps &default_caps() {
  static Caps caps;
  return caps;
}

std::string q_str(const Q &q) {
  Q c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Q q_parse(const std::string &s) {
  Q q;
  if (q.set_str(s, 10) != 0) throw DomainError("bad rational: " + s);
  q.canonicalize();
  return q;
}

double q_double(const Q &q) { return q.get_d(); }

std::uint64_t tuple_index(const Tuple &t, int q) {
  std::uint64_t idx = 0, mul = 1;
  for (int v : t) {
    idx += static_cast<std::uint64_t>(v) * mul;
    mul *= static_cast<std::uint64_t>(q);
  }
  return idx;
}

Tuple index_tuple(std::uint64_t idx, int q, int k) {
  Tuple t(k);
  for (int j = 0; j < k; ++j) {
    t[j] = static_cast<int>(idx % q);
    idx /= q;
  }
  return t;
}

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

std::uint64_t ipow_sat(std::uint64_t b, unsigned e) {
  unsigned __int128 r = 1;
  while (e--) {
    r *= b;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (stream * 0xd1b54a32d192ed03ull);
  splitmix64(s);
  return splitmix64(s);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto &w : s_) w = splitmix64(st);
}

static inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Lemire's multiply-shift with rejection
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < n) {
    std::uint64_t thresh = -n % n;
    while (low < thresh) {
      m = static_cast<unsigned __int128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform01() { return (next() >> 11) * 0x1.0p-53; }

Interval wilson(std::uint64_t hits, std::uint64_t trials, double z) {
  Interval r;
  if (trials == 0) return {0, 0, 1};
  double n = static_cast<double>(trials), p = hits / n;
  double denom = 1 + z * z / n;
  double centre = (p + z * z / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  r.estimate = p;
  r.lo = std::max(0.0, centre - half);
  r.hi = std::min(1.0, centre + half);
  return r;
}

std::string content_hash(const std::string &bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dlab
