#include "dlab/matching_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dlab {

void KUniverse::validate() const {
  if (parts.empty()) throw StructuralError("universe needs at least one part");
  std::set<int> seen;
  for (const auto &p : parts) {
    if (p.size() != parts[0].size()) throw StructuralError("universe parts differ in size");
    for (int v : p)
      if (!seen.insert(v).second) throw StructuralError("universe parts overlap");
  }
}

KUniverse KUniverse::standard(int k, int size, int offset) {
  KUniverse U;
  U.parts.assign(k, std::vector<int>(size));
  for (int j = 0; j < k; ++j)
    for (int p = 0; p < size; ++p) U.parts[j][p] = offset + j * size + p;
  return U;
}

void LabeledMatching::normalize() { std::sort(edges.begin(), edges.end()); }

static Z binom(int n, int r) {
  if (r < 0 || r > n) return 0;
  Z out;
  mpz_bin_uiui(out.get_mpz_t(), n, r);
  return out;
}

static Z factorial(int n) {
  Z out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

Z count_matchings_parts(const std::vector<int> &sizes, int m) {
  if (m < 0) throw DomainError("matching size must be nonnegative");
  Z c = 1;
  for (int s : sizes) {
    if (m > s) throw DomainError("matching size exceeds universe part size");
    c *= binom(s, m);
  }
  if (!sizes.empty()) {
    Z f = factorial(m);
    for (std::size_t j = 1; j < sizes.size(); ++j) c *= f;
  }
  return c;
}

Z count_matchings(int usize, int k, int m) {
  if (m < 0 || m > usize) throw DomainError("m must lie in [0, |U|]");
  return count_matchings_parts(std::vector<int>(k, usize), m);
}

static void check_cap(const Z &size, std::uint64_t cap, const char *name) {
  if (size > Z(std::to_string(cap))) throw CapExceeded(name, "size " + size.get_str());
}

// part 0 takes an increasing subset, later parts take ordered arrangements,
// so each matching appears once with edges sorted by their first coordinate
std::vector<Matching> enumerate_matchings(const std::vector<std::vector<int>> &avail, int m,
                                          const Caps &caps) {
  std::vector<int> sizes;
  for (const auto &a : avail) sizes.push_back(static_cast<int>(a.size()));
  check_cap(count_matchings_parts(sizes, m), caps.omega, "omega");
  const int k = static_cast<int>(avail.size());
  std::vector<Matching> out;
  Matching cur(m, Tuple(k));
  std::vector<std::vector<char>> used(k);
  for (int j = 0; j < k; ++j) used[j].assign(avail[j].size(), 0);

  if (m == 0) {
    out.push_back({});
    return out;
  }
  auto rec0 = [&](auto &&self, int t, int start0) -> void {
    if (t == m) {
      out.push_back(cur);
      return;
    }
    for (std::size_t a = start0; a < avail[0].size(); ++a) {
      cur[t][0] = avail[0][a];
      auto inner = [&](auto &&me, int j) -> void {
        if (j == k) {
          self(self, t + 1, static_cast<int>(a) + 1);
          return;
        }
        for (std::size_t b = 0; b < avail[j].size(); ++b) {
          if (used[j][b]) continue;
          used[j][b] = 1;
          cur[t][j] = avail[j][b];
          me(me, j + 1);
          used[j][b] = 0;
        }
      };
      inner(inner, 1);
    }
  };
  rec0(rec0, 0, 0);
  return out;
}

std::vector<Matching> enumerate_matchings(int usize, int k, int m, const Caps &caps) {
  std::vector<int> all(usize);
  for (int p = 0; p < usize; ++p) all[p] = p;
  return enumerate_matchings(std::vector<std::vector<int>>(k, all), m, caps);
}

static void append_labelings(const Matching &M, const LabeledMatching &base, int N, int k,
                             std::vector<LabeledMatching> &out) {
  const int m = static_cast<int>(M.size());
  const std::uint64_t L = ipow(N, k * m);
  for (std::uint64_t idx = 0; idx < L; ++idx) {
    Tuple digits = index_tuple(idx, N, k * m);
    LabeledMatching y = base;
    for (int t = 0; t < m; ++t)
      y.edges.push_back({M[t], Tuple(digits.begin() + t * k, digits.begin() + (t + 1) * k)});
    y.normalize();
    out.push_back(std::move(y));
  }
}

std::vector<LabeledMatching> enumerate_labeled(int usize, int k, int m, int N, const Caps &caps) {
  return enumerate_restricted(usize, k, m, N, LabeledMatching{}, caps);
}

std::vector<LabeledMatching> enumerate_restricted(int usize, int k, int m, int N,
                                                  const LabeledMatching &z, const Caps &caps) {
  check_cap(restricted_size(usize, k, m, N, z), caps.omega, "omega");
  auto avail = subtract_universe(usize, k, z);
  std::vector<LabeledMatching> out;
  for (const auto &M : enumerate_matchings(avail, m - z.size(), caps))
    append_labelings(M, z, N, k, out);
  return out;
}

// uniform random injective draw of m positions out of [0, s), in draw order
static std::vector<int> partial_shuffle(int s, int m, Rng &rng) {
  std::vector<int> pool(s);
  for (int p = 0; p < s; ++p) pool[p] = p;
  for (int t = 0; t < m; ++t) std::swap(pool[t], pool[t + rng.below(s - t)]);
  pool.resize(m);
  return pool;
}

Matching sample_matching(int usize, int k, int m, Rng &rng) {
  if (m < 0 || m > usize) throw DomainError("m must lie in [0, |U|]");
  Matching M(m, Tuple(k));
  for (int j = 0; j < k; ++j) {
    auto pick = partial_shuffle(usize, m, rng);
    for (int t = 0; t < m; ++t) M[t][j] = pick[t];
  }
  std::sort(M.begin(), M.end());
  return M;
}

LabeledMatching sample_labeled(int usize, int k, int m, int N, Rng &rng) {
  Matching M = sample_matching(usize, k, m, rng);
  LabeledMatching y;
  for (auto &e : M) {
    Tuple lab(k);
    for (int j = 0; j < k; ++j) lab[j] = static_cast<int>(rng.below(N));
    y.edges.push_back({e, lab});
  }
  return y;
}

bool is_matching(const LabeledMatching &y, int usize, int k, int N) {
  std::vector<std::set<int>> seen(k);
  for (const auto &e : y.edges) {
    if (static_cast<int>(e.pos.size()) != k || static_cast<int>(e.label.size()) != k) return false;
    for (int j = 0; j < k; ++j) {
      if (e.pos[j] < 0 || e.pos[j] >= usize) return false;
      if (e.label[j] < 0 || e.label[j] >= N) return false;
      if (!seen[j].insert(e.pos[j]).second) return false;
    }
  }
  return std::is_sorted(y.edges.begin(), y.edges.end());
}

bool subsumes(const LabeledMatching &zp, const LabeledMatching &z) {
  for (const auto &e : z.edges)
    if (!std::binary_search(zp.edges.begin(), zp.edges.end(), e)) return false;
  return true;
}

std::vector<std::vector<int>> subtract_universe(int usize, int k, const LabeledMatching &z) {
  std::vector<std::vector<char>> used(k, std::vector<char>(usize, 0));
  for (const auto &e : z.edges)
    for (int j = 0; j < k; ++j) used[j][e.pos[j]] = 1;
  std::vector<std::vector<int>> avail(k);
  for (int j = 0; j < k; ++j)
    for (int p = 0; p < usize; ++p)
      if (!used[j][p]) avail[j].push_back(p);
  return avail;
}

Z restricted_size(int usize, int k, int m, int N, const LabeledMatching &z) {
  const int s = z.size();
  if (s > m) throw DomainError("restriction larger than m");
  Z c = count_matchings(usize - s, k, m - s);
  Z nn;
  mpz_ui_pow_ui(nn.get_mpz_t(), N, static_cast<unsigned long>(k) * (m - s));
  return c * nn;
}

// y minus the edges of z; throws unless y subsumes z
static std::vector<LabeledEdge> extras(const LabeledMatching &y, const LabeledMatching &z) {
  if (!subsumes(y, z)) throw ContractError("element of A does not subsume z");
  std::vector<LabeledEdge> out;
  for (const auto &e : y.edges)
    if (!std::binary_search(z.edges.begin(), z.edges.end(), e)) out.push_back(e);
  return out;
}

GlobalReport check_global(const std::vector<LabeledMatching> &A, const LabeledMatching &z,
                          int usize, int k, int m, int N, const Caps &caps) {
  check_cap(restricted_size(usize, k, m, N, z), caps.omega, "omega");
  GlobalReport rep;
  if (A.empty()) return rep;
  // only z' with A ∩ Omega_z' nonempty can violate the inequality; each is
  // z plus a subset of some y's extra edges
  std::map<LabeledMatching, std::uint64_t> cnt;
  for (const auto &y : A) {
    auto ex = extras(y, z);
    const std::size_t d = ex.size();
    for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
      LabeledMatching zp = z;
      for (std::size_t t = 0; t < d; ++t)
        if (mask >> t & 1) zp.edges.push_back(ex[t]);
      zp.normalize();
      ++cnt[zp];
    }
  }
  const Q base = Q(Z(static_cast<unsigned long>(A.size()))) / Q(restricted_size(usize, k, m, N, z));
  for (const auto &[zp, c] : cnt) {
    Q dens = Q(Z(static_cast<unsigned long>(c))) / Q(restricted_size(usize, k, m, N, zp));
    Q allowed = base * Q(Z(1) << (zp.size() - z.size()));
    Q ratio = dens / allowed;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.witness = zp;
    }
  }
  rep.global = rep.worst_ratio <= 1;
  return rep;
}

bool is_global(const std::vector<LabeledMatching> &A, const LabeledMatching &z, int usize, int k,
               int m, int N, const Caps &caps) {
  return check_global(A, z, usize, k, m, N, caps).global;
}

MatchingDistribution support_law(const std::vector<LabeledMatching> &A) {
  MatchingDistribution D;
  if (A.empty()) return D;
  Q w = frac(1, static_cast<long>(A.size()));
  for (const auto &y : A) {
    Matching M;
    for (const auto &e : y.edges) M.push_back(e.pos);
    D[M] += w;
  }
  return D;
}

bool is_pseudo_uniform(const MatchingDistribution &D, int usize, int k, int m, const Caps &caps) {
  Z total = 0;
  for (int d = 0; d <= m; ++d) total += count_matchings(usize, k, d);
  check_cap(total, caps.partial_matchings, "partial_matchings");
  Q sum = 0;
  std::map<Matching, Q> contain;
  for (const auto &[M, p] : D) {
    if (static_cast<int>(M.size()) != m) throw DomainError("distribution support has wrong size");
    if (p < 0) throw DomainError("negative mass");
    sum += p;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      Matching S;
      for (int t = 0; t < m; ++t)
        if (mask >> t & 1) S.push_back(M[t]);
      contain[S] += p;
    }
  }
  if (sum != 1) throw DomainError("distribution does not sum to 1");
  const Q all = Q(count_matchings(usize, k, m));
  for (const auto &[S, p] : contain) {
    const int d = static_cast<int>(S.size());
    Q unif = Q(count_matchings(usize - d, k, m - d)) / all;
    if (p > Q(Z(1) << d) * unif) return false;
  }
  return true;
}

Q edge_containment_ratio(const std::vector<LabeledMatching> &A, const LabeledMatching &z,
                         int usize, int k, int m) {
  if (A.empty()) return 0;
  std::map<Matching, std::uint64_t> cnt;
  for (const auto &y : A) {
    auto ex = extras(y, z);
    const std::size_t d = ex.size();
    for (std::uint64_t mask = 1; mask < (1ull << d); ++mask) {
      Matching S;
      for (std::size_t t = 0; t < d; ++t)
        if (mask >> t & 1) S.push_back(ex[t].pos);
      ++cnt[S];
    }
  }
  Z uk;
  mpz_ui_pow_ui(uk.get_mpz_t(), usize, k);
  Z sixk;
  mpz_ui_pow_ui(sixk.get_mpz_t(), 6, k);
  Q step = Q(sixk * m) / Q(uk);
  Q worst = 1;  // S = supp z
  for (const auto &[S, c] : cnt) {
    Q pr = Q(Z(static_cast<unsigned long>(c))) / Q(Z(static_cast<unsigned long>(A.size())));
    Q bound = 1;
    for (std::size_t t = 0; t < S.size(); ++t) bound *= step;
    worst = std::max(worst, Q(pr / bound));
  }
  return worst;
}

int SpectralPoint::weight() const {
  int w = outside;
  for (int v : on_universe) w += v != 0;
  return w;
}

InBd internal_boundary(const Matching &M, const SpectralPoint &z, int usize, int k) {
  InBd r;
  for (const auto &e : M) {
    int c = 0;
    for (int j = 0; j < k; ++j) c += z.on_universe[j * usize + e[j]] != 0;
    if (c == 1)
      ++r.bd;
    else if (c >= 2)
      r.in += c;
  }
  return r;
}

Q q_exact(int usize, int k, int m, const SpectralPoint &z, int i, int b, const Caps &caps) {
  auto all = enumerate_matchings(usize, k, m, caps);
  std::uint64_t hit = 0;
  for (const auto &M : all) {
    auto r = internal_boundary(M, z, usize, k);
    hit += r.in == i && r.bd == b;
  }
  return Q(Z(static_cast<unsigned long>(hit))) / Q(Z(static_cast<unsigned long>(all.size())));
}

static bool q_trial(int usize, int k, int m, const SpectralPoint &z, int i, int b,
                    std::uint64_t seed, std::uint64_t trial) {
  Rng rng(derive_seed(seed, trial));
  auto r = internal_boundary(sample_matching(usize, k, m, rng), z, usize, k);
  return r.in == i && r.bd == b;
}

Interval estimate_q(int usize, int k, int m, const SpectralPoint &z, int i, int b,
                    std::uint64_t trials, std::uint64_t seed) {
  if (static_cast<int>(z.on_universe.size()) != k * usize)
    throw DomainError("spectral point has wrong length");
  std::uint64_t hits = 0;
  const long long T = static_cast<long long>(trials);
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (long long t = 0; t < T; ++t) hits += q_trial(usize, k, m, z, i, b, seed, t);
  return wilson(hits, trials);
}

Interval estimate_q_serial(int usize, int k, int m, const SpectralPoint &z, int i, int b,
                           std::uint64_t trials, std::uint64_t seed) {
  if (static_cast<int>(z.on_universe.size()) != k * usize)
    throw DomainError("spectral point has wrong length");
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) hits += q_trial(usize, k, m, z, i, b, seed, t);
  return wilson(hits, trials);
}

double q_bound(int k, int t, int i, int b, int m, int usize) {
  double u = usize;
  double r = std::pow(24.0 * k * k, t);
  if (i > 0) r *= std::pow(i * static_cast<double>(m) / (u * u), i / 2.0);
  r *= std::pow(m / u, b);
  return r;
}

nlohmann::json matching_to_json(const LabeledMatching &y) {
  nlohmann::json out = nlohmann::json::array();
  LabeledMatching s = y;
  s.normalize();
  for (const auto &e : s.edges) out.push_back({e.pos, e.label});
  return out;
}

LabeledMatching matching_from_json(const nlohmann::json &j) {
  if (!j.is_array()) throw DomainError("labeled matching must be a list of [edge, label] pairs");
  LabeledMatching y;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const auto &p = j[t];
    if (!p.is_array() || p.size() != 2 || !p[0].is_array() || !p[1].is_array())
      throw DomainError("labeled matching entry " + std::to_string(t) + " must be [edge, label]");
    y.edges.push_back({p[0].get<Tuple>(), p[1].get<Tuple>()});
  }
  y.normalize();
  return y;
}

}  // namespace dlab
