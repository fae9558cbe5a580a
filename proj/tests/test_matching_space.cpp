#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dlab/matching_space.hpp"

#include <cmath>
#include <set>

using namespace dlab;

namespace {

// all sets of m pairwise vertex-disjoint edges of [u]^k, by subset search over edges
std::set<Matching> brute_matchings(int u, int k, int m) {
  std::vector<Tuple> edges;
  for (std::uint64_t i = 0; i < ipow(u, k); ++i) edges.push_back(index_tuple(i, u, k));
  std::set<Matching> out;
  const std::size_t E = edges.size();
  for (std::uint64_t mask = 0; mask < (1ull << E); ++mask) {
    if (__builtin_popcountll(mask) != m) continue;
    Matching M;
    std::vector<std::set<int>> used(k);
    bool ok = true;
    for (std::size_t e = 0; e < E && ok; ++e) {
      if (!(mask >> e & 1)) continue;
      for (int j = 0; j < k; ++j) ok = ok && used[j].insert(edges[e][j]).second;
      M.push_back(edges[e]);
    }
    if (ok) {
      std::sort(M.begin(), M.end());
      out.insert(M);
    }
  }
  return out;
}

// every labeled partial matching of size <= m, as candidates for z'
std::vector<LabeledMatching> all_restrictions(int u, int k, int m, int N) {
  std::vector<LabeledMatching> out;
  for (int d = 0; d <= m; ++d)
    for (auto &y : enumerate_labeled(u, k, d, N)) out.push_back(y);
  return out;
}

// definition-level globality check over every subsuming restriction
bool oracle_global(const std::vector<LabeledMatching> &A, const LabeledMatching &z, int u, int k,
                   int m, int N) {
  auto all = enumerate_labeled(u, k, m, N);
  auto density = [&](const LabeledMatching &r) {
    long inA = 0, tot = 0;
    for (const auto &y : all)
      if (subsumes(y, r)) ++tot;
    for (const auto &y : A)
      if (subsumes(y, r)) ++inA;
    return frac(inA, tot);
  };
  Q base = density(z);
  for (const auto &zp : all_restrictions(u, k, m, N)) {
    if (!subsumes(zp, z)) continue;
    if (density(zp) > base * Q(Z(1) << (zp.size() - z.size()))) return false;
  }
  return true;
}

std::vector<LabeledMatching> random_subset(const std::vector<LabeledMatching> &omega, double p,
                                           Rng &rng) {
  std::vector<LabeledMatching> A;
  for (const auto &y : omega)
    if (rng.uniform01() < p) A.push_back(y);
  return A;
}

}  // namespace

TEST_CASE("count_matchings matches brute force") {
  CHECK(count_matchings(2, 2, 1) == 4);
  CHECK(count_matchings(2, 2, 2) == 2);
  CHECK(count_matchings(5, 3, 0) == 1);
  CHECK_THROWS_AS(count_matchings(2, 2, 3), DomainError);
  for (int u = 1; u <= 3; ++u)
    for (int k = 2; k <= 3; ++k)
      for (int m = 0; m <= u; ++m) {
        if (ipow(u, k) > 20) continue;
        auto b = brute_matchings(u, k, m);
        CHECK(count_matchings(u, k, m) == static_cast<unsigned long>(b.size()));
        auto e = enumerate_matchings(u, k, m);
        CHECK(std::set<Matching>(e.begin(), e.end()) == b);
        CHECK(e.size() == b.size());
      }
}

TEST_CASE("enumerate_labeled sizes and order") {
  auto om = enumerate_labeled(2, 2, 1, 2);
  CHECK(om.size() == 16);
  CHECK(std::set<LabeledMatching>(om.begin(), om.end()).size() == 16);
  CHECK(om == enumerate_labeled(2, 2, 1, 2));
  for (const auto &y : om) CHECK(is_matching(y, 2, 2, 2));
  auto zero = enumerate_labeled(3, 2, 0, 5);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].edges.empty());
  Caps tiny;
  tiny.omega = 10;
  CHECK_THROWS_AS(enumerate_labeled(2, 2, 1, 2, tiny), CapExceeded);
}

TEST_CASE("sample_labeled is uniform and reproducible") {
  auto om = enumerate_labeled(2, 2, 1, 2);
  std::map<LabeledMatching, int> idx;
  for (std::size_t i = 0; i < om.size(); ++i) idx[om[i]] = static_cast<int>(i);
  std::vector<long> freq(16, 0);
  Rng rng(42);
  const long S = 100000;
  for (long s = 0; s < S; ++s) {
    auto y = sample_labeled(2, 2, 1, 2, rng);
    REQUIRE(idx.count(y));
    ++freq[idx[y]];
  }
  const double p = 1.0 / 16, sd = std::sqrt(S * p * (1 - p));
  double chi2 = 0;
  for (long f : freq) {
    CHECK(std::abs(f - S * p) <= 4 * sd);
    chi2 += (f - S * p) * (f - S * p) / (S * p);
  }
  CHECK(chi2 < 45.0);  // 15 dof, far tail
  Rng a(7), b(7);
  for (int i = 0; i < 50; ++i) CHECK(sample_labeled(4, 3, 2, 3, a) == sample_labeled(4, 3, 2, 3, b));
}

TEST_CASE("sampled matchings are uniform over M_{U,m}") {
  auto all = enumerate_matchings(3, 2, 2);
  std::map<Matching, long> freq;
  Rng rng(3);
  const long S = 60000;
  for (long s = 0; s < S; ++s) ++freq[sample_matching(3, 2, 2, rng)];
  CHECK(freq.size() == all.size());
  const double p = 1.0 / all.size(), sd = std::sqrt(S * p * (1 - p));
  for (const auto &M : all) CHECK(std::abs(freq[M] - S * p) <= 4 * sd);
}

TEST_CASE("subsumes") {
  LabeledMatching empty;
  LabeledMatching z{{{{0, 1}, {1, 0}}}};
  LabeledMatching z2{{{{0, 1}, {1, 1}}}};
  LabeledMatching big{{{{0, 1}, {1, 0}}, {{1, 0}, {0, 0}}}};
  big.normalize();
  CHECK(subsumes(z, empty));
  CHECK(subsumes(z, z));
  CHECK_FALSE(subsumes(z2, z));
  CHECK(subsumes(big, z));
  CHECK_FALSE(subsumes(z, big));
}

TEST_CASE("restricted_size against enumeration") {
  CHECK(restricted_size(2, 2, 1, 2, {}) == 16);
  LabeledMatching z{{{{0, 1}, {1, 0}}}};
  CHECK(restricted_size(2, 2, 1, 2, z) == 1);
  CHECK_THROWS_AS(restricted_size(2, 2, 0, 2, z), DomainError);
  auto om = enumerate_labeled(3, 2, 2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(100 + trial);
    int d = static_cast<int>(rng.below(3));
    LabeledMatching zz = sample_labeled(3, 2, d, 2, rng);
    long brute = 0;
    for (const auto &y : om) brute += subsumes(y, zz);
    CHECK(restricted_size(3, 2, 2, 2, zz) == brute);
    CHECK(static_cast<long>(enumerate_restricted(3, 2, 2, 2, zz).size()) == brute);
  }
}

TEST_CASE("is_global examples and oracle agreement") {
  auto om = enumerate_labeled(2, 2, 1, 2);
  CHECK(is_global(om, {}, 2, 2, 1, 2));
  CHECK_FALSE(is_global({om[5]}, {}, 2, 2, 1, 2));
  auto rep = check_global({om[5]}, {}, 2, 2, 1, 2);
  CHECK(rep.worst_ratio == 8);  // density 16x against allowance 2
  LabeledMatching z{{{{0, 1}, {1, 0}}}};
  CHECK(is_global(enumerate_restricted(3, 2, 2, 2, z), z, 3, 2, 2, 2));
  CHECK_THROWS_AS(check_global({om[0]}, LabeledMatching{{{{1, 1}, {1, 1}}}}, 2, 2, 1, 2),
                  ContractError);

  auto om2 = enumerate_labeled(2, 2, 2, 2);
  Rng rng(9);
  int globals = 0;
  for (int trial = 0; trial < 60; ++trial) {
    double p = 0.3 + 0.7 * rng.uniform01();
    auto A = random_subset(om2, p, rng);
    if (A.empty()) continue;
    bool g = is_global(A, {}, 2, 2, 2, 2);
    globals += g;
    CHECK(g == oracle_global(A, {}, 2, 2, 2, 2));
  }
  CHECK(globals > 0);
  CHECK(globals < 60);
}

TEST_CASE("pseudo-uniformity") {
  MatchingDistribution unif;
  auto all = enumerate_matchings(3, 2, 2);
  for (const auto &M : all) unif[M] = frac(1, static_cast<long>(all.size()));
  CHECK(is_pseudo_uniform(unif, 3, 2, 2));
  MatchingDistribution point;
  point[Matching{{0, 0}}] = 1;
  CHECK_FALSE(is_pseudo_uniform(point, 2, 2, 1));
  MatchingDistribution bad;
  bad[Matching{{0, 0}}] = frac(1, 2);
  CHECK_THROWS_AS(is_pseudo_uniform(bad, 2, 2, 1), DomainError);
}

TEST_CASE("support law of a global set is pseudo-uniform") {
  auto om = enumerate_labeled(3, 2, 2, 2);
  Rng rng(11);
  int tested = 0;
  for (int trial = 0; trial < 200 && tested < 25; ++trial) {
    auto A = random_subset(om, 0.2 + 0.6 * rng.uniform01(), rng);
    if (A.empty() || !is_global(A, {}, 3, 2, 2, 2)) continue;
    ++tested;
    CHECK(is_pseudo_uniform(support_law(A), 3, 2, 2));
  }
  CHECK(tested >= 10);
}

TEST_CASE("edges of a z-global set appear with bounded probability") {
  // |U| <= 3, k = 2, |supp z| <= min(m, |U|/2)
  Rng rng(21);
  int tested = 0;
  for (int u = 2; u <= 3; ++u)
    for (int m = 1; m <= u; ++m)
      for (int zs = 0; zs <= std::min(m, u / 2); ++zs)
        for (int trial = 0; trial < 30; ++trial) {
          LabeledMatching z = sample_labeled(u, 2, zs, 2, rng);
          auto om = enumerate_restricted(u, 2, m, 2, z);
          auto A = random_subset(om, 0.3 + 0.7 * rng.uniform01(), rng);
          if (A.empty() || !is_global(A, z, u, 2, m, 2)) continue;
          ++tested;
          CHECK(edge_containment_ratio(A, z, u, 2, m) <= 1);
        }
  CHECK(tested > 30);
}

TEST_CASE("internal and boundary vertices") {
  // k=2, |U|=3; z nonzero on part0 pos0, part1 pos0, part1 pos2
  SpectralPoint z{{1, 0, 0, 2, 0, 1}, 0};
  CHECK(z.weight() == 3);
  auto r = internal_boundary(Matching{{0, 0}, {1, 2}}, z, 3, 2);
  CHECK(r.in == 2);
  CHECK(r.bd == 1);
  r = internal_boundary(Matching{{0, 1}, {2, 0}}, z, 3, 2);
  CHECK(r.in == 0);
  CHECK(r.bd == 2);
}

TEST_CASE("q estimates") {
  SpectralPoint zero{std::vector<int>(16, 0), 0};
  auto iv = estimate_q(8, 2, 2, zero, 0, 0, 2000, 1);
  CHECK(iv.estimate == 1.0);
  SpectralPoint outside{std::vector<int>(16, 0), 3};
  CHECK(estimate_q(8, 2, 2, outside, 0, 0, 2000, 1).estimate == 1.0);

  SpectralPoint one{std::vector<int>(16, 0), 0};
  one.on_universe[3] = 1;
  const std::uint64_t T = 20000;
  auto e = estimate_q(8, 2, 2, one, 0, 1, T, 5);
  double sd = std::sqrt(e.estimate * (1 - e.estimate) / T);
  CHECK(e.estimate - 3 * sd <= 96.0 * 2 / 8);
  CHECK(e.estimate == doctest::Approx(2.0 / 8).epsilon(0.1));  // vertex matched w.p. m/|U|
  CHECK(q_exact(8, 2, 2, one, 0, 1) == frac(1, 4));

  auto s = estimate_q_serial(8, 2, 2, one, 0, 1, T, 5);
  CHECK(s.estimate == e.estimate);
  CHECK(s.lo == e.lo);
}

TEST_CASE("q estimates stay below the closed bound on a random grid") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(2));
    const int u = 4 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(u));
    SpectralPoint z{std::vector<int>(k * u, 0), static_cast<int>(rng.below(2))};
    int nz = 1 + static_cast<int>(rng.below(4));
    for (int c = 0; c < nz; ++c) z.on_universe[rng.below(k * u)] = 1;
    const int t = z.weight();
    for (int i = 0; i <= t; ++i)
      for (int b = 0; i + b <= t; ++b) {
        const std::uint64_t T = 4000;
        auto iv = estimate_q(u, k, m, z, i, b, T, derive_seed(77, trial * 100 + i * 10 + b));
        double sd = std::sqrt(std::max(iv.estimate * (1 - iv.estimate), 1e-12) / T);
        CHECK(iv.estimate - 4 * sd <= q_bound(k, t, i, b, m, u));
      }
  }
}

TEST_CASE("json round trip") {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    auto y = sample_labeled(5, 3, 3, 4, rng);
    CHECK(matching_from_json(matching_to_json(y)) == y);
  }
  CHECK(matching_to_json({}).dump() == "[]");
  CHECK_THROWS_AS(matching_from_json(nlohmann::json::parse("[[1,2]]")), DomainError);
}
