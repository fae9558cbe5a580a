#pragma once

#include "dlab/common.hpp"

#include <json.hpp>
#include <map>
#include <vector>

namespace dlab {

// k disjoint parts of equal size; elements are ground indices
struct KUniverse {
  std::vector<std::vector<int>> parts;

  int k() const { return static_cast<int>(parts.size()); }
  int size() const { return parts.empty() ? 0 : static_cast<int>(parts[0].size()); }
  void validate() const;
  // parts 0..k-1 holding {offset + j*size + p}
  static KUniverse standard(int k, int size, int offset = 0);
};

// an edge is given by its position in each part; label in Z_N^k
struct LabeledEdge {
  Tuple pos;
  Tuple label;
  auto operator<=>(const LabeledEdge &) const = default;
};

// edges kept sorted by pos; also used for restrictions (|supp| <= m)
struct LabeledMatching {
  std::vector<LabeledEdge> edges;

  int size() const { return static_cast<int>(edges.size()); }
  void normalize();
  auto operator<=>(const LabeledMatching &) const = default;
  bool operator==(const LabeledMatching &) const = default;
};

using Matching = std::vector<Tuple>;  // sorted edge position tuples

Z count_matchings(int usize, int k, int m);
// parts of possibly unequal sizes
Z count_matchings_parts(const std::vector<int> &sizes, int m);

// all matchings of size m using only the given available positions per part
std::vector<Matching> enumerate_matchings(const std::vector<std::vector<int>> &avail, int m,
                                          const Caps &caps = default_caps());
std::vector<Matching> enumerate_matchings(int usize, int k, int m,
                                          const Caps &caps = default_caps());

std::vector<LabeledMatching> enumerate_labeled(int usize, int k, int m, int N,
                                               const Caps &caps = default_caps());
// Omega_z: labeled matchings subsuming z
std::vector<LabeledMatching> enumerate_restricted(int usize, int k, int m, int N,
                                                  const LabeledMatching &z,
                                                  const Caps &caps = default_caps());
Matching sample_matching(int usize, int k, int m, Rng &rng);
LabeledMatching sample_labeled(int usize, int k, int m, int N, Rng &rng);

bool is_matching(const LabeledMatching &y, int usize, int k, int N);
bool subsumes(const LabeledMatching &zp, const LabeledMatching &z);
// per-part positions not touched by supp(z)
std::vector<std::vector<int>> subtract_universe(int usize, int k, const LabeledMatching &z);
Z restricted_size(int usize, int k, int m, int N, const LabeledMatching &z);

struct GlobalReport {
  bool global = true;
  Q worst_ratio = 0;  // max over z' of density ratio / 2^{|z'|-|z|}
  LabeledMatching witness;
};
GlobalReport check_global(const std::vector<LabeledMatching> &A, const LabeledMatching &z,
                          int usize, int k, int m, int N, const Caps &caps = default_caps());
bool is_global(const std::vector<LabeledMatching> &A, const LabeledMatching &z, int usize, int k,
               int m, int N, const Caps &caps = default_caps());

using MatchingDistribution = std::map<Matching, Q>;
bool is_pseudo_uniform(const MatchingDistribution &D, int usize, int k, int m,
                       const Caps &caps = default_caps());
MatchingDistribution support_law(const std::vector<LabeledMatching> &A);

// max over S ⊇ supp z of Pr_{y in A}[S ⊆ supp y] / (6^k m / |U|^k)^{|S|-|z|}
Q edge_containment_ratio(const std::vector<LabeledMatching> &A, const LabeledMatching &z,
                         int usize, int k, int m);

// z on the coordinates of U (part-major, k*|U| entries) plus weight outside U
struct SpectralPoint {
  std::vector<int> on_universe;
  int outside = 0;
  int weight() const;
};

struct InBd {
  int in = 0, bd = 0;
};
InBd internal_boundary(const Matching &M, const SpectralPoint &z, int usize, int k);

Q q_exact(int usize, int k, int m, const SpectralPoint &z, int i, int b,
          const Caps &caps = default_caps());
Interval estimate_q(int usize, int k, int m, const SpectralPoint &z, int i, int b,
                    std::uint64_t trials, std::uint64_t seed);
Interval estimate_q_serial(int usize, int k, int m, const SpectralPoint &z, int i, int b,
                           std::uint64_t trials, std::uint64_t seed);
double q_bound(int k, int t, int i, int b, int m, int usize);

nlohmann::json matching_to_json(const LabeledMatching &y);
LabeledMatching matching_from_json(const nlohmann::json &j);

}  // namespace dlab
