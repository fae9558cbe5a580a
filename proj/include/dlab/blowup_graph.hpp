#pragma once

#include "dlab/lp_relax.hpp"

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

struct DistLabeledGraph {
  std::vector<std::string> vertices;
  std::vector<Tuple> edges;  // ordered k-tuples of vertex indices
  int N = 2;
  int k = 2;
  std::vector<FiniteDistribution> mu;  // one per edge, over Z_N^k
  // [v][sigma] = [lo, hi) when built by reduce_to_graph
  std::vector<std::vector<std::pair<int, int>>> intervals;

  int nv() const { return static_cast<int>(vertices.size()); }
  int ne() const { return static_cast<int>(edges.size()); }
  void validate() const;
};

struct ReduceOptions {
  // per-vertex layout order of the sigma blocks; empty means increasing sigma
  std::vector<std::vector<int>> order;
  // scale N by this factor on top of the lcm
  long n_multiple = 1;
};

DistLabeledGraph reduce_to_graph(const Instance &I, const LPSolution &sol,
                                 const ReduceOptions &opt = {});

DistLabeledGraph single_edge_graph(const FiniteDistribution &mu);

struct BlowupFrame {
  int n = 1;
  int nv = 0;
  int k = 2;
  std::vector<Tuple> edges;
  // universes[e][j] = ground indices of part j of edge e's k-universe
  std::vector<std::vector<std::vector<int>>> universes;

  int ground(int v, int i) const { return v * n + i; }
  int ground_size() const { return nv * n; }
};

BlowupFrame build_frame(const DistLabeledGraph &G, int n);

// restriction of x (indexed by the ground set) to the union of U_e, part-major
std::vector<int> project(const BlowupFrame &frame, int e, const std::vector<int> &x);

nlohmann::json graph_to_json(const DistLabeledGraph &G);
DistLabeledGraph graph_from_json(const nlohmann::json &j);
std::string graph_hash(const DistLabeledGraph &G);

}  // namespace dlab
