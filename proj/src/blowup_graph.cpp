#include "dlab/blowup_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace dlab {

void DistLabeledGraph::validate() const {
  if (N < 2) throw StructuralError("modulus N must be at least 2");
  if (mu.size() != edges.size()) throw StructuralError("one distribution per edge required");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (static_cast<int>(edges[e].size()) != k) throw StructuralError("edge has wrong arity");
    std::set<int> seen(edges[e].begin(), edges[e].end());
    if (static_cast<int>(seen.size()) != k) throw StructuralError("edge repeats a vertex");
    for (int v : edges[e])
      if (v < 0 || v >= nv()) throw StructuralError("edge references unknown vertex");
    if (mu[e].q != N || mu[e].k != k) throw StructuralError("edge distribution has wrong shape");
    mu[e].validate();
    if (!check_onewise(mu[e]))
      throw StructuralError("edge " + std::to_string(e) + " distribution is not one-wise independent");
  }
}

DistLabeledGraph reduce_to_graph(const Instance &I, const LPSolution &sol, const ReduceOptions &opt) {
  std::string why = basic_lp_violation(I, sol);
  if (!why.empty()) throw DomainError("solution is not feasible for BasicLP: " + why);
  Z l = 1;
  for (const auto &row : sol.x)
    for (const auto &p : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p.get_den_mpz_t());
  l *= opt.n_multiple;
  if (!l.fits_sint_p() || l > (1 << 20)) throw CapExceeded("modulus", "N = " + l.get_str());
  const int N = static_cast<int>(l.get_si());

  DistLabeledGraph G;
  G.vertices = I.variables;
  G.N = N;
  G.k = I.k;
  G.intervals.assign(I.nv(), std::vector<std::pair<int, int>>(I.q));
  for (int v = 0; v < I.nv(); ++v) {
    std::vector<int> ord(I.q);
    std::iota(ord.begin(), ord.end(), 0);
    if (!opt.order.empty()) ord = opt.order[v];
    int start = 0;
    for (int s : ord) {
      Q len = sol.x[v][s] * N;
      int w = static_cast<int>(len.get_num().get_si());
      G.intervals[v][s] = {start, start + w};
      start += w;
    }
  }
  if (N < 2) throw StructuralError("LP solution is integral: N = 1 gives no valid modulus");
  const std::uint64_t qk = ipow(I.q, I.k);
  for (int i = 0; i < I.m(); ++i) {
    const auto &c = I.constraints[i];
    G.edges.push_back(c.vars);
    FiniteDistribution mu(N, I.k);
    for (std::uint64_t b = 0; b < qk; ++b) {
      if (sol.z[i][b] == 0) continue;
      Tuple bt = index_tuple(b, I.q, I.k);
      // z_{i,b} spread uniformly over the box prod_j I_{v_j, b_j}
      Q cell = sol.z[i][b];
      std::vector<std::pair<int, int>> box;
      for (int j = 0; j < I.k; ++j) {
        auto iv = G.intervals[c.vars[j]][bt[j]];
        box.push_back(iv);
        cell /= (iv.second - iv.first);
      }
      Tuple u(I.k);
      for (int j = 0; j < I.k; ++j) u[j] = box[j].first;
      for (;;) {
        mu.at(u) += cell;
        int j = 0;
        while (j < I.k && ++u[j] == box[j].second) {
          u[j] = box[j].first;
          ++j;
        }
        if (j == I.k) break;
      }
    }
    G.mu.push_back(std::move(mu));
  }
  G.validate();
  return G;
}

DistLabeledGraph single_edge_graph(const FiniteDistribution &mu) {
  DistLabeledGraph G;
  G.N = mu.q;
  G.k = mu.k;
  for (int v = 0; v < mu.k; ++v) G.vertices.push_back("u" + std::to_string(v));
  Tuple e(mu.k);
  std::iota(e.begin(), e.end(), 0);
  G.edges.push_back(e);
  G.mu.push_back(mu);
  G.validate();
  return G;
}

BlowupFrame build_frame(const DistLabeledGraph &G, int n) {
  if (n < 1) throw DomainError("blow-up factor must be positive");
  BlowupFrame f;
  f.n = n;
  f.nv = G.nv();
  f.k = G.k;
  f.edges = G.edges;
  for (const auto &e : G.edges) {
    std::vector<std::vector<int>> parts;
    for (int v : e) {
      std::vector<int> part(n);
      for (int i = 0; i < n; ++i) part[i] = f.ground(v, i);
      parts.push_back(std::move(part));
    }
    f.universes.push_back(std::move(parts));
  }
  return f;
}

std::vector<int> project(const BlowupFrame &frame, int e, const std::vector<int> &x) {
  if (static_cast<int>(x.size()) != frame.ground_size()) throw DomainError("x is not indexed by the ground set");
  std::vector<int> out;
  out.reserve(frame.k * frame.n);
  for (const auto &part : frame.universes[e])
    for (int g : part) out.push_back(x[g]);
  return out;
}

nlohmann::json graph_to_json(const DistLabeledGraph &G) {
  nlohmann::json j;
  j["N"] = G.N;
  j["k"] = G.k;
  j["vertices"] = G.vertices;
  j["edges"] = nlohmann::json::array();
  for (std::size_t e = 0; e < G.edges.size(); ++e) {
    std::vector<std::string> names;
    for (int v : G.edges[e]) names.push_back(G.vertices[v]);
    nlohmann::json masses = nlohmann::json::array();
    for (auto s : G.mu[e].support()) masses.push_back({index_tuple(s, G.N, G.k), q_str(G.mu[e].mass[s])});
    j["edges"].push_back({{"vertices", names}, {"mu", masses}});
  }
  return j;
}

DistLabeledGraph graph_from_json(const nlohmann::json &j) {
  DistLabeledGraph G;
  G.N = j.at("N").get<int>();
  G.k = j.at("k").get<int>();
  G.vertices = j.at("vertices").get<std::vector<std::string>>();
  for (const auto &e : j.at("edges")) {
    Tuple t;
    for (const auto &name : e.at("vertices")) {
      auto it = std::find(G.vertices.begin(), G.vertices.end(), name.get<std::string>());
      if (it == G.vertices.end()) throw DomainError("edge references unknown vertex " + name.dump());
      t.push_back(static_cast<int>(it - G.vertices.begin()));
    }
    G.edges.push_back(t);
    FiniteDistribution mu(G.N, G.k);
    for (const auto &m : e.at("mu")) mu.at(m[0].get<Tuple>()) = q_parse(m[1].get<std::string>());
    G.mu.push_back(std::move(mu));
  }
  G.validate();
  return G;
}

std::string graph_hash(const DistLabeledGraph &G) { return content_hash(graph_to_json(G).dump()); }

}  // namespace dlab
