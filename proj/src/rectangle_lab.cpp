#include "dlab/rectangle_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace dlab {

namespace {

struct DSU {
  std::vector<int> p, sz;
  explicit DSU(int n) : p(n), sz(n, 1) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return;
    if (sz[a] < sz[b]) std::swap(a, b);
    p[b] = a;
    sz[a] += sz[b];
  }
};

// compress vertex labels to 0..V-1
std::vector<std::vector<int>> compress(const std::vector<HyperEdge> &edges, int &V) {
  std::map<int, int> id;
  for (const auto &e : edges)
    for (int v : e) id.emplace(v, 0);
  V = 0;
  for (auto &[v, i] : id) i = V++;
  std::vector<std::vector<int>> out;
  for (const auto &e : edges) {
    std::vector<int> c;
    for (int v : e) c.push_back(id[v]);
    out.push_back(c);
  }
  return out;
}

std::string hash_json(const nlohmann::json &j) { return content_hash(j.dump()); }

nlohmann::json sequence_json(const RestrictionSequence &zeta) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto &z : zeta) j.push_back(matching_to_json(z));
  return j;
}

double pow00(double b, double e) { return e == 0 ? 1.0 : std::pow(b, e); }

}  // namespace

RestrictionSequence empty_sequence(const GameSpec &spec) {
  return RestrictionSequence(spec.players());
}

void validate_sequence(const GameSpec &spec, const RestrictionSequence &zeta) {
  if (static_cast<int>(zeta.size()) != spec.players())
    throw DomainError("restriction sequence needs one restriction per player");
  for (int p = 0; p < spec.players(); ++p) {
    const auto &z = zeta[p];
    if (z.size() > spec.m()) throw DomainError("restriction larger than alpha*n");
    for (const auto &e : z.edges) {
      if (static_cast<int>(e.pos.size()) != spec.G.k ||
          static_cast<int>(e.label.size()) != spec.G.k)
        throw DomainError("restriction edge has wrong arity");
      for (int j = 0; j < spec.G.k; ++j) {
        if (e.pos[j] < 0 || e.pos[j] >= spec.n) throw DomainError("edge outside the universe");
        if (e.label[j] < 0 || e.label[j] >= spec.G.N) throw DomainError("label outside Z_N");
      }
    }
    auto avail = subtract_universe(spec.n, spec.G.k, z);
    for (const auto &a : avail)
      if (static_cast<int>(a.size()) != spec.n - z.size())
        throw DomainError("restriction support is not a matching");
  }
}

Tuple ground_edge(const GameSpec &spec, int player, const Tuple &pos) {
  const auto &U = spec.frame.universes[spec.edge_of(player)];
  Tuple g(pos.size());
  for (std::size_t j = 0; j < pos.size(); ++j) g[j] = U[j][pos[j]];
  return g;
}

std::vector<HyperEdge> hyper_edges(const GameSpec &spec, const RestrictionSequence &zeta) {
  std::vector<HyperEdge> out;
  for (int p = 0; p < static_cast<int>(zeta.size()); ++p)
    for (const auto &e : zeta[p].edges) out.push_back(ground_edge(spec, p, e.pos));
  return out;
}

std::vector<std::vector<int>> components(const std::vector<HyperEdge> &edges) {
  int V = 0;
  auto ce = compress(edges, V);
  std::vector<int> label(V);
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = 0; j < edges[i].size(); ++j) label[ce[i][j]] = edges[i][j];
  DSU d(V);
  for (const auto &e : ce)
    for (std::size_t j = 1; j < e.size(); ++j) d.unite(e[0], e[j]);
  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < V; ++v) groups[d.find(v)].push_back(label[v]);
  std::vector<std::vector<int>> out;
  for (auto &[r, g] : groups)
    if (g.size() >= 2) out.push_back(g);
  std::sort(out.begin(), out.end());
  return out;
}

long long hyper_weight(const std::vector<HyperEdge> &edges) {
  long long w = 0;
  for (const auto &c : components(edges)) w += static_cast<long long>(c.size()) * c.size();
  return w;
}

long long weight(const GameSpec &spec, const RestrictionSequence &zeta) {
  return hyper_weight(hyper_edges(spec, zeta));
}

int cover_size(const std::vector<HyperEdge> &edges, const std::vector<int> &subset) {
  std::set<int> vs;
  for (int i : subset) vs.insert(edges[i].begin(), edges[i].end());
  return static_cast<int>(vs.size());
}

bool has_cycle_peeling(int k, const std::vector<HyperEdge> &edges) {
  int V = 0;
  auto ce = compress(edges, V);
  std::vector<int> deg(V, 0);
  for (const auto &e : ce)
    for (int v : e) ++deg[v];
  std::vector<char> alive(ce.size(), 1);
  std::size_t left = ce.size();
  bool progress = true;
  while (left > 0 && progress) {
    progress = false;
    for (std::size_t i = 0; i < ce.size(); ++i) {
      if (!alive[i]) continue;
      int priv = 0;
      for (int v : ce[i]) priv += deg[v] == 1;
      if (priv >= k - 1) {
        alive[i] = 0;
        --left;
        for (int v : ce[i]) --deg[v];
        progress = true;
      }
    }
  }
  return left > 0;
}

bool has_cycle_exhaustive(int k, const std::vector<HyperEdge> &edges, std::uint64_t cap) {
  const std::size_t r = edges.size();
  if (r >= 63 || (1ull << r) > cap)
    throw CapExceeded("enumeration", "2^" + std::to_string(r) + " edge subsets");
  for (std::uint64_t mask = 1; mask < (1ull << r); ++mask) {
    std::vector<int> s;
    for (std::size_t i = 0; i < r; ++i)
      if (mask >> i & 1) s.push_back(static_cast<int>(i));
    if (cover_size(edges, s) <= static_cast<int>(s.size()) * (k - 1)) return true;
  }
  return false;
}

bool supports_overlap(const std::vector<HyperEdge> &edges) {
  std::set<HyperEdge> seen;
  for (const auto &e : edges)
    if (!seen.insert(e).second) return true;
  return false;
}

bool is_cyclic(const GameSpec &spec, const RestrictionSequence &zeta) {
  auto E = hyper_edges(spec, zeta);
  return supports_overlap(E) || has_cycle_peeling(spec.G.k, E);
}

static bool dense_subset(int k, const std::vector<HyperEdge> &edges, const std::vector<int> &s) {
  // cover < l(k - 1.1)  <=>  10 cover < l(10k - 11)
  const long l = static_cast<long>(s.size());
  return 10L * cover_size(edges, s) < l * (10L * k - 11);
}

bool locally_almost_acyclic(int k, const std::vector<HyperEdge> &edges, int C,
                            std::uint64_t cap) {
  const int r = static_cast<int>(edges.size());
  C = std::min(C, r);
  if (C <= 0) return true;
  std::vector<std::vector<int>> adj(r);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      bool meet = false;
      for (int v : edges[i])
        meet = meet || std::find(edges[j].begin(), edges[j].end(), v) != edges[j].end();
      if (meet) adj[i].push_back(j), adj[j].push_back(i);
    }
  // a violating set splits into vertex-disjoint parts, one of which violates
  std::set<std::vector<int>> level;
  for (int i = 0; i < r; ++i) level.insert({i});
  std::uint64_t seen = 0;
  for (int size = 1; size <= C; ++size) {
    for (const auto &s : level)
      if (dense_subset(k, edges, s)) return false;
    if (size == C) break;
    std::set<std::vector<int>> next;
    for (const auto &s : level)
      for (int i : s)
        for (int j : adj[i]) {
          if (std::binary_search(s.begin(), s.end(), j)) continue;
          auto t = s;
          t.insert(std::upper_bound(t.begin(), t.end(), j), j);
          next.insert(std::move(t));
        }
    seen += next.size();
    if (seen > cap) throw CapExceeded("enumeration", "connected edge subsets");
    level = std::move(next);
  }
  return true;
}

bool locally_almost_acyclic_exhaustive(int k, const std::vector<HyperEdge> &edges, int C,
                                       std::uint64_t cap) {
  const std::size_t r = edges.size();
  if (r >= 63 || (1ull << r) > cap)
    throw CapExceeded("enumeration", "2^" + std::to_string(r) + " edge subsets");
  for (std::uint64_t mask = 1; mask < (1ull << r); ++mask) {
    if (std::popcount(mask) > C) continue;
    std::vector<int> s;
    for (std::size_t i = 0; i < r; ++i)
      if (mask >> i & 1) s.push_back(static_cast<int>(i));
    if (dense_subset(k, edges, s)) return false;
  }
  return true;
}

bool is_almost_acyclic(const GameSpec &spec, const RestrictionSequence &zeta) {
  auto E = hyper_edges(spec, zeta);
  return !supports_overlap(E) &&
         locally_almost_acyclic(spec.G.k, E, static_cast<int>(E.size()));
}

nlohmann::json LemmaCheck::verdict() const {
  return {{"lemma_id", lemma_id},
          {"instantiation_hash", instantiation_hash},
          {"status", status},
          {"residual_or_slack", residual_or_slack},
          {"seed", seed}};
}

// ---- structured rectangles ----

StructuredRectangle full_rectangle(const GameSpec &spec, const RestrictionSequence &zeta,
                                   const Caps &caps) {
  validate_sequence(spec, zeta);
  StructuredRectangle R;
  R.zeta = zeta;
  for (int p = 0; p < spec.players(); ++p)
    R.A.push_back(enumerate_restricted(spec.n, spec.G.k, spec.m(), spec.G.N, zeta[p], caps));
  return R;
}

static Q density(const GameSpec &spec, const LabeledMatching &z, std::size_t a) {
  Z omega = restricted_size(spec.n, spec.G.k, spec.m(), spec.G.N, z);
  return Q(Z(static_cast<unsigned long>(a))) / Q(omega);
}

double potential(const GameSpec &spec, const StructuredRectangle &R) {
  validate_sequence(spec, R.zeta);
  if (R.A.size() != R.zeta.size()) throw DomainError("one set per player required");
  double phi = 0;
  for (std::size_t p = 0; p < R.zeta.size(); ++p) {
    if (R.A[p].empty()) return std::numeric_limits<double>::infinity();
    phi += R.zeta[p].size();
    phi -= std::log2(q_double(density(spec, R.zeta[p], R.A[p].size())));
  }
  return phi;
}

bool is_structured(const GameSpec &spec, const StructuredRectangle &R, const Caps &caps) {
  validate_sequence(spec, R.zeta);
  if (R.A.size() != R.zeta.size()) throw DomainError("one set per player required");
  for (std::size_t p = 0; p < R.zeta.size(); ++p) {
    for (const auto &y : R.A[p])
      if (!subsumes(y, R.zeta[p]) || !is_matching(y, spec.n, spec.G.k, spec.G.N) ||
          y.size() != spec.m())
        return false;
    if (!is_global(R.A[p], R.zeta[p], spec.n, spec.G.k, spec.m(), spec.G.N, caps)) return false;
  }
  return true;
}

static bool densities_at_least(const GameSpec &spec, const StructuredRectangle &R, double W) {
  for (std::size_t p = 0; p < R.zeta.size(); ++p) {
    if (R.A[p].empty()) return false;
    if (std::log2(q_double(density(spec, R.zeta[p], R.A[p].size()))) < -W) return false;
  }
  return true;
}

bool is_good(const GameSpec &spec, const StructuredRectangle &R, double W1, double W2,
             const Caps &caps) {
  if (!is_structured(spec, R, caps)) return false;
  if (is_cyclic(spec, R.zeta)) return false;
  if (!densities_at_least(spec, R, W1)) return false;
  return static_cast<double>(weight(spec, R.zeta)) <= W2;
}

bool is_fair(const GameSpec &spec, const StructuredRectangle &R, double W, const Caps &caps) {
  if (!is_structured(spec, R, caps)) return false;
  if (!is_almost_acyclic(spec, R.zeta)) return false;
  long total = 0;
  for (const auto &z : R.zeta) total += z.size();
  if (static_cast<double>(total) > W) return false;
  return densities_at_least(spec, R, W);
}

// ---- structured densities ----

std::vector<int> covered_vertices(const GameSpec &spec, const RestrictionSequence &zeta) {
  std::set<int> vs;
  for (const auto &e : hyper_edges(spec, zeta)) vs.insert(e.begin(), e.end());
  return {vs.begin(), vs.end()};
}

std::vector<int> all_ground(const GameSpec &spec) {
  std::vector<int> g(spec.frame.ground_size());
  std::iota(g.begin(), g.end(), 0);
  return g;
}

DenseFunction structured_density(const GameSpec &spec, const RestrictionSequence &zeta,
                                 const std::vector<int> &lambda, const Caps &caps) {
  validate_sequence(spec, zeta);
  const int N = spec.G.N, k = spec.G.k;
  std::map<int, int> coord;
  for (int i = 0; i < static_cast<int>(lambda.size()); ++i) coord[lambda[i]] = i;
  struct Factor {
    std::vector<int> at;
    std::vector<double> table;  // N^k mu(w - label) indexed by w
  };
  std::vector<Factor> factors;
  const double Nk = static_cast<double>(ipow(N, k));
  for (int p = 0; p < spec.players(); ++p) {
    const auto &mu = spec.G.mu[spec.edge_of(p)];
    for (const auto &e : zeta[p].edges) {
      Factor f;
      for (int v : ground_edge(spec, p, e.pos)) {
        auto it = coord.find(v);
        if (it == coord.end()) throw DomainError("lambda misses an exposed vertex");
        f.at.push_back(it->second);
      }
      for (std::uint64_t w = 0; w < ipow(N, k); ++w)
        f.table.push_back(Nk * q_double(mu_at_diff(mu, index_tuple(w, N, k), e.label)));
      factors.push_back(std::move(f));
    }
  }
  DenseFunction g = DenseFunction::zeros(N, lambda, caps);
  const int D = g.dim();
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(g.size()); ++idx) {
    Tuple x = index_tuple(static_cast<std::uint64_t>(idx), N, D);
    double val = 1;
    for (const auto &f : factors) {
      std::uint64_t w = 0, s = 1;
      for (int c : f.at) w += x[c] * s, s *= N;
      val *= f.table[w];
    }
    g.v[idx] = val;
  }
  return g;
}

DenseFunction structured_density(const GameSpec &spec, const RestrictionSequence &zeta,
                                 const Caps &caps) {
  return structured_density(spec, zeta, all_ground(spec), caps);
}

LemmaCheck verify_spectrum_vanishing(const GameSpec &spec, const RestrictionSequence &zeta,
                                     const Caps &caps) {
  if (is_cyclic(spec, zeta)) throw PreconditionError("spectrum vanishing needs acyclic zeta");
  LemmaCheck c;
  c.lemma_id = "spectrum-vanishing";
  c.instantiation_hash = hash_json({{"spec", spec_hash(spec)}, {"zeta", sequence_json(zeta)}});
  auto g = structured_density(spec, zeta, caps);
  auto gh = dft(g);
  auto comps = components(hyper_edges(spec, zeta));
  const int G = spec.frame.ground_size();
  std::vector<int> comp_of(G, -1);
  for (int i = 0; i < static_cast<int>(comps.size()); ++i)
    for (int v : comps[i]) comp_of[v] = i;
  double worst = 0;
  std::uint64_t forbidden = 0, allowed_nonzero = 0;
  for (std::uint64_t b = 0; b < gh.size(); ++b) {
    Tuple bt = index_tuple(b, spec.G.N, G);
    bool ok = true;
    std::vector<int> hits(comps.size(), 0);
    for (int v = 0; v < G; ++v) {
      if (bt[v] == 0) continue;
      if (comp_of[v] < 0)
        ok = false;
      else
        ++hits[comp_of[v]];
    }
    for (int h : hits) ok = ok && h != 1;
    double mag = std::abs(gh.v[b]);
    if (!ok) {
      ++forbidden;
      worst = std::max(worst, mag);
    } else if (mag > 1e-10) {
      ++allowed_nonzero;
    }
  }
  const double mean_err = std::abs(mean_real(g) - 1.0);
  c.residual_or_slack = worst;
  c.status = worst <= 1e-10 && mean_err <= 1e-12 ? "pass" : "fail";
  c.detail = {{"forbidden", forbidden},
              {"allowed_nonzero", allowed_nonzero},
              {"max_forbidden", worst},
              {"mean_error", mean_err}};
  return c;
}

Z count_no_singleton(const std::vector<int> &sizes, int l) {
  std::vector<Z> poly{Z(1)};
  for (int s : sizes) {
    std::vector<Z> next(poly.size() + s, Z(0));
    for (std::size_t i = 0; i < poly.size(); ++i)
      for (int j = 0; j <= s; ++j) {
        if (j == 1) continue;
        Z b;
        mpz_bin_uiui(b.get_mpz_t(), s, j);
        next[i + j] += poly[i] * b;
      }
    poly = std::move(next);
  }
  if (l < 0 || l >= static_cast<int>(poly.size())) return Z(0);
  return poly[l];
}

double no_singleton_bound(const std::vector<int> &sizes, int l) {
  double w = 0;
  for (int s : sizes) w += static_cast<double>(s) * s;
  if (l == 0) return 1;
  return std::pow(20.0 * w / l, l / 2.0);
}

LemmaCheck check_no_singleton(const std::vector<int> &sizes, int l) {
  LemmaCheck c;
  c.lemma_id = "no-singleton-count";
  c.instantiation_hash = hash_json({{"sizes", sizes}, {"l", l}});
  Z cnt = count_no_singleton(sizes, l);
  double bound = no_singleton_bound(sizes, l);
  double cd = cnt.get_d();
  c.residual_or_slack = bound - cd;
  c.status = cd <= bound * (1 + 1e-12) ? "pass" : "fail";
  c.detail = {{"count", cnt.get_str()}, {"bound", bound}};
  return c;
}

// ---- B(E) ----

namespace {

std::vector<Tuple> heavy_vectors(int k, int N) {
  std::vector<Tuple> out;
  for (std::uint64_t i = 0; i < ipow(N, k); ++i) {
    Tuple t = index_tuple(i, N, k);
    int w = 0;
    for (int x : t) w += x != 0;
    if (w >= 3) out.push_back(t);
  }
  return out;
}

void b_dfs(const std::vector<std::vector<int>> &ce, const std::vector<int> &which,
           std::size_t at, const std::vector<Tuple> &choices, int N, std::vector<int> &acc,
           std::uint64_t &visited, std::uint64_t cap,
           const std::function<void(const std::vector<int> &)> &leaf) {
  if (at == which.size()) {
    leaf(acc);
    return;
  }
  const auto &e = ce[which[at]];
  for (const auto &c : choices) {
    if (++visited > cap) throw CapExceeded("enumeration", "B(E) elements");
    for (std::size_t j = 0; j < e.size(); ++j) acc[e[j]] = (acc[e[j]] + c[j]) % N;
    b_dfs(ce, which, at + 1, choices, N, acc, visited, cap, leaf);
    for (std::size_t j = 0; j < e.size(); ++j) acc[e[j]] = (acc[e[j]] - c[j] + N) % N;
  }
}

}  // namespace

BReport enumerate_B(int k, int N, const std::vector<HyperEdge> &edges, bool with_tally,
                    std::uint64_t cap) {
  BReport rep;
  int V = 0;
  auto ce = compress(edges, V);
  for (const auto &e : ce)
    if (static_cast<int>(e.size()) != k || std::set<int>(e.begin(), e.end()).size() != e.size())
      throw DomainError("hyperedges must have k distinct vertices");
  rep.r = static_cast<int>(edges.size());
  rep.t = static_cast<int>(components(edges).size());
  rep.bound = std::max(2.0 * rep.t, 0.8 * rep.r);
  rep.almost_acyclic = !supports_overlap(edges) && locally_almost_acyclic(k, edges, rep.r, cap);
  auto choices = heavy_vectors(k, N);
  std::vector<int> acc(V, 0);
  std::uint64_t visited = 0;
  auto hw = [](const std::vector<int> &a) {
    int w = 0;
    for (int x : a) w += x != 0;
    return w;
  };
  std::vector<int> all(rep.r);
  std::iota(all.begin(), all.end(), 0);
  b_dfs(ce, all, 0, choices, N, acc, visited, cap, [&](const std::vector<int> &a) {
    ++rep.count;
    int w = hw(a);
    if (rep.min_weight < 0 || w < rep.min_weight) rep.min_weight = w;
  });
  if (rep.r > 0 && rep.count == 0) rep.min_weight = -1;
  if (with_tally) {
    if (rep.r >= 40) throw CapExceeded("enumeration", "edge subsets");
    rep.tally.assign(V + 1, 0);
    for (std::uint64_t mask = 0; mask < (1ull << rep.r); ++mask) {
      std::vector<int> which;
      for (int i = 0; i < rep.r; ++i)
        if (mask >> i & 1) which.push_back(i);
      b_dfs(ce, which, 0, choices, N, acc, visited, cap,
            [&](const std::vector<int> &a) { ++rep.tally[hw(a)]; });
    }
  }
  rep.ok = !rep.almost_acyclic || rep.count == 0 || rep.min_weight >= rep.bound - 1e-12;
  return rep;
}

// ---- structured boundedness ----

LemmaCheck verify_structured_bounded(const GameSpec &spec, const RestrictionSequence &zeta,
                                     double gamma, Independence kind, const Caps &caps) {
  validate_sequence(spec, zeta);
  const int N = spec.G.N, k = spec.G.k, n = spec.n;
  LemmaCheck c;
  c.lemma_id = kind == Independence::OneWise ? "structured-bounded" : "structured-bounded-twowise";
  c.instantiation_hash = hash_json(
      {{"spec", spec_hash(spec)}, {"zeta", sequence_json(zeta)}, {"gamma", gamma}});
  auto E = hyper_edges(spec, zeta);
  const long long w = hyper_weight(E);
  const double edges = static_cast<double>(E.size());

  bool structural, sized, indep = true;
  GrowthParams gp;
  gp.n = n;
  gp.delta = 0;
  if (kind == Independence::OneWise) {
    structural = !is_cyclic(spec, zeta);
    sized = w <= gamma * n;
    for (const auto &mu : spec.G.mu) indep = indep && check_onewise(mu);
    gp.C = 20.0 * N * N;
    gp.s_star = gamma * n * std::log2(N);
  } else {
    structural = is_almost_acyclic(spec, zeta);
    sized = edges <= gamma * n;
    for (const auto &mu : spec.G.mu) indep = indep && check_twowise(mu);
    gp.C = std::pow(15.0 * k * ipow(N, k) * spec.K * spec.G.ne(), 4);
    gp.s_star = gamma * k * n * std::log2(N);
  }
  c.detail = {{"structural", structural}, {"sized", sized}, {"independent", indep},
              {"gamma", gamma},          {"C", gp.C},       {"s_star", gp.s_star},
              {"weight", w},             {"edges", E.size()}};
  if (!structural || !indep || !(gamma > 0)) {
    c.status = "skipped";
    c.detail["note"] = "structural or independence precondition fails";
    return c;
  }
  c.detail["hypothesis_met"] = sized && gamma < 1;

  auto lam = covered_vertices(spec, zeta);
  auto g = structured_density(spec, zeta, lam, caps);
  BoundedReport br = certify_bounded(g, gp);
  c.detail["certificate"] = br.to_json();

  // the per-level chain behind the lemma, on every level of Lambda'
  auto gh = dft(g);
  auto lw = level_wiener(gh);
  bool chain = true;
  double chain_slack = std::numeric_limits<double>::infinity();
  std::vector<double> chain_bound(lw.size(), 0);
  if (kind == Independence::OneWise) {
    std::vector<int> sizes;
    for (const auto &comp : components(E)) sizes.push_back(static_cast<int>(comp.size()));
    for (std::size_t l = 1; l < lw.size(); ++l) {
      double cnt = count_no_singleton(sizes, static_cast<int>(l)).get_d();
      double b = std::pow(N - 1.0, static_cast<double>(l)) * cnt;
      double stated = std::pow(static_cast<double>(N), static_cast<double>(l)) *
                      no_singleton_bound(sizes, static_cast<int>(l));
      chain = chain && cnt <= no_singleton_bound(sizes, static_cast<int>(l)) * (1 + 1e-12);
      chain_bound[l] = std::min(b, stated);
    }
  } else {
    auto br2 = enumerate_B(k, N, E, true, caps.enumeration);
    for (std::size_t l = 1; l < lw.size(); ++l)
      chain_bound[l] = l < br2.tally.size() ? static_cast<double>(br2.tally[l]) : 0.0;
  }
  for (std::size_t l = 1; l < lw.size(); ++l) {
    chain_slack = std::min(chain_slack, chain_bound[l] + 1e-9 - lw[l]);
    chain = chain && lw[l] <= chain_bound[l] + 1e-9;
  }
  const double sup_cap = std::pow(static_cast<double>(N), k * edges);
  bool sup_chain = br.sup <= sup_cap * (1 + 1e-12);
  if (kind == Independence::OneWise) sup_chain = sup_chain && k * edges <= static_cast<double>(w);
  c.detail["chain_ok"] = chain;
  c.detail["chain_bound"] = chain_bound;
  c.detail["level_wiener"] = lw;
  c.detail["sup_chain_ok"] = sup_chain;
  c.residual_or_slack = std::min(br.worst_slack, chain_slack);
  c.status = br.bounded() && chain && sup_chain ? "pass" : "fail";
  return c;
}

// ---- relating yes and no ----

LemmaCheck verify_relating_yes_no(const GameSpec &spec,
                                  const std::vector<std::vector<LabeledMatching>> &A,
                                  const Caps &caps) {
  const int P = spec.players(), N = spec.G.N, k = spec.G.k, m = spec.m(), n = spec.n;
  if (static_cast<int>(A.size()) != P) throw DomainError("one set per player required");
  LemmaCheck c;
  c.lemma_id = "relating-yes-no";
  nlohmann::json ij = {{"spec", spec_hash(spec)}};
  for (const auto &a : A) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto &y : a) s.push_back(matching_to_json(y));
    ij["A"].push_back(s);
  }
  c.instantiation_hash = hash_json(ij);

  ExactLaw law = exact_masses(spec, caps);
  std::vector<std::vector<std::uint64_t>> idx(P);
  for (int p = 0; p < P; ++p) {
    std::map<LabeledMatching, std::uint64_t> where;
    for (std::uint64_t i = 0; i < law.omega[p].size(); ++i) where[law.omega[p][i]] = i;
    std::set<LabeledMatching> uniq;
    for (auto y : A[p]) {
      y.normalize();
      auto it = where.find(y);
      if (it == where.end()) throw DomainError("rectangle element outside Omega");
      if (uniq.insert(y).second) idx[p].push_back(it->second);
    }
  }

  // D_yes(R) from the joint law
  Q lhs = 0;
  bool empty = false;
  for (const auto &v : idx) empty = empty || v.empty();
  if (!empty) {
    std::vector<std::uint64_t> stride(P, 1);
    for (int p = 1; p < P; ++p) stride[p] = stride[p - 1] * law.omega[p - 1].size();
    std::vector<std::size_t> ctr(P, 0);
    while (true) {
      std::uint64_t at = 0;
      for (int p = 0; p < P; ++p) at += idx[p][ctr[p]] * stride[p];
      lhs += law.yes[at];
      int p = 0;
      while (p < P && ++ctr[p] == idx[p].size()) ctr[p++] = 0;
      if (p == P) break;
    }
  }

  // D_no(R) * E_x prod_p P[phi_A](proj x) through the active kernel
  Q rhs = 0;
  if (!empty) {
    Q dno = 1;
    for (int p = 0; p < P; ++p)
      dno *= Q(Z(static_cast<unsigned long>(idx[p].size()))) /
             Q(Z(static_cast<unsigned long>(law.omega[p].size())));
    const int G = spec.frame.ground_size();
    const std::uint64_t X = ipow_sat(N, G);
    if (X > caps.fourier) throw CapExceeded("fourier", "N^|V x [n]|");
    const auto &kern = active_kernel_P();
    Q avg = 0;
    for (std::uint64_t xi = 0; xi < X; ++xi) {
      Tuple x = index_tuple(xi, N, G);
      Q prod = 1;
      for (int p = 0; p < P && prod != 0; ++p) {
        const int e = spec.edge_of(p);
        auto xu = project(spec.frame, e, x);
        Q s = 0;
        for (auto i : idx[p]) s += kern(n, m, spec.G.mu[e], xu, law.omega[p][i]);
        s *= Q(Z(static_cast<unsigned long>(law.omega[p].size()))) /
             Q(Z(static_cast<unsigned long>(idx[p].size())));
        prod *= s;
      }
      avg += prod;
    }
    avg /= Q(Z(static_cast<unsigned long>(X)));
    rhs = dno * avg;
  }
  (void)k;
  Q diff = lhs - rhs;
  c.residual_or_slack = std::abs(q_double(diff));
  c.status = diff == 0 ? "pass" : "fail";
  c.detail = {{"d_yes", q_str(lhs)}, {"rhs", q_str(rhs)}};
  return c;
}

// ---- separation ----

LemmaCheck verify_separation(const GameSpec &spec, int player, const LabeledMatching &z,
                             const std::vector<LabeledMatching> &A, const Caps &caps) {
  const int N = spec.G.N, k = spec.G.k, m = spec.m(), usize = spec.n;
  if (player < 0 || player >= spec.players()) throw DomainError("player out of range");
  if (A.empty()) throw DomainError("A must be nonempty");
  validate_sequence(spec, [&] {
    RestrictionSequence s(spec.players());
    s[player] = z;
    return s;
  }());
  const auto &mu = spec.G.mu[spec.edge_of(player)];
  LemmaCheck c;
  c.lemma_id = "separation";
  nlohmann::json ij = {{"spec", spec_hash(spec)}, {"player", player}, {"z", matching_to_json(z)}};
  for (const auto &y : A) ij["A"].push_back(matching_to_json(y));
  c.instantiation_hash = hash_json(ij);

  // group A by the matching of its extra edges
  std::map<Matching, std::vector<std::vector<Tuple>>> groups;
  std::set<LabeledMatching> uniq;
  for (auto y : A) {
    y.normalize();
    if (y.size() != m || !is_matching(y, usize, k, N) || !subsumes(y, z))
      throw DomainError("element of A is not in Omega_z");
    if (!uniq.insert(y).second) continue;
    Matching M;
    std::vector<Tuple> xi;
    for (const auto &e : y.edges)
      if (!std::binary_search(z.edges.begin(), z.edges.end(), e)) {
        M.push_back(e.pos);
        xi.push_back(e.label);
      }
    groups[M].push_back(xi);
  }
  const Q sizeA = Q(Z(static_cast<unsigned long>(uniq.size())));
  auto Ms = enumerate_matchings(subtract_universe(usize, k, z), m - z.size(), caps);
  std::set<Matching> allM(Ms.begin(), Ms.end());
  for (const auto &[M, xs] : groups)
    if (!allM.count(M)) throw ContractError("extra edges do not form a matching of U minus supp z");

  const Q omega = Q(count_matchings(usize, k, m)) * Q(Z(static_cast<unsigned long>(ipow(N, k * m))));
  const Q Nk = Q(Z(static_cast<unsigned long>(ipow(N, k))));
  const int D = k * usize;
  const std::uint64_t X = ipow_sat(N, D);
  if (X > caps.fourier) throw CapExceeded("fourier", "N^{k|U|}");
  const auto &kern = active_kernel_P();
  Q worst = 0;
  std::uint64_t mismatches = 0;
  for (std::uint64_t xi = 0; xi < X; ++xi) {
    Tuple xt = index_tuple(xi, N, D);
    std::vector<int> xu(xt.begin(), xt.end());
    Q lhs = 0;
    for (const auto &y : uniq) lhs += kern(usize, m, mu, xu, y);
    lhs *= omega / sizeA;

    Q g = 1;
    for (const auto &e : z.edges) g *= Nk * mu_at_diff(mu, restrict_edge(xu, usize, e.pos), e.label);
    Q sum = 0;
    for (const auto &M : Ms) {
      auto it = groups.find(M);
      if (it == groups.end()) continue;
      const auto &B = it->second;
      const Q sizeB = Q(Z(static_cast<unsigned long>(B.size())));
      Q scale = Q(Z(static_cast<unsigned long>(ipow(N, k * static_cast<int>(M.size()))))) / sizeB;
      Q r = 0;
      for (const auto &xs : B) r += kernel_R_mass(usize, M, mu, xu, xs);
      sum += sizeB / sizeA * (r * scale);
    }
    Q diff = lhs - g * sum;
    if (diff != 0) {
      ++mismatches;
      Q ad = abs(diff);
      if (ad > worst) worst = ad;
    }
  }
  c.residual_or_slack = q_double(worst);
  c.status = mismatches == 0 ? "pass" : "fail";
  c.detail = {{"points", X}, {"mismatches", mismatches}, {"groups", groups.size()}};
  return c;
}

// ---- SVD ----

bool in_X(const std::vector<Tuple> &a) {
  for (const auto &t : a) {
    int w = 0;
    for (int x : t) w += x != 0;
    if (w == 1) return false;
  }
  return true;
}

std::vector<int> lift(int usize, int k, const Matching &M, const std::vector<Tuple> &a) {
  if (a.size() != M.size()) throw DomainError("a must be defined on every edge of M");
  std::vector<int> b(static_cast<std::size_t>(k) * usize, 0);
  for (std::size_t t = 0; t < M.size(); ++t)
    for (int j = 0; j < k; ++j) b[j * usize + M[t][j]] = a[t][j];
  return b;
}

cplx singular_factor(const FiniteDistribution &mu, const Tuple &t) {
  cplx r = 0;
  for (std::uint64_t i = 0; i < mu.mass.size(); ++i) {
    if (mu.mass[i] == 0) continue;
    Tuple zt = index_tuple(i, mu.q, mu.k);
    long s = 0;
    for (int j = 0; j < mu.k; ++j) s += static_cast<long>(t[j]) * zt[j];
    r += q_double(mu.mass[i]) * std::polar(1.0, -2 * std::numbers::pi * (s % mu.q) / mu.q);
  }
  return r;
}

LemmaCheck verify_svd(int usize, const Matching &M, const FiniteDistribution &mu,
                      const std::vector<cplx> &f, const Caps &caps) {
  if (!check_onewise(mu)) throw PreconditionError("SVD check needs one-wise mu");
  const int N = mu.q, k = mu.k, m = static_cast<int>(M.size());
  if (f.size() != ipow(N, k * m)) throw DomainError("f must live on (Z_N^k)^m");
  for (const auto &e : M)
    for (int j = 0; j < k; ++j)
      if (e[j] < 0 || e[j] >= usize) throw DomainError("matching outside the universe");
  LemmaCheck c;
  c.lemma_id = "svd";
  nlohmann::json fj = nlohmann::json::array();
  for (const auto &v : f) fj.push_back({v.real(), v.imag()});
  c.instantiation_hash = hash_json({{"usize", usize}, {"M", M}, {"mu", [&] {
                                      std::vector<std::string> s;
                                      for (const auto &q : mu.mass) s.push_back(q_str(q));
                                      return s;
                                    }()},
                                    {"f", fj}});
  const int D = k * usize;
  DenseFunction Rf = DenseFunction::zeros(N, D, caps);
  std::vector<double> mud(mu.mass.size());
  for (std::size_t i = 0; i < mud.size(); ++i) mud[i] = q_double(mu.mass[i]);
  const std::uint64_t L = f.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(Rf.size()); ++xi) {
    Tuple xt = index_tuple(static_cast<std::uint64_t>(xi), N, D);
    std::vector<int> xu(xt.begin(), xt.end());
    cplx s = 0;
    for (std::uint64_t l = 0; l < L; ++l) {
      if (f[l] == cplx(0, 0)) continue;
      Tuple d = index_tuple(l, N, k * m);
      double p = 1;
      for (int t = 0; t < m && p != 0; ++t) {
        std::uint64_t w = 0, st = 1;
        for (int j = 0; j < k; ++j) {
          int diff = ((xu[j * usize + M[t][j]] - d[t * k + j]) % N + N) % N;
          w += diff * st;
          st *= N;
        }
        p *= mud[w];
      }
      s += p * f[l];
    }
    Rf.v[xi] = s;
  }
  auto Rh = dft(Rf);
  DenseFunction F = DenseFunction::zeros(N, k * m, caps);
  F.v = f;
  auto Fh = dft(F);

  std::vector<int> coord_edge(D, -1), coord_j(D, -1);
  for (int t = 0; t < m; ++t)
    for (int j = 0; j < k; ++j) coord_edge[j * usize + M[t][j]] = t, coord_j[j * usize + M[t][j]] = j;

  double vanish = 0, predict = 0, excess = 0;
  for (std::uint64_t b = 0; b < Rh.size(); ++b) {
    Tuple bt = index_tuple(b, N, D);
    bool on_M = true;
    std::vector<Tuple> a(m, Tuple(k, 0));
    for (int cidx = 0; cidx < D; ++cidx) {
      if (bt[cidx] == 0) continue;
      if (coord_edge[cidx] < 0)
        on_M = false;
      else
        a[coord_edge[cidx]][coord_j[cidx]] = bt[cidx];
    }
    const cplx coef = Rh.v[b];
    if (!on_M || !in_X(a)) {
      vanish = std::max(vanish, std::abs(coef));
      continue;
    }
    Tuple flat;
    for (const auto &t : a) flat.insert(flat.end(), t.begin(), t.end());
    cplx fa = Fh.v[tuple_index(flat, N)];
    cplx pred = fa;
    for (const auto &t : a) pred *= singular_factor(mu, t);
    predict = std::max(predict, std::abs(coef - pred));
    excess = std::max(excess, std::abs(coef) - std::abs(fa));
  }
  // singular factors: r(0) = 1 and |r| <= 1
  double rdev = 0;
  for (std::uint64_t i = 0; i < ipow(N, k); ++i) {
    Tuple t = index_tuple(i, N, k);
    cplx r = singular_factor(mu, t);
    if (i == 0)
      rdev = std::max(rdev, std::abs(r - cplx(1, 0)));
    else
      rdev = std::max(rdev, std::abs(r) - 1.0);
  }
  c.residual_or_slack = std::max({vanish, predict, excess, rdev});
  c.status = vanish <= 1e-10 && predict <= 1e-10 && excess <= 1e-10 && rdev <= 1e-10 ? "pass" : "fail";
  c.detail = {{"max_vanish", vanish},
              {"max_prediction_error", predict},
              {"max_excess", excess},
              {"factor_deviation", rdev}};
  return c;
}

// ---- transfer of Fourier mass ----

nlohmann::json transfer_to_json(const TransferInput &in) {
  return {{"usize", in.usize}, {"k", in.k},   {"N", in.N},
          {"m", in.m},         {"z", in.z.on_universe},
          {"outside", in.z.outside},
          {"s_star", in.s_star},
          {"A", in.A},         {"l", in.l}};
}

double transfer_value(const TransferInput &in, const Caps &caps) {
  const int N = in.N, k = in.k, m = in.m, usize = in.usize;
  if (static_cast<int>(in.z.on_universe.size()) != k * usize)
    throw DomainError("z must have k|U| coordinates");
  if (in.A.empty()) throw DomainError("A must be nonempty");
  const std::uint64_t L = ipow_sat(N, k * m);
  DenseFunction phi = DenseFunction::zeros(N, k * m, caps);
  std::set<std::uint64_t> A(in.A.begin(), in.A.end());
  for (auto a : A) {
    if (a >= L) throw DomainError("label tuple out of range");
    phi.v[a] = static_cast<double>(L) / static_cast<double>(A.size());
  }
  auto ph = dft(phi);
  std::vector<double> mag(L);
  std::vector<std::vector<Tuple>> as(L);
  std::vector<char> inx(L);
  for (std::uint64_t i = 0; i < L; ++i) {
    mag[i] = std::abs(ph.v[i]);
    Tuple d = index_tuple(i, N, k * m);
    for (int t = 0; t < m; ++t) as[i].push_back(Tuple(d.begin() + t * k, d.begin() + (t + 1) * k));
    inx[i] = in_X(as[i]);
  }
  auto Ms = enumerate_matchings(usize, k, m, caps);
  const int base = in.z.weight();
  double total = 0;
  for (const auto &M : Ms) {
    double s = 0;
    for (std::uint64_t i = 0; i < L; ++i) {
      if (!inx[i]) continue;
      int w = base;
      for (int t = 0; t < m; ++t)
        for (int j = 0; j < k; ++j) {
          int c = in.z.on_universe[j * usize + M[t][j]];
          w += ((c + as[i][t][j]) % N != 0) - (c != 0);
        }
      if (w == in.l) s += mag[i];
    }
    total += s;
  }
  return total / static_cast<double>(Ms.size());
}

LemmaCheck check_transfer_Q(const TransferInput &in, const Caps &caps) {
  LemmaCheck c;
  c.lemma_id = "transfer-q";
  c.instantiation_hash = hash_json(transfer_to_json(in));
  const double u = in.usize, m = in.m, s = in.s_star, l = in.l;
  const double Nd = in.N, kd = in.k;
  const int t = in.z.weight();
  const double td = t;
  std::set<std::uint64_t> A(in.A.begin(), in.A.end());
  const double need = std::pow(2.0, -s) * std::pow(Nd, kd * m);
  std::string regime, skip;
  double bound = 0;
  if (s < 0 || static_cast<double>(A.size()) < need * (1 - 1e-12)) skip = "A below the density floor";
  if (in.l == 0) {
    regime = "zero";
    bound = q_bound(in.k, t, t, 0, in.m, in.usize);
  } else if (l <= s) {
    regime = "low";
    const double rt = std::sqrt(m * s);
    if (m / u > 0.5 || 16 * m * rt / (u * u) > 0.25) skip = "outside the low-level hypotheses";
    bound = 4 * pow00(72 * std::pow(Nd, 8 * kd) * td / rt, td / 2) *
            std::pow(16 * rt / l, l / 2) *
            pow00(16 * m * rt / (u * u), std::max(0.0, td - l) / 2);
  } else {
    regime = "high";
    if (m > u / (6 * kd) || m / u > 0.5 || 12 * m * m * m * td / (u * u * u * u) > 1.0 / 16)
      skip = "outside the high-level hypotheses";
    bound = 4 * pow00(65536 * std::pow(Nd, 16 * kd) * td / m, td / 4) *
            std::pow(96 * m / l, l / 4) *
            pow00(12 * m * m * m * td / (u * u * u), std::max(0.0, td - l) / 4);
  }
  c.detail = {{"regime", regime}, {"bound", bound}, {"t", t}};
  if (!skip.empty()) {
    c.status = "skipped";
    c.detail["note"] = skip;
    return c;
  }
  const double val = transfer_value(in, caps);
  c.detail["value"] = val;
  c.residual_or_slack = bound - val;
  c.status = val <= bound * (1 + 1e-9) + 1e-12 ? "pass" : "fail";
  return c;
}

// ---- bounded growth ----

std::string partitioner_name(Partitioner p) {
  return p == Partitioner::SingleEdge ? "single-edge-exposure" : "label-bit-reveal";
}

namespace {

struct GState {
  RestrictionSequence zeta;
  std::vector<int> parity;  // -1 none, else revealed parity of first label coordinates
};

int label_parity(const LabeledMatching &z) {
  int s = 0;
  for (const auto &e : z.edges) s += e.label[0];
  return s & 1;
}

// |A|/|Omega_z| for the set {y in Omega_z : parity constraint}
double parity_density(int free_edges, int par, int zpar) {
  if (par < 0) return 1;
  if (free_edges >= 1) return 0.5;
  return par == zpar ? 1 : 0;
}

// exact globality of {y in Omega_z : parity = par}; the worst z' adds s free edges
void check_parity_piece(int free_edges, int par, int zpar) {
  const double base = parity_density(free_edges, par, zpar);
  if (base == 0) throw ContractError("partitioner produced an empty piece");
  for (int s = 0; s <= free_edges; ++s) {
    const double best = par < 0 ? 1.0 : (free_edges - s >= 1 ? 0.5 : 1.0);
    if (best > std::ldexp(base, s) * (1 + 1e-12))
      throw ContractError("partitioner piece is not global");
  }
}

double state_potential(const GameSpec &spec, const GState &st) {
  double phi = 0;
  for (int p = 0; p < spec.players(); ++p) {
    phi += st.zeta[p].size();
    phi -= std::log2(parity_density(spec.m() - st.zeta[p].size(), st.parity[p],
                                    label_parity(st.zeta[p])));
  }
  return phi;
}

struct StepStats {
  double mean_weight = 0, mean_potential = 0, cyclic_prob = 0;
};

// free position tuples of the speaker, in lexicographic order
std::vector<Tuple> free_edges(const GameSpec &spec, const LabeledMatching &z) {
  auto avail = subtract_universe(spec.n, spec.G.k, z);
  std::vector<Tuple> out;
  const int k = spec.G.k;
  std::vector<std::size_t> ctr(k, 0);
  if (avail[0].empty()) return out;
  while (true) {
    Tuple e(k);
    for (int j = 0; j < k; ++j) e[j] = avail[j][ctr[j]];
    out.push_back(e);
    int j = k - 1;
    while (j >= 0 && ++ctr[j] == avail[j].size()) ctr[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

// weight and cyclicity after adding one ground edge, via components of the current graph
struct Incremental {
  std::map<int, int> comp;  // vertex -> component id
  std::vector<long long> size;
  long long weight = 0;
  bool cyclic = false;

  Incremental(const std::vector<HyperEdge> &E) {
    auto cs = components(E);
    for (int i = 0; i < static_cast<int>(cs.size()); ++i) {
      for (int v : cs[i]) comp[v] = i;
      size.push_back(static_cast<long long>(cs[i].size()));
      weight += size.back() * size.back();
    }
    cyclic = supports_overlap(E) || (E.empty() ? false : has_cycle_peeling(static_cast<int>(E[0].size()), E));
  }
  std::pair<long long, bool> add(const HyperEdge &e) const {
    std::vector<int> touched;
    long long fresh = 0;
    bool twice = false;
    for (int v : e) {
      auto it = comp.find(v);
      if (it == comp.end()) {
        ++fresh;
        continue;
      }
      if (std::find(touched.begin(), touched.end(), it->second) != touched.end())
        twice = true;
      else
        touched.push_back(it->second);
    }
    long long w = weight, merged = fresh;
    for (int c : touched) w -= size[c] * size[c], merged += size[c];
    w += merged * merged;
    return {w, cyclic || twice};
  }
};

StepStats exact_step(const GameSpec &spec, const GState &st, int speaker, Partitioner part) {
  StepStats s;
  const int m = spec.m();
  const auto &z = st.zeta[speaker];
  const int fe = m - z.size();
  auto E = hyper_edges(spec, st.zeta);
  const double phi = state_potential(spec, st);
  Incremental inc(E);
  if (part == Partitioner::LabelBit || fe == 0) {
    s.mean_weight = static_cast<double>(inc.weight);
    s.cyclic_prob = inc.cyclic ? 1 : 0;
    if (part == Partitioner::LabelBit && st.parity[speaker] < 0)
      s.mean_potential = phi + (fe >= 1 ? 1.0 : 0.0);
    else
      s.mean_potential = phi;
    return s;
  }
  const int zpar = label_parity(z);
  const double before = parity_density(fe, st.parity[speaker], zpar);
  // the exposed label keeps the parity constraint satisfiable
  const double after = parity_density(fe - 1, st.parity[speaker], st.parity[speaker] < 0 ? 0 : st.parity[speaker]);
  s.mean_potential = phi + 1 + std::log2(before / after);
  auto cand = free_edges(spec, z);
  double w = 0, cyc = 0;
  for (const auto &pos : cand) {
    auto [nw, nc] = inc.add(ground_edge(spec, speaker, pos));
    w += static_cast<double>(nw);
    cyc += nc;
  }
  s.mean_weight = w / cand.size();
  s.cyclic_prob = cyc / cand.size();
  return s;
}

void sample_step(const GameSpec &spec, GState &st, int speaker, Partitioner part, Rng &rng) {
  const int m = spec.m(), N = spec.G.N, k = spec.G.k;
  auto &z = st.zeta[speaker];
  const int fe = m - z.size();
  if (part == Partitioner::LabelBit) {
    if (st.parity[speaker] >= 0) return;
    const int zpar = label_parity(z);
    st.parity[speaker] = fe >= 1 ? static_cast<int>(rng.below(2)) : zpar;
    check_parity_piece(fe, st.parity[speaker], zpar);
    return;
  }
  if (fe == 0) return;
  auto cand = free_edges(spec, z);
  Tuple pos = cand[rng.below(cand.size())];
  Tuple lab(k);
  while (true) {
    for (int j = 0; j < k; ++j) lab[j] = static_cast<int>(rng.below(N));
    if (st.parity[speaker] < 0 || fe >= 2) break;
    if (((label_parity(z) + lab[0]) & 1) == st.parity[speaker]) break;
  }
  z.edges.push_back({pos, lab});
  z.normalize();
  check_parity_piece(fe - 1, st.parity[speaker], label_parity(z));
}

struct TrialRecord {
  std::vector<long long> weight;
  std::vector<double> phi;
  std::vector<char> cyclic;
  std::uint64_t states = 0, in_hyp = 0, wviol = 0, cviol = 0;
  double wslack = std::numeric_limits<double>::infinity();
  double cslack = std::numeric_limits<double>::infinity();
};

TrialRecord run_trial(const GameSpec &spec, int rounds, Partitioner part, std::uint64_t seed,
                      std::uint64_t trial) {
  Rng rng(derive_seed(seed, trial));
  const int k = spec.G.k, P = spec.players();
  GState st{empty_sequence(spec), std::vector<int>(P, -1)};
  TrialRecord rec;
  auto snapshot = [&] {
    auto E = hyper_edges(spec, st.zeta);
    rec.weight.push_back(hyper_weight(E));
    rec.phi.push_back(state_potential(spec, st));
    rec.cyclic.push_back(supports_overlap(E) || has_cycle_peeling(k, E));
  };
  snapshot();
  const double hyp = std::pow(6.0, -(k + 1)) * spec.n;
  const double cyc_rate = std::pow(6.0, k + 1) * q_double(spec.alpha) / spec.n;
  for (int r = 0; r < rounds; ++r) {
    const int speaker = r % P;
    const double w = static_cast<double>(rec.weight.back());
    auto ex = exact_step(spec, st, speaker, part);
    ++rec.states;
    if (w <= hyp) {
      ++rec.in_hyp;
      const double wb = k * k * (2 * w + ex.mean_potential);
      const double ws = wb - ex.mean_weight;
      rec.wslack = std::min(rec.wslack, ws);
      rec.wviol += ws < -1e-9;
      if (!rec.cyclic.back()) {
        const double cs = cyc_rate * w - ex.cyclic_prob;
        rec.cslack = std::min(rec.cslack, cs);
        rec.cviol += cs < -1e-12;
      }
    }
    sample_step(spec, st, speaker, part, rng);
    snapshot();
  }
  return rec;
}

GrowthReport aggregate(const GameSpec &spec, int rounds, Partitioner part, std::uint64_t trials,
                       std::uint64_t seed, const std::vector<TrialRecord> &recs) {
  GrowthReport rep;
  rep.rounds = rounds;
  rep.trials = trials;
  rep.seed = seed;
  rep.partitioner = partitioner_name(part);
  for (int r = 0; r <= rounds; ++r) {
    long double sw = 0, sw2 = 0, sp = 0;
    std::uint64_t cyc = 0;
    for (const auto &t : recs) {
      sw += t.weight[r];
      sw2 += static_cast<long double>(t.weight[r]) * t.weight[r];
      sp += t.phi[r];
      cyc += t.cyclic[r];
    }
    GrowthRound g;
    const long double T = static_cast<long double>(trials);
    g.mean_weight = static_cast<double>(sw / T);
    g.sd_weight = static_cast<double>(std::sqrt(std::max<long double>(0, sw2 / T - (sw / T) * (sw / T))));
    g.mean_potential = static_cast<double>(sp / T);
    g.cyclic_freq = static_cast<double>(cyc) / static_cast<double>(trials);
    rep.per_round.push_back(g);
  }
  for (const auto &t : recs) {
    rep.states += t.states;
    rep.states_in_hypothesis += t.in_hyp;
    rep.weight_violations += t.wviol;
    rep.cyclic_violations += t.cviol;
    rep.worst_weight_slack = std::min(rep.worst_weight_slack, t.wslack);
    rep.worst_cyclic_slack = std::min(rep.worst_cyclic_slack, t.cslack);
  }
  const int k = spec.G.k;
  const double rate = std::pow(6.0, k + 1) * q_double(spec.alpha) / spec.n;
  double env = 0;
  for (int r = 0; r < rounds; ++r) env += rate * rep.per_round[r].mean_weight;
  rep.cyclic_envelope = env;
  const double p = rep.per_round.back().cyclic_freq;
  const double sigma = std::sqrt(std::max(p * (1 - p), 1.0 / static_cast<double>(trials)) /
                                 static_cast<double>(trials));
  rep.envelope_ok = p <= env + 4 * sigma;
  return rep;
}

}  // namespace

nlohmann::json GrowthReport::to_json() const {
  nlohmann::json j = {{"rounds", rounds},
                      {"trials", trials},
                      {"seed", seed},
                      {"partitioner", partitioner},
                      {"states", states},
                      {"states_in_hypothesis", states_in_hypothesis},
                      {"weight_violations", weight_violations},
                      {"cyclic_violations", cyclic_violations},
                      {"cyclic_envelope", cyclic_envelope},
                      {"envelope_ok", envelope_ok}};
  if (std::isfinite(worst_weight_slack)) j["worst_weight_slack"] = worst_weight_slack;
  if (std::isfinite(worst_cyclic_slack)) j["worst_cyclic_slack"] = worst_cyclic_slack;
  for (const auto &r : per_round)
    j["per_round"].push_back({{"mean_weight", r.mean_weight},
                              {"sd_weight", r.sd_weight},
                              {"mean_potential", r.mean_potential},
                              {"cyclic_freq", r.cyclic_freq}});
  return j;
}

GrowthReport growth_experiment(const GameSpec &spec, int rounds, Partitioner part,
                               std::uint64_t trials, std::uint64_t seed) {
  if (rounds < 0 || trials == 0) throw DomainError("rounds >= 0 and trials >= 1 required");
  if (part == Partitioner::LabelBit && spec.G.N % 2 != 0)
    throw DomainError("label-bit reveal needs even N");
  std::vector<TrialRecord> recs(trials);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials); ++i)
    recs[i] = run_trial(spec, rounds, part, seed, static_cast<std::uint64_t>(i));
  return aggregate(spec, rounds, part, trials, seed, recs);
}

GrowthReport growth_experiment_serial(const GameSpec &spec, int rounds, Partitioner part,
                                      std::uint64_t trials, std::uint64_t seed) {
  if (rounds < 0 || trials == 0) throw DomainError("rounds >= 0 and trials >= 1 required");
  if (part == Partitioner::LabelBit && spec.G.N % 2 != 0)
    throw DomainError("label-bit reveal needs even N");
  std::vector<TrialRecord> recs;
  for (std::uint64_t i = 0; i < trials; ++i) recs.push_back(run_trial(spec, rounds, part, seed, i));
  return aggregate(spec, rounds, part, trials, seed, recs);
}

// ---- almost-acyclicity of random no-inputs ----

double locality_delta(const GameSpec &spec) {
  const double k = spec.G.k;
  const double p = 1.0 / (k - 1.1);
  const double C1 = std::pow(3.0 * spec.K * spec.G.ne() / p, p);
  const double C2 = 3.0 * C1 * spec.G.nv();
  const double ex = (k - 1) * p - 1;
  return std::pow(1.0 / (2.0 * C2), 1.0 / ex);
}

AcyclicFrequency almost_acyclic_frequency(const GameSpec &spec, int C, std::uint64_t trials,
                                          std::uint64_t seed) {
  AcyclicFrequency out;
  out.C = C;
  out.trials = trials;
  std::uint64_t hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(dynamic, 16)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials); ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    RestrictionSequence Y = sample_no(spec, rng);
    auto E = hyper_edges(spec, Y);
    hits += !supports_overlap(E) && locally_almost_acyclic(spec.G.k, E, C);
  }
  out.hits = hits;
  out.freq = wilson(hits, trials);
  return out;
}

}  // namespace dlab
