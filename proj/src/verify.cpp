#include "dlab/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace dlab {

namespace {

using json = nlohmann::json;

std::string hj(const json &j) { return content_hash(j.dump()); }

LemmaCheck verdict(const std::string &id, bool ok, double residual, const std::string &hash,
                   std::uint64_t seed, json detail = json::object()) {
  LemmaCheck c;
  c.lemma_id = id;
  c.status = ok ? "pass" : "fail";
  c.residual_or_slack = residual;
  c.instantiation_hash = hash;
  c.seed = seed;
  c.detail = std::move(detail);
  return c;
}

LemmaCheck skipped(const std::string &id, const std::string &hash, const std::string &note) {
  LemmaCheck c;
  c.lemma_id = id;
  c.status = "skipped";
  c.instantiation_hash = hash;
  c.detail = {{"note", note}};
  return c;
}

// folds per-instantiation checks of one family into a single verdict
LemmaCheck fold(const std::string &id, const std::string &hash, std::uint64_t seed,
                const Checks &parts, bool residual_is_slack) {
  std::uint64_t pass = 0, fail = 0, skip = 0;
  double worst = residual_is_slack ? std::numeric_limits<double>::infinity() : 0.0;
  std::string first_fail;
  for (const auto &c : parts) {
    if (c.skipped()) {
      ++skip;
      continue;
    }
    c.failed() ? ++fail : ++pass;
    if (c.failed() && first_fail.empty()) first_fail = c.instantiation_hash;
    worst = residual_is_slack ? std::min(worst, c.residual_or_slack)
                              : std::max(worst, c.residual_or_slack);
  }
  if (pass + fail == 0) worst = 0;
  json d{{"checked", pass + fail}, {"passed", pass}, {"failed", fail}, {"skipped", skip}};
  if (!first_fail.empty()) d["first_failure"] = first_fail;
  auto c = verdict(id, fail == 0 && pass > 0, worst, hash, seed, d);
  if (pass + fail == 0) c.status = "skipped";
  return c;
}

FiniteDistribution cut_mu(int N = 2) {
  std::vector<Tuple> pts;
  for (int a = 0; a < N; ++a) pts.push_back({a, (a + 1) % N});
  return FiniteDistribution::uniform_on(N, 2, pts);
}

FiniteDistribution skew_mu() {
  FiniteDistribution mu(2, 2);
  mu.at({0, 0}) = frac(1, 8);
  mu.at({1, 1}) = frac(1, 8);
  mu.at({0, 1}) = frac(3, 8);
  mu.at({1, 0}) = frac(3, 8);
  return mu;
}

FiniteDistribution e3_mu(int b = 0) {
  std::vector<Tuple> pts;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) pts.push_back({x, y, (x + y + b) % 2});
  return FiniteDistribution::uniform_on(2, 3, pts);
}

GameSpec graph_spec(int nv, std::vector<Tuple> edges, std::vector<FiniteDistribution> mus, int n,
                    const Q &alpha, int K) {
  DistLabeledGraph G;
  for (int v = 0; v < nv; ++v) G.vertices.push_back("v" + std::to_string(v));
  G.edges = std::move(edges);
  G.N = mus[0].q;
  G.k = mus[0].k;
  G.mu = std::move(mus);
  return make_spec(G, n, alpha, K);
}

GameSpec single_spec(const FiniteDistribution &mu, int n, const Q &alpha, int K) {
  return make_spec(single_edge_graph(mu), n, alpha, K);
}

std::vector<std::filesystem::path> corpus_files(const std::string &dir) {
  std::vector<std::filesystem::path> out;
  for (const auto &e : std::filesystem::directory_iterator(dir + "/instances"))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Q> random_q(std::size_t len, Rng &rng, int hi = 20) {
  std::vector<Q> f(len);
  for (auto &v : f) v = Q(static_cast<long>(rng.below(hi + 1)));
  return f;
}

// random nonnegative rational function with mean exactly 1
std::vector<Q> random_density(std::size_t len, Rng &rng) {
  for (;;) {
    auto f = random_q(len, rng);
    Q mean = std::accumulate(f.begin(), f.end(), Q(0)) / Q(static_cast<long>(len));
    if (mean == 0) continue;
    for (auto &v : f) v /= mean;
    return f;
  }
}

Q q_mean(const std::vector<Q> &f) {
  return std::accumulate(f.begin(), f.end(), Q(0)) / Q(static_cast<long>(f.size()));
}

Q q_sup(const std::vector<Q> &f) {
  Q s = 0;
  for (const auto &v : f) s = std::max(s, Q(abs(v)));
  return s;
}

// restrictions of size <= m for one player
std::vector<LabeledMatching> restrictions_upto(int usize, int k, int m, int N, const Caps &caps) {
  std::vector<LabeledMatching> out;
  for (int s = 0; s <= m; ++s) {
    auto part = enumerate_labeled(usize, k, s, N, caps);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// grows zeta by random exposed edges while keep() holds
RestrictionSequence random_zeta(const GameSpec &spec, int attempts, Rng &rng,
                                const std::function<bool(const RestrictionSequence &)> &keep) {
  const int k = spec.G.k, N = spec.G.N, n = spec.n, m = spec.m();
  auto zeta = empty_sequence(spec);
  for (int a = 0; a < attempts; ++a) {
    const int p = static_cast<int>(rng.below(spec.players()));
    if (zeta[p].size() >= m) continue;
    auto avail = subtract_universe(n, k, zeta[p]);
    LabeledEdge e;
    for (int j = 0; j < k; ++j) {
      e.pos.push_back(avail[j][rng.below(avail[j].size())]);
      e.label.push_back(static_cast<int>(rng.below(N)));
    }
    auto next = zeta;
    next[p].edges.push_back(e);
    next[p].normalize();
    if (keep(next)) zeta = std::move(next);
  }
  return zeta;
}

json caps_json(const Caps &c) {
  return {{"enumeration", c.enumeration}, {"omega", c.omega},
          {"partial_matchings", c.partial_matchings}, {"joint_masses", c.joint_masses},
          {"fourier", c.fourier}};
}

std::uint64_t stream(const VerifyConfig &cfg, std::uint64_t id) { return derive_seed(cfg.seed, id); }

}  // namespace

GameSpec spec_from_instance(const Instance &I, int n, const Q &alpha, int K) {
  auto sol = canonical_value1_solution(I, 1);
  LPSolution s = sol ? *sol : solve_exact(I);
  return make_spec(reduce_to_graph(I, s), n, alpha, K);
}

// ---- LP and reduction ----

Checks battery_lp_corpus(const VerifyConfig &cfg) {
  Checks out;
  for (const auto &path : corpus_files(cfg.data_dir)) {
    auto I = load_instance(path.string());
    const std::string h = instance_hash(I);
    Q lv = lp_value(I), mv = max_value(I, cfg.caps);
    json d{{"file", path.filename().string()}, {"val", q_str(mv)}, {"val_lp", q_str(lv)}};
    out.push_back(verdict("lp-dominates-value", lv >= mv, q_double(lv - mv), h, 0, d));
    bool indep = true;
    for (const auto &p : I.predicates) indep = indep && find_independent_support(p, 1).has_value();
    if (indep)
      out.push_back(verdict("lp-value-one", lv == 1, q_double(lv - 1), h, 0, d));
  }
  return out;
}

Checks battery_reduction(const VerifyConfig &cfg) {
  Checks out;
  for (const auto &path : corpus_files(cfg.data_dir)) {
    auto I = load_instance(path.string());
    const std::string h = instance_hash(I);
    const std::string file = path.filename().string();
    auto onewise = [&](const DistLabeledGraph &G) {
      bool ok = true;
      for (const auto &mu : G.mu) ok = ok && check_onewise(mu);
      return ok;
    };
    try {
      auto G = reduce_to_graph(I, solve_exact(I));
      out.push_back(verdict("reduction-onewise", onewise(G), 0, h, 0,
                            {{"file", file}, {"solution", "optimal"}, {"N", G.N}}));
    } catch (const StructuralError &) {
      auto c = skipped("reduction-onewise", h, "integral optimum admits no modulus");
      c.detail["file"] = file;
      out.push_back(c);
    }
    if (auto s1 = canonical_value1_solution(I, 1)) {
      auto G = reduce_to_graph(I, *s1);
      out.push_back(verdict("reduction-onewise", onewise(G), 0, h, 0,
                            {{"file", file}, {"solution", "canonical"}, {"N", G.N}}));
    }
    if (auto s2 = canonical_value1_solution(I, 2)) {
      auto G = reduce_to_graph(I, *s2);
      bool ok = true;
      for (const auto &mu : G.mu) ok = ok && check_twowise(mu);
      out.push_back(verdict("reduction-twowise", ok, 0, h, 0, {{"file", file}, {"N", G.N}}));
    }
  }
  return out;
}

// ---- kernels ----

Checks battery_kernels(const VerifyConfig &cfg) {
  struct Case {
    int usize, m;
    FiniteDistribution mu;
  };
  std::vector<Case> cases{{2, 1, cut_mu()}, {2, 2, skew_mu()}, {3, 1, cut_mu(3)},
                          {2, 1, e3_mu()},  {3, 2, cut_mu()}};
  Checks out;
  const std::uint64_t seed = stream(cfg, 3);
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto &c = cases[ci];
    const int N = c.mu.q, k = c.mu.k;
    const std::string h = hj({{"usize", c.usize}, {"m", c.m}, {"mu", [&] {
                                std::vector<std::string> s;
                                for (const auto &v : c.mu.mass) s.push_back(q_str(v));
                                return s;
                              }()}});
    auto omega = enumerate_labeled(c.usize, k, c.m, N, cfg.caps);
    auto M = enumerate_matchings(c.usize, k, c.m, cfg.caps).front();
    const std::uint64_t X = ipow(N, k * c.usize), L = ipow(N, k * c.m);

    Q worst_row = 0;
    bool nonneg = true;
    for (std::uint64_t xi = 0; xi < X; ++xi) {
      auto xu = index_tuple(xi, N, k * c.usize);
      Q s = 0, r = 0;
      for (const auto &y : omega) {
        Q p = kernel_P_mass(c.usize, c.m, c.mu, xu, y);
        nonneg = nonneg && p >= 0;
        s += p;
      }
      for (std::uint64_t l = 0; l < L; ++l) {
        Tuple d = index_tuple(l, N, k * c.m);
        std::vector<Tuple> xi_lab;
        for (int t = 0; t < c.m; ++t) xi_lab.emplace_back(d.begin() + t * k, d.begin() + (t + 1) * k);
        Q p = kernel_R_mass(c.usize, M, c.mu, xu, xi_lab);
        nonneg = nonneg && p >= 0;
        r += p;
      }
      worst_row = std::max({worst_row, Q(abs(s - 1)), Q(abs(r - 1))});
    }
    out.push_back(verdict("kernel-rows", worst_row == 0 && nonneg, q_double(worst_row), h, 0,
                          {{"points", X}, {"omega", omega.size()}}));

    Q worst_mean = 0, worst_sup = 0;
    Rng rng(derive_seed(seed, ci));
    for (int t = 0; t < 100; ++t) {
      auto f = random_density(omega.size(), rng);
      auto g = apply_P(c.usize, c.m, c.mu, f, cfg.caps);
      worst_mean = std::max(worst_mean, Q(abs(q_mean(g) - 1)));
      worst_sup = std::max(worst_sup, Q(q_sup(g) - q_sup(f)));
      auto fr = random_density(L, rng);
      auto gr = apply_R(c.usize, M, c.mu, fr, cfg.caps);
      worst_mean = std::max(worst_mean, Q(abs(q_mean(gr) - 1)));
      worst_sup = std::max(worst_sup, Q(q_sup(gr) - q_sup(fr)));
    }
    out.push_back(verdict("density-preservation", worst_mean == 0, q_double(worst_mean), h,
                          derive_seed(seed, ci), {{"functions", 200}}));
    out.push_back(verdict("sup-contraction", worst_sup <= 0, -q_double(worst_sup), h,
                          derive_seed(seed, ci), {{"functions", 200}}));
  }
  return out;
}

Checks battery_relating(const VerifyConfig &cfg, int draws) {
  Checks out;
  const std::uint64_t seed = stream(cfg, 4);
  for (int K : {1, 2}) {
    auto spec = single_spec(cut_mu(), 1, 1, K);
    auto law = exact_masses(spec, cfg.caps);
    auto full = verify_relating_yes_no(spec, law.omega, cfg.caps);
    full.detail["rectangle"] = "full";
    out.push_back(full);
    if (K != 2) continue;
    for (int it = 0; it < draws; ++it) {
      const std::uint64_t s = derive_seed(seed, it);
      Rng rng(s);
      std::vector<std::vector<LabeledMatching>> A(spec.players());
      for (int p = 0; p < spec.players(); ++p) {
        for (const auto &y : law.omega[p])
          if (rng.below(2)) A[p].push_back(y);
        if (A[p].empty()) A[p].push_back(law.omega[p][rng.below(law.omega[p].size())]);
      }
      auto c = verify_relating_yes_no(spec, A, cfg.caps);
      c.seed = s;
      c.detail["rectangle"] = "random";
      out.push_back(c);
    }
  }
  return out;
}

Checks battery_separation(const VerifyConfig &cfg, int draws) {
  std::vector<GameSpec> specs{single_spec(cut_mu(), 2, frac(1, 2), 1),
                              single_spec(cut_mu(), 3, frac(2, 3), 1),
                              single_spec(skew_mu(), 3, frac(2, 3), 1),
                              single_spec(cut_mu(3), 2, frac(1, 2), 1),
                              single_spec(e3_mu(), 2, frac(1, 2), 1)};
  Checks out;
  const std::uint64_t seed = stream(cfg, 5);
  for (int it = 0; it < draws; ++it) {
    const auto &spec = specs[it % specs.size()];
    const std::uint64_t s = derive_seed(seed, it);
    Rng rng(s);
    const int n = spec.n, k = spec.G.k, N = spec.G.N, m = spec.m();
    auto z = sample_labeled(n, k, static_cast<int>(rng.below(m)), N, rng);
    auto om = enumerate_restricted(n, k, m, N, z, cfg.caps);
    std::vector<LabeledMatching> A;
    for (const auto &y : om)
      if (rng.below(3) == 0) A.push_back(y);
    if (A.empty()) A.push_back(om[rng.below(om.size())]);
    auto c = verify_separation(spec, 0, z, A, cfg.caps);
    c.seed = s;
    out.push_back(c);
  }
  return out;
}

Checks battery_svd(const VerifyConfig &cfg, int draws) {
  struct Case {
    int usize;
    FiniteDistribution mu;
  };
  std::vector<Case> cases{{3, cut_mu()}, {3, skew_mu()}, {2, e3_mu()}, {3, cut_mu(3)}, {2, cut_mu()}};
  Checks out;
  const std::uint64_t seed = stream(cfg, 6);
  for (int it = 0; it < draws; ++it) {
    const auto &c = cases[it % cases.size()];
    const std::uint64_t s = derive_seed(seed, it);
    Rng rng(s);
    const int k = c.mu.k, N = c.mu.q;
    const int m = 1 + static_cast<int>(rng.below(std::min(2, c.usize)));
    auto M = sample_matching(c.usize, k, m, rng);
    std::vector<cplx> f(ipow(N, k * m));
    for (auto &v : f) v = cplx(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
    auto r = verify_svd(c.usize, M, c.mu, f, cfg.caps);
    r.seed = s;
    out.push_back(r);
  }
  return out;
}

// ---- Fourier side ----

Checks battery_spectrum(const VerifyConfig &cfg) {
  const Q one = 1;
  std::vector<std::pair<std::string, GameSpec>> grids{
      {"edge n=1 K=2", single_spec(cut_mu(), 1, one, 2)},
      {"edge n=2 K=2", single_spec(cut_mu(), 2, frac(1, 2), 2)},
      {"edge n=3 K=2", single_spec(cut_mu(), 3, frac(1, 3), 2)},
      {"edge n=4 K=2", single_spec(cut_mu(), 4, frac(1, 4), 2)},
      {"edge n=5 K=2", single_spec(cut_mu(), 5, frac(1, 5), 2)},
      {"edge n=5 m=2", single_spec(cut_mu(), 5, frac(2, 5), 1)},
      {"skew n=4 m=2", single_spec(skew_mu(), 4, frac(1, 2), 1)},
      {"path n=2 K=2", graph_spec(3, {{0, 1}, {1, 2}}, {cut_mu(), cut_mu()}, 2, frac(1, 2), 2)},
      {"path n=3", graph_spec(3, {{0, 1}, {1, 2}}, {cut_mu(), cut_mu()}, 3, frac(1, 3), 1)},
      {"triangle n=1 K=2",
       graph_spec(3, {{0, 1}, {1, 2}, {2, 0}}, {cut_mu(), cut_mu(), cut_mu()}, 1, one, 2)},
      {"triangle n=3",
       graph_spec(3, {{0, 1}, {1, 2}, {2, 0}}, {cut_mu(), cut_mu(), cut_mu()}, 3, frac(1, 3), 1)},
      {"e3 n=3 K=2", single_spec(e3_mu(), 3, frac(1, 3), 2)},
      {"square n=2",
       graph_spec(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {cut_mu(), cut_mu(), cut_mu(), cut_mu()}, 2,
                  frac(1, 2), 1)},
      {"star n=2", graph_spec(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}},
                              {cut_mu(), cut_mu(), cut_mu(), cut_mu()}, 2, frac(1, 2), 1)}};
  Checks out;
  for (const auto &[name, spec] : grids) {
    const int P = spec.players();
    std::vector<std::vector<LabeledMatching>> per(P);
    std::uint64_t total = 1;
    for (int p = 0; p < P; ++p) {
      per[p] = restrictions_upto(spec.n, spec.G.k, spec.m(), spec.G.N, cfg.caps);
      total *= per[p].size();
    }
    if (total > cfg.caps.omega) throw CapExceeded("omega", "restriction sequences on " + name);
    std::vector<LemmaCheck> res(total);
    std::vector<char> used(total, 0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
      RestrictionSequence zeta(P);
      std::uint64_t r = static_cast<std::uint64_t>(idx);
      for (int p = 0; p < P; ++p) {
        zeta[p] = per[p][r % per[p].size()];
        r /= per[p].size();
      }
      if (is_cyclic(spec, zeta)) continue;
      res[idx] = verify_spectrum_vanishing(spec, zeta, cfg.caps);
      used[idx] = 1;
    }
    Checks parts;
    for (std::uint64_t i = 0; i < total; ++i)
      if (used[i]) parts.push_back(std::move(res[i]));
    auto c = fold("spectrum-vanishing", spec_hash(spec), 0, parts, false);
    c.detail["grid"] = name;
    c.detail["sequences"] = total;
    c.detail["cyclic_skipped"] = total - parts.size();
    out.push_back(c);
  }
  return out;
}

Checks battery_bounded(const VerifyConfig &cfg) {
  const double gamma = 0.25;
  const std::uint64_t seed = stream(cfg, 8);
  Checks out;
  struct Family {
    std::string name;
    GameSpec spec;
    Independence kind;
    int max_cover;
  };
  auto col3 = make_spec(single_edge_graph(cut_mu(3)), 64, frac(1, 16), 2);
  std::vector<Family> fams{
      {"cut n=64", single_spec(cut_mu(), 64, frac(1, 16), 2), Independence::OneWise, 16},
      {"skew n=64", single_spec(skew_mu(), 64, frac(1, 16), 2), Independence::OneWise, 16},
      {"path n=64",
       graph_spec(3, {{0, 1}, {1, 2}}, {cut_mu(), cut_mu()}, 64, frac(1, 16), 1),
       Independence::OneWise, 16},
      {"triangle n=64",
       graph_spec(3, {{0, 1}, {1, 2}, {2, 0}}, {cut_mu(), cut_mu(), cut_mu()}, 64, frac(1, 16), 1),
       Independence::OneWise, 16},
      {"z3 n=64", col3, Independence::OneWise, 10},
      {"e3 n=64", single_spec(e3_mu(), 64, frac(1, 16), 2), Independence::OneWise, 15},
      {"e3 two-wise n=16", single_spec(e3_mu(), 16, frac(1, 4), 2), Independence::TwoWise, 12},
      {"e3 pair two-wise n=16",
       graph_spec(3, {{0, 1, 2}, {0, 1, 2}}, {e3_mu(0), e3_mu(1)}, 16, frac(1, 4), 1),
       Independence::TwoWise, 12}};
  for (std::size_t fi = 0; fi < fams.size(); ++fi) {
    const auto &F = fams[fi];
    const GameSpec &spec = F.spec;
    auto keep = [&](const RestrictionSequence &z) {
      auto E = hyper_edges(spec, z);
      if (static_cast<int>(covered_vertices(spec, z).size()) > F.max_cover) return false;
      if (F.kind == Independence::OneWise)
        return !is_cyclic(spec, z) && hyper_weight(E) <= gamma * spec.n;
      return is_almost_acyclic(spec, z) && E.size() <= gamma * spec.n;
    };
    Checks parts;
    for (int t = 0; t < 16; ++t) {
      const std::uint64_t s = derive_seed(seed, fi * 1000 + t);
      Rng rng(s);
      auto zeta = t == 0 ? empty_sequence(spec)
                         : random_zeta(spec, 1 + static_cast<int>(rng.below(12)), rng, keep);
      auto c = verify_structured_bounded(spec, zeta, gamma, F.kind, cfg.caps);
      c.seed = s;
      if (!c.skipped() && !c.detail.value("hypothesis_met", false)) c.status = "fail";
      parts.push_back(c);
    }
    long long max_w = 0, max_e = 0;
    for (const auto &c : parts) {
      max_w = std::max(max_w, c.detail["weight"].get<long long>());
      max_e = std::max(max_e, c.detail["edges"].get<long long>());
    }
    auto c = fold(F.kind == Independence::OneWise ? "structured-bounded"
                                                   : "structured-bounded-twowise",
                  spec_hash(spec), seed, parts, true);
    c.detail["family"] = F.name;
    c.detail["gamma"] = gamma;
    c.detail["max_weight"] = max_w;
    c.detail["max_edges"] = max_e;
    out.push_back(c);
  }
  return out;
}

// ---- combinatorics ----

Checks battery_no_singleton(const VerifyConfig &) {
  Checks out;
  // every multiset of part sizes >= 2 with total <= 12
  std::vector<std::vector<int>> all;
  std::function<void(std::vector<int> &, int, int)> gen = [&](std::vector<int> &cur, int lo,
                                                              int left) {
    if (!cur.empty()) all.push_back(cur);
    for (int s = lo; s <= left; ++s) {
      cur.push_back(s);
      gen(cur, s, left - s);
      cur.pop_back();
    }
  };
  std::vector<int> cur;
  gen(cur, 2, 12);
  for (const auto &sizes : all) {
    const int tot = std::accumulate(sizes.begin(), sizes.end(), 0);
    Checks parts;
    for (int l = 0; l <= tot; ++l) parts.push_back(check_no_singleton(sizes, l));
    auto c = fold("no-singleton-count", hj({{"sizes", sizes}}), 0, parts, true);
    c.detail["sizes"] = sizes;
    out.push_back(c);
  }
  return out;
}

Checks battery_heavy_sums(const VerifyConfig &cfg) {
  Checks out;
  // k = 3, N = 2: B(E) is the single sum of all-ones labels, i.e. the symmetric difference
  std::vector<std::uint16_t> tri;
  std::vector<HyperEdge> tri_edges;
  for (int a = 0; a < 9; ++a)
    for (int b = a + 1; b < 9; ++b)
      for (int c = b + 1; c < 9; ++c) {
        tri.push_back(static_cast<std::uint16_t>(1u << a | 1u << b | 1u << c));
        tri_edges.push_back({a, b, c});
      }
  const int T = static_cast<int>(tri.size());
  std::uint64_t families = 0, checked = 0, violations = 0, cross = 0, mismatches = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int from) {
    if (!pick.empty()) {
      ++families;
      const int r = static_cast<int>(pick.size());
      bool aa = true;
      for (int s = 1; s < (1 << r) && aa; ++s) {
        std::uint16_t cov = 0;
        for (int i = 0; i < r; ++i)
          if (s >> i & 1) cov |= tri[pick[i]];
        aa = 10 * std::popcount(cov) >= 19 * std::popcount(static_cast<unsigned>(s));
      }
      // components by overlap
      std::vector<int> par(r);
      std::iota(par.begin(), par.end(), 0);
      std::function<int(int)> find = [&](int x) { return par[x] == x ? x : par[x] = find(par[x]); };
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
          if (tri[pick[i]] & tri[pick[j]]) par[find(i)] = find(j);
      int t = 0;
      for (int i = 0; i < r; ++i) t += find(i) == i;
      std::uint16_t x = 0;
      for (int i : pick) x ^= tri[i];
      const int w = std::popcount(x);
      const double bound = std::max(2.0 * t, 0.8 * r);
      if (aa) {
        ++checked;
        worst = std::min(worst, w - bound);
        violations += w < bound - 1e-12;
      }
      if (families % 4099 == 0) {
        std::vector<HyperEdge> E;
        for (int i : pick) E.push_back(tri_edges[i]);
        auto rep = enumerate_B(3, 2, E, false, cfg.caps.enumeration);
        ++cross;
        mismatches += rep.almost_acyclic != aa || rep.count != 1 || rep.min_weight != w ||
                      rep.t != t;
      }
    }
    if (pick.size() == 4) return;
    for (int i = from; i < T; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  out.push_back(verdict("heavy-sum-weight", violations == 0 && mismatches == 0 && checked > 0,
                        worst, hj({{"k", 3}, {"N", 2}, {"vertices", 9}, {"max_edges", 4}}), 0,
                        {{"families", families},
                         {"almost_acyclic", checked},
                         {"violations", violations},
                         {"oracle_cross_checks", cross},
                         {"oracle_mismatches", mismatches}}));

  // N = 3 on sampled families through the general enumerator
  const std::uint64_t seed = stream(cfg, 10);
  Checks parts;
  Rng rng(seed);
  for (int it = 0; it < 300; ++it) {
    const int r = 1 + static_cast<int>(rng.below(4));
    std::set<int> idx;
    while (static_cast<int>(idx.size()) < r) idx.insert(static_cast<int>(rng.below(T)));
    std::vector<HyperEdge> E;
    for (int i : idx) E.push_back(tri_edges[i]);
    auto rep = enumerate_B(3, 3, E, false, cfg.caps.enumeration);
    if (!rep.almost_acyclic) continue;
    parts.push_back(verdict("heavy-sum-weight", rep.ok, rep.min_weight - rep.bound,
                            hj({{"E", E}, {"N", 3}}), seed,
                            {{"count", rep.count}, {"min_weight", rep.min_weight}}));
  }
  auto c = fold("heavy-sum-weight", hj({{"k", 3}, {"N", 3}, {"sampled", 300}}), seed, parts, true);
  out.push_back(c);
  return out;
}

Checks battery_q_grid(const VerifyConfig &cfg, int count) {
  Checks out;
  const std::uint64_t seed = stream(cfg, 11);
  Rng rng(seed);
  for (int it = 0; it < count; ++it) {
    const int k = 2 + static_cast<int>(rng.below(2));
    const int u = 4 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(u));
    SpectralPoint z{std::vector<int>(k * u, 0), static_cast<int>(rng.below(2))};
    const int nz = 1 + static_cast<int>(rng.below(4));
    for (int c = 0; c < nz; ++c) z.on_universe[rng.below(k * u)] = 1;
    const int t = z.weight();
    const int i = static_cast<int>(rng.below(t + 1));
    const int b = static_cast<int>(rng.below(t - i + 1));
    const std::uint64_t trials = 4000, s = derive_seed(seed, it);
    auto iv = estimate_q(u, k, m, z, i, b, trials, s);
    const double sd = std::sqrt(std::max(iv.estimate * (1 - iv.estimate), 1e-12) / trials);
    const double bound = q_bound(k, t, i, b, m, u);
    json d{{"k", k}, {"u", u}, {"m", m}, {"t", t}, {"i", i}, {"b", b},
           {"estimate", iv.estimate}, {"bound", bound}, {"trials", trials}};
    bool ok = iv.estimate - 3 * sd <= bound;
    if (count_matchings(u, k, m) <= cfg.caps.partial_matchings) {
      Q ex = q_exact(u, k, m, z, i, b, cfg.caps);
      d["exact"] = q_str(ex);
      ok = ok && q_double(ex) <= bound;
    }
    out.push_back(verdict("q-bound", ok, bound - (iv.estimate - 3 * sd),
                          hj({{"u", u}, {"k", k}, {"m", m}, {"z", z.on_universe},
                              {"outside", z.outside}, {"i", i}, {"b", b}}),
                          s, d));
  }
  return out;
}

Checks battery_transfer_grid(const VerifyConfig &cfg, int count) {
  Checks out;
  const std::uint64_t seed = stream(cfg, 12);
  Rng rng(seed);
  std::uint64_t skipped_draws = 0;
  int it = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++it > 200 * count) throw ContractError("transfer grid keeps landing outside the hypotheses");
    TransferInput in;
    in.k = 2 + static_cast<int>(rng.below(2));
    if (in.k == 2) {
      static const int us[] = {8, 10, 12, 14, 16, 24};
      in.usize = us[rng.below(6)];
      in.N = rng.below(4) == 0 ? 3 : 2;
      in.m = 1 + static_cast<int>(rng.below(2));
    } else {
      static const int us[] = {9, 12, 18};
      in.usize = us[rng.below(3)];
      in.N = 2;
      in.m = 1;
    }
    in.z.on_universe.assign(in.k * in.usize, 0);
    in.z.outside = static_cast<int>(rng.below(2));
    const int nz = static_cast<int>(rng.below(4));
    for (int c = 0; c < nz; ++c)
      in.z.on_universe[rng.below(in.k * in.usize)] = 1 + static_cast<int>(rng.below(in.N - 1));
    in.s_star = 1 + static_cast<int>(rng.below(3));
    const std::uint64_t L = ipow(in.N, in.k * in.m);
    const auto need = static_cast<std::uint64_t>(std::ceil(std::pow(2.0, -in.s_star) * L));
    const std::uint64_t size = need + rng.below(L - need + 1);
    std::vector<std::uint64_t> all(L);
    std::iota(all.begin(), all.end(), 0);
    for (std::uint64_t j = 0; j < size; ++j) std::swap(all[j], all[j + rng.below(L - j)]);
    in.A.assign(all.begin(), all.begin() + size);
    std::sort(in.A.begin(), in.A.end());
    in.l = static_cast<int>(rng.below(in.z.weight() + in.k * in.m + 1));
    auto c = check_transfer_Q(in, cfg.caps);
    if (c.skipped()) {
      ++skipped_draws;
      continue;
    }
    c.seed = seed;
    c.detail["draw"] = it;
    out.push_back(c);
  }
  if (!out.empty()) out.back().detail["skipped_draws"] = skipped_draws;
  return out;
}

// ---- rectangles ----

Checks battery_cyclicity(const VerifyConfig &cfg) {
  Checks out;
  for (auto [k, V] : {std::pair{2, 5}, std::pair{3, 6}}) {
    std::vector<HyperEdge> base;
    std::function<void(Tuple &, int)> gen = [&](Tuple &cur, int lo) {
      if (static_cast<int>(cur.size()) == k) {
        base.push_back(cur);
        return;
      }
      for (int v = lo; v < V; ++v) {
        cur.push_back(v);
        gen(cur, v + 1);
        cur.pop_back();
      }
    };
    Tuple cur;
    gen(cur, 0);
    std::uint64_t graphs = 0, mismatches = 0, cyclic = 0;
    std::vector<HyperEdge> E;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      ++graphs;
      const bool p = has_cycle_peeling(k, E);
      const bool x = has_cycle_exhaustive(k, E, cfg.caps.enumeration);
      mismatches += p != x;
      cyclic += x;
      if (E.size() == 5) return;
      for (std::size_t i = from; i < base.size(); ++i) {
        E.push_back(base[i]);
        rec(i);  // multisets: repeats allowed
        E.pop_back();
      }
    };
    rec(0);
    out.push_back(verdict("cyclicity-oracle", mismatches == 0, static_cast<double>(mismatches),
                          hj({{"k", k}, {"vertices", V}, {"max_edges", 5}}), 0,
                          {{"graphs", graphs}, {"cyclic", cyclic}, {"mismatches", mismatches}}));
  }
  return out;
}

Checks battery_growth(const VerifyConfig &cfg) {
  Checks out;
  const std::uint64_t seed = stream(cfg, 14);
  struct Run {
    std::string name;
    GameSpec spec;
    Partitioner part;
  };
  std::vector<Run> runs{{"cut n=32", single_spec(cut_mu(), 32, frac(1, 8), 2), Partitioner::SingleEdge},
                        {"cut n=32", single_spec(cut_mu(), 32, frac(1, 8), 2), Partitioner::LabelBit},
                        {"e3 n=32", single_spec(e3_mu(), 32, frac(1, 8), 2), Partitioner::SingleEdge}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto &r = runs[i];
    const std::uint64_t s = derive_seed(seed, i);
    auto rep = growth_experiment(r.spec, 4, r.part, 400, s);
    auto d = rep.to_json();
    d["spec"] = r.name;
    out.push_back(verdict("bounded-growth", rep.ok(),
                          std::min(rep.worst_weight_slack, rep.worst_cyclic_slack),
                          hj({{"spec", spec_hash(r.spec)}, {"partitioner", rep.partitioner}}), s, d));
  }
  auto spec = single_spec(e3_mu(), 64, frac(1, 16), 2);
  const std::uint64_t s = derive_seed(seed, 100);
  auto f = almost_acyclic_frequency(spec, 3, 2000, s);
  const double delta = locality_delta(spec);
  out.push_back(verdict("almost-acyclic-input", f.freq.estimate >= 0.95, f.freq.estimate - 0.95,
                        hj({{"spec", spec_hash(spec)}, {"C", 3}}), s,
                        {{"trials", f.trials},
                         {"hits", f.hits},
                         {"freq", f.freq.estimate},
                         {"freq_lo", f.freq.lo},
                         {"delta", delta},
                         {"delta_n", delta * spec.n}}));
  return out;
}

Checks battery_distinguishing(const VerifyConfig &cfg, std::uint64_t trials) {
  Checks out;
  const std::uint64_t seed = stream(cfg, 15);
  auto I = load_instance(cfg.data_dir + "/instances/maxcut_edge.json");
  auto spec = spec_from_instance(I, 64, frac(1, 8), 8);
  auto cyc = cycle_consistency_protocol(spec);
  auto r = advantage_mc(cyc, spec, trials, seed);
  out.push_back(verdict("distinguishing-cycle", r.ci_low >= 0.1, r.ci_low - 0.1, spec_hash(spec),
                        seed, record_to_json(make_record(spec, cyc, r))));
  auto cst = constant_protocol(spec, 1);
  auto r0 = advantage_mc(cst, spec, trials, seed);
  out.push_back(verdict("distinguishing-constant", r0.ci_high <= 0.02, 0.02 - r0.ci_high,
                        spec_hash(spec), seed, record_to_json(make_record(spec, cst, r0))));
  return out;
}

Checks battery_sweeps(const VerifyConfig &cfg, std::uint64_t samples) {
  Checks out;
  const std::uint64_t seed = stream(cfg, 16);
  {
    Rng rng(derive_seed(seed, 0));
    Checks parts;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const int N = 2 + static_cast<int>(rng.below(2));
      const int dim = 2 + static_cast<int>(rng.below(N == 2 ? 6 : 4));
      const int d = 1 + static_cast<int>(rng.below(std::min(dim, 3)));
      const double q = 2.0 + 4.0 * rng.uniform01();
      auto c = DenseFunction::zeros(N, dim);
      for (std::uint64_t i = 0; i < c.size(); ++i)
        if (hamming(i, N, dim) <= d) c.v[i] = cplx(rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1);
      auto f = idft(c);
      for (auto &v : f.v) v = cplx(v.real(), 0);
      auto r = check_hypercontractivity(f, q, d);
      LemmaCheck lc = verdict("hypercontractivity", r.ok, r.slack, "", 0);
      if (r.skipped) lc.status = "skipped";
      parts.push_back(lc);
    }
    out.push_back(fold("hypercontractivity", hj({{"samples", samples}}), derive_seed(seed, 0),
                       parts, true));
  }
  {
    Rng rng(derive_seed(seed, 1));
    Checks parts;
    std::uint64_t checked = 0, draws = 0;
    while (checked < samples) {
      if (++draws > 20 * samples) break;
      const int N = 2 + static_cast<int>(rng.below(2));
      const int dim = N == 2 ? 6 : 5;
      const double p = 0.02 + 0.2 * rng.uniform01();
      DenseFunction f = DenseFunction::zeros(N, dim);
      double cnt = 0;
      for (auto &z : f.v) {
        z = rng.uniform01() < p ? 1.0 : 0.0;
        cnt += z.real();
      }
      if (cnt == 0) f.v[0] = 1, cnt = 1;
      for (auto &z : f.v) z *= static_cast<double>(f.size()) / cnt;
      const int d = 1 + static_cast<int>(rng.below(4));
      auto r = check_level_d(f, d);
      if (r.skipped) continue;
      ++checked;
      parts.push_back(verdict("level-d", r.ok, r.slack, "", 0));
    }
    auto c = fold("level-d", hj({{"samples", samples}}), derive_seed(seed, 1), parts, true);
    c.detail["draws"] = draws;
    if (checked < samples) c.status = "fail";
    out.push_back(c);
  }
  auto bc = sweep_basic_calculus(samples, derive_seed(seed, 2));
  out.push_back(verdict("basic-calculus", bc.violations == 0 && bc.samples >= samples,
                        bc.worst_slack, hj({{"samples", samples}}), derive_seed(seed, 2),
                        {{"samples", bc.samples}, {"violations", bc.violations}}));
  auto er = sweep_entropy_ratio(samples, derive_seed(seed, 3));
  out.push_back(verdict("entropy-ratio", er.violations == 0 && er.samples >= samples,
                        er.worst_slack, hj({{"samples", samples}}), derive_seed(seed, 3),
                        {{"samples", er.samples}, {"violations", er.violations}}));
  return out;
}

// ---- suites ----

const std::vector<std::string> &suite_names() {
  static const std::vector<std::string> names{"fourier", "kernels", "rectangles", "combinatorics",
                                              "all"};
  return names;
}

Checks run_suite(const std::string &suite, const VerifyConfig &cfg) {
  using Battery = std::function<Checks()>;
  std::map<std::string, std::vector<Battery>> plan;
  plan["fourier"] = {[&] { return battery_sweeps(cfg); }, [&] { return battery_spectrum(cfg); },
                     [&] { return battery_bounded(cfg); }};
  plan["kernels"] = {[&] { return battery_kernels(cfg); }, [&] { return battery_relating(cfg); },
                     [&] { return battery_separation(cfg); }, [&] { return battery_svd(cfg); }};
  plan["rectangles"] = {[&] { return battery_cyclicity(cfg); }, [&] { return battery_growth(cfg); }};
  plan["combinatorics"] = {[&] { return battery_no_singleton(cfg); },
                           [&] { return battery_heavy_sums(cfg); },
                           [&] { return battery_q_grid(cfg); },
                           [&] { return battery_transfer_grid(cfg); }};
  std::vector<Battery> run;
  if (suite == "all") {
    run = {[&] { return battery_lp_corpus(cfg); }, [&] { return battery_reduction(cfg); }};
    for (const char *s : {"kernels", "fourier", "combinatorics", "rectangles"})
      run.insert(run.end(), plan[s].begin(), plan[s].end());
    run.push_back([&] { return battery_distinguishing(cfg); });
  } else if (plan.count(suite)) {
    run = plan[suite];
  } else {
    throw DomainError("unknown suite '" + suite + "'");
  }
  Checks out;
  for (const auto &b : run) {
    auto part = b();
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

nlohmann::json manifest(const std::string &suite, const VerifyConfig &cfg, const Checks &checks) {
  json list = json::array();
  std::uint64_t pass = 0, fail = 0, skip = 0;
  for (const auto &c : checks) {
    auto v = c.verdict();
    v["detail"] = c.detail;
    list.push_back(v);
    c.failed() ? ++fail : c.skipped() ? ++skip : ++pass;
  }
  return {{"suite", suite},
          {"seed", cfg.seed},
          {"caps", caps_json(cfg.caps)},
          {"summary", {{"total", checks.size()}, {"pass", pass}, {"fail", fail}, {"skipped", skip}}},
          {"failing", failing_lemmas(checks)},
          {"checks", list}};
}

std::vector<std::string> failing_lemmas(const Checks &checks) {
  std::set<std::string> ids;
  for (const auto &c : checks)
    if (c.failed()) ids.insert(c.lemma_id);
  return {ids.begin(), ids.end()};
}

void install_kernel_tamper() {
  active_kernel_P() = [](int u, int m, const FiniteDistribution &mu, const std::vector<int> &xu,
                         const LabeledMatching &y) {
    Q p = kernel_P_mass(u, m, mu, xu, y);
    return !y.edges.empty() && y.edges[0].label[0] == 0 ? p * 2 : p;
  };
}

void reset_kernel() { active_kernel_P() = kernel_P_mass; }

}  // namespace dlab
