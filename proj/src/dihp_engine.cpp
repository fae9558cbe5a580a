#include "dlab/dihp_engine.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

namespace dlab {

Tuple restrict_edge(const std::vector<int> &xu, int usize, const Tuple &pos) {
  Tuple t(pos.size());
  for (std::size_t j = 0; j < pos.size(); ++j) t[j] = xu[j * usize + pos[j]];
  return t;
}

const Q &mu_at_diff(const FiniteDistribution &mu, const Tuple &a, const Tuple &b) {
  std::uint64_t idx = 0, w = 1;
  for (int j = 0; j < mu.k; ++j) {
    int d = ((a[j] - b[j]) % mu.q + mu.q) % mu.q;
    idx += d * w;
    w *= mu.q;
  }
  return mu.mass[idx];
}

Q kernel_P_mass(int usize, int m, const FiniteDistribution &mu, const std::vector<int> &xu,
                const LabeledMatching &y) {
  if (static_cast<int>(xu.size()) != mu.k * usize) throw DomainError("x has wrong dimension");
  if (y.size() != m) throw DomainError("labeled matching has wrong size");
  Q p = 1;
  for (const auto &e : y.edges) {
    if (static_cast<int>(e.pos.size()) != mu.k) throw DomainError("edge has wrong arity");
    p *= mu_at_diff(mu, restrict_edge(xu, usize, e.pos), e.label);
    if (p == 0) return p;
  }
  return p / Q(count_matchings(usize, mu.k, m));
}

Q kernel_R_mass(int usize, const Matching &M, const FiniteDistribution &mu,
                const std::vector<int> &xu, const std::vector<Tuple> &xi) {
  if (xi.size() != M.size()) throw DomainError("xi must be defined on every edge of M");
  Q p = 1;
  for (std::size_t t = 0; t < M.size(); ++t)
    p *= mu_at_diff(mu, restrict_edge(xu, usize, M[t]), xi[t]);
  return p;
}

static inline Q to_t(const Q &q, Q *) { return q; }
static inline double to_t(const Q &q, double *) { return q_double(q); }

static void check_joint(std::uint64_t rows, std::uint64_t cols, const Caps &caps) {
  if (rows != 0 && cols > caps.joint_masses / rows)
    throw CapExceeded("joint_masses", std::to_string(rows) + " x " + std::to_string(cols));
}

template <typename T>
std::vector<T> apply_P(int usize, int m, const FiniteDistribution &mu, const std::vector<T> &f,
                       const Caps &caps) {
  const int k = mu.k, N = mu.q;
  auto omega = enumerate_labeled(usize, k, m, N, caps);
  if (f.size() != omega.size()) throw DomainError("f is not indexed by the labeled-matching space");
  const std::uint64_t X = ipow_sat(N, k * usize);
  check_joint(X, omega.size(), caps);
  std::vector<T> out(X, T(0));
  for (std::uint64_t xi = 0; xi < X; ++xi) {
    auto xu = index_tuple(xi, N, k * usize);
    T acc = 0;
    for (std::size_t y = 0; y < omega.size(); ++y) {
      Q p = kernel_P_mass(usize, m, mu, xu, omega[y]);
      if (p != 0) acc += to_t(p, static_cast<T *>(nullptr)) * f[y];
    }
    out[xi] = acc;
  }
  return out;
}

template <typename T>
std::vector<T> apply_R(int usize, const Matching &M, const FiniteDistribution &mu,
                       const std::vector<T> &f, const Caps &caps) {
  const int k = mu.k, N = mu.q, m = static_cast<int>(M.size());
  const std::uint64_t L = ipow_sat(N, k * m), X = ipow_sat(N, k * usize);
  if (f.size() != L) throw DomainError("f is not indexed by labelings of M");
  check_joint(X, L, caps);
  std::vector<T> out(X, T(0));
  for (std::uint64_t xi = 0; xi < X; ++xi) {
    auto xu = index_tuple(xi, N, k * usize);
    T acc = 0;
    for (std::uint64_t l = 0; l < L; ++l) {
      Tuple d = index_tuple(l, N, k * m);
      std::vector<Tuple> lab(m);
      for (int t = 0; t < m; ++t) lab[t] = Tuple(d.begin() + t * k, d.begin() + (t + 1) * k);
      Q p = kernel_R_mass(usize, M, mu, xu, lab);
      if (p != 0) acc += to_t(p, static_cast<T *>(nullptr)) * f[l];
    }
    out[xi] = acc;
  }
  return out;
}

template std::vector<Q> apply_P<Q>(int, int, const FiniteDistribution &, const std::vector<Q> &,
                                   const Caps &);
template std::vector<double> apply_P<double>(int, int, const FiniteDistribution &,
                                             const std::vector<double> &, const Caps &);
template std::vector<Q> apply_R<Q>(int, const Matching &, const FiniteDistribution &,
                                   const std::vector<Q> &, const Caps &);
template std::vector<double> apply_R<double>(int, const Matching &, const FiniteDistribution &,
                                             const std::vector<double> &, const Caps &);

KernelPFn &active_kernel_P() {
  static KernelPFn fn = kernel_P_mass;
  return fn;
}

int GameSpec::m() const {
  Q am = alpha * n;
  return static_cast<int>(am.get_num().get_si());
}

void GameSpec::validate() const {
  G.validate();
  if (n < 1) throw DomainError("n must be positive");
  if (K < 1) throw DomainError("K must be positive");
  if (alpha <= 0 || alpha > 1) throw DomainError("alpha must lie in (0, 1]");
  Q am = alpha * n;
  if (am.get_den() != 1) throw DomainError("alpha * n must be an integer");
  if (m() < 1 || m() > n) throw DomainError("alpha * n must lie in [1, n]");
}

GameSpec make_spec(const DistLabeledGraph &G, int n, const Q &alpha, int K) {
  GameSpec s;
  s.G = G;
  s.n = n;
  s.alpha = alpha;
  s.alpha.canonicalize();
  s.K = K;
  s.validate();
  s.frame = build_frame(G, n);
  return s;
}

std::string spec_hash(const GameSpec &spec) {
  nlohmann::json j;
  j["graph"] = graph_to_json(spec.G);
  j["n"] = spec.n;
  j["alpha"] = q_str(spec.alpha);
  j["K"] = spec.K;
  return content_hash(j.dump());
}

static Tuple draw_mu(const FiniteDistribution &mu, Rng &rng) {
  double u = rng.uniform01(), acc = 0;
  auto sup = mu.support();
  for (auto s : sup) {
    acc += q_double(mu.mass[s]);
    if (u < acc) return index_tuple(s, mu.q, mu.k);
  }
  return index_tuple(sup.back(), mu.q, mu.k);
}

YesSample sample_yes(const GameSpec &spec, Rng &rng) {
  const int N = spec.G.N, k = spec.G.k, m = spec.m();
  YesSample s;
  s.x.resize(spec.frame.ground_size());
  for (auto &v : s.x) v = static_cast<int>(rng.below(N));
  s.input.resize(spec.players());
  for (int p = 0; p < spec.players(); ++p) {
    const int e = spec.edge_of(p);
    auto xu = project(spec.frame, e, s.x);
    Matching M = sample_matching(spec.n, k, m, rng);
    for (auto &pos : M) {
      Tuple w = draw_mu(spec.G.mu[e], rng);
      Tuple lab = restrict_edge(xu, spec.n, pos);
      for (int j = 0; j < k; ++j) lab[j] = ((lab[j] - w[j]) % N + N) % N;
      s.input[p].edges.push_back({pos, lab});
    }
  }
  return s;
}

JointInput sample_no(const GameSpec &spec, Rng &rng) {
  JointInput in(spec.players());
  for (auto &y : in) y = sample_labeled(spec.n, spec.G.k, spec.m(), spec.G.N, rng);
  return in;
}

JointInput ExactLaw::input(std::uint64_t idx) const {
  JointInput in;
  for (const auto &om : omega) {
    in.push_back(om[idx % om.size()]);
    idx /= om.size();
  }
  return in;
}

static std::uint64_t ground_space(const GameSpec &spec, const Caps &caps) {
  std::uint64_t X = ipow_sat(spec.G.N, spec.frame.ground_size());
  if (X > caps.enumeration) throw CapExceeded("enumeration", "N^(|V|n) = " + std::to_string(X));
  return X;
}

ExactLaw exact_masses(const GameSpec &spec, const Caps &caps) {
  ExactLaw law;
  const int P = spec.players(), k = spec.G.k, N = spec.G.N, m = spec.m();
  std::uint64_t joint = 1;
  for (int p = 0; p < P; ++p) {
    law.omega.push_back(enumerate_labeled(spec.n, k, m, N, caps));
    joint = joint > caps.joint_masses / law.omega.back().size() ? caps.joint_masses + 1
                                                                 : joint * law.omega.back().size();
  }
  const std::uint64_t X = ground_space(spec, caps);
  if (joint > caps.joint_masses || X > caps.joint_masses / joint)
    throw CapExceeded("joint_masses", "joint inputs times hidden vectors");
  law.yes.assign(joint, Q(0));
  law.no.assign(joint, Q(1) / Q(Z(std::to_string(joint))));
  const Q wx = Q(1) / Q(Z(std::to_string(X)));
  std::vector<std::vector<Q>> rows(P);
  for (std::uint64_t xi = 0; xi < X; ++xi) {
    auto x = index_tuple(xi, N, spec.frame.ground_size());
    for (int p = 0; p < P; ++p) {
      auto xu = project(spec.frame, spec.edge_of(p), x);
      rows[p].resize(law.omega[p].size());
      for (std::size_t y = 0; y < law.omega[p].size(); ++y)
        rows[p][y] = kernel_P_mass(spec.n, m, spec.G.mu[spec.edge_of(p)], xu, law.omega[p][y]);
    }
    std::vector<std::size_t> digit(P, 0);
    for (std::uint64_t idx = 0; idx < joint; ++idx) {
      Q prod = wx;
      for (int p = 0; p < P && prod != 0; ++p) prod *= rows[p][digit[p]];
      if (prod != 0) law.yes[idx] += prod;
      for (int p = 0; p < P; ++p) {
        if (++digit[p] < law.omega[p].size()) break;
        digit[p] = 0;
      }
    }
  }
  return law;
}

Q yes_mass(const GameSpec &spec, const JointInput &Y) {
  const std::uint64_t X = ground_space(spec, default_caps());
  Q total = 0;
  for (std::uint64_t xi = 0; xi < X; ++xi) {
    auto x = index_tuple(xi, spec.G.N, spec.frame.ground_size());
    Q prod = 1;
    for (int p = 0; p < spec.players() && prod != 0; ++p) {
      const int e = spec.edge_of(p);
      prod *= kernel_P_mass(spec.n, spec.m(), spec.G.mu[e], project(spec.frame, e, x), Y[p]);
    }
    total += prod;
  }
  return total / Q(Z(std::to_string(X)));
}

Q total_variation(const ExactLaw &law) {
  Q tv = 0;
  for (std::uint64_t i = 0; i < law.size(); ++i) tv += abs(law.yes[i] - law.no[i]);
  return tv / 2;
}

std::size_t Transcript::bits() const {
  std::size_t b = 0;
  for (const auto &m : messages) b += m.size();
  return b;
}

std::size_t Protocol::cost() const {
  return std::accumulate(round_bits.begin(), round_bits.end(), std::size_t{0});
}

RunResult run_protocol(const Protocol &P, const JointInput &input) {
  if (P.schedule.size() != P.round_bits.size())
    throw ContractError("protocol " + P.name + ": schedule and budgets differ in length");
  RunResult r;
  for (std::size_t round = 0; round < P.schedule.size(); ++round) {
    const int who = P.schedule[round];
    if (who < 0 || who >= static_cast<int>(input.size()))
      throw ContractError("protocol " + P.name + ": schedule names an unknown player");
    Message msg = P.message(r.transcript, who, input[who]);
    if (static_cast<int>(msg.size()) > P.round_bits[round])
      throw ContractError("protocol " + P.name + ": round " + std::to_string(round) + " sent " +
                          std::to_string(msg.size()) + " bits, declared " +
                          std::to_string(P.round_bits[round]));
    r.transcript.speakers.push_back(who);
    r.transcript.messages.push_back(std::move(msg));
  }
  r.bit = P.output(r.transcript, r.transcript.notes) ? 1 : 0;
  return r;
}

void put_bits(Message &msg, std::uint64_t value, int width) {
  for (int b = 0; b < width; ++b) msg.push_back(value >> b & 1);
}

std::uint64_t get_bits(const Message &msg, std::size_t &offset, int width) {
  if (offset + width > msg.size()) throw ContractError("message too short to decode");
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(msg[offset + b]) << b;
  offset += width;
  return v;
}

int bit_width(std::uint64_t count) {
  int w = 0;
  while (count > 1 && (1ull << w) < count) ++w;
  return w;
}

Protocol constant_protocol(const GameSpec &, int bit) {
  Protocol P;
  P.name = "constant-" + std::to_string(bit);
  P.message = [](const Transcript &, int, const LabeledMatching &) { return Message{}; };
  P.output = [bit](const Transcript &, std::vector<std::string> &) { return bit; };
  return P;
}

Protocol echo_protocol(const GameSpec &) {
  Protocol P;
  P.name = "echo";
  P.schedule = {0};
  P.round_bits = {1};
  P.message = [](const Transcript &, int, const LabeledMatching &y) {
    return Message{y.edges.empty() ? false : (y.edges[0].label[0] & 1) != 0};
  };
  P.output = [](const Transcript &t, std::vector<std::string> &) {
    return t.messages[0].empty() ? 0 : static_cast<int>(t.messages[0][0]);
  };
  return P;
}

namespace {

struct Relation {
  std::vector<int> verts;  // ground indices
  Tuple label;
  int edge;  // graph edge, selects mu
};

// satisfiability of one component by backtracking over vertex assignments
struct ComponentSolver {
  const std::vector<Relation> &rels;
  const std::vector<FiniteDistribution> &mu;
  int N;
  std::uint64_t cap, nodes = 0;
  std::vector<int> order;                      // vertices in BFS order
  std::vector<std::vector<int>> closing;       // relations fully assigned at order[i]
  std::map<int, int> value;

  bool consistent(int r) {
    Tuple a(rels[r].verts.size());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = value[rels[r].verts[j]];
    return mu_at_diff(mu[rels[r].edge], a, rels[r].label) != 0;
  }
  // 1 sat, 0 unsat, -1 cap hit
  int solve(std::size_t i) {
    if (i == order.size()) return 1;
    for (int v = 0; v < N; ++v) {
      if (++nodes > cap) return -1;
      value[order[i]] = v;
      bool ok = true;
      for (int r : closing[i]) ok = ok && consistent(r);
      if (ok) {
        int s = solve(i + 1);
        if (s != 0) return s;
      }
    }
    return 0;
  }
};

}  // namespace

Protocol cycle_consistency_protocol(const GameSpec &spec, std::uint64_t node_cap) {
  auto sp = std::make_shared<GameSpec>(spec);
  const int k = spec.G.k, wpos = bit_width(spec.n), wlab = bit_width(spec.G.N), m = spec.m();
  Protocol P;
  P.name = "cycle-consistency";
  for (int p = 0; p < spec.players(); ++p) {
    P.schedule.push_back(p);
    P.round_bits.push_back(m * k * (wpos + wlab));
  }
  P.message = [=](const Transcript &, int, const LabeledMatching &y) {
    Message msg;
    for (const auto &e : y.edges) {
      for (int j = 0; j < k; ++j) put_bits(msg, e.pos[j], wpos);
      for (int j = 0; j < k; ++j) put_bits(msg, e.label[j], wlab);
    }
    return msg;
  };
  P.output = [=](const Transcript &t, std::vector<std::string> &notes) {
    const auto &frame = sp->frame;
    std::vector<Relation> rels;
    for (std::size_t r = 0; r < t.messages.size(); ++r) {
      const int e = sp->edge_of(t.speakers[r]);
      std::size_t off = 0;
      while (off < t.messages[r].size()) {
        Relation rel;
        rel.edge = e;
        for (int j = 0; j < k; ++j)
          rel.verts.push_back(frame.universes[e][j][get_bits(t.messages[r], off, wpos)]);
        for (int j = 0; j < k; ++j)
          rel.label.push_back(static_cast<int>(get_bits(t.messages[r], off, wlab)));
        rels.push_back(std::move(rel));
      }
    }
    // union-find over ground vertices
    std::vector<int> parent(frame.ground_size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto &rel : rels)
      for (int v : rel.verts) parent[find(v)] = find(rel.verts[0]);
    std::map<int, std::vector<int>> comp_rels;
    for (std::size_t r = 0; r < rels.size(); ++r) comp_rels[find(rels[r].verts[0])].push_back(r);

    int result = 1;
    for (const auto &[root, rs] : comp_rels) {
      ComponentSolver cs{rels, sp->G.mu, sp->G.N, node_cap, 0, {}, {}, {}};
      // BFS order through relations
      std::map<int, std::vector<int>> incident;
      for (int r : rs)
        for (int v : rels[r].verts) incident[v].push_back(r);
      std::map<int, int> pos;
      std::vector<int> queue{rels[rs[0]].verts[0]};
      pos[queue[0]] = 0;
      for (std::size_t h = 0; h < queue.size(); ++h)
        for (int r : incident[queue[h]])
          for (int v : rels[r].verts)
            if (!pos.count(v)) {
              pos[v] = static_cast<int>(queue.size());
              queue.push_back(v);
            }
      cs.order = queue;
      cs.closing.assign(queue.size(), {});
      for (int r : rs) {
        int last = 0;
        for (int v : rels[r].verts) last = std::max(last, pos[v]);
        cs.closing[last].push_back(r);
      }
      int s = cs.solve(0);
      if (s < 0) {
        notes.push_back("component at vertex " + std::to_string(root) + " skipped: " +
                        std::to_string(queue.size()) + " vertices exceed the search cap");
      } else if (s == 0) {
        result = 0;
      }
    }
    return result;
  };
  return P;
}

Protocol likelihood_ratio_protocol(const GameSpec &spec) {
  auto sp = std::make_shared<GameSpec>(spec);
  auto omega = std::make_shared<std::vector<LabeledMatching>>(
      enumerate_labeled(spec.n, spec.G.k, spec.m(), spec.G.N));
  auto index = std::make_shared<std::map<LabeledMatching, std::uint64_t>>();
  for (std::size_t i = 0; i < omega->size(); ++i) (*index)[(*omega)[i]] = i;
  const int w = bit_width(omega->size());
  Q no = 1;
  for (int p = 0; p < spec.players(); ++p) no /= Q(Z(static_cast<unsigned long>(omega->size())));

  Protocol P;
  P.name = "likelihood-ratio";
  for (int p = 0; p < spec.players(); ++p) {
    P.schedule.push_back(p);
    P.round_bits.push_back(w);
  }
  P.message = [=](const Transcript &, int, const LabeledMatching &y) {
    Message msg;
    auto it = index->find(y);
    if (it == index->end()) throw ContractError("input outside the player's space");
    put_bits(msg, it->second, w);
    return msg;
  };
  P.output = [=](const Transcript &t, std::vector<std::string> &) {
    JointInput Y(sp->players());
    for (std::size_t r = 0; r < t.messages.size(); ++r) {
      std::size_t off = 0;
      Y[t.speakers[r]] = (*omega)[get_bits(t.messages[r], off, w)];
    }
    return yes_mass(*sp, Y) > no ? 1 : 0;
  };
  return P;
}

AdvantageResult advantage_exact(const Protocol &P, const GameSpec &spec, const Caps &caps) {
  ExactLaw law = exact_masses(spec, caps);
  Q py = 0, pn = 0;
  for (std::uint64_t i = 0; i < law.size(); ++i) {
    if (run_protocol(P, law.input(i)).bit) {
      py += law.yes[i];
      pn += law.no[i];
    }
  }
  AdvantageResult r;
  r.mode = "exact";
  r.exact = abs(py - pn);
  r.estimate = r.ci_low = r.ci_high = q_double(r.exact);
  r.p_yes = q_double(py);
  r.p_no = q_double(pn);
  return r;
}

static AdvantageResult finish_mc(std::uint64_t hy, std::uint64_t hn, std::uint64_t trials,
                                 std::uint64_t seed) {
  AdvantageResult r;
  r.mode = "mc";
  r.trials = trials;
  r.seed = seed;
  Interval y = wilson(hy, trials), n = wilson(hn, trials);
  r.p_yes = y.estimate;
  r.p_no = n.estimate;
  double d = y.estimate - n.estimate, lo = y.lo - n.hi, hi = y.hi - n.lo;
  r.estimate = std::abs(d);
  if (lo > 0) {
    r.ci_low = lo;
    r.ci_high = hi;
  } else if (hi < 0) {
    r.ci_low = -hi;
    r.ci_high = -lo;
  } else {
    r.ci_low = 0;
    r.ci_high = std::max(-lo, hi);
  }
  return r;
}

static void mc_trial(const Protocol &P, const GameSpec &spec, std::uint64_t seed, std::uint64_t t,
                     std::uint64_t &hy, std::uint64_t &hn) {
  Rng ry(derive_seed(seed, 2 * t)), rn(derive_seed(seed, 2 * t + 1));
  hy += run_protocol(P, sample_yes(spec, ry).input).bit;
  hn += run_protocol(P, sample_no(spec, rn)).bit;
}

AdvantageResult advantage_mc(const Protocol &P, const GameSpec &spec, std::uint64_t trials,
                             std::uint64_t seed) {
  std::uint64_t hy = 0, hn = 0;
  const long long T = static_cast<long long>(trials);
#pragma omp parallel for reduction(+ : hy, hn) schedule(dynamic, 64)
  for (long long t = 0; t < T; ++t) mc_trial(P, spec, seed, t, hy, hn);
  return finish_mc(hy, hn, trials, seed);
}

AdvantageResult advantage_mc_serial(const Protocol &P, const GameSpec &spec, std::uint64_t trials,
                                    std::uint64_t seed) {
  std::uint64_t hy = 0, hn = 0;
  for (std::uint64_t t = 0; t < trials; ++t) mc_trial(P, spec, seed, t, hy, hn);
  return finish_mc(hy, hn, trials, seed);
}

ExperimentRecord make_record(const GameSpec &spec, const Protocol &P, const AdvantageResult &r) {
  ExperimentRecord rec;
  rec.spec_hash = spec_hash(spec);
  rec.protocol_name = P.name;
  rec.mode = r.mode;
  rec.trials = r.trials;
  rec.seed = r.seed;
  rec.estimate = r.estimate;
  rec.ci_low = r.ci_low;
  rec.ci_high = r.ci_high;
  if (r.mode == "exact") rec.exact = q_str(r.exact);
  return rec;
}

nlohmann::json record_to_json(const ExperimentRecord &r) {
  nlohmann::json j{{"spec_hash", r.spec_hash}, {"protocol_name", r.protocol_name},
                   {"mode", r.mode},           {"trials", r.trials},
                   {"estimate", r.estimate},   {"ci_low", r.ci_low},
                   {"ci_high", r.ci_high},     {"seed", r.seed}};
  if (!r.exact.empty()) j["exact"] = r.exact;
  return j;
}

std::string record_csv_header() {
  return "spec_hash,protocol_name,mode,trials,estimate,ci_low,ci_high,seed";
}

std::string record_csv_row(const ExperimentRecord &r) {
  std::ostringstream os;
  os.precision(10);
  os << r.spec_hash << ',' << r.protocol_name << ',' << r.mode << ',' << r.trials << ','
     << r.estimate << ',' << r.ci_low << ',' << r.ci_high << ',' << r.seed;
  return os.str();
}

}  // namespace dlab
