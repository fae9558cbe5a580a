#include "dlab/csp_core.hpp"

#include "dlab/lp_relax.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dlab {

void Predicate::validate() const {
  if (k < 1) throw DomainError("predicate " + name + ": arity must be >= 1");
  if (q < 2) throw DomainError("predicate " + name + ": alphabet size must be >= 2");
  if (table.size() != ipow(q, k))
    throw DomainError("predicate " + name + ": truth table must have |Sigma|^k entries");
}

void Instance::validate() const {
  if (constraints.empty()) throw DomainError("instance has no constraints");
  if (predicates.empty()) throw DomainError("instance has no predicates");
  for (const auto &p : predicates) {
    p.validate();
    if (p.k != k || p.q != q) throw DomainError("predicate " + p.name + " has mismatched (k, |Sigma|)");
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto &c = constraints[i];
    if (static_cast<int>(c.vars.size()) != k)
      throw DomainError("constraint " + std::to_string(i) + " has wrong arity");
    if (c.pred < 0 || c.pred >= static_cast<int>(predicates.size()))
      throw DomainError("constraint " + std::to_string(i) + " references unknown predicate");
    std::set<int> seen;
    for (int v : c.vars) {
      if (v < 0 || v >= nv()) throw DomainError("constraint " + std::to_string(i) + " references unknown variable");
      if (!seen.insert(v).second)
        throw DomainError("constraint " + std::to_string(i) + " repeats a variable");
    }
  }
}

std::vector<std::uint64_t> FiniteDistribution::support() const {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 0; i < mass.size(); ++i)
    if (mass[i] != 0) s.push_back(i);
  return s;
}

void FiniteDistribution::validate() const {
  Q total = 0;
  for (const auto &p : mass) {
    if (p < 0) throw DomainError("negative mass");
    total += p;
  }
  if (total != 1) throw DomainError("masses sum to " + q_str(total) + ", not 1");
}

FiniteDistribution FiniteDistribution::uniform_on(int q, int k, const std::vector<Tuple> &pts) {
  FiniteDistribution d(q, k);
  Q w(1, static_cast<unsigned long>(pts.size()));
  for (const auto &t : pts) d.at(t) += w;
  return d;
}

FiniteDistribution FiniteDistribution::uniform(int q, int k) {
  FiniteDistribution d(q, k);
  Q w(1, static_cast<unsigned long>(d.mass.size()));
  for (auto &p : d.mass) p = w;
  return d;
}

Predicate make_predicate(const std::string &name, int q, int k, const std::vector<Tuple> &satisfying) {
  Predicate p{name, k, q, std::vector<std::uint8_t>(ipow(q, k), 0)};
  for (const auto &t : satisfying) p.table[tuple_index(t, q)] = 1;
  return p;
}

Predicate cut_predicate(int q) {
  std::vector<Tuple> sat;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      if (a != b) sat.push_back({a, b});
  return make_predicate("cut", q, 2, sat);
}

Predicate and_predicate() { return make_predicate("and", 2, 2, {{1, 1}}); }

Predicate e3lin_predicate(int b) {
  std::vector<Tuple> sat;
  for (int x = 0; x < 8; ++x) {
    Tuple t = index_tuple(x, 2, 3);
    if (((t[0] + t[1] + t[2]) & 1) == b) sat.push_back(t);
  }
  return make_predicate("e3lin" + std::to_string(b), 2, 3, sat);
}

Q eval_assignment(const Instance &I, const std::vector<int> &tau) {
  if (static_cast<int>(tau.size()) != I.nv()) throw DomainError("assignment has wrong length");
  for (int v = 0; v < I.nv(); ++v)
    if (tau[v] < 0 || tau[v] >= I.q) throw DomainError("variable " + I.variables[v] + " is unassigned");
  long sat = 0;
  Tuple b(I.k);
  for (const auto &c : I.constraints) {
    for (int j = 0; j < I.k; ++j) b[j] = tau[c.vars[j]];
    sat += I.predicates[c.pred](b);
  }
  return frac(sat, I.m());
}

Q eval_assignment(const Instance &I, const std::map<std::string, int> &tau) {
  std::vector<int> t(I.nv(), -1);
  for (int v = 0; v < I.nv(); ++v) {
    auto it = tau.find(I.variables[v]);
    if (it == tau.end()) throw DomainError("variable " + I.variables[v] + " is unassigned");
    t[v] = it->second;
  }
  return eval_assignment(I, t);
}

Q max_value(const Instance &I, const Caps &caps) {
  std::uint64_t total = ipow_sat(I.q, I.nv());
  if (total > caps.enumeration)
    throw CapExceeded("enumeration", "|Sigma|^|V| = " + std::to_string(I.q) + "^" + std::to_string(I.nv()));
  long best = 0;
  std::vector<int> tau(I.nv(), 0);
  Tuple b(I.k);
  for (std::uint64_t a = 0; a < total; ++a) {
    std::uint64_t r = a;
    for (int v = 0; v < I.nv(); ++v) {
      tau[v] = static_cast<int>(r % I.q);
      r /= I.q;
    }
    long sat = 0;
    for (const auto &c : I.constraints) {
      for (int j = 0; j < I.k; ++j) b[j] = tau[c.vars[j]];
      sat += I.predicates[c.pred](b);
    }
    best = std::max(best, sat);
  }
  return frac(best, I.m());
}

std::vector<Q> marginal(const FiniteDistribution &mu, const std::vector<int> &coords) {
  std::vector<Q> out(ipow(mu.q, static_cast<unsigned>(coords.size())), Q(0));
  Tuple sub(coords.size());
  for (std::uint64_t i = 0; i < mu.mass.size(); ++i) {
    if (mu.mass[i] == 0) continue;
    Tuple t = index_tuple(i, mu.q, mu.k);
    for (std::size_t c = 0; c < coords.size(); ++c) sub[c] = t[coords[c]];
    out[tuple_index(sub, mu.q)] += mu.mass[i];
  }
  return out;
}

namespace {
bool marginals_uniform(const FiniteDistribution &mu, int order) {
  // enumerate coordinate subsets of size `order` in lexicographic order
  std::vector<std::vector<int>> subsets;
  if (order == 1)
    for (int a = 0; a < mu.k; ++a) subsets.push_back({a});
  else
    for (int a = 0; a < mu.k; ++a)
      for (int b = a + 1; b < mu.k; ++b) subsets.push_back({a, b});
  Q target(1, static_cast<unsigned long>(ipow(mu.q, order)));
  for (const auto &s : subsets)
    for (const auto &p : marginal(mu, s))
      if (p != target) return false;
  return true;
}
}  // namespace

bool check_onewise(const FiniteDistribution &mu) { return marginals_uniform(mu, 1); }

bool check_twowise(const FiniteDistribution &mu) {
  if (mu.k < 2) return check_onewise(mu);
  return marginals_uniform(mu, 2);
}

std::optional<FiniteDistribution> find_independent_support(const Predicate &f, int order) {
  if (order != 1 && order != 2) throw DomainError("order must be 1 or 2");
  LPModel lp;
  std::vector<std::uint64_t> sat;
  for (std::uint64_t i = 0; i < f.table.size(); ++i)
    if (f.table[i]) {
      sat.push_back(i);
      lp.add_var("p" + std::to_string(i));
    }
  if (sat.empty()) return std::nullopt;
  std::vector<std::pair<int, Q>> all;
  for (int v = 0; v < lp.num_vars(); ++v) all.push_back({v, Q(1)});
  lp.add_row(all, Q(1));
  std::vector<std::vector<int>> subsets;
  if (order == 1 || f.k < 2)
    for (int a = 0; a < f.k; ++a) subsets.push_back({a});
  else
    for (int a = 0; a < f.k; ++a)
      for (int b = a + 1; b < f.k; ++b) subsets.push_back({a, b});
  for (const auto &s : subsets) {
    int w = static_cast<int>(s.size());
    Q target(1, static_cast<unsigned long>(ipow(f.q, w)));
    for (std::uint64_t pat = 0; pat < ipow(f.q, w); ++pat) {
      Tuple want = index_tuple(pat, f.q, w);
      std::vector<std::pair<int, Q>> row;
      for (std::size_t v = 0; v < sat.size(); ++v) {
        Tuple t = index_tuple(sat[v], f.q, f.k);
        bool hit = true;
        for (int c = 0; c < w; ++c) hit = hit && t[s[c]] == want[c];
        if (hit) row.push_back({static_cast<int>(v), Q(1)});
      }
      lp.add_row(row, target);
    }
  }
  try {
    LPResult r = simplex_max(lp);
    FiniteDistribution d(f.q, f.k);
    for (std::size_t v = 0; v < sat.size(); ++v) d.mass[sat[v]] = r.x[v];
    return d;
  } catch (const StructuralError &) {
    return std::nullopt;
  }
}

namespace {
const nlohmann::json &field(const nlohmann::json &j, const char *key, const std::string &ctx) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}
}  // namespace

Instance instance_from_json(const nlohmann::json &j) {
  Instance I;
  try {
    I.q = field(j, "alphabet_size", "instance").get<int>();
    I.k = field(j, "arity", "instance").get<int>();
    std::map<std::string, int> pred_ids, var_ids;
    const auto &preds = field(j, "predicates", "instance");
    for (std::size_t p = 0; p < preds.size(); ++p) {
      std::string ctx = "instance.predicates[" + std::to_string(p) + "]";
      Predicate pr;
      pr.name = field(preds[p], "name", ctx).get<std::string>();
      pr.k = I.k;
      pr.q = I.q;
      pr.table.assign(ipow(I.q, I.k), 2);
      const auto &tt = field(preds[p], "truth_table", ctx);
      for (std::size_t e = 0; e < tt.size(); ++e) {
        std::string ectx = ctx + ".truth_table[" + std::to_string(e) + "]";
        if (!tt[e].is_array() || tt[e].size() != 2) throw DomainError(ectx + ": expected [tuple, bit]");
        Tuple t = tt[e][0].get<Tuple>();
        int bit = tt[e][1].get<int>();
        if (static_cast<int>(t.size()) != I.k) throw DomainError(ectx + ": tuple has wrong arity");
        for (int v : t)
          if (v < 0 || v >= I.q) throw DomainError(ectx + ": symbol out of range");
        if (bit != 0 && bit != 1) throw DomainError(ectx + ": bit must be 0 or 1");
        auto &slot = pr.table[tuple_index(t, I.q)];
        if (slot != 2) throw DomainError(ectx + ": duplicate tuple");
        slot = static_cast<std::uint8_t>(bit);
      }
      for (auto s : pr.table)
        if (s == 2) throw DomainError(ctx + ": truth table must list all |Sigma|^k tuples");
      if (!pred_ids.emplace(pr.name, static_cast<int>(p)).second)
        throw DomainError(ctx + ": duplicate predicate name");
      I.predicates.push_back(std::move(pr));
    }
    const auto &vars = field(j, "variables", "instance");
    for (std::size_t v = 0; v < vars.size(); ++v) {
      std::string name = vars[v].get<std::string>();
      if (!var_ids.emplace(name, static_cast<int>(v)).second)
        throw DomainError("instance.variables[" + std::to_string(v) + "]: duplicate name");
      I.variables.push_back(name);
    }
    const auto &cons = field(j, "constraints", "instance");
    for (std::size_t c = 0; c < cons.size(); ++c) {
      std::string ctx = "instance.constraints[" + std::to_string(c) + "]";
      Constraint con;
      for (const auto &vn : field(cons[c], "vars", ctx)) {
        auto it = var_ids.find(vn.get<std::string>());
        if (it == var_ids.end()) throw DomainError(ctx + ": unknown variable " + vn.dump());
        con.vars.push_back(it->second);
      }
      auto pn = field(cons[c], "predicate", ctx).get<std::string>();
      auto it = pred_ids.find(pn);
      if (it == pred_ids.end()) throw DomainError(ctx + ": unknown predicate " + pn);
      con.pred = it->second;
      I.constraints.push_back(std::move(con));
    }
  } catch (const nlohmann::json::exception &e) {
    throw DomainError(std::string("instance: ") + e.what());
  }
  I.validate();
  return I;
}

nlohmann::json instance_to_json(const Instance &I) {
  nlohmann::json j;
  j["alphabet_size"] = I.q;
  j["arity"] = I.k;
  j["predicates"] = nlohmann::json::array();
  for (const auto &p : I.predicates) {
    nlohmann::json tt = nlohmann::json::array();
    for (std::uint64_t i = 0; i < p.table.size(); ++i)
      tt.push_back({index_tuple(i, p.q, p.k), static_cast<int>(p.table[i])});
    j["predicates"].push_back({{"name", p.name}, {"truth_table", tt}});
  }
  j["variables"] = I.variables;
  j["constraints"] = nlohmann::json::array();
  for (const auto &c : I.constraints) {
    std::vector<std::string> names;
    for (int v : c.vars) names.push_back(I.variables[v]);
    j["constraints"].push_back({{"vars", names}, {"predicate", I.predicates[c.pred].name}});
  }
  return j;
}

Instance load_instance(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open instance file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw DomainError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

std::string instance_hash(const Instance &I) { return content_hash(instance_to_json(I).dump()); }

}  // namespace dlab
