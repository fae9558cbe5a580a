#include "dlab/lp_relax.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace dlab {

int LPModel::add_var(const std::string &name, const Q &c) {
  names.push_back(name);
  objective.push_back(c);
  return num_vars() - 1;
}

void LPModel::add_row(std::vector<std::pair<int, Q>> row, const Q &b) {
  rows.push_back(std::move(row));
  rhs.push_back(b);
}

std::string LPModel::bytes() const {
  std::ostringstream os;
  for (std::size_t j = 0; j < names.size(); ++j) os << names[j] << ':' << q_str(objective[j]) << ';';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto &[c, a] : rows[i]) os << c << '*' << q_str(a) << ' ';
    os << "=" << q_str(rhs[i]) << '\n';
  }
  return os.str();
}

namespace {

struct Tableau {
  std::vector<std::vector<Q>> a;
  std::vector<Q> b;
  std::vector<int> basis;
  int cols = 0;
  int pivots = 0;

  void pivot(int r, int e) {
    ++pivots;
    Q inv = 1 / a[r][e];
    std::vector<int> nz;
    for (int j = 0; j < cols; ++j)
      if (a[r][j] != 0) {
        a[r][j] *= inv;
        nz.push_back(j);
      }
    b[r] *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (static_cast<int>(i) == r || a[i][e] == 0) continue;
      Q f = a[i][e];
      for (int j : nz) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    basis[r] = e;
  }

  // maximize c.x over columns < limit; returns false when unbounded
  bool optimize(const std::vector<Q> &c, int limit) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < limit && enter < 0; ++j) {
        Q d = c[j];
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i][j] != 0) d -= c[basis[i]] * a[i][j];
        if (d > 0) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      Q best;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i][enter] <= 0) continue;
        Q ratio = b[i] / a[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LPResult simplex_max(const LPModel &model) {
  const int n = model.num_vars();
  const int rcount = model.num_rows();
  Tableau t;
  t.cols = n + rcount;
  t.a.assign(rcount, std::vector<Q>(t.cols, Q(0)));
  t.b.assign(rcount, Q(0));
  t.basis.assign(rcount, 0);
  for (int i = 0; i < rcount; ++i) {
    Q sign = model.rhs[i] < 0 ? Q(-1) : Q(1);
    for (const auto &[c, v] : model.rows[i]) t.a[i][c] += sign * v;
    t.b[i] = sign * model.rhs[i];
    t.a[i][n + i] = 1;
    t.basis[i] = n + i;
  }
  std::vector<Q> phase1(t.cols, Q(0));
  for (int i = 0; i < rcount; ++i) phase1[n + i] = -1;
  t.optimize(phase1, t.cols);
  Q infeas = 0;
  for (int i = 0; i < rcount; ++i)
    if (t.basis[i] >= n) infeas += t.b[i];
  if (infeas != 0) throw StructuralError("LP infeasible");
  // drive artificial variables out of the basis, dropping redundant rows
  for (int i = 0; i < static_cast<int>(t.a.size());) {
    if (t.basis[i] < n) {
      ++i;
      continue;
    }
    int col = -1;
    for (int j = 0; j < n && col < 0; ++j)
      if (t.a[i][j] != 0) col = j;
    if (col >= 0) {
      t.pivot(i, col);
      ++i;
    } else {
      t.a.erase(t.a.begin() + i);
      t.b.erase(t.b.begin() + i);
      t.basis.erase(t.basis.begin() + i);
    }
  }
  std::vector<Q> c(t.cols, Q(0));
  for (int j = 0; j < n; ++j) c[j] = model.objective[j];
  if (!t.optimize(c, n)) throw StructuralError("LP unbounded");
  LPResult r;
  r.x.assign(n, Q(0));
  for (std::size_t i = 0; i < t.a.size(); ++i) r.x[t.basis[i]] = t.b[i];
  r.value = 0;
  for (int j = 0; j < n; ++j) r.value += model.objective[j] * r.x[j];
  r.basis = t.basis;
  r.pivots = t.pivots;
  return r;
}

LPModel build_basic_lp(const Instance &I, BasicLPLayout *layout) {
  I.validate();
  BasicLPLayout L{I.nv(), I.m(), I.q, I.k};
  LPModel lp;
  const std::uint64_t qk = ipow(I.q, I.k);
  for (int v = 0; v < I.nv(); ++v)
    for (int s = 0; s < I.q; ++s) lp.add_var("x[" + I.variables[v] + "," + std::to_string(s) + "]");
  for (int i = 0; i < I.m(); ++i)
    for (std::uint64_t b = 0; b < qk; ++b)
      lp.add_var("z[" + std::to_string(i) + "," + std::to_string(b) + "]",
                 frac(I.pred_of(i).table[b], I.m()));
  for (int v = 0; v < I.nv(); ++v) {
    std::vector<std::pair<int, Q>> row;
    for (int s = 0; s < I.q; ++s) row.push_back({L.x_index(v, s), Q(1)});
    lp.add_row(row, Q(1));
  }
  for (int i = 0; i < I.m(); ++i)
    for (int j = 0; j < I.k; ++j)
      for (int s = 0; s < I.q; ++s) {
        std::vector<std::pair<int, Q>> row;
        for (std::uint64_t b = 0; b < qk; ++b)
          if (index_tuple(b, I.q, I.k)[j] == s) row.push_back({L.z_index(i, b), Q(1)});
        row.push_back({L.x_index(I.constraints[i].vars[j], s), Q(-1)});
        lp.add_row(row, Q(0));
      }
  if (layout) *layout = L;
  return lp;
}

LPSolution solution_from_vector(const Instance &I, const LPResult &r) {
  BasicLPLayout L{I.nv(), I.m(), I.q, I.k};
  const std::uint64_t qk = ipow(I.q, I.k);
  LPSolution s;
  s.value = r.value;
  s.x.assign(I.nv(), std::vector<Q>(I.q));
  s.z.assign(I.m(), std::vector<Q>(qk));
  for (int v = 0; v < I.nv(); ++v)
    for (int a = 0; a < I.q; ++a) s.x[v][a] = r.x[L.x_index(v, a)];
  for (int i = 0; i < I.m(); ++i)
    for (std::uint64_t b = 0; b < qk; ++b) s.z[i][b] = r.x[L.z_index(i, b)];
  return s;
}

LPSolution solve_exact(const Instance &I) {
  LPModel lp = build_basic_lp(I);
  return solution_from_vector(I, simplex_max(lp));
}

Q lp_value(const Instance &I) {
  static std::mutex mu;
  static std::map<std::string, Q> cache;
  const std::string key = instance_hash(I);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Q v = solve_exact(I).value;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, v);
  return v;
}

Q basic_lp_objective(const Instance &I, const LPSolution &sol) {
  Q v = 0;
  for (int i = 0; i < I.m(); ++i)
    for (std::uint64_t b = 0; b < sol.z[i].size(); ++b)
      if (I.pred_of(i).table[b]) v += sol.z[i][b];
  return v / I.m();
}

std::string basic_lp_violation(const Instance &I, const LPSolution &sol) {
  const std::uint64_t qk = ipow(I.q, I.k);
  if (static_cast<int>(sol.x.size()) != I.nv() || static_cast<int>(sol.z.size()) != I.m())
    return "solution shape does not match instance";
  for (int v = 0; v < I.nv(); ++v) {
    if (static_cast<int>(sol.x[v].size()) != I.q) return "x row has wrong length";
    Q s = 0;
    for (const auto &p : sol.x[v]) {
      if (p < 0) return "negative x for " + I.variables[v];
      s += p;
    }
    if (s != 1) return "x for " + I.variables[v] + " does not sum to 1";
  }
  for (int i = 0; i < I.m(); ++i) {
    if (sol.z[i].size() != qk) return "z row has wrong length";
    for (const auto &p : sol.z[i])
      if (p < 0) return "negative z in constraint " + std::to_string(i);
    for (int j = 0; j < I.k; ++j)
      for (int s = 0; s < I.q; ++s) {
        Q acc = 0;
        for (std::uint64_t b = 0; b < qk; ++b)
          if (index_tuple(b, I.q, I.k)[j] == s) acc += sol.z[i][b];
        if (acc != sol.x[I.constraints[i].vars[j]][s])
          return "marginal mismatch at constraint " + std::to_string(i) + " position " + std::to_string(j);
      }
  }
  return "";
}

std::optional<LPSolution> canonical_value1_solution(const Instance &I, int order) {
  std::vector<FiniteDistribution> supp;
  for (const auto &p : I.predicates) {
    auto d = find_independent_support(p, order);
    if (!d) return std::nullopt;
    supp.push_back(*d);
  }
  LPSolution s;
  s.x.assign(I.nv(), std::vector<Q>(I.q, Q(1, I.q)));
  for (int i = 0; i < I.m(); ++i) s.z.push_back(supp[I.constraints[i].pred].mass);
  s.value = basic_lp_objective(I, s);
  return s;
}

nlohmann::json solution_to_json(const LPSolution &s) {
  nlohmann::json j;
  j["value"] = q_str(s.value);
  auto rows = [](const std::vector<std::vector<Q>> &m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &r : m) {
      std::vector<std::string> row;
      for (const auto &v : r) row.push_back(q_str(v));
      out.push_back(row);
    }
    return out;
  };
  j["x"] = rows(s.x);
  j["z"] = rows(s.z);
  return j;
}

LPSolution solution_from_json(const nlohmann::json &j) {
  LPSolution s;
  s.value = q_parse(j.at("value").get<std::string>());
  auto rows = [](const nlohmann::json &a) {
    std::vector<std::vector<Q>> out;
    for (const auto &r : a) {
      std::vector<Q> row;
      for (const auto &v : r) row.push_back(q_parse(v.get<std::string>()));
      out.push_back(row);
    }
    return out;
  };
  s.x = rows(j.at("x"));
  s.z = rows(j.at("z"));
  return s;
}

}  // namespace dlab
