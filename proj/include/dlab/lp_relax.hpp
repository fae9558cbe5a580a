#pragma once

#include "dlab/csp_core.hpp"

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

// maximize objective.x subject to rows (sparse) == rhs, x >= 0
struct LPModel {
  std::vector<std::string> names;
  std::vector<Q> objective;
  std::vector<std::vector<std::pair<int, Q>>> rows;
  std::vector<Q> rhs;

  int num_vars() const { return static_cast<int>(names.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  int add_var(const std::string &name, const Q &c = 0);
  void add_row(std::vector<std::pair<int, Q>> row, const Q &b);
  std::string bytes() const;
};

struct LPResult {
  Q value;
  std::vector<Q> x;
  std::vector<int> basis;
  int pivots = 0;
};

// exact two-phase simplex, Bland's rule; throws StructuralError when infeasible/unbounded
LPResult simplex_max(const LPModel &model);

struct BasicLPLayout {
  int nv = 0, m = 0, q = 0, k = 0;
  int x_index(int v, int s) const { return v * q + s; }
  int z_index(int i, std::uint64_t b) const {
    return nv * q + i * static_cast<int>(ipow(q, k)) + static_cast<int>(b);
  }
};

struct LPSolution {
  Q value;
  std::vector<std::vector<Q>> x;  // [v][sigma]
  std::vector<std::vector<Q>> z;  // [i][tuple_index(b)]
};

LPModel build_basic_lp(const Instance &I, BasicLPLayout *layout = nullptr);
LPSolution solve_exact(const Instance &I);
LPSolution solution_from_vector(const Instance &I, const LPResult &r);
Q lp_value(const Instance &I);
std::optional<LPSolution> canonical_value1_solution(const Instance &I, int order);

// exact feasibility of (x, z) for BasicLP_I; returns an empty string when feasible
std::string basic_lp_violation(const Instance &I, const LPSolution &sol);
Q basic_lp_objective(const Instance &I, const LPSolution &sol);

nlohmann::json solution_to_json(const LPSolution &s);
LPSolution solution_from_json(const nlohmann::json &j);

}  // namespace dlab
