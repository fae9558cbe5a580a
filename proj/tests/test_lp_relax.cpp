#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dlab/lp_relax.hpp"
#include "test_util.hpp"

#include <optional>
#include <random>

using namespace dlab;

namespace {

// brute-force LP oracle: enumerate every basis, solve by Gaussian elimination
std::optional<Q> vertex_oracle(const LPModel &lp) {
  int n = lp.num_vars(), r = lp.num_rows();
  std::vector<std::vector<Q>> A(r, std::vector<Q>(n, Q(0)));
  for (int i = 0; i < r; ++i)
    for (auto &[c, v] : lp.rows[i]) A[i][c] += v;
  std::optional<Q> best;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) != r) continue;
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1) cols.push_back(j);
    std::vector<std::vector<Q>> M(r, std::vector<Q>(r + 1));
    for (int i = 0; i < r; ++i) {
      for (int c = 0; c < r; ++c) M[i][c] = A[i][cols[c]];
      M[i][r] = lp.rhs[i];
    }
    bool singular = false;
    for (int c = 0; c < r && !singular; ++c) {
      int p = -1;
      for (int i = c; i < r; ++i)
        if (M[i][c] != 0) { p = i; break; }
      if (p < 0) { singular = true; break; }
      std::swap(M[p], M[c]);
      for (int i = 0; i < r; ++i) {
        if (i == c || M[i][c] == 0) continue;
        Q f = M[i][c] / M[c][c];
        for (int j = c; j <= r; ++j) M[i][j] -= f * M[c][j];
      }
    }
    if (singular) continue;
    Q val = 0;
    bool ok = true;
    for (int c = 0; c < r; ++c) {
      Q xv = M[c][r] / M[c][c];
      if (xv < 0) ok = false;
      val += lp.objective[cols[c]] * xv;
    }
    if (ok && (!best || val > *best)) best = val;
  }
  return best;
}

}  // namespace

TEST_CASE("simplex matches a vertex-enumeration oracle on random bounded LPs") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-3, 4), rhs(0, 6);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LPModel lp;
    int n = 3 + trial % 3, r = 2;
    for (int j = 0; j < n; ++j) lp.add_var("x" + std::to_string(j), Q(coef(rng)));
    for (int i = 0; i < r; ++i) {
      std::vector<std::pair<int, Q>> row;
      for (int j = 0; j < n; ++j) row.push_back({j, Q(coef(rng))});
      lp.add_row(row, Q(rhs(rng) - 1));
    }
    // bounding row with a slack
    int s = lp.add_var("slack");
    std::vector<std::pair<int, Q>> box;
    for (int j = 0; j <= s; ++j) box.push_back({j, Q(1)});
    lp.add_row(box, Q(10));
    auto want = vertex_oracle(lp);
    if (!want) {
      CHECK_THROWS_AS(simplex_max(lp), StructuralError);
      ++infeasible;
      continue;
    }
    auto got = simplex_max(lp);
    CHECK(got.value == *want);
    for (int i = 0; i < lp.num_rows(); ++i) {
      Q lhs = 0;
      for (auto &[c, v] : lp.rows[i]) lhs += v * got.x[c];
      CHECK(lhs == lp.rhs[i]);
    }
    ++solved;
  }
  CHECK(solved > 50);
  CHECK(infeasible > 0);
}

TEST_CASE("simplex reports unbounded and handles redundant rows") {
  LPModel lp;
  lp.add_var("a", Q(1));
  lp.add_var("b", Q(0));
  lp.add_row({{0, Q(1)}, {1, Q(-1)}}, Q(0));
  CHECK_THROWS_AS(simplex_max(lp), StructuralError);
  LPModel red;
  red.add_var("a", Q(1));
  red.add_var("b", Q(2));
  red.add_row({{0, Q(1)}, {1, Q(1)}}, Q(1));
  red.add_row({{0, Q(2)}, {1, Q(2)}}, Q(2));
  CHECK(simplex_max(red).value == 2);
  LPModel zero;
  zero.add_var("a");
  zero.add_var("b");
  zero.add_row({{0, Q(1)}, {1, Q(1)}}, Q(1));
  CHECK(simplex_max(zero).value == 0);
}

TEST_CASE("BasicLP dimensions") {
  BasicLPLayout L;
  auto lp = build_basic_lp(tu::maxcut(2, {{0, 1}}), &L);
  CHECK(lp.num_vars() == 8);
  CHECK(lp.num_rows() == 2 + 4);
  auto tri = build_basic_lp(tu::triangle());
  CHECK(tri.num_vars() == 6 + 12);
  CHECK(tri.num_rows() == 3 + 3 * 2 * 2);
  for (const auto &row : tri.rows)
    if (row.size() != 2) CHECK(row.size() == 4 / 2 + 1);
}

TEST_CASE("lp_value examples") {
  CHECK(lp_value(tu::maxcut(2, {{0, 1}})) == 1);
  CHECK(lp_value(tu::triangle()) == 1);
  CHECK(lp_value(tu::e3lin_pair()) == 1);
  auto andone = tu::build(2, 2, {and_predicate()}, 2, {{{0, 1}, 0}});
  CHECK(lp_value(andone) == 1);
  auto sol = solve_exact(andone);
  CHECK(sol.z[0][tuple_index({1, 1}, 2)] == 1);
  // both-one and both-zero on the same pair cannot be satisfied together, even fractionally
  auto nor = make_predicate("nor", 2, 2, {{0, 0}});
  auto clash = tu::build(2, 2, {and_predicate(), nor}, 2, {{{0, 1}, 0}, {{0, 1}, 1}});
  CHECK(lp_value(clash) == Q(1, 2));
  CHECK(max_value(clash) == Q(1, 2));
}

TEST_CASE("solutions are feasible and deterministic") {
  auto I = tu::e3lin_pair();
  auto a = solve_exact(I);
  auto b = solve_exact(I);
  CHECK(basic_lp_violation(I, a).empty());
  CHECK(solution_to_json(a) == solution_to_json(b));
  CHECK(build_basic_lp(I).bytes() == build_basic_lp(I).bytes());
  CHECK(basic_lp_objective(I, a) == a.value);
  auto back = solution_from_json(nlohmann::json::parse(solution_to_json(a).dump()));
  CHECK(solution_to_json(back) == solution_to_json(a));
}

TEST_CASE("canonical value-one solutions") {
  auto tri = canonical_value1_solution(tu::triangle(), 1);
  REQUIRE(tri);
  CHECK(tri->value == 1);
  CHECK(basic_lp_violation(tu::triangle(), *tri).empty());
  CHECK(tri->x[0][0] == Q(1, 2));
  auto e = canonical_value1_solution(tu::e3lin_pair(), 2);
  REQUIRE(e);
  CHECK(e->value == 1);
  CHECK(basic_lp_violation(tu::e3lin_pair(), *e).empty());
  for (const auto &z : e->z) {
    FiniteDistribution d(2, 3);
    d.mass = z;
    CHECK(check_twowise(d));
  }
  CHECK_FALSE(canonical_value1_solution(tu::build(2, 2, {and_predicate()}, 2, {{{0, 1}, 0}}), 1));
}

TEST_CASE("relaxation dominates the integral value on small binary instances") {
  std::vector<Predicate> preds{cut_predicate(), and_predicate(),
                               make_predicate("or", 2, 2, {{0, 1}, {1, 0}, {1, 1}}),
                               make_predicate("eq", 2, 2, {{0, 0}, {1, 1}})};
  std::vector<std::pair<std::vector<int>, int>> choices;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b)
        for (int p = 0; p < 4; ++p) choices.push_back({{a, b}, p});
  int count = 0;
  auto check = [&](const std::vector<std::pair<std::vector<int>, int>> &cons) {
    auto I = tu::build(2, 2, preds, 4, cons);
    Q lp = lp_value(I), mv = max_value(I);
    REQUIRE(lp >= mv);
    REQUIRE(lp <= 1);
    ++count;
  };
  for (const auto &c1 : choices) check({c1});
  for (std::size_t i = 0; i < choices.size(); i += 3)
    for (std::size_t j = 0; j < choices.size(); j += 5) check({choices[i], choices[j]});
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
  for (int t = 0; t < 200; ++t) {
    int m = 3 + t % 2;
    std::vector<std::pair<std::vector<int>, int>> cons;
    for (int i = 0; i < m; ++i) cons.push_back(choices[pick(rng)]);
    check(cons);
  }
  CHECK(count > 400);
}
