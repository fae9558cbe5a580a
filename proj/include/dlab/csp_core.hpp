#pragma once

#include "dlab/common.hpp"

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dlab {

struct Predicate {
  std::string name;
  int k = 0;
  int q = 0;  // alphabet size
  std::vector<std::uint8_t> table;  // indexed by tuple_index(b, q)

  bool operator()(const Tuple &b) const { return table[tuple_index(b, q)] != 0; }
  std::size_t size() const { return table.size(); }
  void validate() const;
};

struct Constraint {
  std::vector<int> vars;  // indices into Instance::variables
  int pred = 0;
};

struct Instance {
  int q = 0;
  int k = 0;
  std::vector<Predicate> predicates;
  std::vector<std::string> variables;
  std::vector<Constraint> constraints;

  int nv() const { return static_cast<int>(variables.size()); }
  int m() const { return static_cast<int>(constraints.size()); }
  const Predicate &pred_of(int i) const { return predicates[constraints[i].pred]; }
  void validate() const;
};

// distribution over Z_q^k stored densely
struct FiniteDistribution {
  int q = 0;
  int k = 0;
  std::vector<Q> mass;

  FiniteDistribution() = default;
  FiniteDistribution(int q_, int k_) : q(q_), k(k_), mass(ipow(q_, k_), Q(0)) {}

  const Q &operator()(const Tuple &t) const { return mass[tuple_index(t, q)]; }
  Q &at(const Tuple &t) { return mass[tuple_index(t, q)]; }
  std::vector<std::uint64_t> support() const;
  void validate() const;

  static FiniteDistribution uniform_on(int q, int k, const std::vector<Tuple> &pts);
  static FiniteDistribution uniform(int q, int k);
};

Predicate make_predicate(const std::string &name, int q, int k,
                         const std::vector<Tuple> &satisfying);
Predicate cut_predicate(int q = 2);
Predicate and_predicate();
Predicate e3lin_predicate(int b);

Q eval_assignment(const Instance &I, const std::vector<int> &tau);
Q eval_assignment(const Instance &I, const std::map<std::string, int> &tau);
Q max_value(const Instance &I, const Caps &caps = default_caps());

bool check_onewise(const FiniteDistribution &mu);
bool check_twowise(const FiniteDistribution &mu);
// the marginal of mu on the given coordinates, as a flat table
std::vector<Q> marginal(const FiniteDistribution &mu, const std::vector<int> &coords);

std::optional<FiniteDistribution> find_independent_support(const Predicate &f, int order);

Instance instance_from_json(const nlohmann::json &j);
nlohmann::json instance_to_json(const Instance &I);
Instance load_instance(const std::string &path);
std::string instance_hash(const Instance &I);

}  // namespace dlab
