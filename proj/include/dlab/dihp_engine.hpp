#pragma once

#include "dlab/blowup_graph.hpp"
#include "dlab/matching_space.hpp"

#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

namespace dlab {

// x restricted to the vertices of one edge: (x[j*usize + pos[j]])_j
Tuple restrict_edge(const std::vector<int> &xu, int usize, const Tuple &pos);
// mu(a - b) with coordinates mod N
const Q &mu_at_diff(const FiniteDistribution &mu, const Tuple &a, const Tuple &b);

// xu is a Z_N-vector on the universe, part-major with k*usize entries
Q kernel_P_mass(int usize, int m, const FiniteDistribution &mu, const std::vector<int> &xu,
                const LabeledMatching &y);
Q kernel_R_mass(int usize, const Matching &M, const FiniteDistribution &mu,
                const std::vector<int> &xu, const std::vector<Tuple> &xi);

// f indexed in enumerate_labeled order; output indexed by tuple_index(xu, N)
template <typename T>
std::vector<T> apply_P(int usize, int m, const FiniteDistribution &mu, const std::vector<T> &f,
                       const Caps &caps = default_caps());
// f indexed by the label digits of xi (edge t, coordinate j at digit t*k+j)
template <typename T>
std::vector<T> apply_R(int usize, const Matching &M, const FiniteDistribution &mu,
                       const std::vector<T> &f, const Caps &caps = default_caps());

// for an optional tamper hook in the verification suites
using KernelPFn = std::function<Q(int, int, const FiniteDistribution &, const std::vector<int> &,
                                  const LabeledMatching &)>;
KernelPFn &active_kernel_P();

struct GameSpec {
  DistLabeledGraph G;
  int n = 1;
  Q alpha = 1;
  int K = 1;
  BlowupFrame frame;

  int m() const;  // alpha * n
  int players() const { return G.ne() * K; }
  int edge_of(int player) const { return player / K; }
  void validate() const;
};

GameSpec make_spec(const DistLabeledGraph &G, int n, const Q &alpha, int K);
std::string spec_hash(const GameSpec &spec);

using JointInput = std::vector<LabeledMatching>;  // indexed by player id e*K + j

struct YesSample {
  std::vector<int> x;  // ground vector, index v*n + i
  JointInput input;
};
YesSample sample_yes(const GameSpec &spec, Rng &rng);
JointInput sample_no(const GameSpec &spec, Rng &rng);

struct ExactLaw {
  std::vector<std::vector<LabeledMatching>> omega;  // per player
  std::vector<Q> yes, no;  // mixed radix over players, player 0 least significant
  JointInput input(std::uint64_t idx) const;
  std::uint64_t size() const { return yes.size(); }
};
ExactLaw exact_masses(const GameSpec &spec, const Caps &caps = default_caps());
Q yes_mass(const GameSpec &spec, const JointInput &Y);
Q total_variation(const ExactLaw &law);

using Message = std::vector<bool>;

struct Transcript {
  std::vector<int> speakers;
  std::vector<Message> messages;
  std::vector<std::string> notes;
  std::size_t bits() const;
};

struct Protocol {
  std::string name;
  std::vector<int> schedule;   // player per round
  std::vector<int> round_bits; // declared budget per round
  std::function<Message(const Transcript &, int player, const LabeledMatching &)> message;
  std::function<int(const Transcript &, std::vector<std::string> &notes)> output;
  std::size_t cost() const;
};

struct RunResult {
  int bit = 0;
  Transcript transcript;
};
RunResult run_protocol(const Protocol &P, const JointInput &input);

Protocol constant_protocol(const GameSpec &spec, int bit);
Protocol echo_protocol(const GameSpec &spec);
Protocol cycle_consistency_protocol(const GameSpec &spec, std::uint64_t node_cap = 1u << 20);
Protocol likelihood_ratio_protocol(const GameSpec &spec);

struct AdvantageResult {
  std::string mode;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Q exact;  // exact mode only
  double estimate = 0, ci_low = 0, ci_high = 0;
  double p_yes = 0, p_no = 0;
};
AdvantageResult advantage_exact(const Protocol &P, const GameSpec &spec,
                                const Caps &caps = default_caps());
AdvantageResult advantage_mc(const Protocol &P, const GameSpec &spec, std::uint64_t trials,
                             std::uint64_t seed);
AdvantageResult advantage_mc_serial(const Protocol &P, const GameSpec &spec, std::uint64_t trials,
                                    std::uint64_t seed);

struct ExperimentRecord {
  std::string spec_hash, protocol_name, mode;
  std::uint64_t trials = 0, seed = 0;
  double estimate = 0, ci_low = 0, ci_high = 0;
  std::string exact;  // "p/q" in exact mode, empty otherwise
};
ExperimentRecord make_record(const GameSpec &spec, const Protocol &P, const AdvantageResult &r);
nlohmann::json record_to_json(const ExperimentRecord &r);
std::string record_csv_header();
std::string record_csv_row(const ExperimentRecord &r);

// fixed-width integer packing for messages
void put_bits(Message &msg, std::uint64_t value, int width);
std::uint64_t get_bits(const Message &msg, std::size_t &offset, int width);
int bit_width(std::uint64_t count);  // bits to encode values in [0, count)

}  // namespace dlab
