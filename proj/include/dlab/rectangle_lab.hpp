#pragma once

#include "dlab/dihp_engine.hpp"
#include "dlab/fourier_lab.hpp"

#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

namespace dlab {

// one restriction per player, indexed by e*K + j
using RestrictionSequence = std::vector<LabeledMatching>;

RestrictionSequence empty_sequence(const GameSpec &spec);
void validate_sequence(const GameSpec &spec, const RestrictionSequence &zeta);

// ---- hypergraph H_zeta on ground vertices ----

using HyperEdge = Tuple;  // k ground vertices

Tuple ground_edge(const GameSpec &spec, int player, const Tuple &pos);
std::vector<HyperEdge> hyper_edges(const GameSpec &spec, const RestrictionSequence &zeta);

// vertex sets of the components with at least two vertices, each sorted
std::vector<std::vector<int>> components(const std::vector<HyperEdge> &edges);
long long hyper_weight(const std::vector<HyperEdge> &edges);
long long weight(const GameSpec &spec, const RestrictionSequence &zeta);

int cover_size(const std::vector<HyperEdge> &edges, const std::vector<int> &subset);
bool has_cycle_peeling(int k, const std::vector<HyperEdge> &edges);
bool has_cycle_exhaustive(int k, const std::vector<HyperEdge> &edges,
                          std::uint64_t cap = 1ull << 22);
// some ground edge is exposed by two players (or twice)
bool supports_overlap(const std::vector<HyperEdge> &edges);
bool is_cyclic(const GameSpec &spec, const RestrictionSequence &zeta);

// every l <= C edges cover >= l(k - 1.1) vertices; scans connected subsets only
bool locally_almost_acyclic(int k, const std::vector<HyperEdge> &edges, int C,
                            std::uint64_t cap = 1ull << 22);
bool locally_almost_acyclic_exhaustive(int k, const std::vector<HyperEdge> &edges, int C,
                                       std::uint64_t cap = 1ull << 22);
// C = number of edges, plus disjoint supports
bool is_almost_acyclic(const GameSpec &spec, const RestrictionSequence &zeta);

// ---- verdicts ----

struct LemmaCheck {
  std::string lemma_id;
  std::string status = "pass";  // pass | fail | skipped
  double residual_or_slack = 0;
  std::string instantiation_hash;
  std::uint64_t seed = 0;
  nlohmann::json detail = nlohmann::json::object();

  bool failed() const { return status == "fail"; }
  bool skipped() const { return status == "skipped"; }
  nlohmann::json verdict() const;
};

// ---- structured rectangles ----

struct StructuredRectangle {
  RestrictionSequence zeta;
  std::vector<std::vector<LabeledMatching>> A;  // per player, subsets of Omega_z
};

StructuredRectangle full_rectangle(const GameSpec &spec, const RestrictionSequence &zeta,
                                   const Caps &caps = default_caps());
// +inf when some A is empty
double potential(const GameSpec &spec, const StructuredRectangle &R);
// A_p ⊆ Omega_{z_p} and z_p-global for every player
bool is_structured(const GameSpec &spec, const StructuredRectangle &R,
                   const Caps &caps = default_caps());
bool is_good(const GameSpec &spec, const StructuredRectangle &R, double W1, double W2,
             const Caps &caps = default_caps());
bool is_fair(const GameSpec &spec, const StructuredRectangle &R, double W,
             const Caps &caps = default_caps());

// ---- structured densities ----

std::vector<int> covered_vertices(const GameSpec &spec, const RestrictionSequence &zeta);
std::vector<int> all_ground(const GameSpec &spec);
// g_zeta on Z_N^lambda; lambda must contain every covered vertex
DenseFunction structured_density(const GameSpec &spec, const RestrictionSequence &zeta,
                                 const std::vector<int> &lambda,
                                 const Caps &caps = default_caps());
DenseFunction structured_density(const GameSpec &spec, const RestrictionSequence &zeta,
                                 const Caps &caps = default_caps());

LemmaCheck verify_spectrum_vanishing(const GameSpec &spec, const RestrictionSequence &zeta,
                                     const Caps &caps = default_caps());

// l-subsets of the union of the parts meeting every part in 0 or >= 2 elements
Z count_no_singleton(const std::vector<int> &sizes, int l);
double no_singleton_bound(const std::vector<int> &sizes, int l);
LemmaCheck check_no_singleton(const std::vector<int> &sizes, int l);

enum class Independence { OneWise, TwoWise };
LemmaCheck verify_structured_bounded(const GameSpec &spec, const RestrictionSequence &zeta,
                                     double gamma, Independence kind,
                                     const Caps &caps = default_caps());

// ---- B(E) ----

struct BReport {
  std::uint64_t count = 0;  // |B(E)|
  int min_weight = -1;      // over B(E); -1 when empty
  int t = 0, r = 0;
  double bound = 0;  // max{2t, 4r/5}
  bool almost_acyclic = false;
  bool ok = true;
  std::vector<std::uint64_t> tally;  // over E' ⊆ E and B in B(E'), count by ||sum B||_H
};
BReport enumerate_B(int k, int N, const std::vector<HyperEdge> &edges, bool with_tally = false,
                    std::uint64_t cap = 1ull << 22);

// ---- identities ----

// R given as per-player subsets of the full Omega
LemmaCheck verify_relating_yes_no(const GameSpec &spec,
                                  const std::vector<std::vector<LabeledMatching>> &A,
                                  const Caps &caps = default_caps());
LemmaCheck verify_separation(const GameSpec &spec, int player, const LabeledMatching &z,
                             const std::vector<LabeledMatching> &A,
                             const Caps &caps = default_caps());

// a(t) in Z_N^k for each edge of M; X(M) forbids Hamming weight exactly 1
bool in_X(const std::vector<Tuple> &a);
std::vector<int> lift(int usize, int k, const Matching &M, const std::vector<Tuple> &a);
// r(t) = sum_z mu(z) conj chi_t(z)
cplx singular_factor(const FiniteDistribution &mu, const Tuple &t);
// f on (Z_N^k)^m, digit t*k + j
LemmaCheck verify_svd(int usize, const Matching &M, const FiniteDistribution &mu,
                      const std::vector<cplx> &f, const Caps &caps = default_caps());

// ---- transfer of Fourier mass ----

struct TransferInput {
  int usize = 4, k = 2, N = 2, m = 1;
  SpectralPoint z;
  double s_star = 1;
  std::vector<std::uint64_t> A;  // label tuples (digit t*k + j), same for every M
  int l = 0;
};
double transfer_value(const TransferInput &in, const Caps &caps = default_caps());
LemmaCheck check_transfer_Q(const TransferInput &in, const Caps &caps = default_caps());
nlohmann::json transfer_to_json(const TransferInput &in);

// ---- bounded growth ----

enum class Partitioner { SingleEdge, LabelBit };
std::string partitioner_name(Partitioner p);

struct GrowthRound {
  double mean_weight = 0, sd_weight = 0;
  double mean_potential = 0;
  double cyclic_freq = 0;
};

struct GrowthReport {
  int rounds = 0;
  std::uint64_t trials = 0, seed = 0;
  std::string partitioner;
  std::vector<GrowthRound> per_round;  // index 0 = start
  // exact one-step conditional checks at visited states
  std::uint64_t states = 0, states_in_hypothesis = 0;
  std::uint64_t weight_violations = 0, cyclic_violations = 0;
  double worst_weight_slack = std::numeric_limits<double>::infinity();
  double worst_cyclic_slack = std::numeric_limits<double>::infinity();
  // aggregate cyclicity envelope: freq(last) <= sum_r 6^{k+1} alpha E||zeta_r|| / n (+4 sigma)
  double cyclic_envelope = 0;
  bool envelope_ok = true;
  bool ok() const { return weight_violations == 0 && cyclic_violations == 0 && envelope_ok; }
  nlohmann::json to_json() const;
};

GrowthReport growth_experiment(const GameSpec &spec, int rounds, Partitioner part,
                               std::uint64_t trials, std::uint64_t seed);
GrowthReport growth_experiment_serial(const GameSpec &spec, int rounds, Partitioner part,
                                      std::uint64_t trials, std::uint64_t seed);

// ---- almost-acyclicity of random no-inputs ----

// locality from the sparse-hypergraph route with exponent p = 1/(k - 1.1)
double locality_delta(const GameSpec &spec);
struct AcyclicFrequency {
  int C = 0;
  std::uint64_t trials = 0, hits = 0;
  Interval freq;
};
AcyclicFrequency almost_acyclic_frequency(const GameSpec &spec, int C, std::uint64_t trials,
                                          std::uint64_t seed);

}  // namespace dlab
