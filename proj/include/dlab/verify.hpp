#pragma once

#include "dlab/rectangle_lab.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace dlab {

using Checks = std::vector<LemmaCheck>;

struct VerifyConfig {
  std::uint64_t seed = 1;
  Caps caps = default_caps();
  std::string data_dir = DLAB_DATA_DIR;
};

// each battery returns one verdict per instantiation (or per aggregated family)
Checks battery_lp_corpus(const VerifyConfig &cfg);
Checks battery_reduction(const VerifyConfig &cfg);
Checks battery_kernels(const VerifyConfig &cfg);
Checks battery_relating(const VerifyConfig &cfg, int draws = 100);
Checks battery_separation(const VerifyConfig &cfg, int draws = 100);
Checks battery_svd(const VerifyConfig &cfg, int draws = 100);
Checks battery_spectrum(const VerifyConfig &cfg);
Checks battery_bounded(const VerifyConfig &cfg);
Checks battery_no_singleton(const VerifyConfig &cfg);
Checks battery_heavy_sums(const VerifyConfig &cfg);
Checks battery_q_grid(const VerifyConfig &cfg, int count = 200);
Checks battery_transfer_grid(const VerifyConfig &cfg, int count = 200);
Checks battery_cyclicity(const VerifyConfig &cfg);
Checks battery_growth(const VerifyConfig &cfg);
Checks battery_distinguishing(const VerifyConfig &cfg, std::uint64_t trials = 10000);
Checks battery_sweeps(const VerifyConfig &cfg, std::uint64_t samples = 10000);

const std::vector<std::string> &suite_names();
Checks run_suite(const std::string &suite, const VerifyConfig &cfg);

nlohmann::json manifest(const std::string &suite, const VerifyConfig &cfg, const Checks &checks);
// lemma ids of failed checks, sorted and unique
std::vector<std::string> failing_lemmas(const Checks &checks);

// scales the P kernel for the fault-injection fixture
void install_kernel_tamper();
void reset_kernel();

// MaxCut edge -> one-wise graph -> spec, as the game command builds it
GameSpec spec_from_instance(const Instance &I, int n, const Q &alpha, int K);

}  // namespace dlab
