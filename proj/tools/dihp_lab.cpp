#include "dlab/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace dlab;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kCap = 3, kVerify = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag) {
  if (flag) return *flag;
  if (const char *env = std::getenv("DIHP_LAB_SEED")) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception &) {
    }
    throw UsageError("DIHP_LAB_SEED is not an unsigned integer");
  }
  throw UsageError("a seed is required: pass --seed or set DIHP_LAB_SEED");
}

void write_file(const std::string &dir, const std::string &name, const std::string &body) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name);
  if (!f) throw UsageError("cannot write " + dir + "/" + name);
  f << body;
}

Instance read_instance(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open instance file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error &e) {
    throw UsageError(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const std::exception &e) {
    throw UsageError(path + ": " + e.what());
  }
}

Q parse_alpha(const std::string &s) {
  try {
    Q a = q_parse(s);
    if (a <= 0 || a > 1) throw UsageError("--alpha must lie in (0, 1]");
    return a;
  } catch (const UsageError &) {
    throw;
  } catch (const std::exception &) {
    throw UsageError("--alpha must be a rational p/q, got '" + s + "'");
  }
}

Protocol make_protocol(const std::string &name, const GameSpec &spec) {
  if (name == "constant0") return constant_protocol(spec, 0);
  if (name == "constant" || name == "constant1") return constant_protocol(spec, 1);
  if (name == "echo") return echo_protocol(spec);
  if (name == "cycle") return cycle_consistency_protocol(spec);
  if (name == "likelihood") return likelihood_ratio_protocol(spec);
  throw UsageError("unknown protocol '" + name + "'");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"distributional hidden-partition lab"};
  app.require_subcommand(1);

  std::string instance, out, protocol = "cycle", mode = "mc", alpha = "1/8", preset, suite = "all";
  int n = 8, K = 4;
  std::uint64_t trials = 10000, cap_enum = 0, cap_fourier = 0;
  std::optional<std::uint64_t> seed;
  bool csv_for_plot = false, tamper = false;

  auto add_caps = [&](CLI::App *c) {
    c->add_option("--cap-enum", cap_enum, "enumeration cap")->check(CLI::PositiveNumber);
    c->add_option("--cap-fourier", cap_fourier, "Fourier domain cap")->check(CLI::PositiveNumber);
  };

  auto *lp = app.add_subcommand("lp", "exact val and LP value of an instance");
  lp->add_option("--instance", instance, "instance JSON")->required();
  lp->add_option("--out", out, "output directory");
  add_caps(lp);

  auto *game = app.add_subcommand("game", "advantage of a protocol on a blown-up game");
  game->add_option("--instance", instance, "instance JSON");
  game->add_option("--preset", preset, "named parameter preset")->check(CLI::IsMember({"maxcut-tiny"}));
  game->add_option("--n", n, "blow-up size")->check(CLI::PositiveNumber);
  game->add_option("--alpha", alpha, "matching density p/q");
  game->add_option("--K", K, "players per edge")->check(CLI::PositiveNumber);
  game->add_option("--protocol", protocol, "constant0|constant1|echo|cycle|likelihood");
  game->add_option("--mode", mode, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
  game->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  game->add_option("--seed", seed, "master seed");
  game->add_option("--out", out, "output directory");
  game->add_flag("--csv-for-plot", csv_for_plot, "print the record as tidy CSV");
  add_caps(game);

  auto *verify = app.add_subcommand("verify", "run a lemma-verification suite");
  verify->add_option("--suite", suite, "fourier|kernels|rectangles|combinatorics|all")
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--out", out, "output directory");
  verify->add_flag("--tamper", tamper)->group("");
  add_caps(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Caps caps = default_caps();
    if (cap_enum) caps.enumeration = cap_enum;
    if (cap_fourier) caps.fourier = cap_fourier;
    default_caps() = caps;

    if (lp->parsed()) {
      auto I = read_instance(instance);
      Q val = max_value(I, caps), vlp = lp_value(I);
      json j{{"instance_hash", instance_hash(I)}, {"val", q_str(val)}, {"val_lp", q_str(vlp)},
             {"ratio", vlp == 0 ? "undefined" : q_str(val / vlp)}};
      std::cout << j.dump(2) << "\n";
      if (!out.empty()) write_file(out, "lp.json", j.dump(2) + "\n");
      return kOk;
    }

    if (game->parsed()) {
      if (!preset.empty()) {
        // N = 2, k = 2, |V| = 2; explicit flags still win
        if (game->count("--n") == 0) n = 8;
        if (game->count("--alpha") == 0) alpha = "1/8";
        if (game->count("--K") == 0) K = 4;
      } else if (instance.empty()) {
        throw UsageError("game needs --instance or --preset");
      }
      Q a = parse_alpha(alpha);
      Q am = a * n;
      if (am.get_den() != 1) throw UsageError("alpha * n must be an integer");
      GameSpec spec;
      if (!preset.empty()) {
        auto mu = FiniteDistribution::uniform_on(2, 2, {{0, 1}, {1, 0}});
        spec = make_spec(single_edge_graph(mu), n, a, K);
      } else {
        spec = spec_from_instance(read_instance(instance), n, a, K);
      }
      auto P = make_protocol(protocol, spec);
      AdvantageResult r;
      if (mode == "exact") {
        r = advantage_exact(P, spec, caps);
      } else {
        r = advantage_mc(P, spec, trials, resolve_seed(seed));
      }
      auto rec = make_record(spec, P, r);
      auto j = record_to_json(rec);
      if (csv_for_plot)
        std::cout << record_csv_header() << "\n" << record_csv_row(rec) << "\n";
      else
        std::cout << j.dump(2) << "\n";
      if (!out.empty()) {
        write_file(out, "record.json", j.dump(2) + "\n");
        write_file(out, "record.csv", record_csv_header() + "\n" + record_csv_row(rec) + "\n");
      }
      return kOk;
    }

    if (verify->parsed()) {
      VerifyConfig cfg;
      cfg.seed = resolve_seed(seed);
      cfg.caps = caps;
      if (tamper) install_kernel_tamper();
      auto checks = run_suite(suite, cfg);
      auto m = manifest(suite, cfg, checks);
      const std::string body = m.dump(2) + "\n";
      if (out.empty())
        std::cout << body;
      else
        write_file(out, "manifest_" + suite + ".json", body);
      auto failing = failing_lemmas(checks);
      std::cerr << "suite " << suite << ": " << m["summary"]["pass"] << " pass, "
                << m["summary"]["fail"] << " fail, " << m["summary"]["skipped"] << " skipped\n";
      if (!failing.empty()) {
        std::cerr << "verification failed:";
        for (const auto &id : failing) std::cerr << " " << id;
        std::cerr << "\n";
        return kVerify;
      }
      return kOk;
    }
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapExceeded &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
