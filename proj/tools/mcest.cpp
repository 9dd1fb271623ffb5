// Command-line front end of the experiment harness.
//
//   mcest <cir|overlay|mse|min-s|estimate|observe> [--config FILE] [--seed N]
//         [--out DIR] [--trials N] [--threads N] [--fast|--paper]
//
// Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcest/harness.hpp"

namespace {

using namespace mcest;
using namespace mcest::harness;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<int> trials;
  unsigned threads = default_threads();
  bool fast = false, paper = false;
  std::string observations;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "experiment config or run manifest (JSON)");
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--trials", o.trials, "trials per study, or realizations for overlay");
  cmd->add_option("--threads", o.threads, "worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  auto* f = cmd->add_flag("--fast", o.fast, "small run sizes (default)");
  auto* p = cmd->add_flag("--paper", o.paper, "publication run sizes");
  f->excludes(p);
}

ExperimentConfig load(Kind kind, const Options& o) {
  json doc = json::object();
  if (!o.config.empty()) {
    try {
      doc = json::parse(read_file(o.config));
    } catch (const json::parse_error& e) {
      throw validation_error("config '" + o.config + "': " + e.what());
    }
  }
  ExperimentConfig c = parse_config(doc, kind, o.paper ? Profile::paper : Profile::fast);
  if (o.seed) c.seed = *o.seed;
  if (o.trials) {
    if (*o.trials < 1) throw validation_error("--trials must be >= 1");
    if (kind == Kind::signal_overlay) c.sim.realizations = *o.trials;
    else c.study.trials = *o.trials;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-receiver molecular channel: CIR, simulation and parameter estimation"};
  app.set_version_flag("--version", MCEST_VERSION);
  app.require_subcommand(1);
  Options o;
  const std::map<std::string, Kind> kinds{{"cir", Kind::cir_curve},     {"overlay", Kind::signal_overlay},
                                          {"mse", Kind::mse_vs_S},      {"min-s", Kind::min_S_vs_xi},
                                          {"estimate", Kind::estimate}, {"observe", Kind::observe}};
  const std::map<std::string, std::string> help{
      {"cir", "expected absorbed counts N_j(t), window counts and their plateau"},
      {"overlay", "analytic window counts vs particle-simulation ensemble"},
      {"mse", "normalized MSE of DE / per-receiver estimators and the CRLB vs S"},
      {"min-s", "smallest S for which DE beats the RX2 estimator, per noise level"},
      {"estimate", "estimate one parameter from an observation file"},
      {"observe", "generate an observation file (s_index, g1, g2)"}};
  for (const auto& [cmd, kind] : kinds) {
    auto* sub = app.add_subcommand(cmd, help.at(cmd));
    add_common(sub, o);
    if (kind == Kind::estimate) sub->add_option("--observations", o.observations, "observation CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig c = load(kinds.at(cmd), o);
    const RunManifest m = execute(cmd, c, o.out, o.threads, o.observations);
    for (const auto& f : m.outputs) std::cout << (std::filesystem::path(o.out) / f.path).string() << "\n";
    std::cout << manifest_path(o.out, c) << "\n";
    return m.exit_code;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
