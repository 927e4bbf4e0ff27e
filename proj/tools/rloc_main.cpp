#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rloc/config.hpp"
#include "rloc/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitAssertFailure = 3;
constexpr const char* kVersion = "rloc 0.1.0";

struct CommonArgs {
  std::string config_file;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  bool no_rte = false;
  bool no_radar = false;
  bool paced = false;
  bool check = false;
};

rloc::RunConfig resolve_config(const CommonArgs& args) {
  rloc::RunConfig config =
      args.config_file.empty() ? rloc::default_config() : rloc::load_config_file(args.config_file);
  if (args.seed) config.seed = *args.seed;
  if (args.out) config.output_dir = *args.out;
  return config;
}

int finish(const rloc::RunConfig& config, const rloc::RunSummary& summary, bool check) {
  std::cout << "artifacts: " << summary.artifact_dir.string() << "\n";
  std::cout << "rte solves: " << summary.timing.rte_count << " (mean "
            << summary.timing.rte_mean_s << " s), pose-graph solves: "
            << summary.timing.graph_count << " (mean " << summary.timing.graph_mean_s
            << " s)\n";
  if (!check) return kExitOk;
  const auto failures = rloc::check_assertions(config, summary);
  for (const auto& f : failures) std::cerr << "assertion failed: " << f << "\n";
  return failures.empty() ? kExitOk : kExitAssertFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot UGV-UAV radio localization simulation harness"};
  app.require_subcommand(1);

  CommonArgs args;

  auto add_common = [&args](CLI::App* cmd, bool with_paced) {
    cmd->add_option("--seed", args.seed, "Override the config seed");
    cmd->add_option("--out", args.out, "Override the artifact directory");
    cmd->add_flag("--no-rte", args.no_rte, "Disable relative transform estimation");
    cmd->add_flag("--no-radar", args.no_radar, "Disable radar odometry factors");
    cmd->add_flag("--assert", args.check, "Evaluate config assertions, exit 3 on failure");
    if (with_paced) {
      cmd->add_flag("--paced", args.paced, "Pace processing to measurement timestamps");
    }
  };

  CLI::App* run_sim = app.add_subcommand("run-sim", "Simulate a mission end to end");
  run_sim->add_option("config", args.config_file, "Run configuration (JSON)");
  add_common(run_sim, false);

  std::string measurements_dir;
  CLI::App* replay = app.add_subcommand("replay", "Re-run estimation from recorded CSVs");
  replay->add_option("measurements", measurements_dir, "Artifact directory of a previous run")
      ->required();
  replay->add_option("config", args.config_file, "Run configuration (JSON)");
  add_common(replay, true);

  CLI::App* print_config = app.add_subcommand("print-config", "Print the resolved configuration");
  print_config->add_option("config", args.config_file, "Run configuration (JSON)");

  CLI::App* version = app.add_subcommand("version", "Print the version");

  CLI11_PARSE(app, argc, argv);

  try {
    if (version->parsed()) {
      std::cout << kVersion << "\n";
      return kExitOk;
    }
    if (print_config->parsed()) {
      std::cout << rloc::config_to_json(resolve_config(args));
      return kExitOk;
    }

    rloc::RunConfig config;
    try {
      config = resolve_config(args);
    } catch (const rloc::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfigError;
    }

    rloc::PipelineOptions options;
    options.no_rte = args.no_rte;
    options.no_radar = args.no_radar;
    options.paced = args.paced;

    if (run_sim->parsed()) {
      const rloc::RunSummary summary = rloc::run_simulation(config, options);
      return finish(config, summary, args.check);
    }
    if (replay->parsed()) {
      const rloc::RunSummary summary = rloc::run_replay(measurements_dir, config, options);
      return finish(config, summary, args.check);
    }
  } catch (const rloc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}
