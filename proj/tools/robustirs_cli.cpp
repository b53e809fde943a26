// robustirs command-line harness: parameter sweeps and single AO runs.
#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "robustirs/alternating.hpp"
#include "robustirs/evaluation.hpp"
#include "robustirs/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("robustirs");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ROBUSTIRS_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("ignoring ROBUSTIRS_LOG={}", env);
  }
}

robustirs::IrsMode parse_mode(const std::string& s) {
  if (s == "active") return robustirs::IrsMode::Active;
  if (s == "passive") return robustirs::IrsMode::Passive;
  throw robustirs::ConfigError(0, "mode", "expected active or passive, got '" + s + "'");
}

struct SweepArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool serial = false;
};

int run_sweep_command(const SweepArgs& args) {
  robustirs::SweepConfig config;
  try {
    config = robustirs::load_sweep_config(args.config);
    if (args.seed) config.seed = *args.seed;
    if (args.trials) config.trials = *args.trials;
    config.validate();
  } catch (const robustirs::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const robustirs::InvalidArgument& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  }
  if (args.format != "csv" && args.format != "json") {
    spdlog::error("unknown format '{}'", args.format);
    return kExitConfig;
  }

  spdlog::info("sweep {} over {} values, {} modes, {} trials, seed {}",
               robustirs::axis_name(config.axis), config.values.size(), config.modes.size(),
               config.trials, config.seed);
  const robustirs::SweepResult result = robustirs::run_sweep(config, !args.serial);
  for (const auto& row : result.rows)
    spdlog::info("{}={} {}: {:.3f} dBm (std {:.3f}), infeasible {}, iters {:.2f}, rsec {:.3f}",
                 robustirs::axis_name(result.axis), row.axis_value, robustirs::mode_name(row.mode),
                 row.mean_power_dbm, row.std_power_dbm, row.infeasible, row.mean_iters,
                 row.mean_rsec);

  try {
    robustirs::emit(result, args.format, args.out);
  } catch (const std::exception& e) {
    spdlog::error("write {}: {}", args.out, e.what());
    return kExitError;
  }

  const int failures = result.solver_failures();
  const int total = result.total_trials();
  if (total > 0 && failures > config.failure_budget * total) {
    spdlog::error("{} of {} trials hit solver failures (budget {})", failures, total,
                  config.failure_budget);
    return kExitBudget;
  }
  if (failures > 0) spdlog::warn("{} of {} trials hit solver failures", failures, total);
  return kExitOk;
}

struct RunArgs {
  std::string config;
  std::string out;
  std::string mode = "active";
  std::uint64_t seed = 1;
  int trial = 0;
};

int run_single_command(const RunArgs& args) {
  robustirs::SweepConfig config;
  robustirs::IrsMode mode{};
  try {
    if (!args.config.empty()) config = robustirs::load_sweep_config(args.config);
    mode = parse_mode(args.mode);
  } catch (const robustirs::InvalidArgument& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  }
  const robustirs::Scenario& sc = config.base;
  const std::uint64_t ts = robustirs::trial_seed(args.seed, args.trial);
  const auto ch = robustirs::synthesize_channels(sc.geometry, sc.channel_params(), ts);
  const auto bounds = robustirs::JitterBounds::from_ratios(ch.angles, sc.aod_ratio_alice,
                                                           sc.aod_ratio_eve, sc.aod_ratio_irs);
  const auto radii = robustirs::uncertainty_radii(ch, bounds);
  auto cfg = sc.robust_config(mode);
  cfg.init_seed = ts;

  nlohmann::json out;
  try {
    const robustirs::AOTrace trace = robustirs::alternate_optimize(ch, radii, cfg);
    out = nlohmann::json::parse(robustirs::to_json(trace));
    const auto report = robustirs::worst_case_secrecy_rate(trace.state, ch, bounds, cfg, sc.grid_n);
    out["worst_case_secrecy_rate"] = report.secrecy_rate;
    spdlog::info("{} after {} iterations: {:.4f} dBm", robustirs::stop_reason_name(trace.stop),
                 trace.num_iterations(), robustirs::watt_to_dbm(trace.final_power()));
  } catch (const robustirs::InitializationFailed& e) {
    spdlog::warn("infeasible: {}", e.what());
    out = {{"infeasible", true}, {"reason", e.what()}};
  }

  if (args.out.empty() || args.out == "-") {
    std::cout << out.dump(2) << '\n';
  } else {
    std::ofstream f(args.out);
    if (!(f << out.dump(2) << '\n')) {
      spdlog::error("cannot write {}", args.out);
      return kExitError;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Robust secure beamforming for IRS-assisted UAV downlinks"};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo parameter sweep");
  sweep_cmd->add_option("--config", sweep.config, "key = value configuration file")->required();
  sweep_cmd->add_option("--out", sweep.out, "output file")->required();
  sweep_cmd->add_option("--format", sweep.format, "csv or json")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "overrides the config seed");
  sweep_cmd->add_option("--trials", sweep.trials, "overrides the config trial count");
  sweep_cmd->add_flag("--serial", sweep.serial, "run trials on one thread");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "single alternating-optimization run, JSON trace");
  run_cmd->add_option("--config", run.config, "configuration file (base scenario only)");
  run_cmd->add_option("--out", run.out, "output file, '-' for stdout");
  run_cmd->add_option("--mode", run.mode, "active or passive")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "channel seed")->capture_default_str();
  run_cmd->add_option("--trial", run.trial, "trial index")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep_cmd) return run_sweep_command(sweep);
    return run_single_command(run);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
}
