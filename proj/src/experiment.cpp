#include "robustirs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "robustirs/evaluation.hpp"

namespace robustirs {

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), 0x7a11u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

TrialOutcome run_trial(const Scenario& scenario, IrsMode mode, std::uint64_t seed, int trial,
                       bool evaluate, bool solver_parallel) {
  const std::uint64_t ts = trial_seed(seed, trial);
  const ChannelSet ch = synthesize_channels(scenario.geometry, scenario.channel_params(), ts);
  const JitterBounds bounds = JitterBounds::from_ratios(ch.angles, scenario.aod_ratio_alice,
                                                        scenario.aod_ratio_eve, scenario.aod_ratio_irs);
  const UncertaintySet u = uncertainty_radii(ch, bounds);
  RobustConfig cfg = scenario.robust_config(mode);
  cfg.init_seed = ts;
  cfg.solver.parallel = solver_parallel;

  TrialOutcome out;
  try {
    const AOTrace trace = alternate_optimize(ch, u, cfg);
    out.power_w = trace.final_power();
    out.iterations = trace.num_iterations();
    out.stop = trace.stop;
    out.solver_failure = trace.solver_failure();
    out.max_optimal_residual = trace.max_optimal_residual();
    if (evaluate)
      out.secrecy_rate =
          worst_case_secrecy_rate(trace.state, ch, bounds, cfg, scenario.grid_n, false).secrecy_rate;
  } catch (const InitializationFailed&) {
    out.infeasible = true;
  }
  return out;
}

int SweepResult::solver_failures() const {
  int n = 0;
  for (const auto& r : rows) n += r.solver_failures;
  return n;
}

int SweepResult::total_trials() const {
  int n = 0;
  for (const auto& r : rows) n += r.trials;
  return n;
}

SweepResult run_sweep(const SweepConfig& config, bool parallel) {
  config.validate();
  struct Job {
    std::size_t cell;
    int trial;
  };
  std::vector<Scenario> scenarios;
  std::vector<std::pair<double, IrsMode>> cells;
  for (double value : config.values)
    for (IrsMode mode : config.modes) {
      scenarios.push_back(apply_axis(config.base, config.axis, value));
      cells.emplace_back(value, mode);
    }
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int t = 0; t < config.trials; ++t) jobs.push_back({c, t});

  std::vector<TrialOutcome> outcomes(jobs.size());
  const long n_jobs = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long j = 0; j < n_jobs; ++j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    outcomes[static_cast<std::size_t>(j)] =
        run_trial(scenarios[job.cell], cells[job.cell].second, config.seed, job.trial,
                  config.evaluate, false);
  }

  SweepResult result;
  result.axis = config.axis;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepRow row;
    row.axis_value = cells[c].first;
    row.mode = cells[c].second;
    row.trials = config.trials;
    double sum = 0.0, sum_sq = 0.0, iters = 0.0, rsec = 0.0;
    int ok = 0;
    for (int t = 0; t < config.trials; ++t) {
      const TrialOutcome& o = outcomes[c * static_cast<std::size_t>(config.trials) + static_cast<std::size_t>(t)];
      if (o.infeasible) {
        ++row.infeasible;
        continue;
      }
      if (o.solver_failure) ++row.solver_failures;
      row.max_optimal_residual = std::max(row.max_optimal_residual, o.max_optimal_residual);
      const double dbm = watt_to_dbm(o.power_w);
      sum += dbm;
      sum_sq += dbm * dbm;
      iters += o.iterations;
      rsec += o.secrecy_rate;
      ++ok;
    }
    if (ok > 0) {
      row.mean_power_dbm = sum / ok;
      row.std_power_dbm = std::sqrt(std::max(0.0, sum_sq / ok - row.mean_power_dbm * row.mean_power_dbm));
      row.mean_iters = iters / ok;
      row.mean_rsec = rsec / ok;
    } else {
      row.mean_power_dbm = row.std_power_dbm = row.mean_iters = row.mean_rsec = nan;
    }
    result.rows.push_back(row);
  }
  return result;
}

namespace {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::string emit_csv(const SweepResult& r) {
  std::string out = "axis_value,mode,mean_power_dbm,std_power_dbm,infeasible,mean_iters,mean_rsec\n";
  for (const auto& row : r.rows)
    out += number(row.axis_value) + "," + mode_name(row.mode) + "," + number(row.mean_power_dbm) +
           "," + number(row.std_power_dbm) + "," + std::to_string(row.infeasible) + "," +
           number(row.mean_iters) + "," + number(row.mean_rsec) + "\n";
  return out;
}

namespace {

nlohmann::json num_json(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }
double json_num(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string emit_json(const SweepResult& r) {
  nlohmann::json j;
  j["axis"] = axis_name(r.axis);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"axis_value", row.axis_value},
                    {"mode", mode_name(row.mode)},
                    {"mean_power_dbm", num_json(row.mean_power_dbm)},
                    {"std_power_dbm", num_json(row.std_power_dbm)},
                    {"infeasible", row.infeasible},
                    {"mean_iters", num_json(row.mean_iters)},
                    {"mean_rsec", num_json(row.mean_rsec)},
                    {"trials", row.trials},
                    {"solver_failures", row.solver_failures},
                    {"max_optimal_residual", row.max_optimal_residual}});
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

SweepResult result_from_json(const std::string& text) {
  SweepResult r;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    r.axis = axis_from_name(j.at("axis").get<std::string>());
    for (const auto& row : j.at("rows")) {
      SweepRow s;
      s.axis_value = row.at("axis_value").get<double>();
      const std::string mode = row.at("mode").get<std::string>();
      if (mode != "active" && mode != "passive") throw InvalidArgument("unknown mode '" + mode + "'");
      s.mode = mode == "active" ? IrsMode::Active : IrsMode::Passive;
      s.mean_power_dbm = json_num(row.at("mean_power_dbm"));
      s.std_power_dbm = json_num(row.at("std_power_dbm"));
      s.infeasible = row.at("infeasible").get<int>();
      s.mean_iters = json_num(row.at("mean_iters"));
      s.mean_rsec = json_num(row.at("mean_rsec"));
      s.trials = row.at("trials").get<int>();
      s.solver_failures = row.at("solver_failures").get<int>();
      s.max_optimal_residual = row.value("max_optimal_residual", 0.0);
      r.rows.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("result_from_json: ") + e.what());
  }
  return r;
}

void emit(const SweepResult& result, const std::string& format, const std::string& path) {
  std::string text;
  if (format == "csv") text = emit_csv(result);
  else if (format == "json") text = emit_json(result);
  else throw InvalidArgument("unknown output format '" + format + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

}  // namespace robustirs
