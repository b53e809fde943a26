#pragma once

#include <string>
#include <vector>

#include "robustirs/alternating.hpp"
#include "robustirs/config.hpp"

namespace robustirs {

/// Channel seed of trial t; depends only on (seed, t).
std::uint64_t trial_seed(std::uint64_t seed, int trial);

struct TrialOutcome {
  bool infeasible = false;      // no feasible starting point
  bool solver_failure = false;  // a subproblem ended with a numerical status
  double power_w = 0.0;
  int iterations = 0;
  double secrecy_rate = 0.0;
  StopReason stop = StopReason::MaxIterations;
  double max_optimal_residual = 0.0;
};

/// Synthesizes the trial's channels and runs the alternating optimization
/// (plus the worst-case evaluation when `evaluate`).
TrialOutcome run_trial(const Scenario& scenario, IrsMode mode, std::uint64_t seed, int trial,
                       bool evaluate, bool solver_parallel = false);

struct SweepRow {
  double axis_value = 0.0;
  IrsMode mode = IrsMode::Active;
  double mean_power_dbm = 0.0;  // over feasible trials, NaN if none
  double std_power_dbm = 0.0;
  int infeasible = 0;
  double mean_iters = 0.0;
  double mean_rsec = 0.0;
  int trials = 0;
  int solver_failures = 0;
  double max_optimal_residual = 0.0;  // over all trials of the cell
};

struct SweepResult {
  SweepAxis axis = SweepAxis::AodRatioAlice;
  std::vector<SweepRow> rows;

  [[nodiscard]] int solver_failures() const;
  [[nodiscard]] int total_trials() const;
};

/// Every (axis value, mode, trial) job; `parallel` spreads trials over
/// OpenMP threads. Results do not depend on the thread count.
SweepResult run_sweep(const SweepConfig& config, bool parallel = true);

/// Columns: axis_value, mode, mean_power_dbm, std_power_dbm, infeasible,
/// mean_iters, mean_rsec.
std::string emit_csv(const SweepResult& result);
std::string emit_json(const SweepResult& result);
SweepResult result_from_json(const std::string& text);
/// Writes csv or json to path; throws InvalidArgument on unknown format or I/O error.
void emit(const SweepResult& result, const std::string& format, const std::string& path);

}  // namespace robustirs
