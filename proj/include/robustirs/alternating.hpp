#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "robustirs/subproblems.hpp"

namespace robustirs {

/// No feasible starting point after the initialization heuristic.
class InitializationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StopReason { Converged, VInfeasible, VFailed, WFailed, MaxIterations };
const char* stop_reason_name(StopReason reason);

struct AOIteration {
  int index = 0;
  double power_w = 0.0;
  double power_dbm = 0.0;
  double alpha_u = 0.0;
  double alpha_e = 0.0;
  SolveStatus v_status = SolveStatus::Optimal;
  SolveStatus w_status = SolveStatus::Optimal;
  KKTResiduals v_residuals;
  KKTResiduals w_residuals;
  double seconds = 0.0;
};

struct AOTrace {
  BeamState state;                // last feasible iterate
  std::vector<BeamState> history;  // every accepted iterate, starting point first
  std::vector<double> powers;     // p(0), p(1), ... in watts
  std::vector<AOIteration> iterations;
  StopReason stop = StopReason::MaxIterations;
  int init_attempts = 0;
  double seconds = 0.0;

  [[nodiscard]] double final_power() const { return powers.back(); }
  [[nodiscard]] int num_iterations() const { return static_cast<int>(iterations.size()); }
  /// Some subproblem ended with a numerical status rather than a clean
  /// optimum or an infeasibility certificate.
  [[nodiscard]] bool solver_failure() const;
  /// Largest KKT residual (primal, dual or gap) over the Optimal subproblem exits.
  [[nodiscard]] double max_optimal_residual() const;
};

/// Equal-phase starting reflection vector: amplitude
/// min(tau_max, sqrt(P_F / (M (sigma_I^2 + p_bar)))) in active mode, p_bar the
/// largest per-element incident power at full transmit power; 1 when passive.
CVec initial_reflection(const ChannelSet& ch, const RobustConfig& cfg);

/// Alternating optimization: v-step then w-step until the relative power
/// change falls below epsilon or the v-step becomes infeasible.
/// Throws InitializationFailed.
AOTrace alternate_optimize(const ChannelSet& ch, const UncertaintySet& u, const RobustConfig& cfg);

std::string to_json(const AOTrace& trace);

}  // namespace robustirs
