#pragma once

#include "robustirs/lmi_builders.hpp"

namespace robustirs {

/// Alice/Eve link models with their receiver noise filled in.
struct LinkPair {
  LinkModel alice;
  LinkModel eve;
};
LinkPair link_models(const ChannelSet& ch, const UncertaintySet& u, const RobustConfig& cfg);

struct SubproblemResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  CVec w, v;
  double power = 0.0;    // ||w||^2, watts
  double alpha_u = 0.0;  // slacks, watts (v-step only)
  double alpha_e = 0.0;
  int solver_iterations = 0;
  KKTResiduals residuals;

  [[nodiscard]] bool ok() const { return status == SolveStatus::Optimal; }
  /// Optimal, or stopped at the solver's accuracy floor with a point that is
  /// primal feasible to 1e-8 and optimal to 1e-6. Such a point is a valid
  /// (slightly suboptimal) iterate for the alternating loop.
  [[nodiscard]] bool usable() const;
};

/// Transmit-power minimization over w with v fixed, the signal minorant
/// expanded at (w_k, v). Returns w = w_k-sized vector on success.
SubproblemResult solve_w_subproblem(const CVec& v, const CVec& w_k, const ChannelSet& ch,
                                    const UncertaintySet& u, const RobustConfig& cfg);

/// Slack maximization over v with w fixed, expanded at (w, v_k).
SubproblemResult solve_v_subproblem(const CVec& w, const CVec& v_k, const ChannelSet& ch,
                                    const UncertaintySet& u, const RobustConfig& cfg);

/// Noise-normalized thresholds used by both steps, evaluated at a fixed v:
/// T_U / c_U and T_E / c_E with c = noise * (2^eta - 1).
double alice_threshold(const LinkModel& alice, const CVec& v, const RobustConfig& cfg);
double eve_threshold(const LinkModel& eve, const CVec& v, const RobustConfig& cfg);

}  // namespace robustirs
