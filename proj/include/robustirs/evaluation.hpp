#pragma once

#include <cstdint>
#include <limits>

#include "robustirs/jitter_uncertainty.hpp"
#include "robustirs/robust_config.hpp"

namespace robustirs {

struct SinrPair {
  double alice = 0.0;
  double eve = 0.0;
};

/// |(h^H + v^H G) w|^2 / (sigma_i2 ||h_irs .* v||^2 + sigma2).
double sinr_v_form(const CVec& h, const CMat& G, const CVec& h_irs, const CVec& w, const CVec& v,
                   double sigma_i2, double sigma2);
/// |(h^H + h_irs^H Theta H_I) w|^2 / (sigma_i2 ||h_irs^H Theta||^2 + sigma2), Theta = diag(conj v).
double sinr_theta_form(const CVec& h, const CVec& h_irs, const CMat& H_i, const CVec& w,
                       const CVec& v, double sigma_i2, double sigma2);

/// SINRs on channels re-synthesized at the perturbed departure angles.
SinrPair sinr(const BeamState& state, const ChannelSet& ch, const RobustConfig& cfg,
              const Perturbation& delta = {});
/// SINRs on the first-order channel model h + dh, G + dG.
SinrPair sinr_linearized(const BeamState& state, const ChannelSet& ch, const UncertaintySet& u,
                         const RobustConfig& cfg, const Perturbation& delta);

inline double rate(double sinr) { return std::log2(1.0 + sinr); }

struct PerformanceReport {
  double rate_u = 0.0;  // nominal
  double rate_e = 0.0;
  double worst_rate_u = 0.0;  // min over the jitter box
  double worst_rate_e = 0.0;  // max over the jitter box
  double secrecy_rate = 0.0;  // max(0, worst_rate_u - worst_rate_e)
  Perturbation worst_alice, worst_eve;
  double amplification_power = 0.0;
};

/// Worst case over a grid_n^4 lattice (end points, hence box corners,
/// included) of the direct-link and UBS->IRS departure deviations, using
/// exact channel re-synthesis at every point.
PerformanceReport worst_case_secrecy_rate(const BeamState& state, const ChannelSet& ch,
                                          const JitterBounds& bounds, const RobustConfig& cfg,
                                          int grid_n = 16, bool parallel = true);

/// Constraint margins normalized by their thresholds; >= 0 means satisfied.
/// Robust-rate margins are minima over samples of the jitter box.
struct AuditReport {
  int samples = 0;
  double alice_margin = 0.0;        // (|s|^2 - T_U) / T_U, first-order model
  double eve_margin = 0.0;          // (T_E - |s|^2) / T_E, first-order model
  double exact_alice_margin = 0.0;  // same on re-synthesized channels
  double exact_eve_margin = 0.0;
  double amplification_margin = std::numeric_limits<double>::infinity();  // (P_F - P_amp) / P_F
  double peak_margin = 0.0;       // (P_peak - ||w||^2) / P_peak
  double magnitude_margin = 0.0;  // min (limit - |v_m|) / limit

  /// First-order robust margins, power and magnitude limits all >= -tol.
  [[nodiscard]] bool passed(double tol) const;
};

AuditReport audit(const BeamState& state, const ChannelSet& ch, const UncertaintySet& u,
                  const RobustConfig& cfg, int samples, std::uint64_t seed);

}  // namespace robustirs
