#include "robustirs/robust_config.hpp"

namespace robustirs {

const char* mode_name(IrsMode mode) { return mode == IrsMode::Active ? "active" : "passive"; }

void RobustConfig::validate() const {
  if (!(eta_e > 0.0) || !(eta_u > eta_e))
    throw InvalidArgument("rate thresholds must satisfy 0 < eta_e < eta_u");
  for (double p : {p_peak, p_f, sigma_i2, sigma_u2, sigma_e2})
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("powers must be finite and > 0");
  if (!(tau_max >= 0.0) || !std::isfinite(tau_max)) throw InvalidArgument("tau_max must be >= 0");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (init_retries < 0) throw InvalidArgument("init_retries must be >= 0");
}

}  // namespace robustirs
