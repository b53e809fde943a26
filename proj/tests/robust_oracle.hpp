#pragma once
// Sampling check of the robust rate constraints on the first-order channel
// model, evaluated from the raw channel pieces.

#include <algorithm>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "robustirs/jitter_uncertainty.hpp"
#include "robustirs/robust_config.hpp"

namespace oracle {

struct RobustMargins {
  // min over samples of |s_U|^2 / (gamma_U noise_U) - 1
  double alice = std::numeric_limits<double>::infinity();
  // min over samples of 1 - |s_E|^2 / (gamma_E noise_E)
  double eve = std::numeric_limits<double>::infinity();
};

inline RobustMargins sample_robust_margins(const robustirs::BeamState& st, const robustirs::ChannelSet& ch,
                                           const robustirs::UncertaintySet& u,
                                           const robustirs::RobustConfig& cfg, int samples,
                                           std::uint64_t seed) {
  using namespace robustirs;
  std::mt19937_64 rng(seed);
  const CVec v = cfg.use_irs ? st.v : CVec::Zero(ch.num_elements());
  const double sig_i = cfg.irs_noise();
  const double nu = receiver_noise(ch.h_iu, v, sig_i, cfg.sigma_u2);
  const double ne = receiver_noise(ch.h_ie, v, sig_i, cfg.sigma_e2);
  RobustMargins out;
  for (int t = 0; t < samples; ++t) {
    // first sample is the nominal channel, the next 16 are box corners
    Perturbation p;
    if (t == 0) {
    } else if (t <= 16) {
      const int c = t - 1;
      const JitterBounds& b = u.bounds;
      p.omega_u = (c & 1 ? 1 : -1) * b.u1;
      p.phi_u = (c & 2 ? 1 : -1) * b.u2;
      p.omega_e = (c & 1 ? 1 : -1) * b.e1;
      p.phi_e = (c & 2 ? 1 : -1) * b.e2;
      p.omega_i = (c & 4 ? 1 : -1) * b.i1;
      p.phi_i = (c & 8 ? 1 : -1) * b.i2;
    } else {
      p = sample_perturbation(u.bounds, rng);
    }
    const CVec dhu = linearized_delta_h(u, true, p.omega_u, p.phi_u);
    const CVec dhe = linearized_delta_h(u, false, p.omega_e, p.phi_e);
    const CMat dH = linearized_delta_H(u, ch, p.omega_i, p.phi_i);
    const CMat Hi = ch.H_i + dH;
    const double su = std::norm(received(ch.h_u + dhu, ch.h_iu, Hi, st.w, v));
    const double se = std::norm(received(ch.h_e + dhe, ch.h_ie, Hi, st.w, v));
    out.alice = std::min(out.alice, su / (cfg.gamma_u() * nu) - 1.0);
    if (cfg.eve_constraint) out.eve = std::min(out.eve, 1.0 - se / (cfg.gamma_e() * ne));
  }
  return out;
}

}  // namespace oracle
