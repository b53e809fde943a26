#pragma once

#include <cmath>
#include <cstdint>

#include "robustirs/conic_solver.hpp"
#include "robustirs/types.hpp"

namespace robustirs {

enum class IrsMode { Active, Passive };

/// How the eavesdropper's robust upper bound is turned into an LMI.
/// Exact: S-procedure applied to the true quadratic |s|^2 through a Schur
/// lift (sound). Linearized: the same first-order minorant as on Alice's side
/// (a lower bound, hence not a certificate for an upper-bound constraint).
enum class EveBound { Exact, Linearized };

const char* mode_name(IrsMode mode);

struct RobustConfig {
  double eta_u = 4.5;  // bits/s/Hz
  double eta_e = 1.0;
  double p_peak = dbm_to_watt(40.0);
  double p_f = dbm_to_watt(10.0);
  double tau_max = db_to_amplitude(30.0);
  double sigma_i2 = dbm_to_watt(-10.0);
  double sigma_u2 = dbm_to_watt(-10.0);
  double sigma_e2 = dbm_to_watt(-10.0);
  double epsilon = 1e-4;
  int max_iterations = 100;
  IrsMode mode = IrsMode::Active;
  EveBound eve_bound = EveBound::Exact;
  bool use_irs = true;         // false: v is pinned to zero
  bool eve_constraint = true;  // false: no eavesdropper constraint
  int init_retries = 10;
  std::uint64_t init_seed = 0x5eed;
  SolverOptions solver;

  void validate() const;

  [[nodiscard]] bool passive() const { return mode == IrsMode::Passive; }
  /// |v_m| limit: tau_max (active) or 1 (passive).
  [[nodiscard]] double amplitude_limit() const { return passive() ? 1.0 : tau_max; }
  /// IRS thermal noise seen by the receivers; zero for a passive surface.
  [[nodiscard]] double irs_noise() const { return passive() ? 0.0 : sigma_i2; }
  [[nodiscard]] bool amplification_constraint() const { return !passive() && use_irs; }
  [[nodiscard]] double gamma_u() const { return std::pow(2.0, eta_u) - 1.0; }
  [[nodiscard]] double gamma_e() const { return std::pow(2.0, eta_e) - 1.0; }
};

struct BeamState {
  CVec w;  // sqrt(W)
  CVec v;  // reflection coefficients; Theta = diag(conj(v))
};

}  // namespace robustirs
