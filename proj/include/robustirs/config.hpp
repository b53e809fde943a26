#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustirs/geometry_channel.hpp"
#include "robustirs/robust_config.hpp"

namespace robustirs {

/// Bad configuration text: carries the 1-based line (0 when not tied to a
/// line) and the offending key.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(int line, std::string field, const std::string& message);
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// One simulation scenario in user units (dB, dBm, ratios).
struct Scenario {
  NetworkGeometry geometry;
  double los_gain_db = -2.14;
  double nlos_gain_db = -3.14;
  double los_exponent = 2.09;
  double nlos_exponent = 3.75;
  double k_a = 5.0;
  double k_b = 2.0 / kPi * std::log(3.0);
  double p_peak_dbm = 40.0;
  double p_f_dbm = 10.0;
  double tau_max_db = 30.0;
  double sigma_i_dbm = -10.0;
  double sigma_u_dbm = -10.0;
  double sigma_e_dbm = -10.0;
  double eta_u = 4.5;
  double eta_e = 1.0;
  double aod_ratio_alice = 0.02;  // beta / elevation, split evenly over both angles
  double aod_ratio_eve = 0.04;
  std::optional<double> aod_ratio_irs;  // unset: IRS link follows Alice's bounds
  double epsilon = 1e-4;
  int max_iterations = 100;
  EveBound eve_bound = EveBound::Exact;
  bool eve_constraint = true;
  bool use_irs = true;
  int grid_n = 16;

  [[nodiscard]] ChannelParams channel_params() const;
  [[nodiscard]] RobustConfig robust_config(IrsMode mode) const;
};

enum class SweepAxis { AodRatioAlice, AodRatioEve, M, N, TauMaxDb, PFDbm, AsrThreshold, UavAltitude };
const char* axis_name(SweepAxis axis);
SweepAxis axis_from_name(const std::string& name);

/// Sets the axis quantity: M -> m_x (m_y = 1), N -> n_y (n_x = 1),
/// asr_threshold -> eta_u = eta_e + value, uav_altitude -> UBS z.
Scenario apply_axis(Scenario scenario, SweepAxis axis, double value);

struct SweepConfig {
  Scenario base;
  SweepAxis axis = SweepAxis::AodRatioAlice;
  std::vector<double> values;
  std::vector<IrsMode> modes{IrsMode::Active, IrsMode::Passive};
  int trials = 1;
  std::uint64_t seed = 1;
  double failure_budget = 0.5;  // tolerated fraction of trials with solver failures
  bool evaluate = true;         // worst-case secrecy rate per trial

  void validate() const;
};

/// Plain-text format: one `key = value` per line, `#` starts a comment.
/// Vectors are comma separated (`ubs_pos = 10, 20, 10`).
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

}  // namespace robustirs
