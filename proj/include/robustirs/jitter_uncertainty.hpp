#pragma once

#include <optional>
#include <random>

#include "robustirs/geometry_channel.hpp"

namespace robustirs {

/// Half-widths of the angle boxes, radians. Index 1 is the omega (first
/// steering angle) deviation, index 2 the phi deviation.
struct JitterBounds {
  double u1 = 0.0, u2 = 0.0;  // UBS -> Alice
  double e1 = 0.0, e2 = 0.0;  // UBS -> Eve
  double i1 = 0.0, i2 = 0.0;  // UBS -> IRS

  void validate() const;
  [[nodiscard]] JitterBounds scaled(double factor) const;

  /// beta_link = ratio * elevation_link, split evenly between both angles.
  /// Without an IRS ratio the IRS link takes Alice's absolute bounds.
  static JitterBounds from_ratios(const LinkAngles& angles, double ratio_alice,
                                  double ratio_eve,
                                  std::optional<double> ratio_irs = std::nullopt);
};

struct TaylorVectors {
  CVec a;  // d/d omega multipliers
  CVec b;  // d/d phi multipliers
};

/// Per-entry derivative multipliers of steering_ubs(omega, phi, ...), same
/// ordering: h(omega + dw, phi + dp) ~ h + h.*a dw + h.*b dp.
TaylorVectors taylor_direction_vectors(double phi, double omega, int n_x, int n_y,
                                       double spacing, double wavelength);

/// h_los + h_los.*a dw + h_los.*b dp.
CVec perturbed_los(const CVec& h_los, const TaylorVectors& tv, double d_omega, double d_phi);

struct UncertaintySet {
  JitterBounds bounds;
  // Path-gain scaled directions: dh = a dw + b dp.
  CVec a_u, b_u, a_e, b_e;
  // Same for the IRS departure vector; dH_I = h_arrival (a_i dw + b_i dp)^H.
  CVec a_i, b_i;
  double a_u1 = 0.0, a_u2 = 0.0, a_e1 = 0.0, a_e2 = 0.0;
  double g_u1 = 0.0, g_u2 = 0.0, g_e1 = 0.0, g_e2 = 0.0;
  double xi_uh = 0.0, xi_eh = 0.0, xi_ug = 0.0, xi_eg = 0.0;
};

UncertaintySet uncertainty_radii(const ChannelSet& channels, const JitterBounds& bounds);

/// Linearized channel errors of the Taylor model.
CVec linearized_delta_h(const UncertaintySet& u, bool alice, double d_omega, double d_phi);
CMat linearized_delta_H(const UncertaintySet& u, const ChannelSet& channels, double d_omega,
                        double d_phi);

struct Perturbation {
  double omega_u = 0.0, phi_u = 0.0;
  double omega_e = 0.0, phi_e = 0.0;
  double omega_i = 0.0, phi_i = 0.0;
};

/// Uniform draw from the box.
Perturbation sample_perturbation(const JitterBounds& bounds, std::mt19937_64& rng);

}  // namespace robustirs
