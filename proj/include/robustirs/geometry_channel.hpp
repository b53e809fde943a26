#pragma once

#include <cstdint>

#include "robustirs/types.hpp"

namespace robustirs {

/// Node placement and array dimensions. Ground nodes sit at z = 0.
///
/// Uniform rectangular arrays are indexed row-major in (p, q): element
/// (p, q) lives at flat index p * n_y + q, with p along the array's first
/// axis. For the UBS array the first axis multiplies cos(omega) and the
/// second sin(phi) sin(omega); for the IRS the first axis multiplies
/// cos(azimuth) sin(elevation) and the second sin(azimuth) sin(elevation).
struct NetworkGeometry {
  Vec3 ubs_pos{10.0, 20.0, 10.0};
  Vec3 irs_pos{10.0, 0.0, 10.0};
  Vec3 alice_pos{20.0, 20.0, 0.0};
  Vec3 eve_pos{10.0, 40.0, 0.0};
  int n_x = 1;
  int n_y = 2;
  int m_x = 10;
  int m_y = 1;
  double wavelength = 0.1;
  double ubs_spacing = 0.05;
  double irs_spacing = 0.05;

  [[nodiscard]] int num_antennas() const { return n_x * n_y; }
  [[nodiscard]] int num_elements() const { return m_x * m_y; }

  /// Throws InvalidArgument / DegenerateGeometry.
  void validate() const;
};

struct LinkDistances {
  double ubs_alice = 0.0;
  double ubs_eve = 0.0;
  double ubs_irs = 0.0;
};

/// Direction of a link from its source node to its destination node, in the
/// steering-vector convention: the unit vector (src - dst)/d equals
/// (sin(omega) cos(phi), sin(omega) sin(phi), cos(omega)).
/// `elevation` is the physical angle above the horizontal, asin(|dz| / d),
/// which drives the Rician K-factor and the jitter bound magnitudes.
struct LinkDirection {
  double omega = 0.0;
  double phi = 0.0;
  double elevation = 0.0;
  double distance = 0.0;
};

struct LinkAngles {
  LinkDirection alice;  // UBS -> Alice
  LinkDirection eve;    // UBS -> Eve
  LinkDirection irs;    // UBS -> IRS
  // Arrival at the IRS from the UBS: sin(az) sin(el) = dy/d, cos(az) sin(el) = dx/d.
  double irs_arrival_azimuth = 0.0;
  double irs_arrival_elevation = 0.0;
};

/// Large-scale fading and K-factor model. Powers are linear.
struct ChannelParams {
  double los_gain = db_to_linear(-2.14);
  double nlos_gain = db_to_linear(-3.14);
  double los_exponent = 2.09;
  double nlos_exponent = 3.75;
  double k_a = 5.0;
  double k_b = 2.0 / kPi * std::log(3.0);
};

/// Per-link Rician bookkeeping needed to re-synthesize a channel under jitter.
struct RicianLink {
  double distance = 0.0;
  double k_factor = 0.0;
  double los_weight = 0.0;   // sqrt(A_L d^-aL K / (1 + K))
  double nlos_weight = 0.0;  // sqrt(A_N d^-aN / (1 + K))
};

struct ChannelSet {
  NetworkGeometry geometry;
  ChannelParams params;
  LinkAngles angles;

  RicianLink link_alice, link_eve, link_irs, link_irs_alice, link_irs_eve;

  // Nominal composite channels.
  CVec h_u;   // UBS -> Alice, N
  CVec h_e;   // UBS -> Eve, N
  CMat H_i;   // UBS -> IRS, M x N
  CVec h_iu;  // IRS -> Alice, M
  CVec h_ie;  // IRS -> Eve, M

  // Unit-modulus LOS steering parts.
  CVec h_u_los, h_e_los;
  CVec h_i_departure;  // at the UBS, N
  CVec h_i_arrival;    // at the IRS, M
  CVec h_iu_los, h_ie_los;

  // CN(0, 1) NLOS parts.
  CVec h_u_nlos, h_e_nlos, h_iu_nlos, h_ie_nlos;
  CMat H_i_nlos;

  [[nodiscard]] int num_antennas() const { return static_cast<int>(h_u.size()); }
  [[nodiscard]] int num_elements() const { return static_cast<int>(h_iu.size()); }
};

LinkDistances distances(const NetworkGeometry& geometry);

/// Direction of the link src -> dst. Throws DegenerateGeometry when the
/// nodes coincide.
LinkDirection link_direction(const Vec3& src, const Vec3& dst);

LinkAngles nominal_angles(const NetworkGeometry& geometry);

CVec steering_ubs(double omega, double phi, int n_x, int n_y, double spacing,
                  double wavelength);

CVec steering_irs(double azimuth, double elevation, int m_x, int m_y,
                  double spacing, double wavelength);

/// K = a * exp(b * (pi/2 - elevation)), elevation in [0, pi/2].
double rician_k_factor(double elevation, double a = 5.0,
                       double b = 2.0 / kPi * std::log(3.0));

RicianLink rician_link(double distance, double elevation,
                       const ChannelParams& params);

/// Draws every NLOS component from independent sub-streams of `seed`, so a
/// component's draw does not depend on the dimensions of the others.
ChannelSet synthesize_channels(const NetworkGeometry& geometry,
                               const ChannelParams& params,
                               std::uint64_t seed);

/// G = diag(h_ix^H) H_i, so that v^H G = h_ix^H diag(conj(v)) H_i.
CMat cascaded_channel(const CVec& h_ix, const CMat& H_i);

/// Composite UBS -> Alice/Eve channel with the LOS departure angles shifted
/// by (d_omega, d_phi); the NLOS part is left untouched.
CVec perturbed_direct_channel(const ChannelSet& ch, bool alice, double d_omega,
                              double d_phi);

/// Composite UBS -> IRS channel with the departure angles shifted.
CMat perturbed_irs_channel(const ChannelSet& ch, double d_omega, double d_phi);

}  // namespace robustirs
