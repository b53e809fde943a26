#include "robustirs/geometry_channel.hpp"

#include <cmath>
#include <random>

namespace robustirs {

namespace {

constexpr double kMinDistance = 1e-9;

// Sub-stream identifiers for the NLOS draws.
enum class Stream : std::uint32_t { kAlice = 1, kEve, kIrs, kIrsAlice, kIrsEve };

std::mt19937_64 make_stream(std::uint64_t seed, Stream s) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s)};
  return std::mt19937_64(seq);
}

CVec draw_cn(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    out(i) = cplx(re, im);
  }
  return out;
}

CVec ura_response(double u, double v, int n_x, int n_y, double spacing,
                  double wavelength) {
  const double k = -2.0 * kPi * spacing / wavelength;
  CVec out(static_cast<Eigen::Index>(n_x) * n_y);
  for (int p = 0; p < n_x; ++p) {
    for (int q = 0; q < n_y; ++q) {
      out(p * n_y + q) = std::polar(1.0, k * (p * u + q * v));
    }
  }
  return out;
}

}  // namespace

void NetworkGeometry::validate() const {
  if (n_x < 1 || n_y < 1) throw InvalidArgument("UBS array dimensions must be >= 1");
  if (m_x < 1 || m_y < 1) throw InvalidArgument("IRS array dimensions must be >= 1");
  if (!(wavelength > 0.0) || !(ubs_spacing > 0.0) || !(irs_spacing > 0.0))
    throw InvalidArgument("wavelength and element spacings must be positive");
  if (alice_pos.z() != 0.0 || eve_pos.z() != 0.0)
    throw InvalidArgument("ground nodes must have z = 0");
  if (!(ubs_pos.z() > 0.0)) throw InvalidArgument("UAV altitude must be positive");
  for (const Vec3* p : {&ubs_pos, &irs_pos, &alice_pos, &eve_pos})
    if (!p->allFinite()) throw InvalidArgument("node positions must be finite");
  (void)link_direction(ubs_pos, alice_pos);
  (void)link_direction(ubs_pos, eve_pos);
  (void)link_direction(ubs_pos, irs_pos);
  (void)link_direction(irs_pos, alice_pos);
  (void)link_direction(irs_pos, eve_pos);
}

LinkDistances distances(const NetworkGeometry& geometry) {
  LinkDistances d;
  d.ubs_alice = link_direction(geometry.ubs_pos, geometry.alice_pos).distance;
  d.ubs_eve = link_direction(geometry.ubs_pos, geometry.eve_pos).distance;
  d.ubs_irs = link_direction(geometry.ubs_pos, geometry.irs_pos).distance;
  return d;
}

LinkDirection link_direction(const Vec3& src, const Vec3& dst) {
  const Vec3 delta = src - dst;
  const double d = delta.norm();
  if (!(d > kMinDistance)) throw DegenerateGeometry("coincident node positions");
  LinkDirection out;
  out.distance = d;
  out.omega = std::acos(std::clamp(delta.z() / d, -1.0, 1.0));
  out.phi = std::atan2(delta.y(), delta.x());
  out.elevation = std::asin(std::clamp(std::abs(delta.z()) / d, 0.0, 1.0));
  return out;
}

LinkAngles nominal_angles(const NetworkGeometry& geometry) {
  LinkAngles a;
  a.alice = link_direction(geometry.ubs_pos, geometry.alice_pos);
  a.eve = link_direction(geometry.ubs_pos, geometry.eve_pos);
  a.irs = link_direction(geometry.ubs_pos, geometry.irs_pos);
  const Vec3 delta = geometry.ubs_pos - geometry.irs_pos;
  const double rho = std::hypot(delta.x(), delta.y());
  a.irs_arrival_azimuth = std::atan2(delta.y(), delta.x());
  a.irs_arrival_elevation = std::atan2(rho, delta.z());
  return a;
}

CVec steering_ubs(double omega, double phi, int n_x, int n_y, double spacing,
                  double wavelength) {
  if (n_x < 1 || n_y < 1) throw InvalidArgument("steering_ubs: array dims must be >= 1");
  return ura_response(std::cos(omega), std::sin(phi) * std::sin(omega), n_x, n_y,
                      spacing, wavelength);
}

CVec steering_irs(double azimuth, double elevation, int m_x, int m_y,
                  double spacing, double wavelength) {
  if (m_x < 1 || m_y < 1) throw InvalidArgument("steering_irs: array dims must be >= 1");
  const double se = std::sin(elevation);
  return ura_response(std::cos(azimuth) * se, std::sin(azimuth) * se, m_x, m_y,
                      spacing, wavelength);
}

double rician_k_factor(double elevation, double a, double b) {
  return a * std::exp(b * (kPi / 2.0 - elevation));
}

RicianLink rician_link(double distance, double elevation,
                       const ChannelParams& params) {
  RicianLink link;
  link.distance = distance;
  link.k_factor = rician_k_factor(elevation, params.k_a, params.k_b);
  const double k = link.k_factor;
  link.los_weight = std::sqrt(params.los_gain * std::pow(distance, -params.los_exponent) *
                              k / (1.0 + k));
  link.nlos_weight =
      std::sqrt(params.nlos_gain * std::pow(distance, -params.nlos_exponent) / (1.0 + k));
  return link;
}

ChannelSet synthesize_channels(const NetworkGeometry& geometry,
                               const ChannelParams& params, std::uint64_t seed) {
  geometry.validate();
  ChannelSet ch;
  ch.geometry = geometry;
  ch.params = params;
  ch.angles = nominal_angles(geometry);
  const auto& g = geometry;
  const int n = g.num_antennas();
  const int m = g.num_elements();

  const LinkAngles& ang = ch.angles;
  ch.link_alice = rician_link(ang.alice.distance, ang.alice.elevation, params);
  ch.link_eve = rician_link(ang.eve.distance, ang.eve.elevation, params);
  ch.link_irs = rician_link(ang.irs.distance, ang.irs.elevation, params);
  const LinkDirection irs_alice = link_direction(g.irs_pos, g.alice_pos);
  const LinkDirection irs_eve = link_direction(g.irs_pos, g.eve_pos);
  ch.link_irs_alice = rician_link(irs_alice.distance, irs_alice.elevation, params);
  ch.link_irs_eve = rician_link(irs_eve.distance, irs_eve.elevation, params);

  ch.h_u_los = steering_ubs(ang.alice.omega, ang.alice.phi, g.n_x, g.n_y, g.ubs_spacing,
                            g.wavelength);
  ch.h_e_los = steering_ubs(ang.eve.omega, ang.eve.phi, g.n_x, g.n_y, g.ubs_spacing,
                            g.wavelength);
  ch.h_i_departure = steering_ubs(ang.irs.omega, ang.irs.phi, g.n_x, g.n_y,
                                  g.ubs_spacing, g.wavelength);
  ch.h_i_arrival = steering_irs(ang.irs_arrival_azimuth, ang.irs_arrival_elevation,
                                g.m_x, g.m_y, g.irs_spacing, g.wavelength);
  ch.h_iu_los = steering_irs(irs_alice.phi, irs_alice.omega, g.m_x, g.m_y,
                             g.irs_spacing, g.wavelength);
  ch.h_ie_los = steering_irs(irs_eve.phi, irs_eve.omega, g.m_x, g.m_y, g.irs_spacing,
                             g.wavelength);

  {
    auto rng = make_stream(seed, Stream::kAlice);
    ch.h_u_nlos = draw_cn(rng, n);
  }
  {
    auto rng = make_stream(seed, Stream::kEve);
    ch.h_e_nlos = draw_cn(rng, n);
  }
  {
    auto rng = make_stream(seed, Stream::kIrs);
    const CVec flat = draw_cn(rng, static_cast<Eigen::Index>(m) * n);
    ch.H_i_nlos = Eigen::Map<const CMat>(flat.data(), m, n);
  }
  {
    auto rng = make_stream(seed, Stream::kIrsAlice);
    ch.h_iu_nlos = draw_cn(rng, m);
  }
  {
    auto rng = make_stream(seed, Stream::kIrsEve);
    ch.h_ie_nlos = draw_cn(rng, m);
  }

  ch.h_u = ch.link_alice.los_weight * ch.h_u_los + ch.link_alice.nlos_weight * ch.h_u_nlos;
  ch.h_e = ch.link_eve.los_weight * ch.h_e_los + ch.link_eve.nlos_weight * ch.h_e_nlos;
  ch.H_i = ch.link_irs.los_weight * (ch.h_i_arrival * ch.h_i_departure.adjoint()) +
           ch.link_irs.nlos_weight * ch.H_i_nlos;
  ch.h_iu = ch.link_irs_alice.los_weight * ch.h_iu_los +
            ch.link_irs_alice.nlos_weight * ch.h_iu_nlos;
  ch.h_ie = ch.link_irs_eve.los_weight * ch.h_ie_los +
            ch.link_irs_eve.nlos_weight * ch.h_ie_nlos;
  return ch;
}

CMat cascaded_channel(const CVec& h_ix, const CMat& H_i) {
  if (h_ix.size() != H_i.rows())
    throw DimensionMismatch("cascaded_channel: h has " + std::to_string(h_ix.size()) +
                            " entries but H has " + std::to_string(H_i.rows()) + " rows");
  return h_ix.conjugate().asDiagonal() * H_i;
}

CVec perturbed_direct_channel(const ChannelSet& ch, bool alice, double d_omega,
                              double d_phi) {
  const auto& g = ch.geometry;
  const LinkDirection& dir = alice ? ch.angles.alice : ch.angles.eve;
  const RicianLink& link = alice ? ch.link_alice : ch.link_eve;
  const CVec& nlos = alice ? ch.h_u_nlos : ch.h_e_nlos;
  return link.los_weight * steering_ubs(dir.omega + d_omega, dir.phi + d_phi, g.n_x,
                                        g.n_y, g.ubs_spacing, g.wavelength) +
         link.nlos_weight * nlos;
}

CMat perturbed_irs_channel(const ChannelSet& ch, double d_omega, double d_phi) {
  const auto& g = ch.geometry;
  const CVec dep = steering_ubs(ch.angles.irs.omega + d_omega, ch.angles.irs.phi + d_phi,
                                g.n_x, g.n_y, g.ubs_spacing, g.wavelength);
  return ch.link_irs.los_weight * (ch.h_i_arrival * dep.adjoint()) +
         ch.link_irs.nlos_weight * ch.H_i_nlos;
}

}  // namespace robustirs
