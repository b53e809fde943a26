#include "robustirs/jitter_uncertainty.hpp"

#include <cmath>

namespace robustirs {

void JitterBounds::validate() const {
  for (double v : {u1, u2, e1, e2, i1, i2})
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("jitter bounds must be finite and >= 0");
}

JitterBounds JitterBounds::scaled(double factor) const {
  return {u1 * factor, u2 * factor, e1 * factor, e2 * factor, i1 * factor, i2 * factor};
}

JitterBounds JitterBounds::from_ratios(const LinkAngles& angles, double ratio_alice,
                                       double ratio_eve, std::optional<double> ratio_irs) {
  if (!(ratio_alice >= 0.0) || !(ratio_eve >= 0.0) || (ratio_irs && !(*ratio_irs >= 0.0)))
    throw InvalidArgument("AOD ratios must be >= 0");
  JitterBounds b;
  const double bu = ratio_alice * angles.alice.elevation;
  const double be = ratio_eve * angles.eve.elevation;
  const double bi = ratio_irs ? *ratio_irs * angles.irs.elevation : bu;
  b.u1 = b.u2 = 0.5 * bu;
  b.e1 = b.e2 = 0.5 * be;
  b.i1 = b.i2 = 0.5 * bi;
  return b;
}

TaylorVectors taylor_direction_vectors(double phi, double omega, int n_x, int n_y,
                                       double spacing, double wavelength) {
  if (n_x < 1 || n_y < 1) throw InvalidArgument("taylor_direction_vectors: array dims must be >= 1");
  const double k = 2.0 * kPi * spacing / wavelength;
  const double so = std::sin(omega), co = std::cos(omega);
  const double sp = std::sin(phi), cp = std::cos(phi);
  TaylorVectors tv;
  tv.a.resize(static_cast<Eigen::Index>(n_x) * n_y);
  tv.b.resize(static_cast<Eigen::Index>(n_x) * n_y);
  for (int p = 0; p < n_x; ++p)
    for (int q = 0; q < n_y; ++q) {
      tv.a(p * n_y + q) = cplx(0.0, k * (p * so - q * sp * co));
      tv.b(p * n_y + q) = cplx(0.0, -k * q * cp * so);
    }
  return tv;
}

CVec perturbed_los(const CVec& h_los, const TaylorVectors& tv, double d_omega, double d_phi) {
  if (h_los.size() != tv.a.size() || h_los.size() != tv.b.size())
    throw DimensionMismatch("perturbed_los: vector lengths differ");
  return h_los + h_los.cwiseProduct(tv.a) * d_omega + h_los.cwiseProduct(tv.b) * d_phi;
}

UncertaintySet uncertainty_radii(const ChannelSet& ch, const JitterBounds& bounds) {
  bounds.validate();
  const auto& g = ch.geometry;
  UncertaintySet u;
  u.bounds = bounds;
  auto scaled = [&](const LinkDirection& dir, const CVec& h_los, double weight, CVec& a, CVec& b) {
    const TaylorVectors tv =
        taylor_direction_vectors(dir.phi, dir.omega, g.n_x, g.n_y, g.ubs_spacing, g.wavelength);
    a = weight * h_los.cwiseProduct(tv.a);
    b = weight * h_los.cwiseProduct(tv.b);
  };
  scaled(ch.angles.alice, ch.h_u_los, ch.link_alice.los_weight, u.a_u, u.b_u);
  scaled(ch.angles.eve, ch.h_e_los, ch.link_eve.los_weight, u.a_e, u.b_e);
  scaled(ch.angles.irs, ch.h_i_departure, ch.link_irs.los_weight, u.a_i, u.b_i);

  u.a_u1 = u.a_u.norm();
  u.a_u2 = u.b_u.norm();
  u.a_e1 = u.a_e.norm();
  u.a_e2 = u.b_e.norm();
  const double arrival = ch.h_i_arrival.norm();  // sqrt(M)
  u.g_u1 = ch.h_iu.norm() * arrival * u.a_i.norm();
  u.g_u2 = ch.h_iu.norm() * arrival * u.b_i.norm();
  u.g_e1 = ch.h_ie.norm() * arrival * u.a_i.norm();
  u.g_e2 = ch.h_ie.norm() * arrival * u.b_i.norm();

  u.xi_uh = bounds.u1 * u.a_u1 + bounds.u2 * u.a_u2;
  u.xi_eh = bounds.e1 * u.a_e1 + bounds.e2 * u.a_e2;
  u.xi_ug = bounds.i1 * u.g_u1 + bounds.i2 * u.g_u2;
  u.xi_eg = bounds.i1 * u.g_e1 + bounds.i2 * u.g_e2;
  return u;
}

CVec linearized_delta_h(const UncertaintySet& u, bool alice, double d_omega, double d_phi) {
  return alice ? CVec(u.a_u * d_omega + u.b_u * d_phi) : CVec(u.a_e * d_omega + u.b_e * d_phi);
}

CMat linearized_delta_H(const UncertaintySet& u, const ChannelSet& ch, double d_omega,
                        double d_phi) {
  const CVec dep = u.a_i * d_omega + u.b_i * d_phi;
  return ch.h_i_arrival * dep.adjoint();
}

Perturbation sample_perturbation(const JitterBounds& b, std::mt19937_64& rng) {
  auto draw = [&](double beta) {
    if (beta == 0.0) return 0.0;
    std::uniform_real_distribution<double> dist(-beta, beta);
    return dist(rng);
  };
  Perturbation p;
  p.omega_u = draw(b.u1);
  p.phi_u = draw(b.u2);
  p.omega_e = draw(b.e1);
  p.phi_e = draw(b.e2);
  p.omega_i = draw(b.i1);
  p.phi_i = draw(b.i2);
  return p;
}

}  // namespace robustirs
