#include "robustirs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "robustirs/kernels.hpp"
#include "robustirs/lmi_builders.hpp"

namespace robustirs {

double sinr_v_form(const CVec& h, const CMat& G, const CVec& h_irs, const CVec& w, const CVec& v,
                   double sigma_i2, double sigma2) {
  const double signal = std::norm(h.dot(w) + v.dot(G * w));
  return signal / (sigma_i2 * h_irs.cwiseProduct(v).squaredNorm() + sigma2);
}

double sinr_theta_form(const CVec& h, const CVec& h_irs, const CMat& H_i, const CVec& w,
                       const CVec& v, double sigma_i2, double sigma2) {
  const CMat theta = v.conjugate().asDiagonal();
  const cplx s = (h.adjoint() * w)(0) + (h_irs.adjoint() * theta * H_i * w)(0);
  const double leak = (h_irs.adjoint() * theta).squaredNorm();
  return std::norm(s) / (sigma_i2 * leak + sigma2);
}

namespace {

CVec used_v(const BeamState& s, const RobustConfig& cfg) {
  return cfg.use_irs ? s.v : CVec::Zero(s.v.size());
}

}  // namespace

SinrPair sinr(const BeamState& state, const ChannelSet& ch, const RobustConfig& cfg,
              const Perturbation& d) {
  const CVec v = used_v(state, cfg);
  const CMat H_i = perturbed_irs_channel(ch, d.omega_i, d.phi_i);
  const CVec h_u = perturbed_direct_channel(ch, true, d.omega_u, d.phi_u);
  const CVec h_e = perturbed_direct_channel(ch, false, d.omega_e, d.phi_e);
  return {sinr_theta_form(h_u, ch.h_iu, H_i, state.w, v, cfg.irs_noise(), cfg.sigma_u2),
          sinr_theta_form(h_e, ch.h_ie, H_i, state.w, v, cfg.irs_noise(), cfg.sigma_e2)};
}

SinrPair sinr_linearized(const BeamState& state, const ChannelSet& ch, const UncertaintySet& u,
                         const RobustConfig& cfg, const Perturbation& d) {
  const CVec v = used_v(state, cfg);
  const CMat dH = linearized_delta_H(u, ch, d.omega_i, d.phi_i);
  const CVec h_u = ch.h_u + linearized_delta_h(u, true, d.omega_u, d.phi_u);
  const CVec h_e = ch.h_e + linearized_delta_h(u, false, d.omega_e, d.phi_e);
  const CMat G_u = cascaded_channel(ch.h_iu, ch.H_i + dH);
  const CMat G_e = cascaded_channel(ch.h_ie, ch.H_i + dH);
  return {sinr_v_form(h_u, G_u, ch.h_iu, state.w, v, cfg.irs_noise(), cfg.sigma_u2),
          sinr_v_form(h_e, G_e, ch.h_ie, state.w, v, cfg.irs_noise(), cfg.sigma_e2)};
}

namespace {

int index_of(double x, double bound, int n) {
  if (!(bound > 0.0) || n <= 1) return 0;
  return static_cast<int>(std::lround((x + bound) / (2.0 * bound) * (n - 1)));
}

/// Extremes of the SINR over (direct omega, direct phi, irs omega, irs phi).
kernels::GridExtrema scan_link(const ChannelSet& ch, const CVec& w, const CVec& v, bool alice,
                               const kernels::GridPoint& bounds, const RobustConfig& cfg,
                               int n, bool parallel) {
  const CVec& h_irs = alice ? ch.h_iu : ch.h_ie;
  const double noise = cfg.irs_noise() * h_irs.cwiseProduct(v).squaredNorm() +
                       (alice ? cfg.sigma_u2 : cfg.sigma_e2);
  const CVec hv = h_irs.cwiseProduct(v);
  std::vector<cplx> direct(static_cast<std::size_t>(n * n)), cascade(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = kernels::grid_coordinate(bounds[0], n, i);
      const double b = kernels::grid_coordinate(bounds[1], n, j);
      direct[static_cast<std::size_t>(i * n + j)] = perturbed_direct_channel(ch, alice, a, b).dot(w);
      const double c = kernels::grid_coordinate(bounds[2], n, i);
      const double d = kernels::grid_coordinate(bounds[3], n, j);
      cascade[static_cast<std::size_t>(i * n + j)] = hv.dot(perturbed_irs_channel(ch, c, d) * w);
    }
  auto f = [&](const kernels::GridPoint& p) {
    const int i = index_of(p[0], bounds[0], n), j = index_of(p[1], bounds[1], n);
    const int k = index_of(p[2], bounds[2], n), l = index_of(p[3], bounds[3], n);
    return std::norm(direct[static_cast<std::size_t>(i * n + j)] +
                     cascade[static_cast<std::size_t>(k * n + l)]) / noise;
  };
  return parallel ? kernels::grid_extrema_parallel(bounds, n, f)
                  : kernels::grid_extrema_serial(bounds, n, f);
}

}  // namespace

PerformanceReport worst_case_secrecy_rate(const BeamState& state, const ChannelSet& ch,
                                          const JitterBounds& bounds, const RobustConfig& cfg,
                                          int grid_n, bool parallel) {
  if (grid_n < 2) throw InvalidArgument("worst_case_secrecy_rate: grid_n must be >= 2");
  bounds.validate();
  const CVec v = used_v(state, cfg);
  PerformanceReport r;
  const SinrPair nominal = sinr(state, ch, cfg);
  r.rate_u = rate(nominal.alice);
  r.rate_e = rate(nominal.eve);

  const auto a = scan_link(ch, state.w, v, true, {bounds.u1, bounds.u2, bounds.i1, bounds.i2},
                           cfg, grid_n, parallel);
  const auto e = scan_link(ch, state.w, v, false, {bounds.e1, bounds.e2, bounds.i1, bounds.i2},
                           cfg, grid_n, parallel);
  r.worst_rate_u = rate(a.min_value);
  r.worst_rate_e = rate(e.max_value);
  r.secrecy_rate = std::max(0.0, r.worst_rate_u - r.worst_rate_e);
  r.worst_alice = {a.argmin[0], a.argmin[1], 0.0, 0.0, a.argmin[2], a.argmin[3]};
  r.worst_eve = {0.0, 0.0, e.argmax[0], e.argmax[1], e.argmax[2], e.argmax[3]};
  r.amplification_power = cfg.use_irs ? amplification_power(ch.H_i, state.w, v, cfg.irs_noise()) : 0.0;
  return r;
}

bool AuditReport::passed(double tol) const {
  return alice_margin >= -tol && eve_margin >= -tol && amplification_margin >= -tol &&
         peak_margin >= -tol && magnitude_margin >= -tol;
}

AuditReport audit(const BeamState& state, const ChannelSet& ch, const UncertaintySet& u,
                  const RobustConfig& cfg, int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("audit: samples must be >= 1");
  const CVec v = used_v(state, cfg);
  const double inf = std::numeric_limits<double>::infinity();
  const double t_u = cfg.gamma_u();  // SINR thresholds
  const double t_e = cfg.gamma_e();

  AuditReport r;
  r.samples = samples;
  r.alice_margin = r.exact_alice_margin = inf;
  r.eve_margin = r.exact_eve_margin = inf;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    // The first sample is the nominal channel.
    const Perturbation d = s == 0 ? Perturbation{} : sample_perturbation(u.bounds, rng);
    const SinrPair lin = sinr_linearized(state, ch, u, cfg, d);
    const SinrPair ex = sinr(state, ch, cfg, d);
    r.alice_margin = std::min(r.alice_margin, (lin.alice - t_u) / t_u);
    r.exact_alice_margin = std::min(r.exact_alice_margin, (ex.alice - t_u) / t_u);
    if (cfg.eve_constraint) {
      r.eve_margin = std::min(r.eve_margin, (t_e - lin.eve) / t_e);
      r.exact_eve_margin = std::min(r.exact_eve_margin, (t_e - ex.eve) / t_e);
    }
  }
  if (cfg.amplification_constraint())
    r.amplification_margin = (cfg.p_f - amplification_power(ch.H_i, state.w, v, cfg.sigma_i2)) / cfg.p_f;
  r.peak_margin = (cfg.p_peak - state.w.squaredNorm()) / cfg.p_peak;
  const double limit = cfg.amplitude_limit();
  r.magnitude_margin = inf;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    r.magnitude_margin = std::min(r.magnitude_margin,
                                  limit > 0.0 ? (limit - std::abs(v(i))) / limit : -std::abs(v(i)));
  return r;
}

}  // namespace robustirs
