#include "robustirs/subproblems.hpp"

#include <cmath>

namespace robustirs {

LinkPair link_models(const ChannelSet& ch, const UncertaintySet& u, const RobustConfig& cfg) {
  LinkPair lp{link_model(ch, u, Link::Alice, cfg.use_irs), link_model(ch, u, Link::Eve, cfg.use_irs)};
  lp.alice.noise = cfg.sigma_u2;
  lp.eve.noise = cfg.sigma_e2;
  return lp;
}

double alice_threshold(const LinkModel& alice, const CVec& v, const RobustConfig& cfg) {
  return 1.0 + cfg.irs_noise() / alice.noise * alice.h_irs.cwiseProduct(v).squaredNorm();
}

double eve_threshold(const LinkModel& eve, const CVec& v, const RobustConfig& cfg) {
  return 1.0 + cfg.irs_noise() / eve.noise * eve.h_irs.cwiseProduct(v).squaredNorm();
}

namespace {

struct Multipliers {
  int h = -1, g = -1;
};

Multipliers add_multipliers(ProblemBuilder& pb, const LinkModel& m) {
  const KeptBlocks kept = kept_blocks(m);
  Multipliers out;
  if (kept.h) out.h = pb.add_variables(1);
  if (kept.g) out.g = pb.add_variables(1);
  return out;
}

void nonneg_var(ProblemBuilder& pb, int var) {
  if (var < 0) return;
  RowAffine g;
  g.constant = RVec::Zero(1);
  g.coef = RMat::Zero(1, var + 1);
  g.coef(0, var) = 1.0;
  pb.add_nonneg(g);
}

void finish(SubproblemResult& r, const ConicSolution& sol) {
  r.status = sol.status;
  r.solver_iterations = sol.iterations;
  r.residuals = sol.residuals;
}

CVec complex_from(const RVec& x, int off, Eigen::Index n) {
  CVec z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = cplx(x(off + i), x(off + n + i));
  return z;
}

}  // namespace

bool SubproblemResult::usable() const {
  if (ok()) return true;
  if (status != SolveStatus::NumericalFailure && status != SolveStatus::MaxIter) return false;
  return residuals.primal <= 1e-8 && residuals.dual <= 1e-6 && residuals.gap <= 1e-6;
}

SubproblemResult solve_w_subproblem(const CVec& v, const CVec& w_k, const ChannelSet& ch,
                                    const UncertaintySet& u, const RobustConfig& cfg) {
  const LinkPair lp = link_models(ch, u, cfg);
  const Eigen::Index n = w_k.size();
  const CVec v_used = cfg.use_irs ? v : CVec::Zero(ch.num_elements());

  ProblemBuilder pb;
  const int theta0 = pb.add_variables(static_cast<int>(2 * n));
  const int t = pb.add_variables(1);
  const Multipliers mu = add_multipliers(pb, lp.alice);
  Multipliers me;
  if (cfg.eve_constraint) me = add_multipliers(pb, lp.eve);
  const int nv = pb.num_vars();
  pb.set_cost(t, 1.0);

  // ||w|| <= t <= sqrt(P_peak)
  RowAffine norm;
  norm.constant = RVec::Zero(1 + 2 * n);
  norm.coef = RMat::Zero(1 + 2 * n, nv);
  norm.coef(0, t) = 1.0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) norm.coef(1 + i, theta0 + i) = 1.0;
  pb.add_soc(norm);
  RowAffine peak;
  peak.constant = RVec::Constant(1, std::sqrt(cfg.p_peak));
  peak.coef = RMat::Zero(1, nv);
  peak.coef(0, t) = -1.0;
  pb.add_nonneg(peak);
  for (int var : {mu.h, mu.g, me.h, me.g}) nonneg_var(pb, var);

  const Lemma1Terms ta = lemma1_terms(lp.alice, Link::Alice, w_k, v_used, FreeBlock::W);
  pb.add_psd(build_alice_lmi(ta, lp.alice, lp.alice.noise * cfg.gamma_u(),
                             ScalarAffine{alice_threshold(lp.alice, v_used, cfg), {}},
                             LmiVars{theta0, mu.h, mu.g, -1}));
  if (cfg.eve_constraint) {
    const Lemma1Terms te = lemma1_terms(lp.eve, Link::Eve, w_k, v_used, FreeBlock::W);
    pb.add_psd(build_eve_lmi(te, lp.eve, lp.eve.noise * cfg.gamma_e(),
                             ScalarAffine{eve_threshold(lp.eve, v_used, cfg), {}},
                             LmiVars{theta0, me.h, me.g, -1}, cfg.eve_bound));
  }
  if (cfg.amplification_constraint())
    pb.add_psd(build_amp_lmi_w(ch.H_i, v_used, cfg.sigma_i2, cfg.p_f, theta0));

  const ConicSolution sol = solve(pb.build(), cfg.solver);
  SubproblemResult r;
  finish(r, sol);
  r.v = v_used;
  if (r.usable()) {
    r.w = complex_from(sol.x, theta0, n);
    r.power = r.w.squaredNorm();
  }
  return r;
}

SubproblemResult solve_v_subproblem(const CVec& w, const CVec& v_k, const ChannelSet& ch,
                                    const UncertaintySet& u, const RobustConfig& cfg) {
  if (!cfg.use_irs) throw InvalidArgument("solve_v_subproblem: configuration has no IRS");
  const LinkPair lp = link_models(ch, u, cfg);
  const Eigen::Index m = v_k.size();
  const double sigma_i2 = cfg.irs_noise();

  ProblemBuilder pb;
  const int theta0 = pb.add_variables(static_cast<int>(2 * m));
  const Multipliers mu = add_multipliers(pb, lp.alice);
  Multipliers me;
  if (cfg.eve_constraint) me = add_multipliers(pb, lp.eve);
  const int alpha_u = pb.add_variables(1);
  const int alpha_e = cfg.eve_constraint ? pb.add_variables(1) : -1;
  const int s_tilde = sigma_i2 > 0.0 ? pb.add_variables(1) : -1;
  const int nv = pb.num_vars();
  pb.set_cost(alpha_u, -1.0);
  if (alpha_e >= 0) pb.set_cost(alpha_e, -1.0);
  for (int var : {mu.h, mu.g, me.h, me.g, alpha_u, alpha_e}) nonneg_var(pb, var);

  // Alice: T_U / c_U <= 1 + s~,  s~ >= (sigma_I^2 / sigma_U^2) ||D_U v||^2.
  ScalarAffine thr_u{1.0, {}};
  if (s_tilde >= 0) {
    thr_u.terms.emplace_back(s_tilde, 1.0);
    const RVec d = lp.alice.h_irs.cwiseAbs() * std::sqrt(sigma_i2 / lp.alice.noise);
    RowAffine rsoc;
    rsoc.constant = RVec::Zero(2 + 2 * m);
    rsoc.constant(0) = 1.0;
    rsoc.constant(1) = -1.0;
    rsoc.coef = RMat::Zero(2 + 2 * m, nv);
    rsoc.coef(0, s_tilde) = 1.0;
    rsoc.coef(1, s_tilde) = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      rsoc.coef(2 + i, theta0 + i) = 2.0 * d(i);
      rsoc.coef(2 + m + i, theta0 + m + i) = 2.0 * d(i);
    }
    pb.add_soc(rsoc);
  }
  const Lemma1Terms ta = lemma1_terms(lp.alice, Link::Alice, w, v_k, FreeBlock::V);
  pb.add_psd(build_alice_lmi(ta, lp.alice, lp.alice.noise * cfg.gamma_u(), thr_u,
                             LmiVars{theta0, mu.h, mu.g, alpha_u}));

  if (cfg.eve_constraint) {
    // Tangent minorant of the convex T_E / c_E at v_k.
    const double r = sigma_i2 / lp.eve.noise;
    const RVec d2 = lp.eve.h_irs.cwiseAbs2();
    ScalarAffine thr_e{1.0 - r * lp.eve.h_irs.cwiseProduct(v_k).squaredNorm(), {}};
    if (r > 0.0)
      for (Eigen::Index i = 0; i < m; ++i) {
        thr_e.terms.emplace_back(theta0 + i, 2.0 * r * d2(i) * v_k(i).real());
        thr_e.terms.emplace_back(theta0 + m + i, 2.0 * r * d2(i) * v_k(i).imag());
      }
    const Lemma1Terms te = lemma1_terms(lp.eve, Link::Eve, w, v_k, FreeBlock::V);
    pb.add_psd(build_eve_lmi(te, lp.eve, lp.eve.noise * cfg.gamma_e(), thr_e,
                             LmiVars{theta0, me.h, me.g, alpha_e}, cfg.eve_bound));
  }
  if (cfg.amplification_constraint())
    pb.add_soc(build_amp_soc_v(ch.H_i, w, cfg.sigma_i2, cfg.p_f, theta0, nv));
  for (const auto& g : build_magnitude_socs(static_cast<int>(m), cfg.amplitude_limit(), theta0, nv))
    pb.add_soc(g);

  const ConicSolution sol = solve(pb.build(), cfg.solver);
  SubproblemResult res;
  finish(res, sol);
  res.w = w;
  res.power = w.squaredNorm();
  if (res.usable()) {
    res.v = complex_from(sol.x, theta0, m);
    res.alpha_u = std::max(0.0, sol.x(alpha_u)) * lp.alice.noise * cfg.gamma_u();
    if (alpha_e >= 0) res.alpha_e = std::max(0.0, sol.x(alpha_e)) * lp.eve.noise * cfg.gamma_e();
  }
  return res;
}

}  // namespace robustirs
