#include "robustirs/lmi_builders.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace robustirs {

CMat HermitianLMI::evaluate(const RVec& x) const {
  CMat out = constant;
  for (const auto& t : terms) out += x(t.var) * t.coef;
  return out;
}

RVec RowAffine::evaluate(const RVec& x) const {
  RVec out = constant;
  if (coef.cols() > 0) out += coef * x.head(coef.cols());
  return out;
}

int ProblemBuilder::add_variables(int count) {
  const int first = num_vars_;
  num_vars_ += count;
  return first;
}

void ProblemBuilder::set_cost(int var, double value) { cost_.emplace_back(var, value); }

namespace {

std::vector<std::pair<int, RVec>> columns_of(const RMat& coef) {
  std::vector<std::pair<int, RVec>> cols;
  for (Eigen::Index k = 0; k < coef.cols(); ++k)
    if (coef.col(k).squaredNorm() > 0.0) cols.emplace_back(static_cast<int>(k), -coef.col(k));
  return cols;
}

RVec embed_svec(const CMat& H) {
  const CMat sym = 0.5 * (H + H.adjoint());
  return svec(hermitian_to_real(sym, std::numeric_limits<double>::infinity()));
}

}  // namespace

void ProblemBuilder::add_nonneg(const RowAffine& g) {
  blocks_.push_back({ConeBlock::nonneg(static_cast<int>(g.constant.size())), g.constant,
                     columns_of(g.coef)});
}

void ProblemBuilder::add_soc(const RowAffine& g) {
  blocks_.push_back({ConeBlock::soc(static_cast<int>(g.constant.size())), g.constant,
                     columns_of(g.coef)});
}

bool hermitian_factor(const CMat& F, const CMat& B, CMat& V, RVec& lambda) {
  const Eigen::Index n = F.rows();
  const double fmax = F.size() ? F.cwiseAbs().maxCoeff() : 0.0;
  if (B.cols() == 0 || B.rows() != n) return false;
  Eigen::ColPivHouseholderQR<CMat> qr(B);
  qr.setThreshold(1e-12);
  const Eigen::Index r = qr.rank();
  const CMat Q = qr.householderQ() * CMat::Identity(n, r);
  const CMat C = Q.adjoint() * F * Q;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (C + C.adjoint()));
  V = Q * es.eigenvectors();
  lambda = es.eigenvalues();
  const double err = (F - V * lambda.asDiagonal() * V.adjoint()).cwiseAbs().maxCoeff();
  return err <= 1e-10 * (1.0 + fmax);
}

void ProblemBuilder::add_psd(const HermitianLMI& lmi) {
  const int order = lmi.order();
  const int cone = static_cast<int>(blocks_.size());
  Block blk{ConeBlock::psd(2 * order), embed_svec(lmi.constant), {}};
  // Terms of one variable are summed; their spans are concatenated.
  std::map<int, std::pair<CMat, std::vector<const CMat*>>> by_var;
  std::map<int, bool> spanned;
  for (const auto& t : lmi.terms) {
    if (t.coef.rows() != order || t.coef.cols() != order)
      throw DimensionMismatch("add_psd: coefficient order differs from the constant");
    auto [it, fresh] = by_var.try_emplace(t.var, CMat::Zero(order, order), std::vector<const CMat*>{});
    it->second.first += t.coef;
    it->second.second.push_back(&t.span);
    spanned[t.var] = (fresh || spanned[t.var]) && t.span.size() > 0;
  }
  for (const auto& [var, entry] : by_var) {
    const CMat& F = entry.first;
    blk.cols.emplace_back(var, -embed_svec(F));
    if (!spanned[var]) continue;
    Eigen::Index cols = 0;
    for (const CMat* sp : entry.second) cols += sp->cols();
    CMat B(order, cols);
    cols = 0;
    for (const CMat* sp : entry.second) B.middleCols(cols, sp->cols()) = *sp, cols += sp->cols();
    CMat V;
    RVec lam;
    if (!hermitian_factor(0.5 * (F + F.adjoint()), B, V, lam)) continue;
    // Real embedding of q q^H: [a; b][a; b]' + [-b; a][-b; a]', q = a + jb.
    PsdFactor f;
    f.cone = cone;
    f.var = var;
    const Eigen::Index r = V.cols();
    f.U.resize(2 * order, 2 * r);
    f.d.resize(2 * r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const RVec a = V.col(i).real(), b = V.col(i).imag();
      f.U.col(2 * i) << a, b;
      f.U.col(2 * i + 1) << -b, a;
      f.d(2 * i) = f.d(2 * i + 1) = -lam(i);
    }
    factors_.push_back(std::move(f));
  }
  blocks_.push_back(std::move(blk));
}

ConicProblem ProblemBuilder::build() const {
  ConicProblem p;
  p.c = RVec::Zero(num_vars_);
  for (const auto& [var, value] : cost_) p.c(var) += value;
  Eigen::Index rows = 0;
  for (const auto& b : blocks_) rows += b.b.size();
  p.A = RMat::Zero(rows, num_vars_);
  p.b.resize(rows);
  Eigen::Index off = 0;
  for (const auto& b : blocks_) {
    const Eigen::Index r = b.b.size();
    p.b.segment(off, r) = b.b;
    for (const auto& [var, col] : b.cols) {
      if (var < 0 || var >= num_vars_) throw InvalidArgument("ProblemBuilder: variable out of range");
      p.A.col(var).segment(off, r) += col;
    }
    p.cones.push_back(b.cone);
    off += r;
  }
  p.psd_factors = factors_;
  return p;
}

KeptBlocks kept_blocks(const LinkModel& model) { return {model.xi_h > 0.0, model.xi_g > 0.0}; }

namespace {

/// Kept uncertainty coordinates: the LMI rows stand for y = T^H x. Columns of
/// T are xi_h e_i for dh and, for vec(conj dG), xi_g times an orthonormal basis
/// of the subspace holding every p vector of the lemma terms (or all unit
/// vectors when not compressing). On the orthogonal complement the LMI reduces
/// to m_g >= 0, which the subproblems impose anyway.
struct Coordinates {
  CMat T;
  int n_h = 0;  // leading columns that belong to dh
  [[nodiscard]] Eigen::Index size() const { return T.cols(); }
};

Coordinates coordinates(const LinkModel& m, const Lemma1Terms& t, bool compress) {
  const KeptBlocks kept = kept_blocks(m);
  const Eigen::Index n = m.h.size();
  const Eigen::Index ng = n * m.G.rows();
  CMat basis;
  if (kept.g) {
    if (compress) {
      CMat P(ng, 2 + static_cast<Eigen::Index>(t.p.coeff.size()));
      P.col(0) = t.p_k.tail(ng);
      P.col(1) = t.p.constant.tail(ng);
      for (std::size_t j = 0; j < t.p.coeff.size(); ++j)
        P.col(2 + static_cast<Eigen::Index>(j)) = t.p.coeff[j].tail(ng);
      Eigen::ColPivHouseholderQR<CMat> qr(P);
      qr.setThreshold(1e-13);
      const Eigen::Index r = std::max<Eigen::Index>(qr.rank(), 1);
      basis = qr.householderQ() * CMat::Identity(ng, r);
    } else {
      basis = CMat::Identity(ng, ng);
    }
  }
  Coordinates out;
  out.n_h = kept.h ? static_cast<int>(n) : 0;
  out.T = CMat::Zero(n + ng, out.n_h + basis.cols());
  for (int i = 0; i < out.n_h; ++i) out.T(i, i) = m.xi_h;
  if (kept.g) out.T.bottomRightCorner(ng, basis.cols()) = m.xi_g * basis;
  return out;
}

/// [[T^H A T, T^H a], [., a0]] / c.
CMat quadratic_block(const Coordinates& co, const CMat& A, const CVec& a, double a0, double c) {
  const Eigen::Index k = co.size();
  CMat out(k + 1, k + 1);
  out.topLeftCorner(k, k) = co.T.adjoint() * A * co.T / c;
  out.topRightCorner(k, 1) = co.T.adjoint() * a / c;
  out.bottomLeftCorner(1, k) = out.topRightCorner(k, 1).adjoint();
  out(k, k) = a0 / c;
  return out;
}

/// T^H p, zero-padded to `order`.
CVec kept_vector(const Coordinates& co, const CVec& p, Eigen::Index order) {
  CVec out = CVec::Zero(order);
  out.head(co.size()) = co.T.adjoint() * p;
  return out;
}

CMat unit_span(Eigen::Index order, Eigen::Index i) {
  CMat e = CMat::Zero(order, 1);
  e(i, 0) = 1.0;
  return e;
}

/// Range of a quadratic_block coefficient built from p_k and p_j.
CMat quadratic_span(const Coordinates& co, const CVec& p_k, const CVec& p_j) {
  const Eigen::Index order = co.size() + 1;
  CMat B(order, 3);
  B.col(0) = kept_vector(co, p_k, order);
  B.col(1) = kept_vector(co, p_j, order);
  B.col(2) = unit_span(order, order - 1);
  return B;
}

// +1 on the multiplier's diagonal block, -1 in the corner.
void add_multipliers(HermitianLMI& lmi, const Coordinates& co, const LmiVars& vars,
                     Eigen::Index corner) {
  const int order = lmi.order();
  const int k = static_cast<int>(co.size());
  auto add_block = [&](int var, int from, int to) {
    if (var < 0 || from == to) return;
    CMat e = CMat::Zero(order, order);
    for (int i = from; i < to; ++i) e(i, i) = 1.0;
    e(corner, corner) = -1.0;
    lmi.add(var, e);
  };
  add_block(vars.mult_h, 0, co.n_h);
  add_block(vars.mult_g, co.n_h, k);
  if (vars.slack >= 0) {
    CMat e = CMat::Zero(order, order);
    e(corner, corner) = -1.0;
    lmi.add(vars.slack, e, unit_span(order, corner));
  }
}

void add_threshold(HermitianLMI& lmi, const ScalarAffine& thr, Eigen::Index corner, double sign) {
  lmi.constant(corner, corner) += sign * thr.constant;
  for (const auto& [var, coef] : thr.terms) {
    CMat e = CMat::Zero(lmi.order(), lmi.order());
    e(corner, corner) = sign * coef;
    lmi.add(var, e, unit_span(lmi.order(), corner));
  }
}

void check_multipliers(const Coordinates& co, const LmiVars& vars) {
  const bool has_h = co.n_h > 0;
  const bool has_g = static_cast<int>(co.size()) > co.n_h;
  if (has_h != (vars.mult_h >= 0) || has_g != (vars.mult_g >= 0))
    throw InvalidArgument("robust LMI: multipliers must match the nonzero radii");
}

}  // namespace

HermitianLMI build_alice_lmi(const Lemma1Terms& t, const LinkModel& model, double c,
                             const ScalarAffine& threshold, const LmiVars& vars, bool compress) {
  const Coordinates co = coordinates(model, t, compress);
  check_multipliers(co, vars);
  const Eigen::Index k = co.size();
  HermitianLMI lmi;
  lmi.constant = quadratic_block(co, t.A_tilde.constant, t.a_tilde.constant, t.a0.constant, c);
  for (std::size_t j = 0; j < t.A_tilde.coeff.size(); ++j)
    lmi.add(vars.theta0 + static_cast<int>(j),
            quadratic_block(co, t.A_tilde.coeff[j], t.a_tilde.coeff[j], t.a0.coeff[j], c),
            quadratic_span(co, t.p_k, t.p.coeff[j]));
  add_threshold(lmi, threshold, k, -1.0);
  add_multipliers(lmi, co, vars, k);
  return lmi;
}

HermitianLMI build_eve_lmi(const Lemma1Terms& t, const LinkModel& model, double c,
                           const ScalarAffine& threshold, const LmiVars& vars, EveBound bound,
                           bool compress) {
  const Coordinates co = coordinates(model, t, compress);
  check_multipliers(co, vars);
  const Eigen::Index k = co.size();
  HermitianLMI lmi;

  if (bound == EveBound::Linearized) {
    lmi.constant = -quadratic_block(co, t.A_tilde.constant, t.a_tilde.constant, t.a0.constant, c);
    for (std::size_t j = 0; j < t.A_tilde.coeff.size(); ++j)
      lmi.add(vars.theta0 + static_cast<int>(j),
              -quadratic_block(co, t.A_tilde.coeff[j], t.a_tilde.coeff[j], t.a0.coeff[j], c),
              quadratic_span(co, t.p_k, t.p.coeff[j]));
    add_threshold(lmi, threshold, k, 1.0);
    add_multipliers(lmi, co, vars, k);
    return lmi;
  }

  // Rows: kept coordinates, then the threshold row (k), then the lift row (k + 1).
  const double rc = 1.0 / std::sqrt(c);
  auto lift_column = [&](const CVec& p, cplx s) {
    CMat out = CMat::Zero(k + 2, k + 2);
    out.block(0, k + 1, k, 1) = co.T.adjoint() * p * rc;
    out(k, k + 1) = s * rc;
    for (Eigen::Index i = 0; i <= k; ++i) out(k + 1, i) = std::conj(out(i, k + 1));
    return out;
  };
  lmi.constant = lift_column(t.p.constant, t.s.constant);
  lmi.constant(k + 1, k + 1) = 1.0;
  for (std::size_t j = 0; j < t.p.coeff.size(); ++j) {
    CMat span(k + 2, 2);
    span.col(0) = kept_vector(co, t.p.coeff[j], k + 2);
    span(k, 0) = t.s.coeff[j];
    span.col(1) = unit_span(k + 2, k + 1);
    lmi.add(vars.theta0 + static_cast<int>(j), lift_column(t.p.coeff[j], t.s.coeff[j]), span);
  }
  add_threshold(lmi, threshold, k, 1.0);
  add_multipliers(lmi, co, vars, k);
  return lmi;
}

double amplification_power(const CMat& H_i, const CVec& w, const CVec& v, double sigma_i2) {
  const CVec u = v.conjugate().cwiseProduct(H_i * w);
  return u.squaredNorm() + sigma_i2 * v.squaredNorm();
}

HermitianLMI build_amp_lmi_w(const CMat& H_i, const CVec& v, double sigma_i2, double p_f,
                             int theta0) {
  const Eigen::Index m = H_i.rows(), n = H_i.cols();
  if (v.size() != m) throw DimensionMismatch("build_amp_lmi_w: v must have M entries");
  const double rp = 1.0 / std::sqrt(p_f);
  HermitianLMI lmi;
  lmi.constant = CMat::Identity(m + 1, m + 1);
  lmi.constant(0, 0) = 1.0 - sigma_i2 * v.squaredNorm() / p_f;
  const cplx I(0.0, 1.0);
  for (int part = 0; part < 2; ++part)
    for (Eigen::Index j = 0; j < n; ++j) {
      const CVec u = (part == 0 ? cplx(1.0) : I) * v.conjugate().cwiseProduct(H_i.col(j)) * rp;
      CMat e = CMat::Zero(m + 1, m + 1);
      e.block(1, 0, m, 1) = u;
      e.block(0, 1, 1, m) = u.adjoint();
      CMat span = CMat::Zero(m + 1, 2);
      span.block(1, 0, m, 1) = u;
      span(0, 1) = 1.0;
      lmi.add(theta0 + static_cast<int>(part * n + j), e, span);
    }
  return lmi;
}

RowAffine build_amp_soc_v(const CMat& H_i, const CVec& w, double sigma_i2, double p_f,
                          int theta0, int num_vars) {
  const Eigen::Index m = H_i.rows();
  const RVec f = ((H_i * w).cwiseAbs2().array() + sigma_i2).sqrt().matrix() / std::sqrt(p_f);
  RowAffine g;
  g.constant = RVec::Zero(1 + 2 * m);
  g.constant(0) = 1.0;
  g.coef = RMat::Zero(1 + 2 * m, num_vars);
  for (Eigen::Index i = 0; i < m; ++i) {
    g.coef(1 + i, theta0 + i) = f(i);
    g.coef(1 + m + i, theta0 + m + i) = f(i);
  }
  return g;
}

std::vector<RowAffine> build_magnitude_socs(int num_elements, double limit, int theta0,
                                            int num_vars) {
  std::vector<RowAffine> out;
  for (int i = 0; i < num_elements; ++i) {
    RowAffine g;
    g.constant = RVec::Zero(3);
    g.constant(0) = limit;
    g.coef = RMat::Zero(3, num_vars);
    g.coef(1, theta0 + i) = 1.0;
    g.coef(2, theta0 + num_elements + i) = 1.0;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace robustirs
