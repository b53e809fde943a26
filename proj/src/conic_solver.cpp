#include "robustirs/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "robustirs/kernels.hpp"

namespace robustirs {


const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void ConicProblem::validate() const {
  const Eigen::Index n = c.size();
  if (A.cols() != n)
    throw DimensionMismatch("ConicProblem: A has " + std::to_string(A.cols()) +
                            " columns, c has " + std::to_string(n) + " entries");
  if (A.rows() != b.size()) throw DimensionMismatch("ConicProblem: rows of A and b differ");
  long total = 0;
  for (const auto& cone : cones) {
    if (cone.dim < 1) throw InvalidArgument("ConicProblem: empty cone block");
    if (cone.kind == ConeKind::SOC && cone.dim < 1)
      throw InvalidArgument("ConicProblem: SOC block needs at least one row");
    total += cone.rows();
  }
  if (total != A.rows())
    throw DimensionMismatch("ConicProblem: cone rows sum to " + std::to_string(total) +
                            " but A has " + std::to_string(A.rows()) + " rows");
  if (!c.allFinite() || !A.allFinite() || !b.allFinite())
    throw InvalidArgument("ConicProblem: non-finite data");
  std::vector<int> offsets;
  int off = 0;
  for (const auto& cone : cones) offsets.push_back(off), off += cone.rows();
  for (const auto& f : psd_factors) {
    if (f.cone < 0 || f.cone >= static_cast<int>(cones.size()) || cones[f.cone].kind != ConeKind::PSD)
      throw InvalidArgument("ConicProblem: PSD factor refers to a non-PSD cone");
    if (f.var < 0 || f.var >= n) throw InvalidArgument("ConicProblem: PSD factor variable out of range");
    if (f.U.rows() != cones[f.cone].dim || f.d.size() != f.U.cols())
      throw DimensionMismatch("ConicProblem: PSD factor has wrong shape");
    const RVec col = A.col(f.var).segment(offsets[f.cone], cones[f.cone].rows());
    const RVec rec = svec(f.U * f.d.asDiagonal() * f.U.transpose());
    if ((rec - col).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + col.cwiseAbs().maxCoeff()))
      throw InvalidArgument("ConicProblem: PSD factor does not match its column");
  }
}

KKTResiduals kkt_residuals(const ConicProblem& problem, const ConicSolution& sol) {
  KKTResiduals r;
  const RVec& x = sol.x;
  const RVec& y = sol.y;
  const RVec& s = sol.s;
  r.primal = (problem.A * x + s - problem.b).norm() / (1.0 + problem.b.norm());
  r.dual = (problem.A.transpose() * y + problem.c).norm() / (1.0 + problem.c.norm());
  const double cx = problem.c.dot(x);
  const double by = problem.b.dot(y);
  r.gap = std::max(std::abs(cx + by), std::abs(s.dot(y))) / (1.0 + std::abs(cx) + std::abs(by));
  return r;
}

namespace {

constexpr double kTiny = 1e-300;

struct Split {
  RMat A, G;
  RVec b, h;
  std::vector<int> eq_rows, cone_rows;
  std::vector<ConeBlock> blocks;
};

Split split_rows(const ConicProblem& p) {
  Split sp;
  int row = 0;
  for (const auto& cone : p.cones) {
    const int r = cone.rows();
    auto& dst = cone.kind == ConeKind::Zero ? sp.eq_rows : sp.cone_rows;
    for (int k = 0; k < r; ++k) dst.push_back(row + k);
    if (cone.kind != ConeKind::Zero) sp.blocks.push_back(cone);
    row += r;
  }
  const Eigen::Index n = p.A.cols();
  sp.A.resize(static_cast<Eigen::Index>(sp.eq_rows.size()), n);
  sp.b.resize(static_cast<Eigen::Index>(sp.eq_rows.size()));
  for (std::size_t i = 0; i < sp.eq_rows.size(); ++i) {
    sp.A.row(static_cast<Eigen::Index>(i)) = p.A.row(sp.eq_rows[i]);
    sp.b(static_cast<Eigen::Index>(i)) = p.b(sp.eq_rows[i]);
  }
  sp.G.resize(static_cast<Eigen::Index>(sp.cone_rows.size()), n);
  sp.h.resize(static_cast<Eigen::Index>(sp.cone_rows.size()));
  for (std::size_t i = 0; i < sp.cone_rows.size(); ++i) {
    sp.G.row(static_cast<Eigen::Index>(i)) = p.A.row(sp.cone_rows[i]);
    sp.h(static_cast<Eigen::Index>(i)) = p.b(sp.cone_rows[i]);
  }
  return sp;
}

struct Triple {
  RVec x, y, z;
};

class Solver {
 public:
  Solver(const ConicProblem& problem, const SolverOptions& options)
      : problem_(problem), opt_(options), sp_(split_rows(problem)), cones_(sp_.blocks) {
    if (problem.psd_factors.empty()) return;
    std::vector<int> block_of(problem.cones.size(), -1);
    int nb = 0;
    for (std::size_t i = 0; i < problem.cones.size(); ++i)
      if (problem.cones[i].kind != ConeKind::Zero) block_of[i] = nb++;
    factors_.resize(static_cast<std::size_t>(problem.num_vars()));
    for (const auto& f : problem.psd_factors)
      factors_[static_cast<std::size_t>(f.var)].push_back({block_of[f.cone], &f.U, &f.d});
  }

  ConicSolution run();

 private:
  void factor(const NTScaling& W);
  void factor_reduced();
  RVec solve_reduced(const RVec& rhs) const;
  Triple solve3(const NTScaling& W, const RVec& r1, const RVec& r2, const RVec& r3);
  Triple refine(const NTScaling& W, const RVec& r1, const RVec& r2, const RVec& r3,
                double& err) const;
  Triple solve3_once(const NTScaling& W, const RVec& r1, const RVec& r2, const RVec& r3) const;
  ConicSolution finish(SolveStatus status, int iters) const;

  const ConicProblem& problem_;
  SolverOptions opt_;
  Split sp_;
  ConeSet cones_;

  kernels::ColumnFactors factors_;
  RMat Gt_;
  double reg_ = 0.0;
  Eigen::PartialPivLU<RMat> lu_;
  // Once the normal equations lose too many digits the reduced system is
  // solved through R (R'R = H) instead, for the rest of the solve.
  bool qr_mode_ = false;
  RMat R_;
  Eigen::PartialPivLU<RMat> schur_;

  RVec x_, y_, z_, s_;
  double tau_ = 1.0, kappa_ = 1.0;

  // Iterate with the smallest max(pres, dres, gap), returned on MaxIter and
  // NumericalFailure instead of the last one.
  struct Snapshot {
    RVec x, y, z, s;
    double tau = 1.0, kappa = 1.0;
    double merit = std::numeric_limits<double>::infinity();
  } best_;
  ConicSolution finish_best(SolveStatus status, int iters);
};

void Solver::factor(const NTScaling& W) {
  if (W.identity_scaling())
    Gt_ = sp_.G;
  else if (opt_.parallel)
    kernels::scale_columns_parallel(W, sp_.G, Gt_, factors_.empty() ? nullptr : &factors_);
  else
    kernels::scale_columns_serial(W, sp_.G, Gt_, factors_.empty() ? nullptr : &factors_);
  factor_reduced();
}

void Solver::factor_reduced() {
  const Eigen::Index n = Gt_.cols();
  const Eigen::Index p = sp_.A.rows();
  if (qr_mode_) {
    double scale = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) scale = std::max(scale, 1.0 + Gt_.col(j).squaredNorm());
    reg_ = 1e-13 * scale;
    R_ = opt_.parallel ? kernels::triangular_factor_parallel(Gt_, reg_)
                       : kernels::triangular_factor_serial(Gt_, reg_);
    if (p > 0) {
      // A H^{-1} A' + reg I
      RMat S = sp_.A * [&] {
        RMat X = sp_.A.transpose();
        for (Eigen::Index j = 0; j < p; ++j) X.col(j) = solve_reduced(X.col(j));
        return X;
      }();
      S.diagonal().array() += reg_;
      schur_.compute(S);
    }
    return;
  }
  const RMat H = opt_.parallel ? kernels::normal_matrix_parallel(Gt_)
                               : kernels::normal_matrix_serial(Gt_);
  RMat K = RMat::Zero(n + p, n + p);
  const double scale = 1.0 + (n > 0 ? H.diagonal().cwiseAbs().maxCoeff() : 0.0);
  reg_ = 1e-13 * scale;
  K.topLeftCorner(n, n) = H;
  K.topLeftCorner(n, n).diagonal().array() += reg_;
  if (p > 0) {
    K.topRightCorner(n, p) = sp_.A.transpose();
    K.bottomLeftCorner(p, n) = sp_.A;
    K.bottomRightCorner(p, p).diagonal().array() -= reg_;
  }
  lu_.compute(K);
}

// (R'R)^{-1} rhs
RVec Solver::solve_reduced(const RVec& rhs) const {
  const auto R = R_.triangularView<Eigen::Upper>();
  return R.solve(R.transpose().solve(rhs));
}

Triple Solver::solve3_once(const NTScaling& W, const RVec& r1, const RVec& r2,
                           const RVec& r3) const {
  const Eigen::Index n = Gt_.cols();
  const Eigen::Index p = sp_.A.rows();
  const RVec t3 = W.apply_WinvT(r3);
  const RVec rhs1 = r1 + Gt_.transpose() * t3;
  Triple t;
  if (qr_mode_) {
    if (p > 0) {
      t.y = schur_.solve(sp_.A * solve_reduced(rhs1) - r2);
      t.x = solve_reduced(rhs1 - sp_.A.transpose() * t.y);
    } else {
      t.y = RVec::Zero(0);
      t.x = solve_reduced(rhs1);
    }
  } else {
    RVec rhs(n + p);
    rhs.head(n) = rhs1;
    rhs.tail(p) = r2;
    const RVec sol = lu_.solve(rhs);
    t.x = sol.head(n);
    t.y = sol.tail(p);
  }
  t.z = W.apply_Winv(Gt_ * t.x - t3);
  return t;
}

Triple Solver::refine(const NTScaling& W, const RVec& r1, const RVec& r2, const RVec& r3,
                      double& err) const {
  Triple t = solve3_once(W, r1, r2, r3);
  const double rhs = std::sqrt(r1.squaredNorm() + r2.squaredNorm() + r3.squaredNorm());
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0;; ++k) {
    const RVec e1 = r1 - sp_.A.transpose() * t.y - sp_.G.transpose() * t.z;
    const RVec e2 = r2 - sp_.A * t.x;
    const RVec e3 = r3 - (sp_.G * t.x - W.apply_WT(W.apply_W(t.z)));
    err = std::sqrt(e1.squaredNorm() + e2.squaredNorm() + e3.squaredNorm());
    // Stop once converged or no longer contracting.
    if (k == opt_.refinement_steps || err <= 1e-15 * rhs || err > 0.5 * prev) break;
    prev = err;
    const Triple d = solve3_once(W, e1, e2, e3);
    t.x += d.x;
    t.y += d.y;
    t.z += d.z;
  }
  return t;
}

Triple Solver::solve3(const NTScaling& W, const RVec& r1, const RVec& r2, const RVec& r3) {
  double err = 0.0;
  Triple t = refine(W, r1, r2, r3, err);
  if (qr_mode_ || W.identity_scaling()) return t;
  const double rhs = std::sqrt(r1.squaredNorm() + r2.squaredNorm() + r3.squaredNorm());
  if (err <= 1e-10 * (1.0 + rhs)) return t;
  if (opt_.verbose) std::fprintf(stderr, "    switching to QR (residual %.2e)\n", err);
  qr_mode_ = true;
  factor_reduced();
  return refine(W, r1, r2, r3, err);
}

ConicSolution Solver::finish(SolveStatus status, int iters) const {
  ConicSolution sol;
  sol.status = status;
  sol.iterations = iters;
  const Eigen::Index n = problem_.A.cols();
  const Eigen::Index rows = problem_.A.rows();
  sol.x = RVec::Zero(n);
  sol.y = RVec::Zero(rows);
  sol.s = RVec::Zero(rows);
  if (x_.size() != n) return sol;
  double scale = 1.0;
  if (status == SolveStatus::PrimalInfeasible) {
    const double q = -(sp_.b.dot(y_) + sp_.h.dot(z_));
    scale = q > 0.0 ? 1.0 / q : 1.0;
    for (std::size_t i = 0; i < sp_.eq_rows.size(); ++i)
      sol.y(sp_.eq_rows[i]) = scale * y_(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < sp_.cone_rows.size(); ++i)
      sol.y(sp_.cone_rows[i]) = scale * z_(static_cast<Eigen::Index>(i));
    sol.objective = std::numeric_limits<double>::infinity();
    sol.residuals = kkt_residuals(problem_, sol);
    return sol;
  }
  if (status == SolveStatus::DualInfeasible) {
    const double q = -problem_.c.dot(x_);
    scale = q > 0.0 ? 1.0 / q : 1.0;
    sol.x = scale * x_;
    for (std::size_t i = 0; i < sp_.cone_rows.size(); ++i)
      sol.s(sp_.cone_rows[i]) = scale * s_(static_cast<Eigen::Index>(i));
    sol.objective = -std::numeric_limits<double>::infinity();
    sol.residuals = kkt_residuals(problem_, sol);
    return sol;
  }
  scale = 1.0 / std::max(tau_, kTiny);
  sol.x = scale * x_;
  for (std::size_t i = 0; i < sp_.eq_rows.size(); ++i)
    sol.y(sp_.eq_rows[i]) = scale * y_(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < sp_.cone_rows.size(); ++i) {
    sol.y(sp_.cone_rows[i]) = scale * z_(static_cast<Eigen::Index>(i));
    sol.s(sp_.cone_rows[i]) = scale * s_(static_cast<Eigen::Index>(i));
  }
  sol.objective = problem_.c.dot(sol.x);
  sol.residuals = kkt_residuals(problem_, sol);
  return sol;
}

ConicSolution Solver::finish_best(SolveStatus status, int iters) {
  if (std::isfinite(best_.merit)) {
    x_ = best_.x;
    y_ = best_.y;
    z_ = best_.z;
    s_ = best_.s;
    tau_ = best_.tau;
    kappa_ = best_.kappa;
  }
  return finish(status, iters);
}

ConicSolution Solver::run() {
  const RVec& c = problem_.c;
  const RVec& b = sp_.b;
  const RVec& h = sp_.h;
  const RMat& A = sp_.A;
  const RMat& G = sp_.G;
  const Eigen::Index n = c.size();
  const Eigen::Index p = b.size();
  const Eigen::Index m = h.size();
  const double nu = cones_.degree();
  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, h.norm());
  const double bnorm = std::sqrt(b.squaredNorm() + h.squaredNorm());
  const RVec e = cones_.identity();

  // Starting point from two least-squares solves with W = I.
  {
    const NTScaling I(cones_);
    factor(I);
    const Triple primal = solve3(I, RVec::Zero(n), b, h);
    x_ = primal.x;
    s_ = -primal.z;
    const Triple dual = solve3(I, -c, RVec::Zero(p), RVec::Zero(m));
    y_ = dual.y;
    z_ = dual.z;
    if (!x_.allFinite() || !s_.allFinite() || !y_.allFinite() || !z_.allFinite())
      return finish(SolveStatus::NumericalFailure, 0);
    if (m > 0) {
      const double ts = cones_.max_eigen_shift(s_);
      if (ts >= -1e-8 * std::max(s_.norm(), 1.0)) s_ += (1.0 + ts) * e;
      const double tz = cones_.max_eigen_shift(z_);
      if (tz >= -1e-8 * std::max(z_.norm(), 1.0)) z_ += (1.0 + tz) * e;
    }
    tau_ = 1.0;
    kappa_ = 1.0;
  }

  int stalls = 0;
  int since_best = 0;
  for (int iter = 0; iter <= opt_.max_iter; ++iter) {
    const RVec rx = A.transpose() * y_ + G.transpose() * z_ + tau_ * c;
    const RVec ry = A * x_ - tau_ * b;
    const RVec rz = s_ + G * x_ - tau_ * h;
    const double cx = c.dot(x_);
    const double byhz = b.dot(y_) + h.dot(z_);
    const double rt = kappa_ + cx + byhz;
    const double sz = s_.dot(z_);

    {
      const double pres = std::sqrt(ry.squaredNorm() + rz.squaredNorm()) / tau_ / (1.0 + bnorm);
      const double dres = rx.norm() / tau_ / (1.0 + c.norm());
      const double gap = std::max(std::abs(cx + byhz), std::abs(sz)) / tau_ /
                         (1.0 + (std::abs(cx) + std::abs(byhz)) / tau_);
      if (opt_.verbose)
        std::fprintf(stderr, "%3d pres %.2e dres %.2e gap %.2e tau %.2e kappa %.2e |x| %.2e |z| %.2e |s| %.2e\n", iter, pres,
                     dres, gap, tau_, kappa_, x_.norm()/tau_, z_.norm()/tau_, s_.norm()/tau_);
      if (pres <= opt_.tol && dres <= opt_.tol && gap <= opt_.tol)
        return finish(SolveStatus::Optimal, iter);
      const double merit = std::max({pres, dres, gap});
      if (merit < best_.merit) {
        best_ = {x_, y_, z_, s_, tau_, kappa_, merit};
        since_best = 0;
      } else if (++since_best >= 5 && best_.merit < 1e-5) {
        // stuck at the accuracy floor
        return finish_best(SolveStatus::NumericalFailure, iter);
      }
      if (byhz < 0.0) {
        const double pinf = (A.transpose() * y_ + G.transpose() * z_).norm() / resx0 / (-byhz);
        if (pinf <= opt_.tol) return finish(SolveStatus::PrimalInfeasible, iter);
      }
      if (cx < 0.0) {
        const double dinf =
            std::max((A * x_).norm() / resy0, (G * x_ + s_).norm() / resz0) / (-cx);
        if (dinf <= opt_.tol) return finish(SolveStatus::DualInfeasible, iter);
      }
      if (iter == opt_.max_iter) return finish_best(SolveStatus::MaxIter, iter);
    }

    std::optional<NTScaling> Wopt;
    try {
      Wopt.emplace(cones_, s_, z_);
    } catch (const std::exception&) {
      return finish_best(SolveStatus::NumericalFailure, iter);
    }
    const NTScaling& W = *Wopt;
    factor(W);
    const RVec& lambda = W.lambda();
    const RVec lsq = cones_.product(lambda, lambda);
    const double mu = (sz + kappa_ * tau_) / (nu + 1.0);

    const Triple t1 = solve3(W, -c, b, h);
    const double wz1 = W.apply_W(t1.z).squaredNorm();

    struct Dir {
      RVec dx, dy, dz, ds, dz_scaled, ds_scaled;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double eta, const RVec& ds_rhs, double dk_rhs) {
      const RVec ls = W.lambda_solve(ds_rhs);
      const RVec r1 = -(1.0 - eta) * rx;
      const RVec r2 = -(1.0 - eta) * ry;
      const RVec r3 = -(1.0 - eta) * rz - W.apply_WT(ls);
      const double r4 = -(1.0 - eta) * rt - dk_rhs / tau_;
      const Triple t0 = solve3(W, r1, r2, r3);
      Dir d;
      d.dtau = (c.dot(t0.x) + b.dot(t0.y) + h.dot(t0.z) - r4) / (wz1 + kappa_ / tau_);
      d.dx = t0.x + d.dtau * t1.x;
      d.dy = t0.y + d.dtau * t1.y;
      d.dz = t0.z + d.dtau * t1.z;
      d.dz_scaled = W.apply_W(d.dz);
      d.ds_scaled = ls - d.dz_scaled;
      d.ds = W.apply_WT(d.ds_scaled);
      d.dkappa = (dk_rhs - kappa_ * d.dtau) / tau_;
      return d;
    };
    auto max_step = [&](const Dir& d) {
      double a = std::numeric_limits<double>::infinity();
      if (m > 0) {
        a = std::min(a, cones_.max_step_diag(lambda, d.ds_scaled));
        a = std::min(a, cones_.max_step_diag(lambda, d.dz_scaled));
      }
      if (d.dtau < 0.0) a = std::min(a, -tau_ / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa_ / d.dkappa);
      return a;
    };

    const Dir aff = direction(0.0, -lsq, -kappa_ * tau_);
    if (!aff.dx.allFinite() || !aff.dz.allFinite() || !std::isfinite(aff.dtau))
      return finish_best(SolveStatus::NumericalFailure, iter);
    const double alpha_aff = std::min(1.0, max_step(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 0.0, 1.0);

    const RVec ds_rhs = -lsq - cones_.product(aff.ds_scaled, aff.dz_scaled) + sigma * mu * e;
    const double dk_rhs = -kappa_ * tau_ - aff.dtau * aff.dkappa + sigma * mu;
    const Dir dir = direction(sigma, ds_rhs, dk_rhs);
    if (!dir.dx.allFinite() || !dir.dz.allFinite() || !std::isfinite(dir.dtau))
      return finish_best(SolveStatus::NumericalFailure, iter);
    const double alpha = std::min(1.0, opt_.step_fraction * max_step(dir));
    if (opt_.verbose) std::fprintf(stderr, "    alpha_aff %.3e alpha %.3e sigma %.2e\n", alpha_aff, alpha, sigma);

    x_ += alpha * dir.dx;
    y_ += alpha * dir.dy;
    z_ += alpha * dir.dz;
    s_ += alpha * dir.ds;
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;

    if (alpha < 1e-10) {
      if (++stalls >= 3) return finish_best(SolveStatus::NumericalFailure, iter + 1);
    } else {
      stalls = 0;
    }
    // Keep the homogeneous iterate bounded.
    const double norm = std::max({x_.cwiseAbs().maxCoeff(), tau_, kappa_});
    if (norm > 1e12) {
      const double f = 1.0 / norm;
      x_ *= f;
      y_ *= f;
      z_ *= f;
      s_ *= f;
      tau_ *= f;
      kappa_ *= f;
    }
  }
  return finish_best(SolveStatus::MaxIter, opt_.max_iter);
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  try {
    Solver solver(problem, options);
    return solver.run();
  } catch (const std::exception&) {
    ConicSolution sol;
    sol.status = SolveStatus::NumericalFailure;
    sol.x = RVec::Zero(problem.c.size());
    sol.y = RVec::Zero(problem.b.size());
    sol.s = RVec::Zero(problem.b.size());
    return sol;
  }
}

}  // namespace robustirs
