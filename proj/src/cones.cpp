#include "robustirs/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robustirs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

double soc_max_step(const Eigen::Ref<const RVec>& x, const Eigen::Ref<const RVec>& d) {
  const double a = d(0) * d(0) - d.tail(d.size() - 1).squaredNorm();
  const double b = x(0) * d(0) - x.tail(x.size() - 1).dot(d.tail(d.size() - 1));
  const double c = x(0) * x(0) - x.tail(x.size() - 1).squaredNorm();
  // f(alpha) = a alpha^2 + 2 b alpha + c, f(0) = c > 0.
  if (c <= 0.0) return 0.0;
  if (a == 0.0) return b < 0.0 ? -c / (2.0 * b) : kInf;
  const double disc = b * b - a * c;
  if (disc < 0.0) return kInf;
  const double r = std::sqrt(disc);
  const double q = -(b + (b >= 0.0 ? r : -r));
  double best = kInf;
  if (q != 0.0) {
    const double r1 = q / a;
    const double r2 = c / q;
    if (r1 > 0.0) best = std::min(best, r1);
    if (r2 > 0.0) best = std::min(best, r2);
  } else {
    const double r1 = -b / a;
    if (r1 > 0.0) best = r1;
  }
  return best;
}

double psd_step_from_sym(const RMat& M) {
  // Largest alpha with I + alpha M >= 0.
  Eigen::SelfAdjointEigenSolver<RMat> es(M, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo >= 0.0 ? kInf : -1.0 / lo;
}

}  // namespace

const char* cone_name(ConeKind kind) {
  switch (kind) {
    case ConeKind::Zero: return "zero";
    case ConeKind::NonNeg: return "nonneg";
    case ConeKind::SOC: return "soc";
    case ConeKind::PSD: return "psd";
  }
  return "unknown";
}

void svec_into(const RMat& S, Eigen::Ref<RVec> out) {
  const int s = static_cast<int>(S.rows());
  int k = 0;
  for (int j = 0; j < s; ++j) {
    out(k++) = S(j, j);
    for (int i = j + 1; i < s; ++i) out(k++) = kSqrt2 * 0.5 * (S(i, j) + S(j, i));
  }
}

namespace {

// svec of a symmetric matrix stored in its lower triangle
void svec_lower_into(const RMat& S, Eigen::Ref<RVec> out) {
  const int s = static_cast<int>(S.rows());
  int k = 0;
  for (int j = 0; j < s; ++j) {
    out(k++) = S(j, j);
    for (int i = j + 1; i < s; ++i) out(k++) = kSqrt2 * S(i, j);
  }
}

}  // namespace

RVec svec(const RMat& S) {
  if (S.rows() != S.cols()) throw DimensionMismatch("svec: matrix must be square");
  RVec out(svec_size(static_cast<int>(S.rows())));
  svec_into(S, out);
  return out;
}

RMat smat(const Eigen::Ref<const RVec>& v, int s) {
  if (v.size() != svec_size(s)) throw DimensionMismatch("smat: length does not match order");
  RMat S(s, s);
  int k = 0;
  for (int j = 0; j < s; ++j) {
    S(j, j) = v(k++);
    for (int i = j + 1; i < s; ++i) {
      const double x = v(k++) / kSqrt2;
      S(i, j) = x;
      S(j, i) = x;
    }
  }
  return S;
}

RMat hermitian_to_real(const CMat& H, double tol) {
  if (H.rows() != H.cols()) throw DimensionMismatch("hermitian_to_real: matrix must be square");
  const double asym = H.size() == 0 ? 0.0 : (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= tol)) throw InvalidArgument("hermitian_to_real: input is not Hermitian");
  const Eigen::Index s = H.rows();
  RMat out(2 * s, 2 * s);
  out.topLeftCorner(s, s) = H.real();
  out.bottomRightCorner(s, s) = H.real();
  out.topRightCorner(s, s) = -H.imag();
  out.bottomLeftCorner(s, s) = H.imag();
  return out;
}

ConeSet::ConeSet(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.kind == ConeKind::Zero) throw InvalidArgument("ConeSet: zero cones are equalities");
    if (b.dim < 1) throw InvalidArgument("ConeSet: empty cone block");
    offsets_.push_back(rows_);
    rows_ += b.rows();
    switch (b.kind) {
      case ConeKind::NonNeg: degree_ += b.dim; break;
      case ConeKind::SOC: degree_ += 1; break;
      case ConeKind::PSD: degree_ += b.dim; break;
      default: break;
    }
  }
}

RVec ConeSet::identity() const {
  RVec e = RVec::Zero(rows_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const int off = offsets_[i];
    switch (b.kind) {
      case ConeKind::NonNeg: e.segment(off, b.dim).setOnes(); break;
      case ConeKind::SOC: e(off) = 1.0; break;
      case ConeKind::PSD: {
        int k = off;
        for (int j = 0; j < b.dim; ++j) {
          e(k) = 1.0;
          k += b.dim - j;
        }
        break;
      }
      default: break;
    }
  }
  return e;
}

RVec ConeSet::product(const RVec& u, const RVec& v) const {
  RVec out(rows_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const int off = offsets_[i];
    const int r = b.rows();
    switch (b.kind) {
      case ConeKind::NonNeg:
        out.segment(off, r) = u.segment(off, r).cwiseProduct(v.segment(off, r));
        break;
      case ConeKind::SOC:
        out(off) = u.segment(off, r).dot(v.segment(off, r));
        out.segment(off + 1, r - 1) =
            u(off) * v.segment(off + 1, r - 1) + v(off) * u.segment(off + 1, r - 1);
        break;
      case ConeKind::PSD: {
        const RMat U = smat(u.segment(off, r), b.dim);
        const RMat V = smat(v.segment(off, r), b.dim);
        const RMat P = 0.5 * (U * V + V * U);
        svec_into(P, out.segment(off, r));
        break;
      }
      default: break;
    }
  }
  return out;
}

double ConeSet::min_eigenvalue(const RVec& x) const {
  double lo = kInf;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const int off = offsets_[i];
    const int r = b.rows();
    switch (b.kind) {
      case ConeKind::NonNeg: lo = std::min(lo, x.segment(off, r).minCoeff()); break;
      case ConeKind::SOC:
        lo = std::min(lo, x(off) - x.segment(off + 1, r - 1).norm());
        break;
      case ConeKind::PSD: {
        Eigen::SelfAdjointEigenSolver<RMat> es(smat(x.segment(off, r), b.dim),
                                               Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()(0));
        break;
      }
      default: break;
    }
  }
  return lo;
}

double ConeSet::max_eigen_shift(const RVec& x) const { return -min_eigenvalue(x); }

double ConeSet::max_step(const RVec& x, const RVec& d) const {
  double alpha = kInf;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const int off = offsets_[i];
    const int r = b.rows();
    switch (b.kind) {
      case ConeKind::NonNeg:
        for (int k = off; k < off + r; ++k)
          if (d(k) < 0.0) alpha = std::min(alpha, -x(k) / d(k));
        break;
      case ConeKind::SOC:
        alpha = std::min(alpha, soc_max_step(x.segment(off, r), d.segment(off, r)));
        break;
      case ConeKind::PSD: {
        const RMat X = smat(x.segment(off, r), b.dim);
        Eigen::LLT<RMat> llt(X);
        if (llt.info() != Eigen::Success) return 0.0;
        RMat M = smat(d.segment(off, r), b.dim);
        llt.matrixL().solveInPlace(M);
        RMat Mt = M.transpose();
        llt.matrixL().solveInPlace(Mt);
        alpha = std::min(alpha, psd_step_from_sym(0.5 * (Mt + Mt.transpose())));
        break;
      }
      default: break;
    }
  }
  return alpha;
}

double ConeSet::max_step_diag(const RVec& lambda, const RVec& d) const {
  double alpha = kInf;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const int off = offsets_[i];
    const int r = b.rows();
    if (b.kind != ConeKind::PSD) {
      const ConeSet single({b});
      alpha = std::min(alpha, single.max_step(lambda.segment(off, r), d.segment(off, r)));
      continue;
    }
    const RMat L = smat(lambda.segment(off, r), b.dim);
    const RVec inv_sqrt = L.diagonal().cwiseSqrt().cwiseInverse();
    RMat M = smat(d.segment(off, r), b.dim);
    M = inv_sqrt.asDiagonal() * M * inv_sqrt.asDiagonal();
    alpha = std::min(alpha, psd_step_from_sym(M));
  }
  return alpha;
}

NTScaling::NTScaling(const ConeSet& cones) : cones_(&cones), identity_(true) {
  lambda_ = cones.identity();
}

NTScaling::NTScaling(const ConeSet& cones, const RVec& s, const RVec& z) : cones_(&cones) {
  const auto& bl = cones.blocks();
  lambda_.resize(cones.rows());
  blocks_.reserve(bl.size());
  for (std::size_t i = 0; i < bl.size(); ++i) {
    Block blk;
    blk.kind = bl[i].kind;
    blk.off = cones.offsets()[i];
    blk.rows = bl[i].rows();
    blk.order = bl[i].dim;
    const auto sb = s.segment(blk.off, blk.rows);
    const auto zb = z.segment(blk.off, blk.rows);
    switch (blk.kind) {
      case ConeKind::NonNeg: {
        blk.d = (sb.array() / zb.array()).sqrt().matrix();
        lambda_.segment(blk.off, blk.rows) = (sb.array() * zb.array()).sqrt().matrix();
        break;
      }
      case ConeKind::SOC: {
        const int n1 = blk.rows - 1;
        const double sJs = sb(0) * sb(0) - sb.tail(n1).squaredNorm();
        const double zJz = zb(0) * zb(0) - zb.tail(n1).squaredNorm();
        if (!(sJs > 0.0) || !(zJz > 0.0))
          throw std::runtime_error("NT scaling: point left the second-order cone");
        const RVec sbar = sb / std::sqrt(sJs);
        const RVec zbar = zb / std::sqrt(zJz);
        const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        blk.wbar.resize(blk.rows);
        blk.wbar(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
        blk.wbar.tail(n1) = (sbar.tail(n1) - zbar.tail(n1)) / (2.0 * gamma);
        blk.eta = std::pow(sJs / zJz, 0.25);
        break;
      }
      case ConeKind::PSD: {
        const RMat S = smat(sb, blk.order);
        const RMat Z = smat(zb, blk.order);
        Eigen::LLT<RMat> ls(S), lz(Z);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
          throw std::runtime_error("NT scaling: point left the semidefinite cone");
        const RMat Ls = ls.matrixL();
        const RMat Lz = lz.matrixL();
        Eigen::BDCSVD<RMat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const RVec sv = svd.singularValues();
        if (!(sv.minCoeff() > 0.0))
          throw std::runtime_error("NT scaling: singular semidefinite block");
        const RVec isq = sv.cwiseSqrt().cwiseInverse();
        blk.R = Ls * svd.matrixV() * isq.asDiagonal();
        blk.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
        RMat Lam = RMat::Zero(blk.order, blk.order);
        Lam.diagonal() = sv;
        svec_into(Lam, lambda_.segment(blk.off, blk.rows));
        break;
      }
      default: break;
    }
    blocks_.push_back(std::move(blk));
  }
  for (const auto& blk : blocks_) {
    if (blk.kind == ConeKind::SOC) {
      RVec zb = z.segment(blk.off, blk.rows);
      apply_block(blk, Op::W, zb);
      lambda_.segment(blk.off, blk.rows) = zb;
    }
  }
}

void NTScaling::apply_block(const Block& b, Op op, Eigen::Ref<RVec> x) const {
  switch (b.kind) {
    case ConeKind::NonNeg:
      if (op == Op::W || op == Op::WT)
        x.array() *= b.d.array();
      else
        x.array() /= b.d.array();
      break;
    case ConeKind::SOC: {
      // W is symmetric here
      const int n1 = b.rows - 1;
      const double w0 = b.wbar(0);
      const auto w1 = b.wbar.tail(n1);
      const double x0 = x(0);
      const double w1x1 = w1.dot(x.tail(n1));
      if (op == Op::W || op == Op::WT) {
        x(0) = b.eta * (w0 * x0 + w1x1);
        x.tail(n1) = b.eta * (x.tail(n1) + (x0 + w1x1 / (1.0 + w0)) * w1);
      } else {
        x(0) = (w0 * x0 - w1x1) / b.eta;
        x.tail(n1) = (x.tail(n1) - (x0 - w1x1 / (1.0 + w0)) * w1) / b.eta;
      }
      break;
    }
    case ConeKind::PSD: {
      // Y = L X L', lower triangle only
      const RMat X = smat(x, b.order);
      RMat T(b.order, b.order);
      RMat Y(b.order, b.order);
      switch (op) {
        case Op::W:
          T.noalias() = X * b.R;
          Y.triangularView<Eigen::Lower>() = b.R.transpose() * T;
          break;
        case Op::WT:
          T.noalias() = X * b.R.transpose();
          Y.triangularView<Eigen::Lower>() = b.R * T;
          break;
        case Op::Winv:
          T.noalias() = X * b.Rinv;
          Y.triangularView<Eigen::Lower>() = b.Rinv.transpose() * T;
          break;
        case Op::WinvT:
          T.noalias() = X * b.Rinv.transpose();
          Y.triangularView<Eigen::Lower>() = b.Rinv * T;
          break;
      }
      svec_lower_into(Y, x);
      break;
    }
    default: break;
  }
}

RVec NTScaling::apply_W(const RVec& x) const {
  if (identity_) return x;
  RVec y = x;
  for (const auto& b : blocks_) apply_block(b, Op::W, y.segment(b.off, b.rows));
  return y;
}

RVec NTScaling::apply_WT(const RVec& x) const {
  if (identity_) return x;
  RVec y = x;
  for (const auto& b : blocks_) apply_block(b, Op::WT, y.segment(b.off, b.rows));
  return y;
}

RVec NTScaling::apply_Winv(const RVec& x) const {
  if (identity_) return x;
  RVec y = x;
  for (const auto& b : blocks_) apply_block(b, Op::Winv, y.segment(b.off, b.rows));
  return y;
}

RVec NTScaling::apply_WinvT(const RVec& x) const {
  if (identity_) return x;
  RVec y = x;
  for (const auto& b : blocks_) apply_block(b, Op::WinvT, y.segment(b.off, b.rows));
  return y;
}

void NTScaling::apply_WinvT_inplace(Eigen::Ref<RVec> col) const {
  apply_WinvT_inplace(col, {});
}

void NTScaling::apply_WinvT_inplace(Eigen::Ref<RVec> col,
                                    const std::vector<PsdColumnFactor>& factors) const {
  if (identity_) return;
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const Block& b = blocks_[bi];
    auto seg = col.segment(b.off, b.rows);
    const PsdColumnFactor* f = nullptr;
    for (const auto& cand : factors)
      if (cand.block == static_cast<int>(bi)) f = &cand;
    if (f != nullptr && b.kind == ConeKind::PSD) {
      const RMat T = b.Rinv * (*f->U);
      svec_into(T * f->d->asDiagonal() * T.transpose(), seg);
      continue;
    }
    if (b.kind != ConeKind::PSD) {
      apply_block(b, Op::WinvT, seg);
      continue;
    }
    const int s = b.order;
    const RMat X = smat(seg, s);
    std::vector<int> support;
    for (int i = 0; i < s; ++i)
      if (X.row(i).cwiseAbs().maxCoeff() != 0.0) support.push_back(i);
    const int k = static_cast<int>(support.size());
    if (k == 0) continue;
    if (2 * k >= s) {
      apply_block(b, Op::WinvT, seg);
      continue;
    }
    // X = Xc E' + E Xc' - E Xss E', with Xc = X(:, S).
    RMat Xc(s, k), Q(s, k), Xss(k, k);
    for (int j = 0; j < k; ++j) {
      Xc.col(j) = X.col(support[j]);
      Q.col(j) = b.Rinv.col(support[j]);
      for (int i = 0; i < k; ++i) Xss(i, j) = X(support[i], support[j]);
    }
    const RMat Yh = b.Rinv * Xc - 0.5 * Q * Xss;
    const RMat P = Yh * Q.transpose();
    svec_into(P + P.transpose(), seg);
  }
}

RVec NTScaling::lambda_solve(const RVec& d) const {
  RVec x(d.size());
  const auto& bl = cones_->blocks();
  for (std::size_t i = 0; i < bl.size(); ++i) {
    const int off = cones_->offsets()[i];
    const int r = bl[i].rows();
    const auto l = lambda_.segment(off, r);
    switch (bl[i].kind) {
      case ConeKind::NonNeg:
        x.segment(off, r) = d.segment(off, r).cwiseQuotient(l);
        break;
      case ConeKind::SOC: {
        const int n1 = r - 1;
        const double det = l(0) * l(0) - l.tail(n1).squaredNorm();
        const double x0 = (l(0) * d(off) - l.tail(n1).dot(d.segment(off + 1, n1))) / det;
        x(off) = x0;
        x.segment(off + 1, n1) = (d.segment(off + 1, n1) - x0 * l.tail(n1)) / l(0);
        break;
      }
      case ConeKind::PSD: {
        const int s = bl[i].dim;
        RVec diag(s);
        int k = 0;
        for (int j = 0; j < s; ++j) {
          diag(j) = l(k);
          k += s - j;
        }
        k = 0;
        for (int j = 0; j < s; ++j)
          for (int ii = j; ii < s; ++ii, ++k)
            x(off + k) = 2.0 * d(off + k) / (diag(ii) + diag(j));
        break;
      }
      default: break;
    }
  }
  return x;
}

}  // namespace robustirs
