#pragma once

#include <vector>

#include "robustirs/types.hpp"

namespace robustirs {

enum class ConeKind { Zero, NonNeg, SOC, PSD };

/// One block of the cone product. For Zero/NonNeg/SOC `dim` is the number of
/// rows; for PSD it is the matrix order s and the block spans s(s+1)/2 rows.
struct ConeBlock {
  ConeKind kind = ConeKind::NonNeg;
  int dim = 0;

  [[nodiscard]] int rows() const { return kind == ConeKind::PSD ? dim * (dim + 1) / 2 : dim; }

  static ConeBlock zero(int k) { return {ConeKind::Zero, k}; }
  static ConeBlock nonneg(int k) { return {ConeKind::NonNeg, k}; }
  static ConeBlock soc(int k) { return {ConeKind::SOC, k}; }
  static ConeBlock psd(int s) { return {ConeKind::PSD, s}; }
};

const char* cone_name(ConeKind kind);

inline int svec_size(int s) { return s * (s + 1) / 2; }

/// Column-major lower triangle, off-diagonals scaled by sqrt(2) so that
/// <svec(X), svec(Y)> = trace(XY).
RVec svec(const RMat& S);
RMat smat(const Eigen::Ref<const RVec>& v, int s);
void svec_into(const RMat& S, Eigen::Ref<RVec> out);

/// [[Re H, -Im H], [Im H, Re H]]. Throws InvalidArgument if H is not
/// Hermitian to `tol` (max-abs entry of H - H^H).
RMat hermitian_to_real(const CMat& H, double tol = 1e-10);

/// Cone algebra over the non-Zero blocks of a cone list, in the layout the
/// solver uses (blocks concatenated in order).
class ConeSet {
 public:
  explicit ConeSet(std::vector<ConeBlock> blocks);

  [[nodiscard]] const std::vector<ConeBlock>& blocks() const { return blocks_; }
  [[nodiscard]] const std::vector<int>& offsets() const { return offsets_; }
  [[nodiscard]] int rows() const { return rows_; }
  /// Barrier degree: NonNeg count + number of SOC blocks + sum of PSD orders.
  [[nodiscard]] int degree() const { return degree_; }

  [[nodiscard]] RVec identity() const;
  /// Jordan product u o v.
  [[nodiscard]] RVec product(const RVec& u, const RVec& v) const;
  /// Smallest t with x + t e in the cone boundary, i.e. -min eigenvalue.
  [[nodiscard]] double max_eigen_shift(const RVec& x) const;
  /// Smallest eigenvalue (Jordan sense) over all blocks.
  [[nodiscard]] double min_eigenvalue(const RVec& x) const;
  /// Largest alpha with x + alpha d in the cone, x interior; +inf if unbounded.
  [[nodiscard]] double max_step(const RVec& x, const RVec& d) const;
  /// Same, but PSD blocks of x are known to be diagonal (scaled point).
  [[nodiscard]] double max_step_diag(const RVec& lambda, const RVec& d) const;
  [[nodiscard]] bool interior(const RVec& x) const { return min_eigenvalue(x) > 0.0; }

 private:
  std::vector<ConeBlock> blocks_;
  std::vector<int> offsets_;
  int rows_ = 0;
  int degree_ = 0;
};

/// Low-rank description of one PSD block of a constraint column:
/// the block equals svec(U diag(d) U').
struct PsdColumnFactor {
  int block = 0;  // index into the ConeSet blocks
  const RMat* U = nullptr;
  const RVec* d = nullptr;
};

/// Nesterov-Todd scaling W for a primal-dual interior pair (s, z):
/// W z = W^{-T} s = lambda.
class NTScaling {
 public:
  NTScaling(const ConeSet& cones, const RVec& s, const RVec& z);
  /// Identity scaling (W = I), lambda = e.
  explicit NTScaling(const ConeSet& cones);

  [[nodiscard]] const RVec& lambda() const { return lambda_; }

  [[nodiscard]] RVec apply_W(const RVec& x) const;
  [[nodiscard]] RVec apply_WT(const RVec& x) const;
  [[nodiscard]] RVec apply_Winv(const RVec& x) const;
  [[nodiscard]] RVec apply_WinvT(const RVec& x) const;

  /// Solves lambda o x = d for x.
  [[nodiscard]] RVec lambda_solve(const RVec& d) const;

  [[nodiscard]] bool identity_scaling() const { return identity_; }

  /// W^{-T} applied in place to one cone-row column. PSD parts supported on
  /// few rows/cols go through a low-rank product instead of two dense ones.
  void apply_WinvT_inplace(Eigen::Ref<RVec> col) const;
  /// Same, with PSD blocks listed in `factors` scaled through their factors
  /// (cost s^2 r instead of s^3).
  void apply_WinvT_inplace(Eigen::Ref<RVec> col, const std::vector<PsdColumnFactor>& factors) const;

 private:
  struct Block {
    ConeKind kind;
    int off = 0;
    int rows = 0;
    int order = 0;
    RVec d;            // nonneg: sqrt(s ./ z)
    double eta = 1.0;  // soc
    RVec wbar;         // soc hyperbolic vector, wbar' J wbar = 1
    RMat R, Rinv;      // psd
  };

  enum class Op { W, WT, Winv, WinvT };
  void apply_block(const Block& b, Op op, Eigen::Ref<RVec> x) const;

  const ConeSet* cones_;
  std::vector<Block> blocks_;
  RVec lambda_;
  bool identity_ = false;
};

}  // namespace robustirs
