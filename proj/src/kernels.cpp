#include "robustirs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robustirs::kernels {

namespace {

const std::vector<PsdColumnFactor> kNoFactors;

const std::vector<PsdColumnFactor>& factors_of(const ColumnFactors* f, Eigen::Index j) {
  return f != nullptr && j < static_cast<Eigen::Index>(f->size()) ? (*f)[static_cast<std::size_t>(j)]
                                                                  : kNoFactors;
}

}  // namespace

void scale_columns_serial(const NTScaling& W, const RMat& G, RMat& out,
                          const ColumnFactors* factors) {
  out = G;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    RVec col = out.col(j);
    W.apply_WinvT_inplace(col, factors_of(factors, j));
    out.col(j) = col;
  }
}

void scale_columns_parallel(const NTScaling& W, const RMat& G, RMat& out,
                            const ColumnFactors* factors) {
  out = G;
  const Eigen::Index n = out.cols();
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < n; ++j) {
    RVec col = out.col(j);
    W.apply_WinvT_inplace(col, factors_of(factors, j));
    out.col(j) = col;
  }
}

RMat normal_matrix_serial(const RMat& Gt) {
  const Eigen::Index n = Gt.cols();
  RMat H(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < Gt.rows(); ++r) acc += Gt(r, i) * Gt(r, j);
      H(i, j) = acc;
      H(j, i) = acc;
    }
  return H;
}

RMat normal_matrix_parallel(const RMat& Gt) {
  const Eigen::Index n = Gt.cols();
  constexpr Eigen::Index kBlock = 32;
  const Eigen::Index blocks = (n + kBlock - 1) / kBlock;
  RMat H(n, n);
  // lower block rows via GEMM, mirrored afterwards
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index i0 = b * kBlock;
    const Eigen::Index len = std::min(kBlock, n - i0);
    H.block(i0, 0, len, i0 + len).noalias() =
        Gt.middleCols(i0, len).transpose() * Gt.leftCols(i0 + len);
  }
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) H(i, j) = H(j, i);
  return H;
}

namespace {

RMat upper_of(const RMat& M) {
  Eigen::HouseholderQR<RMat> qr(M);
  const Eigen::Index n = M.cols();
  RMat R = RMat::Zero(n, n);
  const Eigen::Index k = std::min(n, M.rows());
  R.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return R;
}

}  // namespace

RMat triangular_factor_serial(const RMat& Gt, double shift) {
  const Eigen::Index n = Gt.cols();
  RMat M(Gt.rows() + n, n);
  M.topRows(Gt.rows()) = Gt;
  M.bottomRows(n) = std::sqrt(std::max(shift, 0.0)) * RMat::Identity(n, n);
  return upper_of(M);
}

RMat triangular_factor_parallel(const RMat& Gt, double shift) {
  const Eigen::Index n = Gt.cols();
  const Eigen::Index m = Gt.rows();
  // chunks of at least 4n rows keep the stacked problem small
  const Eigen::Index chunks = std::max<Eigen::Index>(1, std::min<Eigen::Index>(64, m / (4 * std::max<Eigen::Index>(n, 1))));
  const Eigen::Index len = (m + chunks - 1) / chunks;
  RMat stacked = RMat::Zero((chunks + 1) * n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index r0 = c * len;
    const Eigen::Index rows = std::min(len, m - r0);
    if (rows > 0) stacked.middleRows(c * n, n) = upper_of(Gt.middleRows(r0, rows));
  }
  stacked.bottomRows(n) = std::sqrt(std::max(shift, 0.0)) * RMat::Identity(n, n);
  return upper_of(stacked);
}

double grid_coordinate(double bound, int grid_n, int index) {
  if (grid_n <= 1) return 0.0;
  return -bound + 2.0 * bound * static_cast<double>(index) / (grid_n - 1);
}

namespace {

GridPoint point_at(const GridPoint& bounds, int grid_n, long flat) {
  GridPoint p;
  for (int d = 3; d >= 0; --d) {
    p[d] = grid_coordinate(bounds[d], grid_n, static_cast<int>(flat % grid_n));
    flat /= grid_n;
  }
  return p;
}

long grid_count(int grid_n) {
  long total = 1;
  for (int d = 0; d < 4; ++d) total *= grid_n;
  return total;
}

}  // namespace

GridExtrema grid_extrema_serial(const GridPoint& bounds, int grid_n,
                                const std::function<double(const GridPoint&)>& f) {
  GridExtrema out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();
  const long total = grid_count(grid_n);
  for (long k = 0; k < total; ++k) {
    const GridPoint p = point_at(bounds, grid_n, k);
    const double v = f(p);
    if (v < out.min_value) {
      out.min_value = v;
      out.argmin = p;
    }
    if (v > out.max_value) {
      out.max_value = v;
      out.argmax = p;
    }
  }
  return out;
}

GridExtrema grid_extrema_parallel(const GridPoint& bounds, int grid_n,
                                  const std::function<double(const GridPoint&)>& f) {
  const long total = grid_count(grid_n);
  std::vector<double> values(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (long k = 0; k < total; ++k) values[static_cast<std::size_t>(k)] = f(point_at(bounds, grid_n, k));
  // Ordered reduction keeps ties resolved exactly like the serial scan.
  GridExtrema out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();
  long kmin = 0, kmax = 0;
  for (long k = 0; k < total; ++k) {
    const double v = values[static_cast<std::size_t>(k)];
    if (v < out.min_value) {
      out.min_value = v;
      kmin = k;
    }
    if (v > out.max_value) {
      out.max_value = v;
      kmax = k;
    }
  }
  out.argmin = point_at(bounds, grid_n, kmin);
  out.argmax = point_at(bounds, grid_n, kmax);
  return out;
}

}  // namespace robustirs::kernels
