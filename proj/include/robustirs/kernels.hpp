#pragma once

#include <array>
#include <functional>
#include <vector>

#include "robustirs/cones.hpp"

namespace robustirs::kernels {

/// Optional per-column low-rank factors of PSD blocks.
using ColumnFactors = std::vector<std::vector<PsdColumnFactor>>;

/// out = W^{-T} G column by column.
void scale_columns_serial(const NTScaling& W, const RMat& G, RMat& out,
                          const ColumnFactors* factors = nullptr);
void scale_columns_parallel(const NTScaling& W, const RMat& G, RMat& out,
                            const ColumnFactors* factors = nullptr);

/// H = Gt' Gt (symmetric, both triangles filled).
RMat normal_matrix_serial(const RMat& Gt);
RMat normal_matrix_parallel(const RMat& Gt);

/// Upper-triangular R with R'R = Gt'Gt + shift I, from a Householder QR of
/// [Gt; sqrt(shift) I]. The parallel version reduces row chunks first
/// (tall-skinny QR); R agrees with the serial one up to row signs.
RMat triangular_factor_serial(const RMat& Gt, double shift = 0.0);
RMat triangular_factor_parallel(const RMat& Gt, double shift = 0.0);

/// A 4-D box scan: every point of a grid_n^4 lattice over
/// [-bound_i, bound_i] (end points included).
using GridPoint = std::array<double, 4>;
struct GridExtrema {
  double min_value = 0.0;
  double max_value = 0.0;
  GridPoint argmin{};
  GridPoint argmax{};
};

GridExtrema grid_extrema_serial(const GridPoint& bounds, int grid_n,
                                const std::function<double(const GridPoint&)>& f);
GridExtrema grid_extrema_parallel(const GridPoint& bounds, int grid_n,
                                  const std::function<double(const GridPoint&)>& f);

/// Evaluation points of one axis.
double grid_coordinate(double bound, int grid_n, int index);

}  // namespace robustirs::kernels
