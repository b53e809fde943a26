#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "robustirs/kernels.hpp"

using namespace robustirs;
using namespace robustirs::kernels;

namespace {

RMat random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  RMat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

struct ScalingFixture {
  ConeSet cones{{ConeBlock::nonneg(4), ConeBlock::soc(5), ConeBlock::psd(6), ConeBlock::psd(3)}};
  RVec s, z;
  explicit ScalingFixture(std::mt19937_64& rng) {
    s = interior(rng);
    z = interior(rng);
  }
  RVec interior(std::mt19937_64& rng) const {
    const RMat v = random_matrix(rng, cones.rows(), 1);
    return v.col(0) + (std::max(cones.max_eigen_shift(v.col(0)), 0.0) + 0.3) * cones.identity();
  }
};

}  // namespace

TEST_CASE("column scaling: serial, parallel and the scaling operator agree") {
  std::mt19937_64 rng(1);
  ScalingFixture fx(rng);
  const NTScaling W(fx.cones, fx.s, fx.z);
  const RMat G = random_matrix(rng, fx.cones.rows(), 37);
  RMat a, b;
  scale_columns_serial(W, G, a);
  scale_columns_parallel(W, G, b);
  CHECK((a - b).norm() <= 1e-13 * a.norm());
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    CHECK((a.col(j) - W.apply_WinvT(G.col(j))).norm() <= 1e-12 * (1 + a.col(j).norm()));
}

TEST_CASE("column scaling through low-rank PSD factors") {
  std::mt19937_64 rng(2);
  ScalingFixture fx(rng);
  const NTScaling W(fx.cones, fx.s, fx.z);
  const int psd_block = 2;
  const int off = fx.cones.offsets()[psd_block];
  const int cols = 6;
  RMat G = random_matrix(rng, fx.cones.rows(), cols);
  std::vector<RMat> Us;
  std::vector<RVec> ds;
  Us.reserve(cols);
  ds.reserve(cols);
  for (int j = 0; j < cols; ++j) {
    Us.push_back(random_matrix(rng, 6, 2));
    ds.push_back(random_matrix(rng, 2, 1).col(0));
    G.col(j).segment(off, svec_size(6)) = svec(Us.back() * ds.back().asDiagonal() * Us.back().transpose());
  }
  ColumnFactors factors(cols);
  for (int j = 0; j < cols; ++j) factors[j].push_back({psd_block, &Us[j], &ds[j]});
  RMat plain, fs, fp;
  scale_columns_serial(W, G, plain);
  scale_columns_serial(W, G, fs, &factors);
  scale_columns_parallel(W, G, fp, &factors);
  CHECK((plain - fs).norm() <= 1e-11 * plain.norm());
  CHECK((fs - fp).norm() <= 1e-13 * fs.norm());
}

TEST_CASE("normal matrix") {
  std::mt19937_64 rng(3);
  for (const auto& [m, n] : {std::pair{10, 3}, std::pair{200, 45}, std::pair{513, 97}, std::pair{64, 64}}) {
    const RMat Gt = random_matrix(rng, m, n);
    const RMat ref = Gt.transpose() * Gt;
    const RMat a = normal_matrix_serial(Gt);
    const RMat b = normal_matrix_parallel(Gt);
    CHECK((a - ref).norm() <= 1e-12 * ref.norm());
    CHECK((b - ref).norm() <= 1e-12 * ref.norm());
    CHECK((b - b.transpose()).norm() == 0.0);
  }
}

TEST_CASE("triangular factor") {
  std::mt19937_64 rng(4);
  for (const auto& [m, n] : {std::pair{12, 4}, std::pair{300, 20}, std::pair{2000, 31}, std::pair{40, 40}}) {
    const RMat Gt = random_matrix(rng, m, n);
    for (const double shift : {0.0, 1e-3}) {
      const RMat target = Gt.transpose() * Gt + shift * RMat::Identity(n, n);
      const RMat rs = triangular_factor_serial(Gt, shift);
      const RMat rp = triangular_factor_parallel(Gt, shift);
      CHECK(rs.rows() == n);
      CHECK(rp.rows() == n);
      CHECK(rs.isUpperTriangular(0.0));
      CHECK(rp.isUpperTriangular(0.0));
      CHECK((rs.transpose() * rs - target).norm() <= 1e-12 * target.norm());
      CHECK((rp.transpose() * rp - target).norm() <= 1e-12 * target.norm());
      // equal up to row signs
      for (int i = 0; i < n; ++i) {
        const double sgn = rs(i, i) * rp(i, i) < 0.0 ? -1.0 : 1.0;
        CHECK((rs.row(i) - sgn * rp.row(i)).norm() <= 1e-9 * (1 + rs.row(i).norm()));
      }
    }
  }
}

TEST_CASE("grid extrema") {
  const GridPoint bounds{0.3, 0.1, 0.2, 0.05};
  const auto f = [](const GridPoint& p) {
    return std::sin(3 * p[0]) + p[1] * p[2] - 4 * p[3] * p[3] + 0.5 * p[0] * p[3];
  };
  for (const int n : {2, 5, 8}) {
    const GridExtrema a = grid_extrema_serial(bounds, n, f);
    const GridExtrema b = grid_extrema_parallel(bounds, n, f);
    // brute force over the same lattice
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const GridPoint p{grid_coordinate(bounds[0], n, i), grid_coordinate(bounds[1], n, j),
                              grid_coordinate(bounds[2], n, k), grid_coordinate(bounds[3], n, l)};
            lo = std::min(lo, f(p));
            hi = std::max(hi, f(p));
          }
    CHECK(a.min_value == lo);
    CHECK(a.max_value == hi);
    CHECK(b.min_value == lo);
    CHECK(b.max_value == hi);
    CHECK(f(a.argmin) == lo);
    CHECK(f(b.argmax) == hi);
  }
  CHECK(grid_coordinate(0.4, 5, 0) == -0.4);
  CHECK(grid_coordinate(0.4, 5, 4) == 0.4);
  CHECK(grid_coordinate(0.4, 5, 2) == 0.0);
}
