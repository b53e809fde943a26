#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "robustirs/kernels.hpp"

using namespace robustirs;
using namespace robustirs::kernels;

namespace {

RMat random_matrix(std::uint64_t seed, Eigen::Index r, Eigen::Index c) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RMat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

// Cone layout of a V-step with M = 20: two real-embedded LMIs plus SOCs.
struct Problem {
  ConeSet cones{{ConeBlock::nonneg(8), ConeBlock::soc(23), ConeBlock::soc(23), ConeBlock::psd(46),
                 ConeBlock::psd(42)}};
  RVec s, z;
  RMat G;
  explicit Problem(int cols) {
    s = interior(1);
    z = interior(2);
    G = random_matrix(3, cones.rows(), cols);
  }
  RVec interior(std::uint64_t seed) const {
    const RVec v = random_matrix(seed, cones.rows(), 1).col(0);
    return v + (std::max(cones.max_eigen_shift(v), 0.0) + 0.5) * cones.identity();
  }
};

template <bool Parallel>
void BM_ScaleColumns(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const NTScaling W(p.cones, p.s, p.z);
  RMat out;
  for (auto _ : state) {
    if constexpr (Parallel) scale_columns_parallel(W, p.G, out);
    else scale_columns_serial(W, p.G, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_NormalMatrix(benchmark::State& state) {
  const RMat Gt = random_matrix(4, 2000, state.range(0));
  for (auto _ : state) {
    RMat H = Parallel ? normal_matrix_parallel(Gt) : normal_matrix_serial(Gt);
    benchmark::DoNotOptimize(H.data());
  }
}

template <bool Parallel>
void BM_TriangularFactor(benchmark::State& state) {
  const RMat Gt = random_matrix(5, 2000, state.range(0));
  for (auto _ : state) {
    RMat R = Parallel ? triangular_factor_parallel(Gt, 1e-10) : triangular_factor_serial(Gt, 1e-10);
    benchmark::DoNotOptimize(R.data());
  }
}

template <bool Parallel>
void BM_GridExtrema(benchmark::State& state) {
  const GridPoint bounds{0.05, 0.05, 0.03, 0.03};
  const RMat a = random_matrix(6, 16, 4);
  // stand-in for an SINR evaluation: a small steering-vector inner product
  const auto f = [&](const GridPoint& q) {
    double re = 0.0, im = 0.0;
    for (int n = 0; n < 16; ++n) {
      const double ph = a(n, 0) * q[0] + a(n, 1) * q[1] + a(n, 2) * q[2] + a(n, 3) * q[3];
      re += std::cos(ph);
      im += std::sin(ph);
    }
    return re * re + im * im;
  };
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const GridExtrema e = Parallel ? grid_extrema_parallel(bounds, n, f) : grid_extrema_serial(bounds, n, f);
    benchmark::DoNotOptimize(e.min_value);
  }
}

}  // namespace

BENCHMARK(BM_ScaleColumns<false>)->Name("scale_columns/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_ScaleColumns<true>)->Name("scale_columns/parallel")->Arg(100)->Arg(400);
BENCHMARK(BM_NormalMatrix<false>)->Name("normal_matrix/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_NormalMatrix<true>)->Name("normal_matrix/parallel")->Arg(100)->Arg(400);
BENCHMARK(BM_TriangularFactor<false>)->Name("triangular_factor/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_TriangularFactor<true>)->Name("triangular_factor/parallel")->Arg(100)->Arg(400);
BENCHMARK(BM_GridExtrema<false>)->Name("grid_extrema/serial")->Arg(8)->Arg(16);
BENCHMARK(BM_GridExtrema<true>)->Name("grid_extrema/parallel")->Arg(8)->Arg(16);

BENCHMARK_MAIN();
