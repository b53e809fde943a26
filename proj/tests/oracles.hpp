#pragma once
// Reference computations written from the model definitions, independent of
// the library's own helpers.

#include <cmath>
#include <complex>
#include <random>

#include "robustirs/types.hpp"

namespace oracle {

using robustirs::cplx;
using robustirs::CMat;
using robustirs::CVec;
using robustirs::RMat;
using robustirs::RVec;

inline CVec random_cvec(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * cplx(g(rng), g(rng));
  return v;
}

inline CMat random_cmat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * cplx(g(rng), g(rng));
  return m;
}

inline CMat random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  const CMat a = random_cmat(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

/// sum_n conj(x_n) y_n with explicit loops.
inline cplx inner(const CVec& x, const CVec& y) {
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::conj(x(i)) * y(i);
  return acc;
}

/// Received amplitude through the direct link and the reflection
/// coefficients v applied as diag(conj v):
///   h^H w + sum_m conj(v_m) conj(h_irs_m) (H_i w)_m.
inline cplx received(const CVec& h, const CVec& h_irs, const CMat& H_i, const CVec& w,
                     const CVec& v) {
  cplx s = inner(h, w);
  for (Eigen::Index m = 0; m < v.size(); ++m) {
    cplx row = 0.0;
    for (Eigen::Index n = 0; n < w.size(); ++n) row += H_i(m, n) * w(n);
    s += std::conj(v(m)) * std::conj(h_irs(m)) * row;
  }
  return s;
}

/// Same with an arbitrary cascaded matrix G: h^H w + v^H G w.
inline cplx received_g(const CVec& h, const CMat& G, const CVec& w, const CVec& v) {
  cplx s = inner(h, w);
  for (Eigen::Index m = 0; m < G.rows(); ++m)
    for (Eigen::Index n = 0; n < G.cols(); ++n) s += std::conj(v(m)) * G(m, n) * w(n);
  return s;
}

/// sum_m |v_m|^2 (|(H_i w)_m|^2 + sigma_i2).
inline double amplification_power(const CMat& H_i, const CVec& w, const CVec& v, double sigma_i2) {
  double p = 0.0;
  for (Eigen::Index m = 0; m < v.size(); ++m) {
    cplx row = 0.0;
    for (Eigen::Index n = 0; n < w.size(); ++n) row += H_i(m, n) * w(n);
    p += std::norm(v(m)) * (std::norm(row) + sigma_i2);
  }
  return p;
}

/// sigma_i2 sum_m |h_irs_m v_m|^2 + sigma2.
inline double receiver_noise(const CVec& h_irs, const CVec& v, double sigma_i2, double sigma2) {
  double p = 0.0;
  for (Eigen::Index m = 0; m < v.size(); ++m) p += std::norm(h_irs(m) * v(m));
  return sigma_i2 * p + sigma2;
}

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_eig(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace oracle
