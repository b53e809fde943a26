#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "robustirs/jitter_uncertainty.hpp"

using namespace robustirs;

namespace {

constexpr double kSpacing = 0.05;
constexpr double kLambda = 0.1;

double inf_norm(const CVec& v) { return v.cwiseAbs().maxCoeff(); }

JitterBounds uniform_bounds(double beta) {
  JitterBounds b;
  b.u1 = b.u2 = b.e1 = b.e2 = b.i1 = b.i2 = beta;
  return b;
}

}  // namespace

TEST_CASE("Taylor vectors at omega = 0") {
  const TaylorVectors tv = taylor_direction_vectors(0.8, 0.0, 3, 3, kSpacing, kLambda);
  CHECK(tv.b.norm() < 1e-15);
  CHECK(tv.a.norm() > 0.0);
}

TEST_CASE("Taylor vectors vanish at the reference element") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int t = 0; t < 20; ++t) {
    const TaylorVectors tv = taylor_direction_vectors(ang(rng), ang(rng), 2, 3, kSpacing, kLambda);
    CHECK(std::abs(tv.a(0)) == 0.0);
    CHECK(std::abs(tv.b(0)) == 0.0);
  }
}

TEST_CASE("Taylor vectors match finite differences of the steering vector") {
  const double delta = 1e-5;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int t = 0; t < 50; ++t) {
    const double phi = ang(rng), om = ang(rng);
    const CVec h = steering_ubs(om, phi, 2, 4, kSpacing, kLambda);
    const TaylorVectors tv = taylor_direction_vectors(phi, om, 2, 4, kSpacing, kLambda);
    const CVec d_om = (steering_ubs(om + delta, phi, 2, 4, kSpacing, kLambda) - h) / delta;
    const CVec d_ph = (steering_ubs(om, phi + delta, 2, 4, kSpacing, kLambda) - h) / delta;
    // second derivative of the phase is at most (2 pi b/lambda (n_x + n_y))^2
    const double bound = 0.5 * delta * std::pow(2.0 * kPi * 0.5 * 5.0, 2);
    CHECK(inf_norm(d_om - h.cwiseProduct(tv.a)) < bound);
    CHECK(inf_norm(d_ph - h.cwiseProduct(tv.b)) < bound);
  }
}

TEST_CASE("perturbed LOS vector") {
  const double phi = 0.7, om = 1.1;
  const CVec h = steering_ubs(om, phi, 1, 4, kSpacing, kLambda);
  const TaylorVectors tv = taylor_direction_vectors(phi, om, 1, 4, kSpacing, kLambda);

  SUBCASE("expansion point is exact") { CHECK((perturbed_los(h, tv, 0.0, 0.0) - h).norm() == 0.0); }

  SUBCASE("affine in the deviations") {
    const CVec f00 = perturbed_los(h, tv, 0.0, 0.0);
    const CVec f10 = perturbed_los(h, tv, 0.03, 0.0);
    const CVec f01 = perturbed_los(h, tv, 0.0, -0.02);
    const CVec f = perturbed_los(h, tv, 0.03 * 2.5, -0.02 * -1.5);
    CHECK((f - (f00 + 2.5 * (f10 - f00) - 1.5 * (f01 - f00))).norm() < 1e-14);
  }

  SUBCASE("error against re-synthesis is second order") {
    double prev = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double d = 0.02 / std::pow(2.0, k);
      const CVec exact = steering_ubs(om + d, phi + d, 1, 4, kSpacing, kLambda);
      const double err = inf_norm(exact - perturbed_los(h, tv, d, d));
      if (k > 0) {
        const double ratio = prev / err;
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
      }
      prev = err;
    }
  }
}

TEST_CASE("uncertainty radii") {
  const NetworkGeometry g;
  const ChannelSet ch = synthesize_channels(g, ChannelParams{}, 12);
  const JitterBounds bounds = JitterBounds::from_ratios(ch.angles, 0.06, 0.04);

  SUBCASE("no jitter, no radii") {
    const UncertaintySet u = uncertainty_radii(ch, JitterBounds{});
    CHECK(u.xi_uh == 0.0);
    CHECK(u.xi_eh == 0.0);
    CHECK(u.xi_ug == 0.0);
    CHECK(u.xi_eg == 0.0);
  }

  SUBCASE("radii are linear in the bounds") {
    const UncertaintySet u1 = uncertainty_radii(ch, bounds);
    const UncertaintySet u2 = uncertainty_radii(ch, bounds.scaled(2.0));
    CHECK(u2.xi_uh == doctest::Approx(2.0 * u1.xi_uh).epsilon(1e-14));
    CHECK(u2.xi_eh == doctest::Approx(2.0 * u1.xi_eh).epsilon(1e-14));
    CHECK(u2.xi_ug == doctest::Approx(2.0 * u1.xi_ug).epsilon(1e-14));
    CHECK(u2.xi_eg == doctest::Approx(2.0 * u1.xi_eg).epsilon(1e-14));
  }

  SUBCASE("radius identities") {
    const UncertaintySet u = uncertainty_radii(ch, bounds);
    CHECK(u.xi_uh == doctest::Approx(bounds.u1 * u.a_u1 + bounds.u2 * u.a_u2).epsilon(1e-14));
    CHECK(u.xi_eh == doctest::Approx(bounds.e1 * u.a_e1 + bounds.e2 * u.a_e2).epsilon(1e-14));
    CHECK(u.a_u1 == doctest::Approx(u.a_u.norm()).epsilon(1e-14));
    CHECK(u.a_u2 == doctest::Approx(u.b_u.norm()).epsilon(1e-14));
    // path-gain prefactor carried by the direction vectors
    const TaylorVectors tv = taylor_direction_vectors(ch.angles.alice.phi, ch.angles.alice.omega, g.n_x,
                                                      g.n_y, g.ubs_spacing, g.wavelength);
    CHECK((u.a_u - ch.link_alice.los_weight * ch.h_u_los.cwiseProduct(tv.a)).norm() < 1e-15);
  }

  SUBCASE("sampled errors stay inside the radii") {
    const UncertaintySet u = uncertainty_radii(ch, bounds);
    std::mt19937_64 rng(99);
    const CMat diag_u = ch.h_iu.conjugate().asDiagonal();
    const CMat diag_e = ch.h_ie.conjugate().asDiagonal();
    for (int t = 0; t < 10000; ++t) {
      const Perturbation p = sample_perturbation(bounds, rng);
      CHECK(linearized_delta_h(u, true, p.omega_u, p.phi_u).norm() <= u.xi_uh * (1 + 1e-12));
      CHECK(linearized_delta_h(u, false, p.omega_e, p.phi_e).norm() <= u.xi_eh * (1 + 1e-12));
      const CMat dH = linearized_delta_H(u, ch, p.omega_i, p.phi_i);
      CHECK((diag_u * dH).norm() <= u.xi_ug * (1 + 1e-12));
      CHECK((diag_e * dH).norm() <= u.xi_eg * (1 + 1e-12));
    }
  }

  SUBCASE("linearized IRS error is the Taylor term of the re-synthesized channel") {
    const UncertaintySet u = uncertainty_radii(ch, bounds);
    double prev = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double d = 0.01 / std::pow(2.0, k);
      const CMat exact = perturbed_irs_channel(ch, d, -d) - ch.H_i;
      const double err = (exact - linearized_delta_H(u, ch, d, -d)).norm();
      if (k > 0) {
        CHECK(prev / err > 3.5);
        CHECK(prev / err < 4.5);
      }
      prev = err;
    }
  }
}

TEST_CASE("bounds from ratios split beta evenly") {
  const LinkAngles a = nominal_angles(NetworkGeometry{});
  const JitterBounds b = JitterBounds::from_ratios(a, 0.02, 0.04);
  CHECK(b.u1 == doctest::Approx(0.01 * a.alice.elevation));
  CHECK(b.u2 == doctest::Approx(0.01 * a.alice.elevation));
  CHECK(b.e1 == doctest::Approx(0.02 * a.eve.elevation));
  CHECK(b.i1 == b.u1);
  CHECK(b.i2 == b.u2);
  const JitterBounds c = JitterBounds::from_ratios(a, 0.02, 0.04, 0.1);
  CHECK(c.i1 == doctest::Approx(0.05 * a.irs.elevation));
  JitterBounds neg;
  neg.e2 = -1e-3;
  CHECK_THROWS_AS(neg.validate(), InvalidArgument);
}

TEST_CASE("perturbation sampling") {
  std::mt19937_64 rng(5);
  SUBCASE("zero bounds") {
    const Perturbation p = sample_perturbation(JitterBounds{}, rng);
    CHECK(p.omega_u == 0.0);
    CHECK(p.phi_u == 0.0);
    CHECK(p.omega_i == 0.0);
  }
  SUBCASE("box membership") {
    JitterBounds b = uniform_bounds(0.01);
    b.u2 = 0.003;
    double max_w = 0.0, max_p = 0.0;
    for (int t = 0; t < 100000; ++t) {
      const Perturbation p = sample_perturbation(b, rng);
      max_w = std::max(max_w, std::abs(p.omega_u));
      max_p = std::max(max_p, std::abs(p.phi_u));
      CHECK(std::abs(p.omega_e) <= b.e1);
      CHECK(std::abs(p.phi_i) <= b.i2);
    }
    CHECK(max_w <= b.u1);
    CHECK(max_p <= b.u2);
    CHECK(max_w > 0.99 * b.u1);
  }
  SUBCASE("seeded") {
    std::mt19937_64 r1(42), r2(42);
    const JitterBounds b = uniform_bounds(0.02);
    for (int t = 0; t < 100; ++t) {
      const Perturbation p = sample_perturbation(b, r1);
      const Perturbation q = sample_perturbation(b, r2);
      CHECK(p.omega_u == q.omega_u);
      CHECK(p.phi_e == q.phi_e);
      CHECK(p.phi_i == q.phi_i);
    }
  }
}
