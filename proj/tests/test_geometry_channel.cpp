#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "robustirs/geometry_channel.hpp"

using namespace robustirs;

namespace {

// Unit vector of the steering convention.
Vec3 direction_cosines(const LinkDirection& d) {
  return {std::sin(d.omega) * std::cos(d.phi), std::sin(d.omega) * std::sin(d.phi), std::cos(d.omega)};
}

bool bit_identical(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j).real() != b(i, j).real() || a(i, j).imag() != b(i, j).imag()) return false;
  return true;
}

}  // namespace

TEST_CASE("distances on the baseline layout") {
  const NetworkGeometry g;
  const LinkDistances d = distances(g);
  CHECK(d.ubs_alice == doctest::Approx(std::sqrt(200.0)).epsilon(1e-14));
  CHECK(d.ubs_irs == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(d.ubs_eve == doctest::Approx(std::sqrt(500.0)).epsilon(1e-14));
}

TEST_CASE("UAV straight above Alice") {
  NetworkGeometry g;
  g.ubs_pos = {g.alice_pos.x(), g.alice_pos.y(), 37.5};
  CHECK(distances(g).ubs_alice == doctest::Approx(37.5));
  const LinkAngles a = nominal_angles(g);
  CHECK(std::cos(a.alice.omega) == doctest::Approx(1.0));
  CHECK(a.alice.omega == doctest::Approx(0.0));
}

TEST_CASE("UBS to Eve angle on the baseline layout") {
  const LinkAngles a = nominal_angles(NetworkGeometry{});
  CHECK(std::cos(a.eve.omega) == doctest::Approx(10.0 / std::sqrt(500.0)).epsilon(1e-13));
}

TEST_CASE("angles reproduce the geometry's direction cosines") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0), h(1.0, 80.0);
  for (int t = 0; t < 200; ++t) {
    const Vec3 src(u(rng), u(rng), h(rng));
    const Vec3 dst(u(rng), u(rng), 0.0);
    const LinkDirection d = link_direction(src, dst);
    const Vec3 expected = (src - dst) / (src - dst).norm();
    CHECK((direction_cosines(d) - expected).norm() < 1e-12);
    CHECK(d.distance == doctest::Approx((src - dst).norm()).epsilon(1e-14));
    CHECK(std::sin(d.elevation) == doctest::Approx(std::abs(src.z()) / d.distance).epsilon(1e-12));
  }
  const LinkAngles a = nominal_angles(NetworkGeometry{});
  const Vec3 to_irs = NetworkGeometry{}.ubs_pos - NetworkGeometry{}.irs_pos;
  CHECK((direction_cosines(a.irs) - to_irs.normalized()).norm() < 1e-12);
  // arrival at the IRS: sin(az) sin(el) = dy/d, cos(az) sin(el) = dx/d
  const double dist = to_irs.norm();
  CHECK(std::sin(a.irs_arrival_azimuth) * std::sin(a.irs_arrival_elevation) ==
        doctest::Approx(to_irs.y() / dist));
  CHECK(std::abs(std::cos(a.irs_arrival_azimuth) * std::sin(a.irs_arrival_elevation) - to_irs.x() / dist) <
        1e-12);
}

TEST_CASE("coincident nodes are rejected") {
  NetworkGeometry g;
  g.alice_pos = {10.0, 20.0, 0.0};
  g.ubs_pos = {10.0, 20.0, 0.0};
  CHECK_THROWS_AS(distances(g), DegenerateGeometry);
  CHECK_THROWS_AS(link_direction(Vec3(1, 2, 3), Vec3(1, 2, 3)), DegenerateGeometry);
  NetworkGeometry bad;
  bad.alice_pos.z() = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  NetworkGeometry bad2;
  bad2.n_y = 0;
  CHECK_THROWS_AS(bad2.validate(), InvalidArgument);
}

TEST_CASE("UBS steering vector") {
  SUBCASE("single antenna") {
    const CVec s = steering_ubs(0.3, 1.1, 1, 1, 0.05, 0.1);
    REQUIRE(s.size() == 1);
    CHECK(std::abs(s(0) - cplx(1.0)) == 0.0);
  }
  SUBCASE("forced phase") {
    const CVec s = steering_ubs(kPi / 2, kPi / 2, 1, 2, 0.05, 0.1);
    CHECK(std::abs(s(0) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(s(1) - cplx(-1.0)) < 1e-12);
  }
  SUBCASE("entries against the phase formula, row-major (p, q)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int t = 0; t < 50; ++t) {
      const double om = ang(rng), ph = ang(rng);
      const int nx = 3, ny = 4;
      const double d = 0.05, lam = 0.1;
      const CVec s = steering_ubs(om, ph, nx, ny, d, lam);
      REQUIRE(s.size() == nx * ny);
      for (int p = 0; p < nx; ++p)
        for (int q = 0; q < ny; ++q) {
          const double phase = -2.0 * kPi * d / lam * (p * std::cos(om) + q * std::sin(ph) * std::sin(om));
          CHECK(std::abs(s(p * ny + q) - std::polar(1.0, phase)) < 1e-12);
          CHECK(std::abs(std::abs(s(p * ny + q)) - 1.0) < 1e-14);
        }
    }
  }
}

TEST_CASE("IRS steering vector") {
  CHECK(std::abs(steering_irs(0.4, 0.9, 1, 1, 0.05, 0.1)(0) - cplx(1.0)) == 0.0);
  const CVec flat = steering_irs(1.3, 0.0, 4, 3, 0.05, 0.1);
  CHECK((flat - CVec::Ones(12)).norm() < 1e-15);
  const double az = 0.7, el = 1.2;
  const CVec s = steering_irs(az, el, 5, 2, 0.05, 0.1);
  for (int p = 0; p < 5; ++p)
    for (int q = 0; q < 2; ++q) {
      const double phase = -2.0 * kPi * 0.5 * (p * std::cos(az) * std::sin(el) + q * std::sin(az) * std::sin(el));
      CHECK(std::abs(s(p * 2 + q) - std::polar(1.0, phase)) < 1e-12);
    }
  CHECK((s.cwiseAbs() - RVec::Ones(10)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Rician K-factor") {
  CHECK(rician_k_factor(kPi / 2) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(rician_k_factor(0.0) == doctest::Approx(15.0).epsilon(1e-14));
  double prev = rician_k_factor(0.0);
  for (int i = 1; i <= 100; ++i) {
    const double k = rician_k_factor(kPi / 2 * i / 100.0);
    CHECK(k < prev);
    prev = k;
  }
}

TEST_CASE("doubling the distance scales the LOS power weight by 2^-alpha_L") {
  const ChannelParams p;
  const RicianLink a = rician_link(13.0, 0.4, p);
  const RicianLink b = rician_link(26.0, 0.4, p);
  CHECK(b.los_weight * b.los_weight / (a.los_weight * a.los_weight) ==
        doctest::Approx(std::pow(2.0, -p.los_exponent)).epsilon(1e-13));
  const double k = rician_k_factor(0.4, p.k_a, p.k_b);
  CHECK(a.los_weight * a.los_weight ==
        doctest::Approx(p.los_gain * std::pow(13.0, -p.los_exponent) * k / (1 + k)).epsilon(1e-13));
  CHECK(a.nlos_weight * a.nlos_weight ==
        doctest::Approx(p.nlos_gain * std::pow(13.0, -p.nlos_exponent) / (1 + k)).epsilon(1e-13));
}

TEST_CASE("channel synthesis") {
  const NetworkGeometry g;
  const ChannelParams p;

  SUBCASE("same seed gives bit-identical channels") {
    const ChannelSet a = synthesize_channels(g, p, 77);
    const ChannelSet b = synthesize_channels(g, p, 77);
    CHECK(bit_identical(a.h_u, b.h_u));
    CHECK(bit_identical(a.h_e, b.h_e));
    CHECK(bit_identical(a.H_i, b.H_i));
    CHECK(bit_identical(a.h_iu, b.h_iu));
    CHECK(bit_identical(a.h_ie, b.h_ie));
    const ChannelSet c = synthesize_channels(g, p, 78);
    CHECK_FALSE(bit_identical(a.h_u, c.h_u));
  }

  SUBCASE("LOS parts are unit modulus and the IRS LOS matrix has Frobenius norm sqrt(MN)") {
    const ChannelSet ch = synthesize_channels(g, p, 5);
    for (const CVec* v : {&ch.h_u_los, &ch.h_e_los, &ch.h_i_departure, &ch.h_i_arrival, &ch.h_iu_los, &ch.h_ie_los})
      CHECK((v->cwiseAbs() - RVec::Ones(v->size())).cwiseAbs().maxCoeff() < 1e-14);
    const CMat HL = ch.h_i_arrival * ch.h_i_departure.adjoint();
    CHECK(HL.norm() == doctest::Approx(std::sqrt(double(g.num_elements() * g.num_antennas()))));
  }

  SUBCASE("large K leaves the scaled LOS steering vector") {
    ChannelParams big = p;
    big.k_a = 1e12;
    const ChannelSet ch = synthesize_channels(g, big, 9);
    const LinkAngles a = nominal_angles(g);
    const double w = std::sqrt(big.los_gain * std::pow(a.alice.distance, -big.los_exponent));
    const CVec los = steering_ubs(a.alice.omega, a.alice.phi, g.n_x, g.n_y, g.ubs_spacing, g.wavelength);
    CHECK((ch.h_u - w * los).norm() / (w * los.norm()) < 1e-5);
  }

  SUBCASE("second moment of the direct channel") {
    const LinkAngles a = nominal_angles(g);
    const double d = a.alice.distance;
    const double k = rician_k_factor(a.alice.elevation, p.k_a, p.k_b);
    const double expected = g.num_antennas() *
                            (p.los_gain * std::pow(d, -p.los_exponent) * k + p.nlos_gain * std::pow(d, -p.nlos_exponent)) /
                            (1.0 + k);
    double acc = 0.0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) acc += synthesize_channels(g, p, static_cast<std::uint64_t>(s)).h_u.squaredNorm();
    CHECK(acc / seeds == doctest::Approx(expected).epsilon(0.05));
  }
}

TEST_CASE("cascaded channel") {
  std::mt19937_64 rng(21);
  SUBCASE("all-ones IRS link leaves H_I") {
    const CMat H = oracle::random_cmat(rng, 6, 3);
    CHECK((cascaded_channel(CVec::Ones(6), H) - H).norm() == 0.0);
  }
  SUBCASE("v^H G against direct evaluation") {
    for (int t = 0; t < 100; ++t) {
      const CMat H = oracle::random_cmat(rng, 7, 2);
      const CVec h = oracle::random_cvec(rng, 7);
      const CVec v = oracle::random_cvec(rng, 7);
      const CVec w = oracle::random_cvec(rng, 2);
      const CMat G = cascaded_channel(h, H);
      const cplx lhs = v.dot(G * w);
      const cplx rhs = oracle::received(CVec::Zero(2), h, H, w, v);
      CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
    }
  }
  SUBCASE("single element") {
    const CMat H = oracle::random_cmat(rng, 1, 4);
    const CVec h = oracle::random_cvec(rng, 1);
    const CMat G = cascaded_channel(h, H);
    CHECK(G.rows() == 1);
    CHECK((G - std::conj(h(0)) * H).norm() < 1e-15);
  }
  CHECK_THROWS_AS(cascaded_channel(CVec::Ones(3), CMat::Ones(4, 2)), DimensionMismatch);
}

TEST_CASE("perturbed channels re-synthesize only the LOS part") {
  const NetworkGeometry g;
  const ChannelSet ch = synthesize_channels(g, ChannelParams{}, 4);
  CHECK((perturbed_direct_channel(ch, true, 0.0, 0.0) - ch.h_u).norm() < 1e-15);
  CHECK((perturbed_irs_channel(ch, 0.0, 0.0) - ch.H_i).norm() < 1e-15);
  const double dw = 0.01, dp = -0.02;
  const CVec los = steering_ubs(ch.angles.alice.omega + dw, ch.angles.alice.phi + dp, g.n_x, g.n_y,
                                g.ubs_spacing, g.wavelength);
  const CVec expected = ch.link_alice.los_weight * los + ch.link_alice.nlos_weight * ch.h_u_nlos;
  CHECK((perturbed_direct_channel(ch, true, dw, dp) - expected).norm() < 1e-15);
}
