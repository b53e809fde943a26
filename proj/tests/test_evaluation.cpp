#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "robustirs/alternating.hpp"
#include "robustirs/config.hpp"
#include "robustirs/evaluation.hpp"

using namespace robustirs;

namespace {

struct Solved {
  ChannelSet ch;
  JitterBounds bounds;
  UncertaintySet u;
  RobustConfig cfg;
  AOTrace trace;
};

const Solved& solved(IrsMode mode) {
  static const Solved active = [] {
    const Scenario sc;
    Solved s;
    s.ch = synthesize_channels(sc.geometry, sc.channel_params(), 21);
    s.bounds = JitterBounds::from_ratios(s.ch.angles, 0.06, 0.04);
    s.u = uncertainty_radii(s.ch, s.bounds);
    s.cfg = sc.robust_config(IrsMode::Active);
    s.trace = alternate_optimize(s.ch, s.u, s.cfg);
    return s;
  }();
  static const Solved passive = [] {
    const Scenario sc;
    Solved s;
    s.ch = synthesize_channels(sc.geometry, sc.channel_params(), 22);
    s.bounds = JitterBounds::from_ratios(s.ch.angles, 0.06, 0.04);
    s.u = uncertainty_radii(s.ch, s.bounds);
    s.cfg = sc.robust_config(IrsMode::Passive);
    s.trace = alternate_optimize(s.ch, s.u, s.cfg);
    return s;
  }();
  return mode == IrsMode::Active ? active : passive;
}

}  // namespace

TEST_CASE("SINR formulas") {
  std::mt19937_64 rng(1);
  SUBCASE("no reflection") {
    const CVec h = oracle::random_cvec(rng, 3), w = oracle::random_cvec(rng, 3);
    const CMat H = oracle::random_cmat(rng, 4, 3);
    const CVec hi = oracle::random_cvec(rng, 4);
    const double expected = std::norm(oracle::inner(h, w)) / 0.2;
    CHECK(sinr_theta_form(h, hi, H, w, CVec::Zero(4), 0.7, 0.2) == doctest::Approx(expected).epsilon(1e-13));
  }
  SUBCASE("no transmission") {
    const CVec h = oracle::random_cvec(rng, 3);
    const CMat H = oracle::random_cmat(rng, 4, 3);
    const CVec hi = oracle::random_cvec(rng, 4), v = oracle::random_cvec(rng, 4);
    CHECK(sinr_theta_form(h, hi, H, CVec::Zero(3), v, 0.7, 0.2) == 0.0);
  }
  SUBCASE("both forms against the direct sum") {
    for (int t = 0; t < 200; ++t) {
      const CVec h = oracle::random_cvec(rng, 2), w = oracle::random_cvec(rng, 2);
      const CMat H = oracle::random_cmat(rng, 7, 2);
      const CVec hi = oracle::random_cvec(rng, 7), v = oracle::random_cvec(rng, 7, 3.0);
      const double ref = std::norm(oracle::received(h, hi, H, w, v)) / oracle::receiver_noise(hi, v, 0.3, 0.1);
      const double a = sinr_theta_form(h, hi, H, w, v, 0.3, 0.1);
      const double b = sinr_v_form(h, cascaded_channel(hi, H), hi, w, v, 0.3, 0.1);
      CHECK(std::abs(a - ref) <= 1e-12 * ref);
      CHECK(std::abs(b - ref) <= 1e-12 * ref);
    }
  }
  CHECK(rate(3.0) == doctest::Approx(2.0));
}

TEST_CASE("worst-case secrecy rate") {
  const Solved& s = solved(IrsMode::Active);
  SUBCASE("zero bounds give the nominal rates") {
    const PerformanceReport r = worst_case_secrecy_rate(s.trace.state, s.ch, JitterBounds{}, s.cfg, 4);
    CHECK(r.worst_rate_u == doctest::Approx(r.rate_u).epsilon(1e-14));
    CHECK(r.worst_rate_e == doctest::Approx(r.rate_e).epsilon(1e-14));
    const SinrPair nominal = sinr(s.trace.state, s.ch, s.cfg);
    CHECK(r.rate_u == doctest::Approx(std::log2(1 + nominal.alice)));
  }
  SUBCASE("secrecy rate is clamped at zero") {
    // beam steered at the eavesdropper
    BeamState st{s.ch.h_e.normalized() * 0.5, CVec::Zero(s.ch.num_elements())};
    const PerformanceReport r = worst_case_secrecy_rate(st, s.ch, s.bounds, s.cfg, 4);
    REQUIRE(r.worst_rate_e > r.worst_rate_u);
    CHECK(r.secrecy_rate == 0.0);
  }
  SUBCASE("grid refinement 8 -> 16") {
    const PerformanceReport r8 = worst_case_secrecy_rate(s.trace.state, s.ch, s.bounds, s.cfg, 8);
    const PerformanceReport r16 = worst_case_secrecy_rate(s.trace.state, s.ch, s.bounds, s.cfg, 16);
    CHECK(std::abs(r16.worst_rate_u - r8.worst_rate_u) < 0.01 * r16.worst_rate_u);
    CHECK(r16.secrecy_rate >= 0.0);
  }
  SUBCASE("serial and parallel scans agree") {
    const PerformanceReport a = worst_case_secrecy_rate(s.trace.state, s.ch, s.bounds, s.cfg, 6, false);
    const PerformanceReport b = worst_case_secrecy_rate(s.trace.state, s.ch, s.bounds, s.cfg, 6, true);
    CHECK(a.worst_rate_u == b.worst_rate_u);
    CHECK(a.worst_rate_e == b.worst_rate_e);
  }
  SUBCASE("worst point is a grid point with the reported rate") {
    const PerformanceReport r = worst_case_secrecy_rate(s.trace.state, s.ch, s.bounds, s.cfg, 5);
    CHECK(rate(sinr(s.trace.state, s.ch, s.cfg, r.worst_alice).alice) == doctest::Approx(r.worst_rate_u));
    CHECK(rate(sinr(s.trace.state, s.ch, s.cfg, r.worst_eve).eve) == doctest::Approx(r.worst_rate_e));
  }
  SUBCASE("larger boxes never help") {
    // the 9-point lattice on 2 beta contains the 5-point lattice on beta
    double prev = std::numeric_limits<double>::infinity();
    for (const double f : {0.5, 1.0, 2.0}) {
      const PerformanceReport small = worst_case_secrecy_rate(s.trace.state, s.ch, s.bounds.scaled(f), s.cfg, 5);
      const PerformanceReport big = worst_case_secrecy_rate(s.trace.state, s.ch, s.bounds.scaled(2 * f), s.cfg, 9);
      CHECK(big.secrecy_rate <= small.secrecy_rate + 1e-12);
      CHECK(small.secrecy_rate <= prev + 1e-12);
      prev = big.secrecy_rate;
    }
  }
}

TEST_CASE("linearized and exact SINR agree to first order") {
  const Solved& s = solved(IrsMode::Active);
  double prev = 0.0;
  for (int k = 0; k < 4; ++k) {
    const JitterBounds b = s.bounds.scaled(std::pow(0.5, k));
    const UncertaintySet u = uncertainty_radii(s.ch, b);
    std::mt19937_64 rng(5);
    double gap = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Perturbation d = sample_perturbation(b, rng);
      const SinrPair lin = sinr_linearized(s.trace.state, s.ch, u, s.cfg, d);
      const SinrPair ex = sinr(s.trace.state, s.ch, s.cfg, d);
      gap = std::max(gap, std::abs(lin.alice - ex.alice) / ex.alice);
    }
    if (k > 0) CHECK(prev / gap > 1.9);
    prev = gap;
  }
}

TEST_CASE("audit") {
  SUBCASE("optimized active state passes") {
    const Solved& s = solved(IrsMode::Active);
    const AuditReport a = audit(s.trace.state, s.ch, s.u, s.cfg, 1000, 7);
    CHECK(a.passed(1e-6));
    CHECK(a.alice_margin >= -1e-6);
    CHECK(a.eve_margin >= -1e-6);
    CHECK(a.amplification_margin >= -1e-8);
    BeamState half = s.trace.state;
    half.w *= 0.5;
    const AuditReport b = audit(half, s.ch, s.u, s.cfg, 1000, 7);
    CHECK(b.alice_margin < 0.0);
    CHECK_FALSE(b.passed(1e-6));
  }
  SUBCASE("optimized passive state passes, unit magnitudes") {
    const Solved& s = solved(IrsMode::Passive);
    const AuditReport a = audit(s.trace.state, s.ch, s.u, s.cfg, 1000, 8);
    CHECK(a.passed(1e-6));
    CHECK(a.magnitude_margin >= -1e-8);
    CHECK(std::isinf(a.amplification_margin));
  }
  CHECK_THROWS_AS(audit(solved(IrsMode::Active).trace.state, solved(IrsMode::Active).ch,
                        solved(IrsMode::Active).u, solved(IrsMode::Active).cfg, 0, 1),
                  InvalidArgument);
}
