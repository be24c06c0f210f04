#include <doctest.h>

#include <cmath>
#include <random>

#include "lzs/core_model.hpp"
#include "lzs/errors.hpp"

using namespace lzs;

TEST_CASE("report at the baseline working point") {
  const auto r = compute_report({1.55, 1.0}, {1.55, 1.0});
  // Direct evaluation: gamma = w Delta / (2 v_F e E0) with w = 1.55 / hbar.
  const double w = 1.55 / 0.6582119569;
  CHECK(r.gamma == doctest::Approx(w * 1.55 / 2.0).epsilon(1e-14));
  CHECK(r.gamma == doctest::Approx(1.8249).epsilon(1e-4));
  CHECK(r.m_photon == doctest::Approx(1.0));
  CHECK(r.z_r == doctest::Approx(0.5480).epsilon(1e-3));
  CHECK(r.delta_lz == doctest::Approx(0.4562).epsilon(1e-3));
  CHECK(r.p_lz == doctest::Approx(std::exp(-2.0 * M_PI * r.delta_lz)));
  CHECK(r.rabi_freq == doctest::Approx(1.0 / 1.55).epsilon(1e-14));  // v_F e E0 / (hbar w)
  CHECK(r.transition_time == doctest::Approx(M_PI / r.rabi_freq));
  CHECK(r.sweep_rate == doctest::Approx(2.0));
  CHECK(r.eff_mass == doctest::Approx(1.55 / 4.0));
  CHECK(r.a0 == doctest::Approx(1.0 / (r.gamma * 299.792458)));
  CHECK(r.regime == Regime::PerturbativeMultiphoton);
}

TEST_CASE("gapless limit") {
  const auto r = compute_report({0.0, 1.0}, {1.55, 2.0});
  CHECK(r.gamma == 0.0);
  CHECK(r.m_photon == 0.0);
  CHECK(r.delta_lz == 0.0);
  CHECK(r.p_lz == 1.0);
}

TEST_CASE("P_LZ = 1/2 at delta = ln2 / 2pi") {
  // Delta^2 / (8 hbar v_F e E0) = ln2 / (2 pi)
  const double e0 = 1.0;
  const double gap = std::sqrt(8.0 * 0.6582119569 * e0 * std::log(2.0) / (2.0 * M_PI));
  const auto r = compute_report({gap, 1.0}, {1.55, e0});
  CHECK(r.p_lz == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("drive validation") {
  CHECK_THROWS_AS(compute_report({1.0, 1.0}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(compute_report({1.0, 1.0}, {1.55, -1.0}), ValidationError);
  CHECK_THROWS_AS(compute_report({-1.0, 1.0}, {1.55, 1.0}), ValidationError);
  CHECK_THROWS_AS(compute_report({1.0, 0.0}, {1.55, 1.0}), ValidationError);
}

TEST_CASE("regime cascade") {
  auto label = [](double gamma, double m) {
    const WorkingPoint wp = working_point(gamma, m, 1.55, 1.0);
    return compute_report(wp.material, wp.drive).regime;
  };
  CHECK(label(5.0, 1.0) == Regime::PerturbativeMultiphoton);
  CHECK(label(0.5, 0.25) == Regime::NonImpulsiveLZ);
  CHECK(label(0.2, 2.2) == Regime::AdiabaticImpulsiveLZS);
  CHECK(label(0.05, 3.0) == Regime::AdiabaticImpulsiveLZS);  // delta = 0.0375, P = 0.79
  CHECK(label(0.02, 3.0) == Regime::ImpulsiveLZ);  // P = 0.91
  CHECK(label(0.9, 3.0) == Regime::Adiabatic);     // delta = 0.675, z_R = 3.3

  const auto r = compute_report(working_point(0.2, 2.2, 1.55, 1.0).material,
                                working_point(0.2, 2.2, 1.55, 1.0).drive);
  CHECK(r.delta_lz == doctest::Approx(0.11).epsilon(1e-12));
  CHECK(r.p_lz == doctest::Approx(0.50).epsilon(0.01));
}

TEST_CASE("regime labels round-trip") {
  for (Regime r : {Regime::PerturbativeMultiphoton, Regime::ImpulsiveLZ, Regime::NonImpulsiveLZ,
                   Regime::Adiabatic, Regime::AdiabaticImpulsiveLZS})
    CHECK(regime_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(regime_from_string("Regime6"), ValidationError);
}

TEST_CASE("relativistic boundary is strict") {
  AdiabaticityReport r;
  r.gamma = 0.5;
  CHECK_FALSE(relativistic_boundary(r));
  r.gamma = 0.005;
  CHECK(relativistic_boundary(r));
  r.gamma = 0.007;
  CHECK_FALSE(relativistic_boundary(r));
  RegimeThresholds t;
  t.relativistic_gamma = 0.01;
  CHECK(relativistic_boundary(r, t));
}

TEST_CASE("identities and working-point round trip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double gamma = std::pow(10.0, lg(rng));
    const double m = std::pow(10.0, lg(rng) / 2.0);
    const WorkingPoint wp = working_point(gamma, m, 1.55, 1.0);
    const auto r = compute_report(wp.material, wp.drive);
    CHECK(std::abs(r.gamma / gamma - 1.0) < 1e-12);
    CHECK(std::abs(r.m_photon / m - 1.0) < 1e-12);
    CHECK(std::abs(r.z_r * r.gamma / r.m_photon - 1.0) < 1e-12);
    CHECK(std::abs(r.delta_lz / (r.m_photon * r.gamma / 4.0) - 1.0) < 1e-12);
  }
}

TEST_CASE("gamma scales inversely with the field") {
  const auto a = compute_report({1.2, 1.0}, {1.55, 0.7});
  const auto b = compute_report({1.2, 1.0}, {1.55, 0.7 * 3.0});
  CHECK(b.gamma * 3.0 == doctest::Approx(a.gamma).epsilon(1e-15));
}

TEST_CASE("P_LZ decreasing in delta") {
  double prev = 2.0;
  for (double gap = 0.0; gap < 5.0; gap += 0.25) {
    const double p = compute_report({gap, 1.0}, {1.55, 1.0}).p_lz;
    CHECK(p < prev);
    prev = p;
  }
}
