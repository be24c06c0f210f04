#include <doctest.h>

#include <cmath>
#include <vector>

#include "lzs/errors.hpp"
#include "lzs/observables.hpp"
#include "oracles.hpp"

using namespace lzs;

TEST_CASE("band velocity") {
  CHECK(band_velocity({1.55, 1.0}, 0.0) == 0.0);
  CHECK(band_velocity({0.0, 1.3}, 2.0) == doctest::Approx(1.3));
  CHECK(band_velocity({0.0, 1.3}, -2.0) == doctest::Approx(-1.3));
  const double eps = std::sqrt(1.55 * 1.55 + std::pow(2.0 * oracle::kHbar, 2));
  CHECK(band_velocity({1.55, 1.0}, 1.0) == doctest::Approx(2.0 * oracle::kHbar / eps).epsilon(1e-14));
  CHECK(band_velocity({1.55, 1.0}, 1.0) == doctest::Approx(0.6473411646).epsilon(1e-9));
  // Finite-difference derivative of eps/2 over hbar.
  const double h = 1e-5;
  auto e = [](double k) { return 0.5 * std::sqrt(1.55 * 1.55 + std::pow(2.0 * oracle::kHbar * k, 2)); };
  CHECK(band_velocity({1.55, 1.0}, 0.37) == doctest::Approx((e(0.37 + h) - e(0.37 - h)) / (2 * h * oracle::kHbar)).epsilon(1e-8));
}

TEST_CASE("symmetric grid") {
  const auto k = symmetric_k_grid(3.0, 9);
  REQUIRE(k.size() == 9);
  for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[k.size() - 1 - i] == -k[i]);
  CHECK(k[4] == 0.0);
  CHECK(k.back() == 3.0);
  CHECK_THROWS_AS(symmetric_k_grid(3.0, 8), ValidationError);
}

TEST_CASE("residual current integrand") {
  const MaterialSpec mat{1.0, 1.0};
  KResolvedResult r;
  r.k0 = symmetric_k_grid(10.0, 201);
  for (double k : r.k0) r.v_cb.push_back(band_velocity(mat, k));
  r.rho_cb_res.assign(r.k0.size(), 0.0);
  CHECK(residual_current(r) == 0.0);

  for (std::size_t i = 0; i < r.k0.size(); ++i) r.rho_cb_res[i] = 0.3 * std::exp(-r.k0[i] * r.k0[i]);
  CHECK(std::abs(residual_current(r)) < 1e-12);

  // Odd-in-k excess: trapezoid by hand.
  for (std::size_t i = 0; i < r.k0.size(); ++i)
    r.rho_cb_res[i] = 0.2 * std::exp(-(r.k0[i] - 0.5) * (r.k0[i] - 0.5));
  double ref = 0.0;
  const double dk = r.k0[1] - r.k0[0];
  for (std::size_t i = 0; i < r.k0.size(); ++i) {
    const double w = (i == 0 || i + 1 == r.k0.size()) ? 0.5 : 1.0;
    ref += w * r.v_cb[i] * 2.0 * r.rho_cb_res[i] * dk;
  }
  ref *= 2.0 / (2.0 * M_PI);
  CHECK(residual_current(r) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(residual_current(r) > 0.0);

  r.rho_cb_res.back() = 1e-3;
  CHECK_THROWS_AS(residual_current(r), WindowError);

  KResolvedResult skew = r;
  skew.k0.back() += 0.1;
  skew.rho_cb_res.back() = 0.0;
  CHECK_THROWS_AS(residual_current(skew), ValidationError);
}

TEST_CASE("residual current symmetries") {
  PulseSpec p;
  const WorkingPoint wp = working_point(0.5, 1.0, 1.55, 1.0);
  p.peak_field = wp.drive.peak_field;
  KWindowPolicy pol;
  pol.points = 129;
  pol.max_refinements = 0;

  p.cep = 0.0;
  const auto zero = compute_residual_current(wp.material, p, pol);
  CHECK(std::abs(zero.j_res) < 1e-6 * current_scale(wp.material, zero.half_width));

  p.cep = M_PI / 2.0;
  const auto a = compute_residual_current(wp.material, p, pol);
  p.cep = 3.0 * M_PI / 2.0;
  const auto b = compute_residual_current(wp.material, p, pol);
  CHECK(std::abs(a.j_res) > 1e-4 * current_scale(wp.material, a.half_width));
  CHECK(std::abs(a.j_res + b.j_res) < 1e-6 * std::abs(a.j_res));
  CHECK(a.half_width == b.half_width);
}

TEST_CASE("window bookkeeping") {
  PulseSpec p;
  const WorkingPoint wp = working_point(0.3, 2.0, 1.55, 1.0);
  p.peak_field = wp.drive.peak_field;
  const auto r = compute_residual_current(wp.material, p);
  const auto w = make_waveform(p, default_grid(p));
  CHECK(r.half_width >= default_k_half_width(w) * (1.0 - 1e-12));
  CHECK(r.profile.k0.size() == 257 * (1u << r.refinements) - ((1u << r.refinements) - 1));
  CHECK(r.profile.rho_cb_res.front() <= 1e-6);
  CHECK(r.profile.rho_cb_res.back() <= 1e-6);
  CHECK(r.rho_center == doctest::Approx(r.profile.rho_cb_res[r.profile.k0.size() / 2]));
  CHECK(default_k_half_width(w) == doctest::Approx(1.5 * w.max_abs_a() / oracle::kHbar + 3.0));
}

TEST_CASE("no current far into the adiabatic side") {
  PulseSpec p;
  p.peak_field = 0.5;
  const MaterialSpec mat{12.0, 1.0};
  KWindowPolicy pol;
  pol.points = 65;
  pol.max_refinements = 0;
  const auto r = compute_residual_current(mat, p, pol);
  CHECK(std::abs(r.j_res) < 1e-9 * current_scale(mat, r.half_width));
}

TEST_CASE("policy validation") {
  KWindowPolicy pol;
  pol.points = 100;
  CHECK_THROWS_AS(pol.validate(), ValidationError);
  pol.points = 257;
  pol.extension_factor = 1.0;
  CHECK_THROWS_AS(pol.validate(), ValidationError);
}
