#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lzs/analytics.hpp"
#include "lzs/errors.hpp"
#include "lzs/observables.hpp"
#include "lzs/ode.hpp"
#include "lzs/propagator.hpp"
#include "oracles.hpp"

using namespace lzs;

namespace {

Trajectory field_free(double k0, double t_end, double step) {
  DriveParams d{1.55, 1e-300};
  TimeGrid g{0.0, step, static_cast<std::size_t>(t_end / step) + 1};
  return bloch_trajectory(monochromatic(d, g), k0, {1.0, 1.0});
}

}  // namespace

TEST_CASE("adaptive integrator on a harmonic oscillator") {
  auto rhs = [](double, const OdeState<2>& y, OdeState<2>& d) {
    d[0] = y[1];
    d[1] = -y[0];
  };
  AdaptiveIntegrator<2, decltype(rhs)> integ(rhs, {1e-12, 1e-12});
  OdeState<2> y{1.0, 0.0};
  double t = 0.0;
  for (int i = 1; i <= 10; ++i) integ.advance(t, y, i * 1.0);
  CHECK(t == 10.0);
  CHECK(std::abs(y[0] - std::cos(10.0)) < 1e-10);
  CHECK(std::abs(y[1] + std::sin(10.0)) < 1e-10);
}

TEST_CASE("hamiltonian and Houston frame") {
  const MaterialSpec mat{1.55, 1.0};
  auto ev = hamiltonian(mat, 0.0).eigenvalues();
  CHECK(ev[0] == doctest::Approx(-0.775));
  CHECK(ev[1] == doctest::Approx(0.775));
  const double eps = std::sqrt(1.55 * 1.55 + std::pow(2.0 * oracle::kHbar, 2));
  CHECK(eps == doctest::Approx(2.0335859758).epsilon(1e-10));
  ev = hamiltonian(mat, 1.0).eigenvalues();
  CHECK(ev[1] - ev[0] == doctest::Approx(eps).epsilon(1e-14));
  CHECK(houston_frame(mat, 1.0).eps == doctest::Approx(eps).epsilon(1e-14));
  ev = hamiltonian({0.0, 1.0}, -2.0).eigenvalues();
  CHECK(ev[1] == doctest::Approx(2.0 * oracle::kHbar));

  const auto f = houston_frame(mat, 0.7);
  const auto& p = f.eigvec_plus;
  const auto& m = f.eigvec_minus;
  CHECK(p[0] * p[0] + p[1] * p[1] == doctest::Approx(1.0));
  CHECK(std::abs(p[0] * m[0] + p[1] * m[1]) < 1e-15);
  const auto h = hamiltonian(mat, 0.7);
  CHECK(h.h00 * p[0] + h.h01 * p[1] == doctest::Approx(f.eps / 2.0 * p[0]));
}

TEST_CASE("Houston frames keep their sign along a trajectory") {
  PulseSpec p;
  p.peak_field = 5.0;
  const auto tr = bloch_trajectory(synthesize(p, default_grid(p)), 0.0, {0.3, 1.0});
  const auto frames = houston_frames({0.3, 1.0}, tr);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const auto& a = frames[i - 1].eigvec_plus;
    const auto& b = frames[i].eigvec_plus;
    CHECK(a[0] * b[0] + a[1] * b[1] > 0.0);
  }
}

TEST_CASE("field-free propagation stays in the valence band") {
  const auto tr = field_free(0.8, 50.0, 0.02);
  PropagationOptions o;
  const auto r = propagate_state({1.55, 1.0}, tr, o);
  for (double rho : r.rho_cb) CHECK(rho < 1e-14);
  CHECK(r.max_norm_drift < 1e-10);
}

TEST_CASE("single linear sweep vs Landau-Zener formula") {
  for (double delta : {0.01, 0.25, 1.0}) {
    const double alpha0 = 1.0;
    const MaterialSpec mat{lz_gap_for_delta(delta, alpha0), 1.0};
    PropagationOptions o;
    o.record = false;
    const auto r = propagate_state(mat, linear_sweep_trajectory(mat, alpha0, 100.0), o);
    CHECK(r.final_rho_cb == doctest::Approx(std::exp(-2.0 * M_PI * delta)).epsilon(0.02));
  }
}

TEST_CASE("resonant Rabi oscillation period") {
  // gamma = 20, M = 1 under a constant-amplitude carrier.
  const WorkingPoint wp = working_point(20.0, 1.0, 1.55, 1.0);
  const double period = oracle::rabi_period(1.0, 1.55, wp.drive.peak_field);
  const double optical = 2.0 * M_PI * oracle::kHbar / 1.55;
  const double step = optical / 64.0;
  TimeGrid g{0.0, step, static_cast<std::size_t>(2.6 * period / step)};
  const auto tr = bloch_trajectory(monochromatic(wp.drive, g), 0.0, wp.material);
  const auto r = propagate_state(wp.material, tr);

  // Average out the counter-rotating ripple over one optical cycle, then time
  // the upward crossings of 1/2.
  std::vector<double> smooth(r.rho_cb.size(), 0.0);
  const std::size_t win = 64;
  double acc = 0.0;
  for (std::size_t i = 0; i < r.rho_cb.size(); ++i) {
    acc += r.rho_cb[i];
    if (i >= win) acc -= r.rho_cb[i - win];
    smooth[i] = acc / static_cast<double>(std::min(i + 1, win));
  }
  std::vector<double> ups;
  for (std::size_t i = win + 1; i < smooth.size(); ++i)
    if (smooth[i - 1] < 0.5 && smooth[i] >= 0.5) {
      const double f = (0.5 - smooth[i - 1]) / (smooth[i] - smooth[i - 1]);
      ups.push_back(r.t[i - 1] + f * step);
    }
  REQUIRE(ups.size() >= 2);
  CHECK(ups[1] - ups[0] == doctest::Approx(period).epsilon(0.01));
  CHECK(*std::max_element(r.rho_cb.begin(), r.rho_cb.end()) > 0.95);
}

TEST_CASE("dephasing of a field-free coherence") {
  const auto tr = field_free(0.0, 12.0, 0.01);
  const double t2 = 3.0;
  const auto rho0 = DensityMatrix::from_bloch({0.6, 0.0, 0.8});
  PropagationOptions o;
  const auto r = propagate_density({1.55, 1.0}, tr, rho0, t2, o);
  const double c0 = std::abs(rho0(0, 1));
  CHECK(std::abs(r.final_density(0, 1)) == doctest::Approx(c0 * std::exp(-12.0 / t2)).epsilon(1e-7));
  CHECK(std::abs(r.final_density.trace() - 1.0) < 1e-12);
  for (std::size_t i = 1; i < r.purity.size(); ++i) CHECK(r.purity[i] <= r.purity[i - 1] + 1e-12);
}

TEST_CASE("density mode with T2 = inf reproduces the pure state") {
  PulseSpec p;
  const WorkingPoint wp = working_point(0.3, 1.7, 1.55, 1.0);
  p.peak_field = wp.drive.peak_field;
  const auto w = resolved_waveform(wp.material, p, 0.4);
  const auto tr = bloch_trajectory(w, 0.4, wp.material);
  const auto a = propagate_state(wp.material, tr);
  const auto b = propagate_density(wp.material, tr, std::numeric_limits<double>::infinity());
  double diff = 0.0;
  for (std::size_t i = 0; i < a.rho_cb.size(); ++i)
    diff = std::max(diff, std::abs(a.rho_cb[i] - b.rho_cb[i]));
  CHECK(diff < 1e-8);
  CHECK(std::abs(b.final_density.trace() - 1.0) < 1e-8);
  CHECK(b.final_density.hermiticity_error() < 1e-12);
}

TEST_CASE("finite T2 keeps trace and lowers purity") {
  PulseSpec p;
  const WorkingPoint wp = working_point(0.3, 1.7, 1.55, 1.0);
  p.peak_field = wp.drive.peak_field;
  const auto w = resolved_waveform(wp.material, p, 0.0);
  const auto r = propagate_density(wp.material, bloch_trajectory(w, 0.0, wp.material), 3.0);
  CHECK(r.max_norm_drift < 1e-8);
  for (std::size_t i = 1; i < r.purity.size(); ++i) CHECK(r.purity[i] <= r.purity[i - 1] + 1e-9);
  const auto ev = r.final_density.eigenvalues();
  CHECK(ev[0] > -1e-8);
  CHECK(ev[1] < 1.0 + 1e-8);
  CHECK(r.purity.back() < 0.99);
}

TEST_CASE("CEP = 0 gives mirror-symmetric residual population") {
  PulseSpec p;
  p.cep = 0.0;
  const WorkingPoint wp = working_point(0.4, 1.3, 1.55, 1.0);
  p.peak_field = wp.drive.peak_field;
  const auto w = resolved_waveform(wp.material, p, 2.0);
  PropagationOptions o;
  o.record = false;
  for (double k0 : {0.25, 0.9, 2.0}) {
    const double plus = residual_population(wp.material, w, k0, INFINITY, o);
    const double minus = residual_population(wp.material, w, -k0, INFINITY, o);
    CHECK(std::abs(plus - minus) < 1e-7);
  }
}

TEST_CASE("residual population does not depend on the time origin") {
  PulseSpec p;
  const WorkingPoint wp = working_point(0.5, 1.2, 1.55, 1.0);
  p.peak_field = wp.drive.peak_field;
  const auto w = resolved_waveform(wp.material, p, 0.3);
  auto tr = bloch_trajectory(w, 0.3, wp.material);
  PropagationOptions o;
  o.record = false;
  const double ref = propagate_state(wp.material, tr, o).final_rho_cb;
  for (double& t : tr.t) t += 137.0;
  CHECK(std::abs(propagate_state(wp.material, tr, o).final_rho_cb - ref) < 1e-8);
}

TEST_CASE("dynamical phase") {
  const double optical = 2.0 * M_PI * oracle::kHbar / 1.55;
  const double step = optical / 2048.0;
  TimeGrid g{0.0, step, 2049};

  // Field off: Delta T / hbar = 2 pi M.
  const auto tr0 = bloch_trajectory(monochromatic({1.55, 1e-300}, g), 0.0, {2.3, 1.0});
  CHECK(dynamical_phase({2.3, 1.0}, tr0) == doctest::Approx(2.0 * M_PI * 2.3 / 1.55).epsilon(1e-12));

  for (double gamma : {0.3, 2.0}) {
    const WorkingPoint wp = working_point(gamma, 1.1, 1.55, 1.0);
    const auto tr = bloch_trajectory(monochromatic(wp.drive, g), 0.0, wp.material);
    const double phi = dynamical_phase(wp.material, tr);
    CHECK(phi == doctest::Approx(oracle::cycle_phase(wp.material.gap, 1.0, 1.55, wp.drive.peak_field))
                     .epsilon(1e-5));
    CHECK(phi == doctest::Approx(4.0 * 1.1 * elliptic_e2(-1.0 / (gamma * gamma))).epsilon(1e-3));
  }

  // Gapless crossing: eps = 2 v_F e |A|, so the cycle phase is 8 v_F e E0 / (hbar w^2).
  const auto trg = bloch_trajectory(monochromatic({1.55, 1.0}, g), 0.0, {0.0, 1.0});
  const double w = 1.55 / oracle::kHbar;
  CHECK(dynamical_phase({0.0, 1.0}, trg) ==
        doctest::Approx(8.0 / (oracle::kHbar * w * w)).epsilon(1e-5));
  CHECK(dynamical_phase({0.0, 1.0}, trg) ==
        doctest::Approx(oracle::cycle_phase(0.0, 1.0, 1.55, 1.0)).epsilon(1e-5));
}

TEST_CASE("sampling bound is enforced") {
  const auto tr = field_free(0.0, 10.0, 0.5);
  CHECK_THROWS_AS(propagate_state({1.55, 1.0}, tr), ValidationError);
}

TEST_CASE("instantaneous LZ probability") {
  // alpha' = 2 hbar v_F dk/dt; delta = Delta^2 / (4 hbar |alpha'|)
  const double dkdt = 1.0 / oracle::kHbar;
  const double delta = 1.55 * 1.55 / (4.0 * oracle::kHbar * 2.0);
  CHECK(instantaneous_lz_probability({1.55, 1.0}, dkdt) ==
        doctest::Approx(std::exp(-2.0 * M_PI * delta)));
  CHECK(instantaneous_lz_probability({1.55, 1.0}, 0.0) == 0.0);
}
