#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lzs/errors.hpp"
#include "lzs/pulse.hpp"
#include "oracles.hpp"

using namespace lzs;

namespace {

double integral_a2(const SampledWaveform& w) {
  double s = 0.0;
  for (double a : w.a) s += a * a;
  return s * w.step();
}

}  // namespace

TEST_CASE("baseline pulse samples") {
  PulseSpec p;
  const auto w = synthesize(p, default_grid(p));
  const double omega = 1.55 / oracle::kHbar;
  CHECK(w.max_abs_a() <= 1.0 / omega + 1e-15);
  CHECK(1.0 / omega == doctest::Approx(0.42466).epsilon(1e-4));
  CHECK(std::abs(w.a.front()) < 1e-8 * w.max_abs_a());
  CHECK(std::abs(w.a.back()) < 1e-8 * w.max_abs_a());
  CHECK(std::abs(w.a.front() - w.a.back()) < 1e-9 * w.max_abs_a());
  const auto mid = w.size() / 2;
  REQUIRE(std::abs(w.t[mid]) < 1e-12);
  CHECK(w.a[mid] == doctest::Approx(-1.0 / omega).epsilon(1e-12));
}

TEST_CASE("E = -dA/dt to second order") {
  PulseSpec p;
  p.cep = 0.3;
  double prev_err = 0.0;
  for (double div : {64.0, 128.0}) {
    const auto w = synthesize(p, default_grid(p, p.period() / div));
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
      const double fd = -(w.a[i + 1] - w.a[i - 1]) / (2.0 * w.step());
      err = std::max(err, std::abs(fd - w.e[i]));
    }
    if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.05));
    prev_err = err;
  }
}

TEST_CASE("grid checks") {
  PulseSpec p;
  CHECK_THROWS_AS(synthesize(p, TimeGrid::symmetric(5.0, 0.01)), ValidationError);
  CHECK_THROWS_AS(synthesize(p, TimeGrid::symmetric(40.0, p.period() / 10.0)), ValidationError);
  p.duration = -5.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("dispersion identity and reversal") {
  PulseSpec p;
  p.gdd = 180.8;
  p.tod = 137.3;
  // Room for the forward and the reverse stretch.
  const auto grid = TimeGrid::symmetric(2.0 * -default_grid(p).start, p.period() / 64.0);
  const auto w0 = synthesize(p, grid);
  const auto same = apply_dispersion(w0, 0.0, 0.0, p.omega());
  for (std::size_t i = 0; i < w0.size(); ++i) CHECK(std::abs(same.a[i] - w0.a[i]) < 1e-12);

  const auto fwd = apply_dispersion(w0, p.gdd, p.tod, p.omega());
  const auto back = apply_dispersion(fwd, -p.gdd, -p.tod, p.omega());
  double err = 0.0;
  for (std::size_t i = 0; i < w0.size(); ++i) err = std::max(err, std::abs(back.a[i] - w0.a[i]));
  CHECK(err < 1e-10 * w0.max_abs_a());

  CHECK(std::abs(integral_a2(fwd) / integral_a2(w0) - 1.0) < 1e-10);
  CHECK(std::abs(fwd.a.front() - fwd.a.back()) < 1e-9 * fwd.max_abs_a());
}

TEST_CASE("GDD stretch matches the Gaussian chirp formula") {
  PulseSpec p;
  p.gdd = 180.8;
  const auto w = make_waveform(p, default_grid(p));
  const double measured = fwhm(w.t, intensity_envelope(w));
  const double expect = oracle::chirped_fwhm(5.0, 180.8);
  CHECK(expect == doctest::Approx(100.4).epsilon(1e-3));
  CHECK(measured == doctest::Approx(expect).epsilon(0.01));
  CHECK(stretched_duration(5.0, 180.8) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("Bloch trajectory") {
  PulseSpec p;
  const auto w = synthesize(p, default_grid(p));
  const MaterialSpec mat{1.55, 1.0};
  const auto tr = bloch_trajectory(w, 0.0, mat);
  CHECK(tr.max_abs_k() == doctest::Approx(w.max_abs_a() / oracle::kHbar).epsilon(1e-12));
  CHECK(tr.max_abs_k() == doctest::Approx(0.6452).epsilon(1e-3));
  CHECK(std::abs(tr.k.front()) < 1e-8);
  CHECK(std::abs(tr.k.back() - tr.k.front()) < 1e-9 * tr.max_abs_k());
  for (std::size_t i = 0; i < tr.size(); i += 37) {
    CHECK(tr.k[i] == doctest::Approx(w.a[i] / oracle::kHbar));
    CHECK(tr.bias[i] == doctest::Approx(2.0 * oracle::kHbar * tr.k[i]));
  }

  PulseSpec weak = p;
  weak.peak_field = 1e-300;
  const auto still = bloch_trajectory(synthesize(weak, default_grid(weak)), 0.5, mat);
  for (std::size_t i = 0; i < still.size(); i += 50) {
    CHECK(still.k[i] == doctest::Approx(0.5));
    CHECK(still.bias[i] == doctest::Approx(0.6582119569));
  }
}

TEST_CASE("no-DC after dispersion") {
  PulseSpec p;
  p.gdd = 180.8;
  p.tod = 137.3;
  const auto w = make_waveform(p, default_grid(p));
  const auto tr = bloch_trajectory(w, 1.25, {1.0, 1.0});
  double excursion = 0.0;
  for (double k : tr.k) excursion = std::max(excursion, std::abs(k - 1.25));
  CHECK(std::abs(tr.k.back() - 1.25) < 1e-9 * excursion);
}
