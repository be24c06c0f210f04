#include "lzs/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "fft.hpp"
#include "lzs/errors.hpp"

namespace lzs {
namespace {

// Envelope level that counts as "outside the pulse".
constexpr double kEdgeLevel = 1e-8;
constexpr double kSpectralLevel = 1e-12;  // band edge for the group-delay span

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void PulseSpec::validate() const {
  if (!(photon_energy > 0.0) || !std::isfinite(photon_energy))
    throw ValidationError("pulse photon_energy must be > 0");
  if (!(peak_field > 0.0) || !std::isfinite(peak_field))
    throw ValidationError("pulse peak_field must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ValidationError("pulse duration must be > 0");
  if (!std::isfinite(cep) || !std::isfinite(gdd) || !std::isfinite(tod))
    throw ValidationError("pulse cep, gdd and tod must be finite");
}

std::vector<double> TimeGrid::samples() const {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = time(i);
  return t;
}

TimeGrid TimeGrid::symmetric(double half_width, double step) {
  if (!(half_width > 0.0) || !(step > 0.0))
    throw ValidationError("time grid needs positive half width and step");
  const auto half_count = static_cast<std::size_t>(std::ceil(half_width / step));
  TimeGrid g;
  g.step = step;
  g.count = 2 * half_count + 1;
  g.start = -static_cast<double>(half_count) * step;
  return g;
}

double SampledWaveform::max_abs_a() const { return max_abs(a); }
double SampledWaveform::max_abs_e() const { return max_abs(e); }
double Trajectory::max_abs_k() const { return max_abs(k); }

double stretched_duration(double duration, double gdd) {
  const double x = 4.0 * kLn2 * gdd / (duration * duration);
  return duration * std::sqrt(1.0 + x * x);
}

double dispersion_delay_span(const PulseSpec& spec) {
  // Amplitude spectrum of the envelope: exp(-dw^2 tau^2 / (8 ln2)).
  const double band = std::sqrt(8.0 * kLn2 * std::log(1.0 / kSpectralLevel)) / spec.duration;
  auto delay = [&](double x) { return spec.gdd * x + 0.5 * spec.tod * x * x; };
  double span = std::max(std::abs(delay(band)), std::abs(delay(-band)));
  if (spec.tod != 0.0) {
    const double x_turn = -spec.gdd / spec.tod;
    if (std::abs(x_turn) <= band) span = std::max(span, std::abs(delay(x_turn)));
  }
  return span;
}

TimeGrid default_grid(const PulseSpec& spec, double max_step) {
  spec.validate();
  const double tau_s = stretched_duration(spec.duration, spec.gdd);
  double half = 4.0 * tau_s;
  if (spec.dispersed()) half = std::max(half, 4.0 * spec.duration + dispersion_delay_span(spec));
  const double step = std::min(spec.period() / 64.0, max_step);
  return TimeGrid::symmetric(half, step);
}

SampledWaveform synthesize(const PulseSpec& spec, const TimeGrid& grid) {
  spec.validate();
  if (grid.count < 2 || !(grid.step > 0.0)) throw ValidationError("time grid needs >= 2 samples");
  const double period = spec.period();
  if (grid.step > period / 40.0) {
    std::ostringstream msg;
    msg << "time step " << grid.step << " fs is coarser than T/40 = " << period / 40.0 << " fs";
    throw ValidationError(msg.str());
  }
  const double tau = spec.duration;
  auto envelope = [&](double t) { return std::exp(-2.0 * kLn2 * (t / tau) * (t / tau)); };
  const double edge = std::max(envelope(grid.start), envelope(grid.end()));
  if (edge >= kEdgeLevel) {
    std::ostringstream msg;
    msg << "time grid [" << grid.start << ", " << grid.end() << "] fs is too short for tau_p=" << tau
        << " fs (edge envelope " << edge << ")";
    throw ValidationError(msg.str());
  }

  const double omega = spec.omega();
  const double amp = spec.peak_field / omega;
  SampledWaveform w;
  w.t = grid.samples();
  w.a.resize(grid.count);
  w.e.resize(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double t = w.t[i];
    const double env = envelope(t);
    const double phase = omega * t + spec.cep;
    const double s = std::sin(phase);
    const double c = std::cos(phase);
    w.a[i] = -amp * env * s;
    w.e[i] = amp * env * (omega * c - 4.0 * kLn2 * t / (tau * tau) * s);
  }
  return w;
}

SampledWaveform make_waveform(const PulseSpec& spec, const TimeGrid& grid) {
  auto w = synthesize(spec, grid);
  if (spec.dispersed()) w = apply_dispersion(w, spec.gdd, spec.tod, spec.omega());
  return w;
}

SampledWaveform monochromatic(const DriveParams& drive, const TimeGrid& grid, double phase) {
  drive.validate();
  const double omega = drive.angular_frequency();
  const double amp = drive.peak_field / omega;
  SampledWaveform w;
  w.t = grid.samples();
  w.a.resize(grid.count);
  w.e.resize(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double p = omega * w.t[i] + phase;
    w.a[i] = -amp * std::sin(p);
    w.e[i] = amp * omega * std::cos(p);
  }
  return w;
}

SampledWaveform apply_dispersion(const SampledWaveform& w, double gdd, double tod, double omega0) {
  const std::size_t n = w.size();
  if (n < 2) throw ValidationError("waveform needs >= 2 samples");
  if (!std::isfinite(gdd) || !std::isfinite(tod)) throw ValidationError("gdd/tod must be finite");
  const double dt = w.step();
  const std::size_t length = detail::good_fft_length(2 * n);
  const std::size_t bins = length / 2 + 1;
  const double d_omega = 2.0 * kPi / (static_cast<double>(length) * dt);

  auto spec_a = detail::rfft(w.a, length);
  auto spec_e = detail::rfft(w.e, length);

  // Does the stretched pulse still fit on the grid?
  double peak_spec = 0.0;
  for (const auto& v : spec_a) peak_spec = std::max(peak_spec, std::abs(v));
  double gd_min = 0.0;
  double gd_max = 0.0;
  for (std::size_t j = 1; j < bins; ++j) {
    if (std::abs(spec_a[j]) <= kEdgeLevel * peak_spec) continue;
    const double x = static_cast<double>(j) * d_omega - omega0;
    const double gd = gdd * x + 0.5 * tod * x * x;
    gd_min = std::min(gd_min, gd);
    gd_max = std::max(gd_max, gd);
  }
  const double peak_a = w.max_abs_a();
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  while (lo < n - 1 && std::abs(w.a[lo]) <= kEdgeLevel * peak_a) ++lo;
  while (hi > 0 && std::abs(w.a[hi]) <= kEdgeLevel * peak_a) --hi;
  const double need_lo = w.t[lo] + gd_min;
  const double need_hi = w.t[hi] + gd_max;
  if (need_lo < w.t.front() || need_hi > w.t.back()) {
    std::ostringstream msg;
    msg << "dispersed pulse needs a time grid covering [" << need_lo << ", " << need_hi
        << "] fs (length " << need_hi - need_lo << " fs); grid covers [" << w.t.front() << ", "
        << w.t.back() << "] fs";
    throw ValidationError(msg.str());
  }

  // FFTW bins multiply e^{+i w t}; the physical positive frequency is their
  // conjugate partner, hence the minus sign. DC and Nyquist stay real.
  const std::size_t last = (length % 2 == 0) ? bins - 1 : bins;
  for (std::size_t j = 1; j < last; ++j) {
    const double x = static_cast<double>(j) * d_omega - omega0;
    const double phi = 0.5 * gdd * x * x + tod * x * x * x / 6.0;
    const std::complex<double> rot = std::polar(1.0, -phi);
    spec_a[j] *= rot;
    spec_e[j] *= rot;
  }

  SampledWaveform out;
  out.t = w.t;
  auto a = detail::irfft(spec_a, length);
  auto e = detail::irfft(spec_e, length);
  out.a.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
  out.e.assign(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n));
  out.fft_length = length;
  return out;
}

Trajectory bloch_trajectory(const SampledWaveform& w, double k0, const MaterialSpec& mat,
                            const Constants& k) {
  mat.validate();
  if (w.size() < 2) throw ValidationError("waveform needs >= 2 samples");
  if (!std::isfinite(k0)) throw ValidationError("k0 must be finite");
  const double scale = k.e / k.hbar;
  Trajectory tr;
  tr.k0 = k0;
  tr.t = w.t;
  tr.k.resize(w.size());
  tr.dkdt.resize(w.size());
  tr.bias.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    tr.k[i] = k0 + scale * w.a[i];
    tr.dkdt[i] = -scale * w.e[i];
    tr.bias[i] = 2.0 * k.hbar * mat.fermi_velocity * tr.k[i];
  }
  return tr;
}

std::vector<double> intensity_envelope(const SampledWaveform& w) {
  const std::size_t n = w.size();
  const std::size_t length = detail::good_fft_length(2 * n);
  auto spec = detail::rfft(w.a, length);
  // Hilbert transform: multiply by -i sign(w), drop DC and Nyquist.
  spec[0] = 0.0;
  if (length % 2 == 0) spec.back() = 0.0;
  for (std::size_t j = 1; j < spec.size(); ++j) spec[j] *= std::complex<double>(0.0, -1.0);
  auto h = detail::irfft(spec, length);
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = w.a[i] * w.a[i] + h[i] * h[i];
  return env;
}

double fwhm(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 3) throw ValidationError("fwhm needs matching samples");
  const auto peak_it = std::max_element(y.begin(), y.end());
  const std::size_t peak = static_cast<std::size_t>(peak_it - y.begin());
  const double half = 0.5 * *peak_it;
  std::size_t i = peak;
  while (i > 0 && y[i - 1] > half) --i;
  std::size_t j = peak;
  while (j + 1 < y.size() && y[j + 1] > half) ++j;
  if (i == 0 || j + 1 == y.size()) throw ValidationError("profile does not drop to half maximum");
  auto cross = [&](std::size_t a, std::size_t b) {
    return t[a] + (half - y[a]) * (t[b] - t[a]) / (y[b] - y[a]);
  };
  return cross(j, j + 1) - cross(i - 1, i);
}

}  // namespace lzs
