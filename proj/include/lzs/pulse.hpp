#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "lzs/constants.hpp"
#include "lzs/core_model.hpp"

namespace lzs {

/// Gaussian few-cycle pulse, linearly polarized.
///   A(t) = -(E0/omega) exp(-2 ln2 (t/tau)^2) sin(omega t + cep)
/// gdd (fs^2) and tod (fs^3) are applied afterwards as spectral phase.
struct PulseSpec {
  double photon_energy = 1.55;  // eV
  double peak_field = 1.0;      // V/nm
  double duration = 5.0;        // intensity FWHM, fs
  double cep = kPi / 2.0;       // rad
  double gdd = 0.0;             // fs^2
  double tod = 0.0;             // fs^3

  double omega(const Constants& k = kConstants) const { return photon_energy / k.hbar; }
  double period(const Constants& k = kConstants) const { return 2.0 * kPi / omega(k); }
  bool dispersed() const { return gdd != 0.0 || tod != 0.0; }
  void validate() const;
};

/// Uniform, usually symmetric, time grid.
struct TimeGrid {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double time(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double end() const { return time(count - 1); }
  std::vector<double> samples() const;

  static TimeGrid symmetric(double half_width, double step);
};

struct SampledWaveform {
  std::vector<double> t;  // fs
  std::vector<double> a;  // V fs / nm
  std::vector<double> e;  // V/nm
  std::size_t fft_length = 0;  // padded transform length used by dispersion, 0 if none

  std::size_t size() const { return t.size(); }
  double step() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  double max_abs_a() const;
  double max_abs_e() const;
};

/// Wave-number trajectory from the Bloch acceleration theorem,
/// k(t) = k0 + (e/hbar) A(t), and the matching energy bias 2 hbar v_F k(t).
struct Trajectory {
  double k0 = 0.0;
  std::vector<double> t;
  std::vector<double> k;
  std::vector<double> dkdt;  // -(e/hbar) E(t)
  std::vector<double> bias;  // eV

  std::size_t size() const { return t.size(); }
  double step() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  double max_abs_k() const;
};

/// Intensity FWHM after group-delay dispersion of a Gaussian pulse.
double stretched_duration(double duration, double gdd);

/// Largest group delay |gdd x + tod x^2 / 2| over the band where the spectral
/// amplitude of the unchirped pulse exceeds 1e-12 of its peak.
double dispersion_delay_span(const PulseSpec& spec);

/// Default grid: +-4 stretched durations (plus third-order delay spread), step
/// T/64 or max_step if smaller.
TimeGrid default_grid(const PulseSpec& spec, double max_step = std::numeric_limits<double>::infinity());

/// Analytic A(t) and E(t) = -dA/dt; gdd/tod of the spec are not applied here.
SampledWaveform synthesize(const PulseSpec& spec, const TimeGrid& grid);

/// Applies synthesize then, if needed, apply_dispersion.
SampledWaveform make_waveform(const PulseSpec& spec, const TimeGrid& grid);

/// Constant-amplitude field A(t) = -(E0/omega) sin(omega t + phase) with no envelope.
SampledWaveform monochromatic(const DriveParams& drive, const TimeGrid& grid, double phase = 0.0);

/// Spectral phase exp(i[gdd (w-w0)^2 / 2 + tod (w-w0)^3 / 6]) on the positive
/// frequencies of A and E (physics sign convention, e^{-i w t}).
SampledWaveform apply_dispersion(const SampledWaveform& w, double gdd, double tod, double omega0);

Trajectory bloch_trajectory(const SampledWaveform& w, double k0, const MaterialSpec& mat,
                            const Constants& k = kConstants);

/// |analytic signal of A|^2 on the waveform grid.
std::vector<double> intensity_envelope(const SampledWaveform& w);

/// Full width at half maximum of a sampled, single-peaked profile.
double fwhm(std::span<const double> t, std::span<const double> y);

}  // namespace lzs
