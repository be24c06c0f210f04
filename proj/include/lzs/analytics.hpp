#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lzs/constants.hpp"
#include "lzs/core_model.hpp"
#include "lzs/pulse.hpp"

namespace lzs {

/// Carlson's symmetric integral R_F(x, y, z); at most one argument may be zero.
double carlson_rf(double x, double y, double z);
/// Carlson's symmetric integral R_D(x, y, z); x + y > 0, z > 0.
double carlson_rd(double x, double y, double z);

/// Complete elliptic integral of the second kind in the parameter convention
/// E(m) = int_0^{pi/2} sqrt(1 - m sin^2 t) dt, m <= 1.
double elliptic_e2(double m);

/// Field-dressed n-photon resonance: M = n pi / (2 E(-1/gamma^2)).
double resonance_condition(int n, double gamma);

/// gamma at which the n-photon resonance sits at the given M, searched in [lo, hi].
double resonance_gamma(int n, double m_photon, double lo, double hi);

struct ResonanceCurve {
  int n = 1;
  bool even = false;  // symmetry-suppressed at k0 = 0
  std::vector<std::pair<double, double>> points;  // (gamma, M)
};

/// Log-spaced samples of the n-th resonance over [gamma_min, gamma_max].
ResonanceCurve resonance_curve(int n, double gamma_min, double gamma_max, std::size_t count);

/// P = exp(-2 pi delta).
double lz_probability(double delta_lz);

/// Gap that gives LZ parameter `delta_lz` at sweep rate alpha0: Delta^2 = 4 hbar alpha0 delta.
double lz_gap_for_delta(double delta_lz, double alpha0, const Constants& c = kConstants);

struct LzSweepResult {
  double transfer = 0.0;          // final upper-adiabatic population
  double truncation_bound = 0.0;  // estimate of the finite-window error
  std::vector<std::string> warnings;
};

/// Ground-truth single passage through the linearized crossing
/// H' = -(1/2) [[alpha0 t, Delta], [Delta, -alpha0 t]] over t in [-W, W],
/// W = window * sqrt(hbar / alpha0), starting in the lower adiabatic state.
LzSweepResult lz_oracle_sweep(const MaterialSpec& mat, double alpha0, double window, double tol,
                              const Constants& c = kConstants);

/// Trajectory with alpha(t) = alpha0 t over the same window, sampled finely
/// enough for propagate_state.
Trajectory linear_sweep_trajectory(const MaterialSpec& mat, double alpha0, double window,
                                   const Constants& c = kConstants);

}  // namespace lzs
