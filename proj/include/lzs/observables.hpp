#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "lzs/constants.hpp"
#include "lzs/core_model.hpp"
#include "lzs/propagator.hpp"
#include "lzs/pulse.hpp"

namespace lzs {

/// Conduction-band group velocity hbar^-1 d(eps/2)/dk = 2 hbar v_F^2 k / eps(k), nm/fs.
/// The valence band carries the opposite velocity.
double band_velocity(const MaterialSpec& mat, double k, const Constants& c = kConstants);

/// Residual populations on a uniform k0 grid that is symmetric about zero.
struct KResolvedResult {
  std::vector<double> k0;          // 1/nm
  std::vector<double> rho_cb_res;  // [0, 1]
  std::vector<double> v_cb;        // nm/fs
};

/// g_s e / (2 pi) * trapezoid of v_cb (2 rho_cb_res - 1) over k0, in e/fs.
/// Mirror points are summed pairwise so that the filled-band term cancels exactly.
/// Throws WindowError if either edge population exceeds `edge_tol`, ValidationError
/// for an asymmetric or non-uniform grid.
double residual_current(const KResolvedResult& res, double edge_tol = 1e-6,
                        const Constants& c = kConstants);

/// Symmetric grid of `points` (odd, >= 3) samples with k0[n-1-i] == -k0[i] exactly.
std::vector<double> symmetric_k_grid(double half_width, std::size_t points);

/// 1.5 e max|A| / hbar + 3 (1/nm).
double default_k_half_width(const SampledWaveform& w, const Constants& c = kConstants);

struct KWindowPolicy {
  double half_width = 0.0;   // 1/nm, 0 selects default_k_half_width
  std::size_t points = 257;
  std::size_t max_refinements = 2;  // midpoint doublings
  double refine_tol = 0.01;         // relative change in j that stops refinement
  double edge_tol = 1e-6;
  std::size_t max_extensions = 4;
  double extension_factor = 1.5;
  double t2 = std::numeric_limits<double>::infinity();  // fs, dephasing time

  void validate() const;
};

struct CurrentResult {
  double j_res = 0.0;      // e/fs
  double rho_center = 0.0;  // residual population at k0 = 0
  double half_width = 0.0;  // final k0 window
  std::size_t refinements = 0;
  std::size_t extensions = 0;
  bool converged = false;
  KResolvedResult profile;
  std::vector<std::string> warnings;
};

/// Scale used for the numerical-zero threshold of j: g_s e max|v| 2 K / (2 pi).
double current_scale(const MaterialSpec& mat, double half_width, const Constants& c = kConstants);

/// Propagates every k0 of the window (pure state, or density matrix when
/// policy.t2 is finite) and integrates the residual current, extending the
/// window when edge populations have not decayed and refining the k0 grid
/// until j settles. The pulse is resampled so that the time step resolves the
/// largest wave number reached from the window.
CurrentResult compute_residual_current(const MaterialSpec& mat, const PulseSpec& pulse,
                                       const KWindowPolicy& policy = {},
                                       const PropagationOptions& opts = {},
                                       const Constants& c = kConstants);

/// The pulse on its default grid, with the step tightened so that trajectories
/// starting anywhere in |k0| <= k0_extent satisfy the propagator's sampling bound.
SampledWaveform resolved_waveform(const MaterialSpec& mat, const PulseSpec& pulse,
                                  double k0_extent, const Constants& c = kConstants);

/// Residual population at a single k0 (pure state, or density matrix if t2 finite).
double residual_population(const MaterialSpec& mat, const SampledWaveform& w, double k0,
                           double t2, const PropagationOptions& opts = {},
                           const Constants& c = kConstants);

}  // namespace lzs
