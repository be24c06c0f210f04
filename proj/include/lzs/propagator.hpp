#pragma once

#include <array>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "lzs/constants.hpp"
#include "lzs/core_model.hpp"
#include "lzs/ode.hpp"
#include "lzs/pulse.hpp"

namespace lzs {

using complex = std::complex<double>;

enum class Basis { Diabatic, Instantaneous };

/// Two-band amplitudes. In the diabatic basis amp_vb multiplies the -Delta/2 level.
struct QuantumState {
  complex amp_vb{1.0, 0.0};
  complex amp_cb{0.0, 0.0};
  Basis basis = Basis::Diabatic;

  double norm() const { return std::norm(amp_vb) + std::norm(amp_cb); }
};

/// 2x2 density matrix, row-major, in the diabatic basis.
struct DensityMatrix {
  std::array<complex, 4> m{complex{1.0}, complex{}, complex{}, complex{}};

  complex operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }
  double trace() const { return (m[0] + m[3]).real(); }
  double hermiticity_error() const;
  /// Ascending eigenvalues (valid for Hermitian input).
  std::array<double, 2> eigenvalues() const;
  double purity() const;
  /// Bloch vector s with rho = (1 + s.sigma) / 2.
  std::array<double, 3> bloch() const;

  static DensityMatrix from_bloch(const std::array<double, 3>& s);
  static DensityMatrix from_state(const QuantumState& psi);
};

/// Real symmetric 2x2 matrix [[h00, h01], [h01, h11]].
struct Hamiltonian2 {
  double h00 = 0.0;
  double h01 = 0.0;
  double h11 = 0.0;

  std::array<double, 2> eigenvalues() const;
};

/// diag(-Delta/2, +Delta/2) with off-diagonal hbar v_F k.
Hamiltonian2 hamiltonian(const MaterialSpec& mat, double k, const Constants& c = kConstants);

/// Instantaneous eigenbasis at wave number k.
struct HoustonFrame {
  double eps = 0.0;  // sqrt(Delta^2 + alpha^2)
  std::array<double, 2> eigvec_plus{0.0, 1.0};
  std::array<double, 2> eigvec_minus{1.0, 0.0};
};

HoustonFrame houston_frame(const MaterialSpec& mat, double k, const Constants& c = kConstants);

/// Frames along a trajectory with eigenvector signs aligned sample to sample.
std::vector<HoustonFrame> houston_frames(const MaterialSpec& mat, const Trajectory& traj,
                                         const Constants& c = kConstants);

struct PropagationOptions {
  double tol = 1e-10;
  bool record = true;  // keep per-sample trace; otherwise only final values, and the
                      // integrator is free to step across samples
  double max_norm_drift = 1e-6;
};

struct PopulationTrace {
  std::vector<double> t;
  std::vector<double> rho_cb;
  std::vector<double> phase;   // accumulated dynamical phase, rad
  std::vector<double> purity;  // density-matrix mode only
  double final_rho_cb = 0.0;
  double final_phase = 0.0;
  double max_norm_drift = 0.0;  // |norm - 1| or |trace - 1|
  StepperStats stats;
  QuantumState final_state;
  DensityMatrix final_density;

  double residual() const { return final_rho_cb; }
};

/// Lower instantaneous eigenstate at the first trajectory sample (diabatic basis).
QuantumState lower_eigenstate(const MaterialSpec& mat, const Trajectory& traj,
                              const Constants& c = kConstants);

/// Largest step the trajectory grid may have: 2 pi hbar / eps_max / 40.
double max_grid_step(const MaterialSpec& mat, double k_abs_max, const Constants& c = kConstants);

PopulationTrace propagate_state(const MaterialSpec& mat, const Trajectory& traj,
                                const QuantumState& psi0, const PropagationOptions& opts = {},
                                const Constants& c = kConstants);

PopulationTrace propagate_state(const MaterialSpec& mat, const Trajectory& traj,
                                const PropagationOptions& opts = {},
                                const Constants& c = kConstants);

/// Pure dephasing at rate 1/t2 of the coherence in the instantaneous eigenbasis.
/// t2 = infinity switches dephasing off.
PopulationTrace propagate_density(const MaterialSpec& mat, const Trajectory& traj,
                                  const DensityMatrix& rho0, double t2,
                                  const PropagationOptions& opts = {},
                                  const Constants& c = kConstants);

PopulationTrace propagate_density(const MaterialSpec& mat, const Trajectory& traj, double t2,
                                  const PropagationOptions& opts = {},
                                  const Constants& c = kConstants);

struct TimeWindow {
  double begin;
  double end;
};

/// (1/hbar) * trapezoid of eps(t) over the samples inside `window`
/// (whole trajectory if absent).
double dynamical_phase(const MaterialSpec& mat, const Trajectory& traj,
                       std::optional<TimeWindow> window = std::nullopt,
                       const Constants& c = kConstants);

/// LZ probability for a crossing at the instantaneous sweep rate |d alpha/dt|,
/// i.e. exp(-2 pi Delta^2 / (4 hbar |alpha'(t)|)).
double instantaneous_lz_probability(const MaterialSpec& mat, double dkdt,
                                    const Constants& c = kConstants);

}  // namespace lzs
