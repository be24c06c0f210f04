#include "lzs/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lzs/errors.hpp"

namespace lzs {
namespace {

/// Cubic Hermite interpolation of the off-diagonal coupling hbar v_F k(t) from
/// samples of k and dk/dt on a uniform grid.
class CouplingInterpolant {
 public:
  CouplingInterpolant(const MaterialSpec& mat, const Trajectory& traj, const Constants& c)
      : n_(traj.size()), t0_(traj.t.front()) {
    const double scale = c.hbar * mat.fermi_velocity;
    step_ = (traj.t.back() - traj.t.front()) / static_cast<double>(n_ - 1);
    inv_step_ = 1.0 / step_;
    value_.resize(n_);
    slope_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      value_[i] = scale * traj.k[i];
      slope_[i] = scale * traj.dkdt[i] * step_;
    }
  }

  double operator()(double t) const {
    const double x = (t - t0_) * inv_step_;
    auto i = static_cast<std::ptrdiff_t>(std::floor(x));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n_) - 2);
    const auto j = static_cast<std::size_t>(i);
    const double s = x - static_cast<double>(i);
    const double s2 = s * s;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s2 * (3.0 - 2.0 * s);
    const double h11 = s2 * (s - 1.0);
    return h00 * value_[j] + h10 * slope_[j] + h01 * value_[j + 1] + h11 * slope_[j + 1];
  }

 private:
  std::size_t n_;
  double t0_;
  double step_ = 0.0;
  double inv_step_ = 0.0;
  std::vector<double> value_;
  std::vector<double> slope_;  // pre-multiplied by the grid step
};

// Schroedinger equation for psi = u + i v with the real Hamiltonian
// [[-D/2, b], [b, D/2]]: u' = H v / hbar, v' = -H u / hbar.
struct SchroedingerRhs {
  const CouplingInterpolant* coupling;
  double half_gap;
  double inv_hbar;

  void operator()(double t, const OdeState<4>& y, OdeState<4>& dy) const {
    const double b = (*coupling)(t);
    const double hv0 = -half_gap * y[2] + b * y[3];
    const double hv1 = b * y[2] + half_gap * y[3];
    const double hu0 = -half_gap * y[0] + b * y[1];
    const double hu1 = b * y[0] + half_gap * y[1];
    dy[0] = inv_hbar * hv0;
    dy[1] = inv_hbar * hv1;
    dy[2] = -inv_hbar * hu0;
    dy[3] = -inv_hbar * hu1;
  }
};

// Unit vector of the field h = (2b, 0, -Delta) for H = h.sigma / 2; the upper
// eigenstate points along +h.
std::array<double, 3> field_direction(double b, double gap) {
  const double eps = std::hypot(2.0 * b, gap);
  if (eps == 0.0) return {0.0, 0.0, -1.0};
  return {2.0 * b / eps, 0.0, -gap / eps};
}

// The one place that defines the dephasing operator: relaxation of the Bloch
// vector component perpendicular to the instantaneous field axis, which is the
// eigenbasis coherence rho_{+-}.
void apply_dephasing(const std::array<double, 3>& s, const std::array<double, 3>& axis,
                     double rate, OdeState<3>& ds) {
  const double along = s[0] * axis[0] + s[1] * axis[1] + s[2] * axis[2];
  for (std::size_t i = 0; i < 3; ++i) ds[i] -= rate * (s[i] - along * axis[i]);
}

// Bloch equations ds/dt = (h x s)/hbar - D(s).
struct BlochRhs {
  const CouplingInterpolant* coupling;
  double gap;
  double inv_hbar;
  double rate;  // 1 / T2

  void operator()(double t, const OdeState<3>& s, OdeState<3>& ds) const {
    const double b = (*coupling)(t);
    const double hx = 2.0 * b;
    const double hz = -gap;
    ds[0] = inv_hbar * (-hz * s[1]);
    ds[1] = inv_hbar * (hz * s[0] - hx * s[2]);
    ds[2] = inv_hbar * (hx * s[1]);
    if (rate > 0.0) apply_dephasing({s[0], s[1], s[2]}, field_direction(b, gap), rate, ds);
  }
};

void check_trajectory(const MaterialSpec& mat, const Trajectory& traj, const Constants& c) {
  mat.validate();
  if (traj.size() < 2 || traj.k.size() != traj.size() || traj.dkdt.size() != traj.size())
    throw ValidationError("trajectory needs >= 2 consistent samples");
  const double step = traj.step();
  if (!(step > 0.0)) throw ValidationError("trajectory time samples must increase");
  const double limit = max_grid_step(mat, traj.max_abs_k(), c);
  if (step > limit * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "trajectory step " << step << " fs exceeds 2 pi hbar / eps_max / 40 = " << limit
        << " fs";
    throw ValidationError(msg.str());
  }
}

// Without a recorded trace the stepper only stops this many times, for the
// norm checks, and otherwise steps across trajectory samples freely.
constexpr std::size_t kUnrecordedStops = 32;

std::size_t stop_stride(std::size_t n, bool record) {
  if (record) return 1;
  return std::max<std::size_t>(1, (n - 1) / kUnrecordedStops);
}

// Trapezoidal (1/hbar) int eps dt at every sample.
std::vector<double> accumulated_phase(const MaterialSpec& mat, const Trajectory& traj,
                                      const Constants& c) {
  std::vector<double> phase(traj.size(), 0.0);
  const double scale = 2.0 * c.hbar * mat.fermi_velocity;
  double eps_prev = std::sqrt(mat.gap * mat.gap + scale * traj.k[0] * scale * traj.k[0]);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double eps = std::sqrt(mat.gap * mat.gap + scale * traj.k[i] * scale * traj.k[i]);
    phase[i] = phase[i - 1] + 0.5 * (eps_prev + eps) * (traj.t[i] - traj.t[i - 1]) / c.hbar;
    eps_prev = eps;
  }
  return phase;
}

double upper_population(const HoustonFrame& f, const OdeState<4>& y) {
  const double re = f.eigvec_plus[0] * y[0] + f.eigvec_plus[1] * y[1];
  const double im = f.eigvec_plus[0] * y[2] + f.eigvec_plus[1] * y[3];
  return re * re + im * im;
}

}  // namespace

double DensityMatrix::hermiticity_error() const {
  return std::max({std::abs(m[0].imag()), std::abs(m[3].imag()), std::abs(m[1] - std::conj(m[2]))});
}

std::array<double, 2> DensityMatrix::eigenvalues() const {
  const double a = m[0].real();
  const double d = m[3].real();
  const double mean = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), std::abs(m[1]));
  return {mean - r, mean + r};
}

double DensityMatrix::purity() const {
  return std::norm(m[0]) + std::norm(m[3]) + 2.0 * std::norm(m[1]);
}

std::array<double, 3> DensityMatrix::bloch() const {
  return {2.0 * m[1].real(), -2.0 * m[1].imag(), (m[0] - m[3]).real()};
}

DensityMatrix DensityMatrix::from_bloch(const std::array<double, 3>& s) {
  DensityMatrix r;
  r.m[0] = 0.5 * (1.0 + s[2]);
  r.m[3] = 0.5 * (1.0 - s[2]);
  r.m[1] = complex(0.5 * s[0], -0.5 * s[1]);
  r.m[2] = std::conj(r.m[1]);
  return r;
}

DensityMatrix DensityMatrix::from_state(const QuantumState& psi) {
  DensityMatrix r;
  r.m[0] = psi.amp_vb * std::conj(psi.amp_vb);
  r.m[1] = psi.amp_vb * std::conj(psi.amp_cb);
  r.m[2] = psi.amp_cb * std::conj(psi.amp_vb);
  r.m[3] = psi.amp_cb * std::conj(psi.amp_cb);
  return r;
}

std::array<double, 2> Hamiltonian2::eigenvalues() const {
  const double mean = 0.5 * (h00 + h11);
  const double r = std::hypot(0.5 * (h00 - h11), h01);
  return {mean - r, mean + r};
}

Hamiltonian2 hamiltonian(const MaterialSpec& mat, double k, const Constants& c) {
  const double b = c.hbar * mat.fermi_velocity * k;
  return {-0.5 * mat.gap, b, 0.5 * mat.gap};
}

HoustonFrame houston_frame(const MaterialSpec& mat, double k, const Constants& c) {
  const double b = c.hbar * mat.fermi_velocity * k;
  HoustonFrame f;
  f.eps = std::hypot(mat.gap, 2.0 * b);
  if (f.eps == 0.0) return f;
  // chi = atan2(2b, Delta); half-angle form avoids cancellation near chi = 0.
  const double cos_half = std::sqrt(0.5 * (1.0 + mat.gap / f.eps));
  const double sin_half = b / (f.eps * cos_half);
  f.eigvec_plus = {sin_half, cos_half};
  f.eigvec_minus = {cos_half, -sin_half};
  return f;
}

std::vector<HoustonFrame> houston_frames(const MaterialSpec& mat, const Trajectory& traj,
                                         const Constants& c) {
  std::vector<HoustonFrame> frames;
  frames.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    HoustonFrame f = houston_frame(mat, traj.k[i], c);
    if (!frames.empty()) {
      const auto& prev = frames.back();
      auto align = [](const std::array<double, 2>& ref, std::array<double, 2>& v) {
        if (ref[0] * v[0] + ref[1] * v[1] < 0.0) v = {-v[0], -v[1]};
      };
      align(prev.eigvec_plus, f.eigvec_plus);
      align(prev.eigvec_minus, f.eigvec_minus);
    }
    frames.push_back(f);
  }
  return frames;
}

QuantumState lower_eigenstate(const MaterialSpec& mat, const Trajectory& traj,
                              const Constants& c) {
  const HoustonFrame f = houston_frame(mat, traj.k.front(), c);
  return {complex(f.eigvec_minus[0]), complex(f.eigvec_minus[1]), Basis::Diabatic};
}

double max_grid_step(const MaterialSpec& mat, double k_abs_max, const Constants& c) {
  const double eps_max = std::hypot(mat.gap, 2.0 * c.hbar * mat.fermi_velocity * k_abs_max);
  if (eps_max == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * kPi * c.hbar / eps_max / 40.0;
}

PopulationTrace propagate_state(const MaterialSpec& mat, const Trajectory& traj,
                                const QuantumState& psi0, const PropagationOptions& opts,
                                const Constants& c) {
  check_trajectory(mat, traj, c);
  QuantumState start = psi0;
  if (start.basis == Basis::Instantaneous) {
    const HoustonFrame f = houston_frame(mat, traj.k.front(), c);
    start.amp_vb = psi0.amp_vb * f.eigvec_minus[0] + psi0.amp_cb * f.eigvec_plus[0];
    start.amp_cb = psi0.amp_vb * f.eigvec_minus[1] + psi0.amp_cb * f.eigvec_plus[1];
    start.basis = Basis::Diabatic;
  }
  if (std::abs(start.norm() - 1.0) > 1e-12) throw ValidationError("initial state must be normalized");

  const CouplingInterpolant coupling(mat, traj, c);
  SchroedingerRhs rhs{&coupling, 0.5 * mat.gap, 1.0 / c.hbar};
  AdaptiveIntegrator<4, SchroedingerRhs> stepper(rhs, {.rtol = opts.tol, .atol = opts.tol});

  OdeState<4> y{start.amp_vb.real(), start.amp_cb.real(), start.amp_vb.imag(),
                start.amp_cb.imag()};
  const std::size_t n = traj.size();
  PopulationTrace out;
  if (opts.record) {
    out.t = traj.t;
    out.rho_cb.resize(n);
    out.phase.resize(n);
  }

  HoustonFrame frame = houston_frame(mat, traj.k[0], c);
  double rho = upper_population(frame, y);
  if (opts.record) {
    out.rho_cb[0] = rho;
    out.phase[0] = 0.0;
  }
  const std::vector<double> phase = accumulated_phase(mat, traj, c);
  const std::size_t stride = stop_stride(n, opts.record);
  double t = traj.t[0];
  for (std::size_t i = std::min(stride, n - 1);; i = std::min(i + stride, n - 1)) {
    stepper.advance(t, y, traj.t[i]);
    const double norm = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    const double drift = std::abs(norm - 1.0);
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
    if (drift > opts.max_norm_drift)
      throw PropagationError("norm drift " + std::to_string(drift) + " exceeds limit", t);
    frame = houston_frame(mat, traj.k[i], c);
    rho = upper_population(frame, y);
    if (opts.record) {
      out.rho_cb[i] = rho;
      out.phase[i] = phase[i];
    }
    if (i == n - 1) break;
  }
  out.final_rho_cb = rho;
  out.final_phase = phase.back();
  out.stats = stepper.stats();
  out.final_state = {complex(y[0], y[2]), complex(y[1], y[3]), Basis::Diabatic};
  out.final_density = DensityMatrix::from_state(out.final_state);
  return out;
}

PopulationTrace propagate_state(const MaterialSpec& mat, const Trajectory& traj,
                                const PropagationOptions& opts, const Constants& c) {
  return propagate_state(mat, traj, lower_eigenstate(mat, traj, c), opts, c);
}

PopulationTrace propagate_density(const MaterialSpec& mat, const Trajectory& traj,
                                  const DensityMatrix& rho0, double t2,
                                  const PropagationOptions& opts, const Constants& c) {
  check_trajectory(mat, traj, c);
  if (!(t2 > 0.0)) throw ValidationError("t2 must be > 0 (or infinite)");
  if (std::abs(rho0.trace() - 1.0) > 1e-12 || rho0.hermiticity_error() > 1e-12)
    throw ValidationError("initial density matrix must be Hermitian with unit trace");
  if (rho0.eigenvalues()[0] < -1e-12) throw ValidationError("initial density matrix not positive");

  const CouplingInterpolant coupling(mat, traj, c);
  const double rate = std::isinf(t2) ? 0.0 : 1.0 / t2;
  BlochRhs rhs{&coupling, mat.gap, 1.0 / c.hbar, rate};
  AdaptiveIntegrator<3, BlochRhs> stepper(rhs, {.rtol = opts.tol, .atol = opts.tol});

  const auto s0 = rho0.bloch();
  OdeState<3> s{s0[0], s0[1], s0[2]};
  const std::size_t n = traj.size();
  PopulationTrace out;
  if (opts.record) {
    out.t = traj.t;
    out.rho_cb.resize(n);
    out.phase.resize(n);
    out.purity.resize(n);
  }

  auto observe = [&](std::size_t i, double phase) {
    const double b = c.hbar * mat.fermi_velocity * traj.k[i];
    const auto axis = field_direction(b, mat.gap);
    const double rho = 0.5 * (1.0 + s[0] * axis[0] + s[1] * axis[1] + s[2] * axis[2]);
    const double len2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
    if (opts.record) {
      out.rho_cb[i] = rho;
      out.phase[i] = phase;
      out.purity[i] = 0.5 * (1.0 + len2);
    }
    out.final_rho_cb = rho;
    return len2;
  };

  const std::vector<double> phase = accumulated_phase(mat, traj, c);
  const std::size_t stride = stop_stride(n, opts.record);
  observe(0, 0.0);
  double t = traj.t[0];
  for (std::size_t i = std::min(stride, n - 1);; i = std::min(i + stride, n - 1)) {
    stepper.advance(t, s, traj.t[i]);
    const double len = std::sqrt(observe(i, phase[i]));
    // Eigenvalues are (1 -+ |s|) / 2.
    const double lowest = 0.5 * (1.0 - len);
    if (lowest < -1e-6)
      throw PropagationError("density matrix eigenvalue " + std::to_string(lowest) + " < -1e-6", t);
    const auto rho = DensityMatrix::from_bloch({s[0], s[1], s[2]});
    const double drift = std::abs(rho.trace() - 1.0);
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
    if (drift > opts.max_norm_drift)
      throw PropagationError("trace drift " + std::to_string(drift) + " exceeds limit", t);
    if (i == n - 1) break;
  }
  out.final_phase = phase.back();
  out.stats = stepper.stats();
  out.final_density = DensityMatrix::from_bloch({s[0], s[1], s[2]});
  return out;
}

PopulationTrace propagate_density(const MaterialSpec& mat, const Trajectory& traj, double t2,
                                  const PropagationOptions& opts, const Constants& c) {
  const QuantumState psi = lower_eigenstate(mat, traj, c);
  return propagate_density(mat, traj, DensityMatrix::from_state(psi), t2, opts, c);
}

double dynamical_phase(const MaterialSpec& mat, const Trajectory& traj,
                       std::optional<TimeWindow> window, const Constants& c) {
  mat.validate();
  const double slack = 1e-9 * std::max(1.0, traj.step());
  double phase = 0.0;
  bool have_prev = false;
  double t_prev = 0.0;
  double eps_prev = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.t[i];
    if (window && (t < window->begin - slack || t > window->end + slack)) continue;
    const double eps = std::hypot(mat.gap, 2.0 * c.hbar * mat.fermi_velocity * traj.k[i]);
    if (have_prev) phase += 0.5 * (eps_prev + eps) * (t - t_prev);
    have_prev = true;
    t_prev = t;
    eps_prev = eps;
  }
  return phase / c.hbar;
}

double instantaneous_lz_probability(const MaterialSpec& mat, double dkdt, const Constants& c) {
  const double rate = std::abs(2.0 * c.hbar * mat.fermi_velocity * dkdt);  // |alpha'|, eV/fs
  if (rate == 0.0) return mat.gap == 0.0 ? 1.0 : 0.0;
  const double delta = mat.gap * mat.gap / (4.0 * c.hbar * rate);
  return std::exp(-2.0 * kPi * delta);
}

}  // namespace lzs
