#include "lzs/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lzs/errors.hpp"

namespace lzs {

double band_velocity(const MaterialSpec& mat, double k, const Constants& c) {
  const double alpha = 2.0 * c.hbar * mat.fermi_velocity * k;
  const double eps = std::hypot(mat.gap, alpha);
  if (eps == 0.0) return 0.0;
  return mat.fermi_velocity * alpha / eps;
}

namespace {

// k0 = step * i for i in [-half_count, half_count]; mirror points are exact negatives.
std::vector<double> k_grid_from_step(double step, std::size_t half_count) {
  std::vector<double> k(2 * half_count + 1);
  k[half_count] = 0.0;
  for (std::size_t i = 1; i <= half_count; ++i) {
    const double v = step * static_cast<double>(i);
    k[half_count + i] = v;
    k[half_count - i] = -v;
  }
  return k;
}

}  // namespace

std::vector<double> symmetric_k_grid(double half_width, std::size_t points) {
  if (!(half_width > 0.0) || points < 3 || points % 2 == 0)
    throw ValidationError("k0 grid needs half_width > 0 and an odd point count >= 3");
  const std::size_t half_count = points / 2;
  return k_grid_from_step(half_width / static_cast<double>(half_count), half_count);
}

double residual_current(const KResolvedResult& res, double edge_tol, const Constants& c) {
  const std::size_t n = res.k0.size();
  if (n < 3 || res.rho_cb_res.size() != n || res.v_cb.size() != n)
    throw ValidationError("k-resolved result needs >= 3 consistent samples");
  const double width = res.k0.back() - res.k0.front();
  const double step = width / static_cast<double>(n - 1);
  if (!(step > 0.0)) throw ValidationError("k0 grid must increase");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(res.k0[i] + res.k0[n - 1 - i]) > 1e-12 * width)
      throw ValidationError("k0 grid is not symmetric about zero");
    if (i > 0 && std::abs(res.k0[i] - res.k0[i - 1] - step) > 1e-9 * step)
      throw ValidationError("k0 grid is not uniform");
  }
  const double edge = std::max(res.rho_cb_res.front(), res.rho_cb_res.back());
  if (edge > edge_tol) {
    std::ostringstream msg;
    msg << "residual population " << edge << " at k0 window edge |k0|=" << res.k0.back()
        << " exceeds " << edge_tol;
    throw WindowError(msg.str());
  }

  auto term = [&](std::size_t i) { return res.v_cb[i] * (2.0 * res.rho_cb_res[i] - 1.0); };
  double sum = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double weight = i == 0 ? 0.5 : 1.0;
    sum += weight * (term(i) + term(n - 1 - i));
  }
  if (n % 2 == 1) sum += term(n / 2);
  return c.spin_degeneracy * c.e * sum * step / (2.0 * kPi);
}

double default_k_half_width(const SampledWaveform& w, const Constants& c) {
  return 1.5 * c.e * w.max_abs_a() / c.hbar + 3.0;
}

void KWindowPolicy::validate() const {
  if (!(half_width >= 0.0)) throw ValidationError("k0 half width must be >= 0");
  if (points < 3 || points % 2 == 0) throw ValidationError("k0 point count must be odd and >= 3");
  if (!(refine_tol > 0.0)) throw ValidationError("k0 refinement tolerance must be > 0");
  if (!(edge_tol > 0.0)) throw ValidationError("k0 edge tolerance must be > 0");
  if (!(extension_factor > 1.0)) throw ValidationError("k0 extension factor must be > 1");
  if (!(t2 > 0.0)) throw ValidationError("t2 must be > 0 (or infinite)");
}

double current_scale(const MaterialSpec& mat, double half_width, const Constants& c) {
  const double vmax = std::abs(band_velocity(mat, half_width, c));
  return c.spin_degeneracy * c.e * vmax * 2.0 * half_width / (2.0 * kPi);
}

SampledWaveform resolved_waveform(const MaterialSpec& mat, const PulseSpec& pulse,
                                  double k0_extent, const Constants& c) {
  const SampledWaveform coarse = make_waveform(pulse, default_grid(pulse));
  // 5% headroom: the resampled waveform can peak slightly above the coarse one.
  const double k_reach = std::abs(k0_extent) + 1.05 * c.e * coarse.max_abs_a() / c.hbar;
  const double step = 0.999 * max_grid_step(mat, k_reach, c);
  if (step >= coarse.step()) return coarse;
  return make_waveform(pulse, default_grid(pulse, step));
}

double residual_population(const MaterialSpec& mat, const SampledWaveform& w, double k0,
                           double t2, const PropagationOptions& opts, const Constants& c) {
  PropagationOptions o = opts;
  o.record = false;
  const Trajectory traj = bloch_trajectory(w, k0, mat, c);
  if (std::isinf(t2)) return propagate_state(mat, traj, o, c).final_rho_cb;
  return propagate_density(mat, traj, t2, o, c).final_rho_cb;
}

CurrentResult compute_residual_current(const MaterialSpec& mat, const PulseSpec& pulse,
                                       const KWindowPolicy& policy,
                                       const PropagationOptions& opts, const Constants& c) {
  mat.validate();
  policy.validate();
  CurrentResult out;
  double half_width = policy.half_width;
  if (half_width == 0.0)
    half_width = default_k_half_width(make_waveform(pulse, default_grid(pulse)), c);

  auto evaluate = [&](const SampledWaveform& w, const std::vector<double>& k0) {
    std::vector<double> rho(k0.size());
    for (std::size_t i = 0; i < k0.size(); ++i)
      rho[i] = residual_population(mat, w, k0[i], policy.t2, opts, c);
    return rho;
  };

  // Probe the two window edges alone, extending until their populations have
  // decayed, before paying for the full k0 grid.
  SampledWaveform w;
  std::vector<double> edge_rho;
  for (std::size_t ext = 0;; ++ext) {
    w = resolved_waveform(mat, pulse, half_width, c);
    edge_rho = evaluate(w, {-half_width, half_width});
    const double edge = std::max(edge_rho[0], edge_rho[1]);
    if (edge <= policy.edge_tol) break;
    if (ext == policy.max_extensions) {
      std::ostringstream msg;
      msg << "residual population " << edge << " at |k0|=" << half_width << " after " << ext
          << " window extensions";
      throw WindowError(msg.str());
    }
    half_width *= policy.extension_factor;
    out.extensions = ext + 1;
  }
  KResolvedResult res;
  res.k0 = symmetric_k_grid(half_width, policy.points);
  const std::vector<double> inner(res.k0.begin() + 1, res.k0.end() - 1);
  res.rho_cb_res = evaluate(w, inner);
  res.rho_cb_res.insert(res.rho_cb_res.begin(), edge_rho[0]);
  res.rho_cb_res.push_back(edge_rho[1]);
  out.half_width = half_width;

  auto velocities = [&](const std::vector<double>& k0) {
    std::vector<double> v(k0.size());
    for (std::size_t i = 0; i < k0.size(); ++i) v[i] = band_velocity(mat, k0[i], c);
    return v;
  };
  res.v_cb = velocities(res.k0);
  double j = residual_current(res, policy.edge_tol, c);
  const double floor = 1e-6 * current_scale(mat, half_width, c);

  for (std::size_t r = 0; r < policy.max_refinements; ++r) {
    // Insert midpoints; existing samples are kept.
    const std::size_t n = res.k0.size();
    const std::vector<double> fine_k = k_grid_from_step(0.5 * (res.k0[n / 2 + 1]), n - 1);
    std::vector<double> mid_k;
    mid_k.reserve(n - 1);
    for (std::size_t i = 1; i < fine_k.size(); i += 2) mid_k.push_back(fine_k[i]);
    const std::vector<double> mid_rho = evaluate(w, mid_k);
    KResolvedResult fine;
    fine.k0 = fine_k;
    fine.rho_cb_res.resize(fine_k.size());
    for (std::size_t i = 0; i < n; ++i) fine.rho_cb_res[2 * i] = res.rho_cb_res[i];
    for (std::size_t i = 0; i + 1 < n; ++i) fine.rho_cb_res[2 * i + 1] = mid_rho[i];
    fine.v_cb = velocities(fine.k0);
    const double j_fine = residual_current(fine, policy.edge_tol, c);
    const double change = std::abs(j_fine - j);
    res = std::move(fine);
    j = j_fine;
    out.refinements = r + 1;
    if (change <= policy.refine_tol * std::abs(j) || change <= floor) {
      out.converged = true;
      break;
    }
  }
  if (policy.max_refinements == 0) out.converged = true;
  if (!out.converged) {
    std::ostringstream msg;
    msg << "k0 refinement not converged after " << out.refinements << " doublings";
    out.warnings.push_back(msg.str());
  }
  out.j_res = j;
  out.rho_center = res.rho_cb_res[res.k0.size() / 2];
  out.profile = std::move(res);
  return out;
}

}  // namespace lzs
