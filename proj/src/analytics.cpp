#include "lzs/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "lzs/errors.hpp"
#include "lzs/propagator.hpp"

namespace lzs {

// Duplication algorithm of Carlson (Numer. Algorithms 10, 1995). The stopping
// tolerances give truncation errors below double rounding.
double carlson_rf(double x, double y, double z) {
  if (x < 0.0 || y < 0.0 || z < 0.0 || (x + y == 0.0) || (x + z == 0.0) || (y + z == 0.0))
    throw ValidationError("carlson_rf: invalid arguments");
  constexpr double tol = 0.0008;
  double xt = x, yt = y, zt = z;
  double mean = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
  for (;;) {
    const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
    const double lambda = sx * (sy + sz) + sy * sz;
    xt = 0.25 * (xt + lambda);
    yt = 0.25 * (yt + lambda);
    zt = 0.25 * (zt + lambda);
    mean = (xt + yt + zt) / 3.0;
    dx = (mean - xt) / mean;
    dy = (mean - yt) / mean;
    dz = (mean - zt) / mean;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) <= tol) break;
  }
  const double e2 = dx * dy - dz * dz;
  const double e3 = dx * dy * dz;
  return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mean);
}

double carlson_rd(double x, double y, double z) {
  if (x < 0.0 || y < 0.0 || x + y == 0.0 || z <= 0.0)
    throw ValidationError("carlson_rd: invalid arguments");
  constexpr double tol = 0.0005;
  double xt = x, yt = y, zt = z;
  double sum = 0.0, fac = 1.0;
  double mean = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
  for (;;) {
    const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
    const double lambda = sx * (sy + sz) + sy * sz;
    sum += fac / (sz * (zt + lambda));
    fac *= 0.25;
    xt = 0.25 * (xt + lambda);
    yt = 0.25 * (yt + lambda);
    zt = 0.25 * (zt + lambda);
    mean = 0.2 * (xt + yt + 3.0 * zt);
    dx = (mean - xt) / mean;
    dy = (mean - yt) / mean;
    dz = (mean - zt) / mean;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) <= tol) break;
  }
  const double ea = dx * dy;
  const double eb = dz * dz;
  const double ec = ea - eb;
  const double ed = ea - 6.0 * eb;
  const double ee = ed + ec + ec;
  constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 6.0, c3 = 9.0 / 22.0, c4 = 3.0 / 26.0,
                   c5 = 0.25 * c3, c6 = 1.5 * c4;
  return 3.0 * sum +
         fac * (1.0 + ed * (-c1 + c5 * ed - c6 * dz * ee) +
                dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea))) /
             (mean * std::sqrt(mean));
}

double elliptic_e2(double m) {
  if (!(m <= 1.0)) throw ValidationError("elliptic_e2: parameter m must be <= 1");
  if (m == 1.0) return 1.0;
  if (m == 0.0) return kPi / 2.0;
  const double y = 1.0 - m;
  return carlson_rf(0.0, y, 1.0) - m / 3.0 * carlson_rd(0.0, y, 1.0);
}

double resonance_condition(int n, double gamma) {
  if (n < 1) throw ValidationError("photon order must be >= 1");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
  return n * kPi / (2.0 * elliptic_e2(-1.0 / (gamma * gamma)));
}

double resonance_gamma(int n, double m_photon, double lo, double hi) {
  auto f = [&](double g) { return resonance_condition(n, g) - m_photon; };
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo * fhi > 0.0) throw ValidationError("resonance_gamma: root not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ResonanceCurve resonance_curve(int n, double gamma_min, double gamma_max, std::size_t count) {
  if (!(gamma_min > 0.0) || !(gamma_max > gamma_min) || count < 2)
    throw ValidationError("resonance_curve: need 0 < gamma_min < gamma_max and count >= 2");
  ResonanceCurve curve;
  curve.n = n;
  curve.even = n % 2 == 0;
  curve.points.reserve(count);
  const double step = std::log(gamma_max / gamma_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double g = gamma_min * std::exp(step * static_cast<double>(i));
    curve.points.emplace_back(g, resonance_condition(n, g));
  }
  return curve;
}

double lz_probability(double delta_lz) {
  if (!(delta_lz >= 0.0)) throw ValidationError("delta_lz must be >= 0");
  return std::exp(-2.0 * kPi * delta_lz);
}

double lz_gap_for_delta(double delta_lz, double alpha0, const Constants& c) {
  if (!(delta_lz >= 0.0) || !(alpha0 > 0.0)) throw ValidationError("need delta >= 0, alpha0 > 0");
  return std::sqrt(4.0 * c.hbar * alpha0 * delta_lz);
}

namespace {

// Eigenvector of the real symmetric [[a, b], [b, -a]] for eigenvalue lambda.
std::array<double, 2> symmetric_eigenvector(double a, double b, double lambda) {
  std::array<double, 2> v1{b, lambda - a};
  std::array<double, 2> v2{lambda + a, b};
  const double n1 = std::hypot(v1[0], v1[1]);
  const double n2 = std::hypot(v2[0], v2[1]);
  auto& v = n1 >= n2 ? v1 : v2;
  const double nv = std::max(n1, n2);
  return {v[0] / nv, v[1] / nv};
}

}  // namespace

LzSweepResult lz_oracle_sweep(const MaterialSpec& mat, double alpha0, double window, double tol,
                              const Constants& c) {
  mat.validate();
  if (!(alpha0 > 0.0)) throw ValidationError("alpha0 must be > 0");
  if (!(window > 0.0)) throw ValidationError("window must be > 0");
  if (!(tol > 0.0)) throw ValidationError("tol must be > 0");
  LzSweepResult result;

  const double gap = mat.gap;
  const double half_time = window * std::sqrt(c.hbar / alpha0);
  using State = std::array<double, 4>;  // (Re psi0, Re psi1, Im psi0, Im psi1)

  auto matrix_a = [&](double t) { return -0.5 * alpha0 * t; };  // H'_00 = -H'_11
  const double off = -0.5 * gap;

  auto rhs = [&](const State& y, State& dy, double t) {
    const double a = matrix_a(t);
    const double hu0 = a * y[0] + off * y[1];
    const double hu1 = off * y[0] - a * y[1];
    const double hv0 = a * y[2] + off * y[3];
    const double hv1 = off * y[2] - a * y[3];
    dy[0] = hv0 / c.hbar;
    dy[1] = hv1 / c.hbar;
    dy[2] = -hu0 / c.hbar;
    dy[3] = -hu1 / c.hbar;
  };

  auto eigen = [&](double t, bool upper) {
    const double a = matrix_a(t);
    const double r = std::hypot(a, off);
    return symmetric_eigenvector(a, off, upper ? r : -r);
  };

  const auto lower = eigen(-half_time, false);
  State y{lower[0], lower[1], 0.0, 0.0};
  namespace odeint = boost::numeric::odeint;
  // Extrapolation rather than a Runge-Kutta pair, so the reference shares no
  // integrator with the production propagator.
  odeint::bulirsch_stoer<State> stepper(tol, tol);
  const double eps_end = std::hypot(gap, alpha0 * half_time);
  odeint::integrate_adaptive(stepper, rhs, y, -half_time, half_time,
                             0.01 * c.hbar / std::max(eps_end, 1e-12));

  const auto upper = eigen(half_time, true);
  const double re = upper[0] * y[0] + upper[1] * y[1];
  const double im = upper[0] * y[2] + upper[1] * y[3];
  result.transfer = re * re + im * im;

  // Residual non-adiabatic amplitude at each window end ~ hbar alpha0 Delta / eps^3.
  const double a_end = c.hbar * alpha0 * gap / (eps_end * eps_end * eps_end);
  const double p = lz_probability(gap * gap / (4.0 * c.hbar * alpha0));
  result.truncation_bound = 4.0 * a_end * (std::sqrt(p) + a_end);
  if (window < 10.0) {
    std::ostringstream msg;
    msg << "sweep window " << window << " < 10 transition widths; truncation error up to "
        << result.truncation_bound;
    result.warnings.push_back(msg.str());
  }
  return result;
}

Trajectory linear_sweep_trajectory(const MaterialSpec& mat, double alpha0, double window,
                                   const Constants& c) {
  mat.validate();
  if (!(alpha0 > 0.0) || !(window > 0.0)) throw ValidationError("need alpha0 > 0 and window > 0");
  const double half_time = window * std::sqrt(c.hbar / alpha0);
  const double slope = alpha0 / (2.0 * c.hbar * mat.fermi_velocity);  // dk/dt
  const double k_max = slope * half_time;
  const TimeGrid grid = TimeGrid::symmetric(half_time, 0.999 * max_grid_step(mat, k_max, c));
  Trajectory tr;
  tr.t = grid.samples();
  tr.t.front() = -half_time;
  tr.t.back() = half_time;
  tr.k0 = 0.0;
  tr.k.resize(tr.t.size());
  tr.dkdt.assign(tr.t.size(), slope);
  tr.bias.resize(tr.t.size());
  // Re-space so the end points sit exactly on +-half_time.
  const double step = 2.0 * half_time / static_cast<double>(tr.t.size() - 1);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    tr.t[i] = -half_time + step * static_cast<double>(i);
    tr.k[i] = slope * tr.t[i];
    tr.bias[i] = 2.0 * c.hbar * mat.fermi_velocity * tr.k[i];
  }
  return tr;
}

}  // namespace lzs
