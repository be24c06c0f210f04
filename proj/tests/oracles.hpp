#pragma once

// Reference values computed independently of the library: adaptive quadrature,
// closed-form Gaussian optics and the rotating-wave Rabi solution.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double kHbar = 0.6582119569;
inline constexpr double kPi = std::numbers::pi;

// Integral of sqrt(1 - m sin^2 t) over [0, pi/2].
inline double elliptic_e(double m) {
  auto f = [m](double t) {
    const double s = std::sin(t);
    return std::sqrt(1.0 - m * s * s);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, 0.0, kPi / 2.0, 1e-13);
}

// Intensity FWHM of a transform-limited Gaussian of FWHM tau after GDD.
inline double chirped_fwhm(double tau, double gdd) {
  const double x = 4.0 * std::numbers::ln2 * gdd / (tau * tau);
  return tau * std::sqrt(1.0 + x * x);
}

// Per-cycle phase (1/hbar) int eps dt for A(t) = -(E0/w) sin(w t) and k0 = 0.
inline double cycle_phase(double gap, double vf, double photon_energy, double e0) {
  const double w = photon_energy / kHbar;
  auto eps = [&](double t) {
    const double alpha = 2.0 * vf * (e0 / w) * std::sin(w * t);  // 2 hbar v_F k(t)
    return std::sqrt(gap * gap + alpha * alpha);
  };
  const double period = 2.0 * kPi / w;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(eps, 0.0, period, 15, 1e-13) /
         kHbar;
}

// Rotating-wave Rabi period on exact resonance, coupling v_F e E0 / w.
inline double rabi_period(double vf, double photon_energy, double e0) {
  const double w = photon_energy / kHbar;
  const double omega_r = vf * e0 / (kHbar * w);
  return 2.0 * kPi / omega_r;
}

}  // namespace oracle
