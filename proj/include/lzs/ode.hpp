#pragma once

// Adaptive integration with the Runge-Kutta-Fehlberg 7(8) embedded pair from
// Boost.Odeint, driven so that it stops exactly on requested output times and
// keeps its step-size proposal across them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "lzs/errors.hpp"

namespace lzs {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct StepperOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  std::size_t max_steps = 500'000'000;
};

struct StepperStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// `Rhs` is callable as rhs(double t, const OdeState<N>& y, OdeState<N>& dydt).
template <std::size_t N, class Rhs>
class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(Rhs rhs, StepperOptions opts)
      : rhs_(std::move(rhs)),
        opts_(opts),
        stepper_(boost::numeric::odeint::make_controlled(
            opts.atol, opts.rtol, boost::numeric::odeint::runge_kutta_fehlberg78<OdeState<N>>())) {}

  /// Integrates y from t to t_end (t_end > t) and leaves t == t_end.
  void advance(double& t, OdeState<N>& y, double t_end) {
    if (!(t_end > t)) return;
    auto system = [this](const OdeState<N>& x, OdeState<N>& dxdt, double time) {
      rhs_(time, x, dxdt);
      ++stats_.evaluations;
    };
    if (h_ <= 0.0) h_ = std::min(1e-3, t_end - t);
    namespace odeint = boost::numeric::odeint;
    while (t < t_end) {
      const double remaining = t_end - t;
      // Stretch by up to 1% rather than leave a sliver before t_end.
      const bool clamped = h_ >= 0.99 * remaining;
      double h = clamped ? remaining : h_;
      if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        throw PropagationError("step size underflow (h=" + std::to_string(h) + " fs)", t);
      if (stats_.accepted + stats_.rejected >= opts_.max_steps)
        throw PropagationError("step budget exhausted", t);
      const double t_before = t;
      if (stepper_.try_step(system, y, t, h) == odeint::success) {
        ++stats_.accepted;
        if (clamped) {
          t = t_end;
          h_ = std::max(h_, h);
        } else {
          h_ = h;
        }
      } else {
        ++stats_.rejected;
        t = t_before;
        h_ = h;
      }
    }
  }

  const StepperStats& stats() const { return stats_; }

 private:
  using Controlled = decltype(boost::numeric::odeint::make_controlled(
      0.0, 0.0, boost::numeric::odeint::runge_kutta_fehlberg78<OdeState<N>>()));

  Rhs rhs_;
  StepperOptions opts_;
  Controlled stepper_;
  StepperStats stats_;
  double h_ = 0.0;
};

}  // namespace lzs
