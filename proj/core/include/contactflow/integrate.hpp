#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>

#include "contactflow/models.hpp"

namespace contactflow {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = 0.1;
  bool dense_output = false;  // callers keep Hermite data (y, dy) per accepted step
  double initial_step = 0.0;  // 0 = choose automatically
  std::int64_t max_steps = 200000000;
};

struct IntegratorStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
};

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince pair) over a System:
//
//   struct System {
//     static constexpr int kDim = ...;
///     using Vec = Eigen::Matrix<double, kDim, 1>;
//     void rhs(double t, const Vec& y, Vec& dydt);  // current chart state
//     bool maybe_switch(Vec& y);                    // re-chart; true if changed
//   };
//
// The observer is called at every accepted step (including the initial
// point) with (t, y, dydt). Steps land exactly on t1. Negative time spans
// integrate backwards. Throws NumericalError on step underflow.
template <class System, class Observer>
IntegratorStats integrate_adaptive(System& sys, typename System::Vec y, double t0, double t1,
                                   const IntegratorConfig& cfg, Observer&& observe) {
  using Vec = typename System::Vec;
  constexpr int N = System::kDim;

  IntegratorStats stats;
  const double span = t1 - t0;
  if (span == 0.0) {
    Vec f;
    sys.rhs(t0, y, f);
    observe(t0, y, f);
    return stats;
  }
  const double dir = span > 0 ? 1.0 : -1.0;

  // Dormand-Prince coefficients.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Vec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
  double t = t0;
  sys.rhs(t, y, k1);
  observe(t, y, k1);

  double h = cfg.initial_step > 0 ? cfg.initial_step
                                  : std::min(cfg.max_step, 1e-3 * (1.0 + y.norm()) / (1.0 + k1.norm()));
  h = std::min(h, cfg.max_step);
  h = std::min(h, std::abs(span));
  h *= dir;

  while (dir * (t1 - t) > 0) {
    if (dir * (t + h) > dir * t1) h = t1 - t;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      throw NumericalError("integrator step size underflow at t = " + std::to_string(t));
    if (stats.accepted + stats.rejected > cfg.max_steps)
      throw NumericalError("integrator exceeded maximum step count");

    ytmp = y + h * (a21 * k1);
    sys.rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    sys.rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    sys.rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    sys.rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    sys.rhs(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    sys.rhs(t + h, ynew, k7);  // FSAL stage
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0;
    for (int i = 0; i < N; ++i) {
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = yerr[i] / scale;
      err += r * r;
    }
    err = std::sqrt(err / N);

    if (err <= 1.0) {
      t = t + h;
      if (std::abs(t1 - t) < 1e-14 * std::max(1.0, std::abs(t1))) t = t1;
      y = ynew;
      k1 = k7;
      if (sys.maybe_switch(y)) sys.rhs(t, y, k1);  // FSAL stage is stale after a re-chart
      observe(t, y, k1);
      ++stats.accepted;
    } else {
      ++stats.rejected;
    }
    const double factor =
        err > 0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h *= factor;
    if (std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
  }
  return stats;
}

// Fixed-step implicit midpoint rule (symplectic for canonical systems in a
// single chart), used as a cross-check integrator behind the same System
// interface. Fixed-point iteration on the midpoint stage.
template <class System, class Observer>
IntegratorStats integrate_midpoint(System& sys, typename System::Vec y, double t0, double t1,
                                   double step, Observer&& observe) {
  using Vec = typename System::Vec;
  IntegratorStats stats;
  const double span = t1 - t0;
  Vec f;
  sys.rhs(t0, y, f);
  observe(t0, y, f);
  if (span == 0.0) return stats;
  if (!(step > 0)) throw NumericalError("midpoint integrator requires step > 0");

  const double dir = span > 0 ? 1.0 : -1.0;
  const std::int64_t n = std::max<std::int64_t>(1, std::llround(std::abs(span) / step));
  const double h = span / static_cast<double>(n);

  for (std::int64_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    Vec k;
    sys.rhs(t + h / 2, y, k);
    for (int it = 0; it < 50; ++it) {
      Vec ymid = y + (h / 2) * k;
      Vec knew;
      sys.rhs(t + h / 2, ymid, knew);
      const double delta = (knew - k).norm();
      k = knew;
      if (delta < 1e-15 * (1.0 + k.norm())) break;
    }
    y = y + h * k;
    double tnew = t + h;
    if (i + 1 == n) tnew = t1;
    sys.rhs(tnew, y, f);
    if (sys.maybe_switch(y)) sys.rhs(tnew, y, f);
    observe(tnew, y, f);
    ++stats.accepted;
  }
  (void)dir;
  return stats;
}

}  // namespace contactflow
