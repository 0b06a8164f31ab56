#pragma once

// Adaptive Dormand-Prince 5(4) stepping for linear-algebra states (Eigen
// vectors or matrices). Local error is controlled in the max norm with
// absolute and relative tolerance both equal to `tol`.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "aqs/error.hpp"

namespace aqs {

struct OdeOptions {
  double tol = 1e-9;
  double initial_step = 0.0;  // 0 picks one from the derivative scale
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 100'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double last_step = 0.0;
  double t_end = 0.0;
  bool stopped_early = false;
};

class StepSizeUnderflow : public NumericalError {
 public:
  StepSizeUnderflow(double t, double h)
      : NumericalError("step size underflow at t=" + std::to_string(t) + " (h=" + std::to_string(h) + ")"),
        t_(t),
        h_(h) {}
  double time() const noexcept { return t_; }
  double step() const noexcept { return h_; }

 private:
  double t_, h_;
};

namespace detail {

template <class State>
double scaled_error(const State& err, const State& y0, const State& y1, double tol) {
  auto scale = tol * (1.0 + y0.array().abs().max(y1.array().abs()));
  return (err.array().abs() / scale).maxCoeff();
}

}  // namespace detail

// Integrates dy/dt = rhs(t, y) from t0 to t1 in place. `observe(t, y)` runs
// after every accepted step; returning true stops the integration there.
template <class State, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& rhs, State& y, double t0, double t1, const OdeOptions& opt, Observer&& observe) {
  OdeStats stats;
  stats.t_end = t0;
  if (!(t1 > t0)) return stats;

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  State k1 = rhs(t0, y);
  double t = t0;
  double h = opt.initial_step;
  if (!(h > 0.0)) {
    const double d0 = y.array().abs().maxCoeff();
    const double d1 = k1.array().abs().maxCoeff();
    h = (d1 > 1e-300) ? 0.01 * std::max(d0, 1e-6) / d1 : 1e-6;
    h = std::min(h, (t1 - t0));
  }
  h = std::min(h, opt.max_step);

  State ytmp, k2, k3, k4, k5, k6, k7, ynew;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= opt.max_steps) throw StepSizeUnderflow(t, h);
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      throw StepSizeUnderflow(t, h);

    ytmp = y + h * (a21 * k1);
    k2 = rhs(t + c2 * h, ytmp);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    k3 = rhs(t + c3 * h, ytmp);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    k4 = rhs(t + c4 * h, ytmp);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    k5 = rhs(t + c5 * h, ytmp);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    k6 = rhs(t + h, ytmp);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_next = last ? t1 : t + h;
    k7 = rhs(t_next, ynew);

    State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::scaled_error(err, y, ynew, opt.tol);
    if (!std::isfinite(en)) throw StepSizeUnderflow(t, h);

    if (en <= 1.0) {
      y.swap(ynew);
      k1.swap(k7);
      t = t_next;
      ++stats.accepted;
      stats.last_step = h;
      stats.t_end = t;
      if (observe(t, static_cast<const State&>(y))) {
        stats.stopped_early = t < t1;
        return stats;
      }
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h = std::min(h * fac, opt.max_step);
    } else {
      ++stats.rejected;
      h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
    }
  }
  return stats;
}

template <class State, class Rhs>
OdeStats integrate_dopri5(Rhs&& rhs, State& y, double t0, double t1, const OdeOptions& opt) {
  return integrate_dopri5(std::forward<Rhs>(rhs), y, t0, t1, opt, [](double, const State&) { return false; });
}

}  // namespace aqs
