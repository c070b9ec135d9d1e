// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "vbohm/errors.hpp"

namespace vbohm::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Settings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double initial_step = 1e-3;
  long max_steps = 10'000'000;
};

/// Adaptive Dormand-Prince 5(4) stepper for y' = f(t, y).
///
/// advance() integrates from t to t_end (either direction) and keeps the last
/// accepted step size, so repeated calls over consecutive output intervals
/// continue smoothly.
template <std::size_t N, class Rhs>
class DormandPrince {
public:
  DormandPrince(Rhs rhs, Settings settings = {})
      : rhs_(std::move(rhs)), settings_(settings), step_(settings.initial_step) {}

  State<N> advance(State<N> y, double t, double t_end) {
    const double direction = t_end >= t ? 1.0 : -1.0;
    double h = std::abs(step_);
    while (direction * (t_end - t) > 0.0) {
      if (++steps_ > settings_.max_steps)
        throw IntegrationError("ode: step budget exhausted at t = " + std::to_string(t));
      const double remaining = std::abs(t_end - t);
      bool last = false;
      if (h >= remaining) {
        h = remaining;
        last = true;
      }
      State<N> y_new, err;
      attempt(t, y, direction * h, y_new, err);
      double norm = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        finite = finite && std::isfinite(y_new[i]) && std::isfinite(err[i]);
        const double scale =
            settings_.abs_tol + settings_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        norm = std::max(norm, std::abs(err[i]) / scale);
      }
      if (!finite || !std::isfinite(norm))
        throw IntegrationError("ode: non-finite state near t = " + std::to_string(t));
      if (norm <= 1.0) {
        t = last ? t_end : t + direction * h;
        y = y_new;
        const double grow = norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(norm, -0.2));
        // Do not let a truncated final step shrink the carried step size.
        if (!last) step_ = h * grow;
        h *= grow;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
          throw IntegrationError("ode: step size underflow near t = " + std::to_string(t));
      }
    }
    return y;
  }

  long steps() const { return steps_; }

private:
  void attempt(double t, const State<N>& y, double h, State<N>& y_new, State<N>& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    State<N> k1 = rhs_(t, y), k2, k3, k4, k5, k6, k7, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = rhs_(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs_(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs_(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs_(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs_(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs_(t + h, y_new);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }

  Rhs rhs_;
  Settings settings_;
  double step_;
  long steps_ = 0;
};

template <std::size_t N, class Rhs>
DormandPrince<N, Rhs> make_stepper(Rhs rhs, Settings settings = {}) {
  return DormandPrince<N, Rhs>(std::move(rhs), settings);
}

} // namespace vbohm::ode
