// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "vbohm/errors.hpp"

namespace vbohm::quad {

struct Settings {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae >= 0).
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod abscissae (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Interval {
  double a, b;
  T value;
  double error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class T, class F>
Interval<T> gk15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T kronrod = fc * kronrod_w[7];
  T gauss = fc * gauss_w[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_x[j];
    const T sum = f(centre - dx) + f(centre + dx);
    kronrod += sum * kronrod_w[j];
    if (j % 2 == 1) gauss += sum * gauss_w[j / 2];
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [points.front(), points.back()],
/// with the given interior points used as initial interval boundaries.
/// T is double or std::complex<double>. Throws NumericError carrying the
/// achieved error estimate when the tolerance is not reached.
template <class T, class F>
Result<T> integrate(F&& f, std::span<const double> points, const Settings& settings = {}) {
  if (points.size() < 2) throw DomainError("integrate: need at least two interval points");
  std::priority_queue<detail::Interval<T>> heap;
  T total{};
  double error = 0.0;
  int evaluations = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto piece = detail::gk15<T>(f, points[i], points[i + 1]);
    evaluations += 15;
    total += piece.value;
    error += piece.error;
    heap.push(piece);
  }
  auto target = [&] { return std::max(settings.abs_tol, settings.rel_tol * std::abs(total)); };
  while (error > target()) {
    if (static_cast<int>(heap.size()) >= settings.max_intervals) {
      throw NumericError("integrate: tolerance not reached, achieved error estimate " +
                             std::to_string(error),
                         error);
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw NumericError("integrate: interval underflow, achieved error estimate " +
                             std::to_string(error),
                         error);
    }
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to drop the rounding drift of the running updates.
  T resummed{};
  double err_sum = 0.0;
  while (!heap.empty()) {
    resummed += heap.top().value;
    err_sum += heap.top().error;
    heap.pop();
  }
  return {resummed, err_sum, evaluations};
}

template <class T, class F>
Result<T> integrate(F&& f, double a, double b, const Settings& settings = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate<T>(std::forward<F>(f), std::span<const double>(pts), settings);
}

} // namespace vbohm::quad
