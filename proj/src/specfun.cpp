// SPDX-License-Identifier: Apache-2.0
#include "vbohm/specfun.hpp"

#include <cmath>
#include <numbers>

#include "vbohm/errors.hpp"

namespace vbohm::specfun {

namespace {

constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
constexpr Complex I{0.0, 1.0};

// Node spacing of the trapezoidal rule. The discretisation error of the
// smooth part is ~exp(-pi^2/h^2) = 7e-18.
constexpr double trap_step = 0.5;
// exp(-t^2) < 1e-18 beyond this.
constexpr double trap_cutoff = 6.5;

constexpr int cf_terms = 24;

} // namespace

namespace branch {

Complex taylor(Complex z) {
  // t_n = (iz)^n / Gamma(n/2 + 1), with t_n = t_{n-2} * (-z^2) / (n/2).
  const Complex minus_z2 = -z * z;
  Complex even = 1.0;
  Complex odd = 2.0 * inv_sqrt_pi * I * z;
  Complex sum = even + odd;
  for (int n = 2; n < 200; n += 2) {
    even *= minus_z2 / (0.5 * n);
    odd *= minus_z2 / (0.5 * (n + 1));
    sum += even + odd;
    if (std::abs(even) + std::abs(odd) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

Complex trapezoid(Complex z) {
  const double x = z.real();
  const double y = z.imag();
  const double h = trap_step;

  // Keep |x| at least h/4 away from every node so that neither the sum nor
  // the pole correction is evaluated near its (mutually cancelling) poles.
  const double frac = std::fmod(std::abs(x) / h, 1.0);
  const bool shifted = frac < 0.25 || frac > 0.75;
  const double offset = shifted ? 0.5 * h : 0.0;

  Complex sum = shifted ? Complex{0.0} : 1.0 / z;
  const int nodes = static_cast<int>(trap_cutoff / h) + 1;
  for (int n = shifted ? 0 : 1; n <= nodes; ++n) {
    const double t = n * h + offset;
    sum += std::exp(-t * t) * (1.0 / (z - t) + 1.0 / (z + t));
  }
  Complex w = I * (h / std::numbers::pi) * sum;

  // Residue of the pole at t = z, present while the contour shift of pi/h
  // crosses it.
  if (y < std::numbers::pi / h) {
    const Complex e = std::exp(-2.0 * std::numbers::pi * I * z / h);
    const Complex denom = shifted ? 1.0 + e : 1.0 - e;
    w += 2.0 * std::exp(-z * z) / denom;
  }
  return w;
}

Complex continued_fraction(Complex z) {
  // w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))
  Complex r = 0.0;
  for (int n = cf_terms; n >= 1; --n) r = (0.5 * n) / (z - r);
  return I * inv_sqrt_pi / (z - r);
}

} // namespace branch

Complex faddeeva(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("faddeeva: non-finite argument");
  if (z.imag() < 0.0) throw DomainError("faddeeva: Im(z) < 0 is outside the supported domain");

  const double r = std::abs(z);
  Complex w;
  if (r <= taylor_radius)
    w = branch::taylor(z);
  else if (r < cf_radius)
    w = branch::trapezoid(z);
  else
    w = branch::continued_fraction(z);

  if (z.imag() == 0.0) w.real(std::exp(-z.real() * z.real()));
  return w;
}

Complex faddeeva_derivative(Complex z) {
  return 2.0 * I * inv_sqrt_pi - 2.0 * z * faddeeva(z);
}

} // namespace vbohm::specfun
