// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace vbohm::specfun {

using Complex = std::complex<double>;

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0.
///
/// Three regions, chosen by |z|:
///   |z| <= taylor_radius        Maclaurin series sum (iz)^n / Gamma(n/2 + 1)
///   taylor_radius < |z| < cf_radius
///                               trapezoidal rule on the integral
///                               (i/pi) int exp(-t^2)/(z - t) dt with step 0.5
///                               plus the pole correction 2 exp(-z^2)/(1 -+ exp(-2 pi i z/h))
///   |z| >= cf_radius            Laplace continued fraction
/// Relative error is below 1e-13 in all three regions; on the real axis the
/// real part is returned as exp(-x^2) directly.
///
/// Throws DomainError for Im(z) < 0 or non-finite z.
Complex faddeeva(Complex z);

/// w'(z) = 2i/sqrt(pi) - 2 z w(z).
Complex faddeeva_derivative(Complex z);

inline constexpr double taylor_radius = 1.0;
inline constexpr double cf_radius = 7.0;

// Individual branches, exposed so the seams can be tested. No domain checks.
namespace branch {
Complex taylor(Complex z);
Complex trapezoid(Complex z);
Complex continued_fraction(Complex z);
} // namespace branch

} // namespace vbohm::specfun
