// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <complex>

namespace vbohm::testing {

namespace mpx = boost::multiprecision;

using BigReal = mpx::cpp_bin_float_100;
using BigComplex = mpx::cpp_complex_100;

// w(z) in 100-digit arithmetic: Maclaurin series for |z| <= 12, the
// asymptotic series i/(sqrt(pi) z) sum (2n-1)!!/(2z^2)^n beyond (truncated at
// its smallest term, error ~ exp(-|z|^2)).
inline std::complex<double> faddeeva_oracle(std::complex<double> zd) {
  const BigComplex z(BigReal(zd.real()), BigReal(zd.imag()));
  const BigReal sqrt_pi = mpx::sqrt(boost::math::constants::pi<BigReal>());
  BigComplex sum;
  if (std::abs(zd) <= 12.0) {
    const BigComplex iz = BigComplex(BigReal(0), BigReal(1)) * z;
    const BigComplex iz2 = iz * iz;
    BigComplex even(BigReal(1));            // (iz)^0 / Gamma(1)
    BigComplex odd = iz * BigReal(2) / sqrt_pi; // (iz)^1 / Gamma(3/2)
    sum = even + odd;
    for (int n = 2; n < 4000; n += 2) {
      even = even * iz2 / BigReal(n / 2);              // Gamma(n/2 + 1) = (n/2) Gamma(n/2)
      odd = odd * iz2 / (BigReal(n + 1) / BigReal(2)); // Gamma((n+1)/2 + 1)
      sum += even + odd;
      if (mpx::abs(even) + mpx::abs(odd) < BigReal("1e-60") * mpx::abs(sum) && n > 4) break;
    }
  } else {
    const BigComplex inv2z2 = BigReal(1) / (BigReal(2) * z * z);
    BigComplex term(BigReal(1));
    sum = term;
    BigReal last = mpx::abs(term);
    for (int n = 1; n < 100000; ++n) {
      const BigComplex next = term * inv2z2 * BigReal(2 * n - 1);
      const BigReal size = mpx::abs(next);
      if (size > last || size < BigReal("1e-60")) break;
      term = next;
      last = size;
      sum += term;
    }
    sum *= BigComplex(BigReal(0), BigReal(1)) / (sqrt_pi * z);
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

} // namespace vbohm::testing
