// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "vbohm/errors.hpp"
#include "vbohm/units.hpp"

using namespace vbohm;

TEST_CASE("atomic unit constants") {
  CHECK(units::hbar == 1.0);
  CHECK(units::electron_mass == 1.0);
  CHECK(units::charge == 1.0);
  CHECK(units::eps0 == doctest::Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-16));
  CHECK(units::hartree_in_ev > 27.2);
  CHECK(units::hartree_in_ev < 27.3);
}

TEST_CASE("eV to hartree") {
  CHECK(units::ev_to_hartree(0.0) == 0.0);
  CHECK(units::ev_to_hartree(27.211386245988) == doctest::Approx(1.0).epsilon(1e-15));
  // 0.1 / 27.211386245988, by hand
  CHECK(units::ev_to_hartree(0.1) == doctest::Approx(3.674932217565499e-3).epsilon(1e-13));
  CHECK_THROWS_AS(units::ev_to_hartree(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(units::hartree_to_ev(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("round trip over twelve decades") {
  const double eps = std::numeric_limits<double>::epsilon();
  for (int e = -6; e <= 6; ++e) {
    for (double m : {1.0, 1.7, 3.14159, 7.77}) {
      for (double sign : {1.0, -1.0}) {
        const double x = sign * m * std::pow(10.0, e);
        const double back = units::hartree_to_ev(units::ev_to_hartree(x));
        CHECK(std::abs(back - x) <= 4.0 * eps * std::abs(x));
      }
    }
  }
}

TEST_CASE("kappa from temperature") {
  CHECK(units::kappa_from_temperature(units::hartree_in_ev) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(units::kappa_from_temperature(0.5 * units::hartree_in_ev) == doctest::Approx(1.0).epsilon(1e-14));
  // 300 K: sqrt(2 * 0.025852 / 27.211386) = 0.043590
  CHECK(std::abs(units::kappa_from_temperature(0.025852) - 0.04360) < 1e-4);
  CHECK(units::kappa_from_temperature(units::kelvin_to_ev(300.0)) == doctest::Approx(0.043590).epsilon(1e-4));

  CHECK_THROWS_AS(units::kappa_from_temperature(0.0), DomainError);
  CHECK_THROWS_AS(units::kappa_from_temperature(-1.0), DomainError);

  double prev = 0.0;
  for (double t = 1e-4; t < 1e4; t *= 1.37) {
    const double k = units::kappa_from_temperature(t);
    CHECK(k > prev);
    prev = k;
  }
}

TEST_CASE("kelvin") {
  CHECK(units::kelvin_to_ev(1.0) == doctest::Approx(8.617333262e-5).epsilon(1e-15));
  CHECK_THROWS_AS(units::kelvin_to_ev(std::nan("")), DomainError);
}
