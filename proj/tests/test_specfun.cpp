// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "vbohm/errors.hpp"
#include "vbohm/specfun.hpp"
#include "faddeeva_oracle.hpp"

using vbohm::specfun::Complex;
namespace sf = vbohm::specfun;

namespace {

using vbohm::testing::faddeeva_oracle;

double rel_err(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

} // namespace

TEST_CASE("oracle sanity") {
  // w(0) = 1 and w(i y) = exp(y^2) erfc(y)
  CHECK(rel_err(faddeeva_oracle({0.0, 0.0}), {1.0, 0.0}) < 1e-15);
  for (double y : {0.3, 2.0, 5.0}) {
    const double want = std::exp(y * y) * std::erfc(y);
    CHECK(rel_err(faddeeva_oracle({0.0, y}), {want, 0.0}) < 1e-13);
  }
  // both series at the switch radius
  const Complex z = std::polar(12.0, 0.7);
  CHECK(rel_err(faddeeva_oracle(z), faddeeva_oracle(std::polar(12.0 + 1e-12, 0.7))) < 1e-11);
}

TEST_CASE("reference values") {
  struct Case {
    Complex z, w;
  };
  // 30-digit evaluations of exp(-z^2) erfc(-iz)
  const Case cases[] = {
      {{1.0, 1.0}, {0.30474420525691259246, 0.20821893820283162729}},
      {{0.0, 0.5}, {0.61569034419292587487, 0.0}},
      {{3.0, 0.1}, {0.0079426809987699907004, 0.20074234309867737198}},
      {{6.5, 0.01}, {0.0001385831851760745668, 0.087864203243743553391}},
      {{-2.0, 4.0}, {0.11213947790211601488, -0.053488993852966928359}},
      {{0.999, 0.01}, {0.3694281808678627466, 0.59993017907435313868}},
      {{20.0, 0.001}, {1.4157965831846980328e-6, 0.028244874020999060162}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.z);
    CHECK(rel_err(sf::faddeeva(c.z), c.w) < 1e-13);
  }
}

TEST_CASE("log-spaced sweep against the 100-digit oracle") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> log_r(-3.0, 4.0), arg(0.0, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const Complex z = std::polar(std::pow(10.0, log_r(gen)), arg(gen));
    const Complex zz{z.real(), std::max(0.0, z.imag())};
    const double e = rel_err(sf::faddeeva(zz), faddeeva_oracle(zz));
    worst = std::max(worst, e);
    CAPTURE(zz);
    CHECK(e < 1e-13);
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("real axis") {
  for (double x : {-30.0, -6.9, -2.0, -0.5, 0.0, 0.7, 1.0, 3.3, 7.0, 50.0, 1e3}) {
    const Complex w = sf::faddeeva({x, 0.0});
    CHECK(w.real() == doctest::Approx(std::exp(-x * x)).epsilon(1e-14));
    CHECK(rel_err(w, faddeeva_oracle({x, 0.0})) < 1e-13);
  }
}

TEST_CASE("branch seams agree") {
  for (int j = 0; j <= 40; ++j) {
    const double phi = std::numbers::pi * j / 40.0;
    for (double eps : {-1e-9, 0.0, 1e-9}) {
      const Complex a = std::polar(sf::taylor_radius + eps, phi);
      const Complex b = std::polar(sf::cf_radius + eps, phi);
      const Complex aa{a.real(), std::max(0.0, a.imag())};
      const Complex bb{b.real(), std::max(0.0, b.imag())};
      CHECK(rel_err(sf::branch::taylor(aa), sf::branch::trapezoid(aa)) < 1e-13);
      CHECK(rel_err(sf::branch::trapezoid(bb), sf::branch::continued_fraction(bb)) < 1e-13);
    }
  }
}

TEST_CASE("symmetry w(-conj z) = conj w(z)") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-15.0, 15.0), v(0.0, 15.0);
  for (int i = 0; i < 500; ++i) {
    const Complex z{u(gen), v(gen)};
    const Complex lhs = sf::faddeeva({-z.real(), z.imag()});
    const Complex rhs = std::conj(sf::faddeeva(z));
    CHECK(std::abs(lhs - rhs) <= 1e-15 * std::abs(rhs));
  }
}

TEST_CASE("derivative matches finite differences") {
  for (Complex z : {Complex{0.4, 0.2}, Complex{2.0, 1.0}, Complex{-5.0, 0.5}, Complex{10.0, 3.0}}) {
    const double h = 1e-5;
    const Complex fd = (sf::faddeeva(z + h) - sf::faddeeva(z - h)) / (2.0 * h);
    CHECK(rel_err(sf::faddeeva_derivative(z), fd) < 1e-8);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(sf::faddeeva({1.0, -1e-3}), vbohm::DomainError);
  CHECK_THROWS_AS(sf::faddeeva({std::nan(""), 0.0}), vbohm::DomainError);
  CHECK_THROWS_AS(sf::faddeeva({0.0, std::numeric_limits<double>::infinity()}), vbohm::DomainError);
}

TEST_CASE("documented points") {
  CHECK(sf::faddeeva({0.0, 0.0}) == Complex{1.0, 0.0});
  const double e_erfc1 = std::exp(1.0) * std::erfc(1.0); // 0.42758357615580700
  CHECK(rel_err(sf::faddeeva({0.0, 1.0}), {e_erfc1, 0.0}) < 1e-14);
  const Complex w100 = sf::faddeeva({100.0, 0.0});
  CHECK(w100.imag() == doctest::Approx(1.0 / (std::sqrt(std::numbers::pi) * 100.0)).epsilon(1e-4));
  CHECK(std::abs(w100.real()) < 1e-300);

  CHECK(std::abs(sf::faddeeva_derivative({0.0, 0.0}) - Complex{0.0, 2.0 / std::sqrt(std::numbers::pi)}) < 1e-15);
  const Complex d = sf::faddeeva_derivative({0.0, 1.0});
  CHECK(std::abs(d.real()) < 1e-15);
  CHECK(d.imag() == doctest::Approx(2.0 / std::sqrt(std::numbers::pi) - 2.0 * e_erfc1).epsilon(1e-13));
  CHECK(d.imag() == doctest::Approx(0.27321).epsilon(1e-4));
}

TEST_CASE("real-axis identities") {
  for (double x = -25.0; x <= 25.0; x += 0.173) {
    const Complex w = sf::faddeeva({x, 0.0});
    const Complex wm = sf::faddeeva({-x, 0.0});
    const double g = std::exp(-x * x);
    if (g > 0.0) CHECK(std::abs(w.real() - g) <= 1e-12 * g);
    CHECK(std::abs(w + wm - Complex{2.0 * g, 0.0}) <= 1e-10 * std::abs(w));
  }
}

TEST_CASE("large arguments stay finite") {
  for (Complex z : {Complex{1e6, 0.0}, Complex{0.0, 1e6}, Complex{-1e6, 1e-3}, Complex{3e5, 3e5}, Complex{1e300, 1.0}}) {
    const Complex w = sf::faddeeva(z);
    CHECK(std::isfinite(w.real()));
    CHECK(std::isfinite(w.imag()));
  }
}
