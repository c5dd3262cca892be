#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "evid/special_functions.hpp"

namespace {

using Hp = boost::multiprecision::cpp_bin_float_50;

double hp_lgamma(double x) { return static_cast<double>(boost::math::lgamma(Hp(x))); }
double hp_digamma(double x) { return static_cast<double>(boost::math::digamma(Hp(x))); }
double hp_trigamma(double x) { return static_cast<double>(boost::math::trigamma(Hp(x))); }

// Absolute tolerance, widened to a few ulps where |value| makes the absolute
// bound unrepresentable in double precision.
double tol(double abs_tol, double value) {
  return std::max(abs_tol, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
}

std::vector<double> grid() {
  std::vector<double> xs;
  for (double x = 1e-3; x <= 1e6; x *= 1.37) xs.push_back(x);
  for (double x : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 5.999, 6.0, 9.999, 10.0, 10.001, 1e6}) xs.push_back(x);
  return xs;
}

}  // namespace

TEST_CASE("log_gamma spot values") {
  CHECK(evid::log_gamma(1.0) == 0.0);
  CHECK(evid::log_gamma(2.0) == 0.0);
  CHECK(evid::log_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  CHECK(std::abs(evid::log_gamma(0.5) - 0.5 * std::log(std::numbers::pi)) < 1e-12);
}

TEST_CASE("digamma spot values") {
  CHECK(std::abs(evid::digamma(1.0) + 0.5772156649015329) < 1e-12);
  CHECK(std::abs(evid::digamma(2.0) - 0.4227843350984671) < 1e-12);
  CHECK(std::abs(evid::digamma(0.5) - (-0.5772156649015329 - 2.0 * std::log(2.0))) < 1e-12);
}

TEST_CASE("trigamma spot values") {
  const double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  CHECK(std::abs(evid::trigamma(1.0) - pi2_6) < 1e-10);
  CHECK(std::abs(evid::trigamma(2.0) - (pi2_6 - 1.0)) < 1e-10);
  const double big = 1e6;
  CHECK(std::abs(evid::trigamma(big) - 1.0 / big) < 1e-6 / big);
}

TEST_CASE("agreement with 50-digit oracle over [1e-3, 1e6]") {
  for (double x : grid()) {
    CAPTURE(x);
    const double lg = hp_lgamma(x);
    const double dg = hp_digamma(x);
    const double tg = hp_trigamma(x);
    CHECK(std::abs(evid::log_gamma(x) - lg) <= tol(1e-12, lg));
    CHECK(std::abs(evid::digamma(x) - dg) <= tol(1e-12, dg));
    CHECK(std::abs(evid::trigamma(x) - tg) <= tol(1e-10, tg));
  }
}

TEST_CASE("recurrences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(std::log(0.01), std::log(100.0));
  for (int i = 0; i < 500; ++i) {
    const double x = std::exp(u(rng));
    CAPTURE(x);
    CHECK(std::abs(evid::digamma(x + 1.0) - evid::digamma(x) - 1.0 / x) < 1e-10);
    CHECK(std::abs(evid::log_gamma(x + 1.0) - evid::log_gamma(x) - std::log(x)) < 1e-10);
  }
}

TEST_CASE("trigamma matches finite differences of digamma") {
  for (double x = 0.1; x <= 100.0; x *= 1.21) {
    const double h = 1e-5 * std::max(1.0, x);
    const double fd = (evid::digamma(x + h) - evid::digamma(x - h)) / (2.0 * h);
    CAPTURE(x);
    CHECK(std::abs(evid::trigamma(x) - fd) <= 1e-6 * std::abs(fd));
  }
}

TEST_CASE("domain errors") {
  for (double bad : {0.0, -1.0, -0.5, std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::quiet_NaN()}) {
    CHECK_THROWS_AS(evid::log_gamma(bad), std::domain_error);
    CHECK_THROWS_AS(evid::digamma(bad), std::domain_error);
    CHECK_THROWS_AS(evid::trigamma(bad), std::domain_error);
  }
  CHECK_NOTHROW(evid::digamma(1e-6));
}
