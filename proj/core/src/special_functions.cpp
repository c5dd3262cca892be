#include "evid/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace evid {
namespace {

// Arguments at or above this value go straight to the asymptotic series.
constexpr double kAsymptoticThreshold = 10.0;

void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error(std::string(fn) + ": argument must be finite and > 0, got " +
                            std::to_string(x));
  }
}

// Stirling series for ln Gamma(z), z >= kAsymptoticThreshold.
double log_gamma_asymptotic(double z) {
  // B_{2k} / (2k (2k-1)) for k = 1..8
  static constexpr double kCoeff[] = {
      1.0 / 12.0,          -1.0 / 360.0,      1.0 / 1260.0,     -1.0 / 1680.0,
      1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,      -3617.0 / 122400.0,
  };
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double c : kCoeff) {
    series += c * power;
    power *= inv2;
  }
  constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;
  return (z - 0.5) * std::log(z) - z + kHalfLogTwoPi + series;
}

double digamma_asymptotic(double z) {
  // B_{2k} / (2k) for k = 1..7
  static constexpr double kCoeff[] = {
      1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
  };
  const double inv2 = 1.0 / (z * z);
  double series = 0.0;
  double power = inv2;
  for (double c : kCoeff) {
    series += c * power;
    power *= inv2;
  }
  return std::log(z) - 0.5 / z - series;
}

double trigamma_asymptotic(double z) {
  // B_{2k} for k = 1..7
  static constexpr double kCoeff[] = {
      1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,
  };
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv2 * inv;
  for (double c : kCoeff) {
    series += c * power;
    power *= inv2;
  }
  return inv + 0.5 * inv2 + series;
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x >= kAsymptoticThreshold) return log_gamma_asymptotic(x);

  // ln Gamma(x) = ln Gamma(x + n) - ln(x (x+1) ... (x+n-1))
  double product = 1.0;
  double z = x;
  while (z < kAsymptoticThreshold) {
    product *= z;
    z += 1.0;
  }
  return log_gamma_asymptotic(z) - std::log(product);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  double z = x;
  while (z < kAsymptoticThreshold) {
    shift += 1.0 / z;
    z += 1.0;
  }
  return digamma_asymptotic(z) - shift;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double shift = 0.0;
  double z = x;
  while (z < kAsymptoticThreshold) {
    shift += 1.0 / (z * z);
    z += 1.0;
  }
  return trigamma_asymptotic(z) + shift;
}

}  // namespace evid
