#include "trunclr/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace trunclr::normal {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

double pdf(double t) {
  if (std::isinf(t)) return 0.0;
  return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

double upper_tail(double t) {
  if (t > kFlushThreshold) return 0.0;
  if (t < -kFlushThreshold) return 1.0;
  return 0.5 * std::erfc(t * kInvSqrt2);
}

double cdf(double t) { return upper_tail(-t); }

double erfcx(double x) {
  if (x < 26.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; at x >= 26 the eighth term is below 1e-18.
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(std::numbers::pi));
}

double mills_ratio(double t) {
  if (t == std::numeric_limits<double>::infinity()) return 0.0;
  // Q(t)/pdf(t) = sqrt(pi/2) * erfcx(t / sqrt 2)
  if (t >= -26.0) return std::sqrt(std::numbers::pi / 2.0) * erfcx(t * kInvSqrt2);
  return upper_tail(t) / pdf(t);
}

double log_upper_tail(double t) {
  if (t == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  if (t == -std::numeric_limits<double>::infinity()) return 0.0;
  if (t < 0.0) return std::log1p(-0.5 * std::erfc(-t * kInvSqrt2));
  if (t < 5.0) return std::log(0.5 * std::erfc(t * kInvSqrt2));
  return std::log(0.5 * erfcx(t * kInvSqrt2)) - 0.5 * t * t;
}

double upper_tail_quantile(double p) {
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  if (p >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double upper_tail_quantile_log(double log_p) {
  if (log_p >= 0.0) return -std::numeric_limits<double>::infinity();
  if (log_p > -690.0) return upper_tail_quantile(std::exp(log_p));
  // Newton on log Q, which is concave with derivative -1/mills_ratio.
  double z = std::sqrt(-2.0 * log_p);
  z = std::sqrt(std::max(-2.0 * log_p - 2.0 * std::log(z) - 2.0 * kLogSqrt2Pi, 1.0));
  for (int it = 0; it < 50; ++it) {
    const double step = (log_upper_tail(z) - log_p) * mills_ratio(z);
    z += step;
    if (std::abs(step) <= 1e-15 * z) break;
  }
  return z;
}

double interval_mass(double a, double b) {
  if (a >= 0.0) return upper_tail(a) - upper_tail(b);
  if (b <= 0.0) return upper_tail(-b) - upper_tail(-a);
  return 1.0 - upper_tail(-a) - upper_tail(b);
}

double log_interval_mass(double a, double b) {
  if (b <= 0.0) {
    const double lo = -b;
    b = -a;
    a = lo;
  }
  if (a >= 0.0) {
    const double la = log_upper_tail(a);
    const double lb = log_upper_tail(b);
    return la + std::log(-std::expm1(lb - la));
  }
  return std::log(0.5 * (std::erf(b * kInvSqrt2) - std::erf(a * kInvSqrt2)));
}

}  // namespace trunclr::normal
