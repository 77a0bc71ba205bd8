#pragma once

// Standard normal distribution functions with tail-stable variants.

namespace trunclr::normal {

inline constexpr double kFlushThreshold = 38.0;

double pdf(double t);

/// P(Z > t). Flushed to exactly 0 for t > 38 and 1 for t < -38.
double upper_tail(double t);

/// P(Z <= t), same flushing rule as upper_tail.
double cdf(double t);

/// log P(Z > t); finite for every finite t (no underflow).
double log_upper_tail(double t);

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// Mills ratio P(Z > t) / pdf(t).
double mills_ratio(double t);

/// Inverse of upper_tail for p in (0, 1).
double upper_tail_quantile(double p);

/// Inverse of log_upper_tail for log_p < 0; valid far beyond double underflow.
double upper_tail_quantile_log(double log_p);

/// Mass of N(0, 1) on [a, b], evaluated through whichever tail is smaller.
double interval_mass(double a, double b);

/// log of interval_mass without underflow; -inf when a == b.
double log_interval_mass(double a, double b);

}  // namespace trunclr::normal
