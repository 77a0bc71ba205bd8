#pragma once

#include "trunclr/interval_union.hpp"
#include "trunclr/rng.hpp"

// Unit-variance Gaussian N(mu, 1) truncated to a finite union of intervals.
//
// All quantities are evaluated in log space per piece, so sets lying hundreds
// of standard deviations from mu are still handled; ZeroMassError is raised
// only when the set carries no Lebesgue measure or mu is not finite.

namespace trunclr::trunc_gauss {

struct Moments {
  double log_mass;
  double mean;
  double variance;
};

Moments moments(double mu, const IntervalUnion& s);

inline double trunc_mean(double mu, const IntervalUnion& s) { return moments(mu, s).mean; }
inline double trunc_var(double mu, const IntervalUnion& s) { return moments(mu, s).variance; }

/// One draw from N(mu, 1, S) by piece selection and per-piece CDF inversion.
/// The result is exact in distribution up to floating point, which satisfies
/// any total-variation budget zeta in (0, 1); zeta is validated and otherwise
/// unused.
double sample(double mu, const IntervalUnion& s, double zeta, Rng& rng);

}  // namespace trunclr::trunc_gauss
