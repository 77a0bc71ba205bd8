#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "trunclr/interval_union.hpp"
#include "trunclr/synthetic_model.hpp"
#include "trunclr/warm_start.hpp"

namespace trunclr {

/// Writes a (possibly biased) stochastic gradient at w into g.
using GradientOracle = std::function<void(const Vector& w, Rng& rng, Vector& g)>;

struct TraceRow {
  std::size_t t;
  double eta;
  double grad_norm;
  double dist_to_center;
};

struct PsgdOptions {
  std::size_t steps = 200'000;
  double kappa = 1.0;
  /// Steps whose gradient raised ZeroMassError are skipped; more than this
  /// fraction of skipped steps aborts the run.
  double max_skip_fraction = 1e-3;
  /// Record every n-th step in the trace; 0 disables tracing.
  std::size_t trace_every = 0;
};

struct PsgdResult {
  Vector average;  // (1/T) sum of iterates w(1..T)
  Vector last;
  std::size_t skipped = 0;
  std::vector<TraceRow> trace;
};

/// Projected SGD with step 1/(kappa t), returning the average iterate.
PsgdResult minimize_projected(const Vector& init, const ProjectionBall& ball,
                              const GradientOracle& oracle, const PsgdOptions& options, Rng& rng);

/// PSGD on the perturbed NLL for set S, with gradients from GradientSampler.
PsgdResult run_psgd_detailed(const Vector& init, const ProjectionBall& ball, const IntervalUnion& s,
                             const PsgdOptions& options, double zeta, SampleSource& source, Rng& rng);

inline Vector run_psgd(const Vector& init, const ProjectionBall& ball, const IntervalUnion& s,
                       std::size_t steps, double kappa, double zeta, SampleSource& source, Rng& rng) {
  PsgdOptions opt;
  opt.steps = steps;
  opt.kappa = kappa;
  return run_psgd_detailed(init, ball, s, opt, zeta, source, rng).average;
}

struct AggregateResult {
  Vector estimate;
  std::size_t index;
  bool low_confidence;
};

/// Picks the first run within 2 zeta / 3 of at least ceil(3K/5) runs (itself
/// included). Without such a run, returns the run whose ceil(3K/5)-th nearest
/// run is closest and flags low confidence.
AggregateResult aggregate(const std::vector<Vector>& runs, double zeta);

struct KappaEstimate {
  double kappa;
  double raw_min;  // before flooring
  bool floored;
};

inline constexpr double kKappaFloor = 1e-6;

/// Minimum over probe points of the smallest Hessian eigenvalue, floored at
/// 1e-6. The first probe is w_hat projected onto the ball; the rest are
/// uniform in the ball.
KappaEstimate estimate_kappa(const Vector& w_hat, const ProjectionBall& ball, const IntervalUnion& s,
                             const Dataset& data, std::size_t probes, Rng& rng);

/// Uniform draw from the ball.
Vector uniform_in_ball(const ProjectionBall& ball, Rng& rng);

}  // namespace trunclr
