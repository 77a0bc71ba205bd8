#include "trunclr/psgd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trunclr/errors.hpp"
#include "trunclr/likelihood.hpp"

namespace trunclr {

PsgdResult minimize_projected(const Vector& init, const ProjectionBall& ball,
                              const GradientOracle& oracle, const PsgdOptions& options, Rng& rng) {
  if (options.steps < 1) throw InvalidArgument("PSGD needs at least one step");
  if (!(options.kappa > 0.0)) throw InvalidArgument("PSGD needs kappa > 0");
  if ((init - ball.center).norm() > ball.radius * (1.0 + 1e-12)) {
    throw InvalidArgument("PSGD initialisation lies outside the projection ball");
  }
  const auto max_skips = static_cast<std::size_t>(options.max_skip_fraction * options.steps);

  PsgdResult out;
  Vector w = init;
  Vector g(init.size());
  Vector offset_sum = Vector::Zero(init.size());
  for (std::size_t t = 1; t <= options.steps; ++t) {
    const double eta = 1.0 / (options.kappa * static_cast<double>(t));
    bool skipped = false;
    try {
      oracle(w, rng, g);
    } catch (const ZeroMassError& e) {
      if (++out.skipped > max_skips) {
        std::ostringstream msg;
        msg << "PSGD aborted after " << out.skipped << " zero-mass gradient failures: " << e.what();
        throw Error(msg.str());
      }
      skipped = true;
    }
    if (!skipped) {
      w -= eta * g;
      w = project(ball, w);
    }
    offset_sum += w - init;
    if (options.trace_every > 0 && t % options.trace_every == 0) {
      out.trace.push_back({t, eta, skipped ? 0.0 : g.norm(), (w - ball.center).norm()});
    }
  }
  out.average = init + offset_sum / static_cast<double>(options.steps);
  out.last = w;
  return out;
}

PsgdResult run_psgd_detailed(const Vector& init, const ProjectionBall& ball, const IntervalUnion& s,
                             const PsgdOptions& options, double zeta, SampleSource& source, Rng& rng) {
  GradientSampler sampler(s, zeta, source);
  GradientOracle oracle = [&sampler](const Vector& w, Rng& r, Vector& g) { sampler.sample(w, r, g); };
  return minimize_projected(init, ball, oracle, options, rng);
}

AggregateResult aggregate(const std::vector<Vector>& runs, double zeta) {
  if (runs.empty()) throw InvalidArgument("aggregate needs at least one run");
  if (!(zeta > 0.0)) throw InvalidArgument("aggregate needs zeta > 0");
  const std::size_t k = runs.size();
  const std::size_t need = (3 * k + 4) / 5;
  const double tol = 2.0 * zeta / 3.0;

  std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) dist[i][j] = dist[j][i] = (runs[i] - runs[j]).norm();
  }
  for (std::size_t l = 0; l < k; ++l) {
    const auto close = std::count_if(dist[l].begin(), dist[l].end(), [&](double v) { return v <= tol; });
    if (static_cast<std::size_t>(close) >= need) return {runs[l], l, false};
  }
  std::size_t best = 0;
  double best_radius = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < k; ++l) {
    auto row = dist[l];
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(need - 1), row.end());
    if (row[need - 1] < best_radius) {
      best_radius = row[need - 1];
      best = l;
    }
  }
  return {runs[best], best, true};
}

Vector uniform_in_ball(const ProjectionBall& ball, Rng& rng) {
  const auto d = ball.center.size();
  Vector dir(d);
  double norm;
  do {
    for (Eigen::Index i = 0; i < d; ++i) dir[i] = rng.normal();
    norm = dir.norm();
  } while (norm == 0.0);
  const double r = ball.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  return ball.center + (r / norm) * dir;
}

KappaEstimate estimate_kappa(const Vector& w_hat, const ProjectionBall& ball, const IntervalUnion& s,
                             const Dataset& data, std::size_t probes, Rng& rng) {
  if (probes < 1) throw InvalidArgument("estimate_kappa needs at least one probe");
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < probes; ++p) {
    const Vector w = p == 0 ? project(ball, w_hat) : uniform_in_ball(ball, rng);
    const Matrix h = population_hessian(w, s, data);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, eig.eigenvalues().minCoeff());
  }
  const bool floored = !(lowest >= kKappaFloor);
  return {floored ? kKappaFloor : lowest, lowest, floored};
}

}  // namespace trunclr
