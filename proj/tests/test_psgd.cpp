#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "trunclr/errors.hpp"
#include "trunclr/fixtures.hpp"
#include "trunclr/likelihood.hpp"
#include "trunclr/psgd.hpp"
#include "trunclr/set_learner.hpp"
#include "trunclr/warm_start.hpp"

using namespace trunclr;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

GradientOracle quadratic(const Vector& a, const Vector& curvature) {
  return [a, curvature](const Vector& w, Rng&, Vector& g) { g = curvature.cwiseProduct(w - a); };
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  return sxy / sxx;
}

}  // namespace

TEST(Psgd, ZeroGradientReturnsInitExactly) {
  const auto ball = make_ball(vec({0.0, 0.0, 0.0}), 2.0);
  const Vector init = vec({0.3, -0.7, 1.1});
  Rng rng(1);
  const auto r = minimize_projected(init, ball, [](const Vector& w, Rng&, Vector& g) { g = Vector::Zero(w.size()); },
                                    PsgdOptions{1000, 1.0, 1e-3, 0}, rng);
  EXPECT_EQ(r.average, init);
  EXPECT_EQ(r.last, init);
}

TEST(Psgd, QuadraticConvergesToMinimiser) {
  const Vector a = vec({0.5, -1.0, 0.25});
  const auto ball = make_ball(Vector::Zero(3), 3.0);
  Rng rng(2);
  const auto r = minimize_projected(vec({2.0, 1.0, -1.0}), ball, quadratic(a, Vector::Ones(3)),
                                    PsgdOptions{10000, 1.0, 1e-3, 0}, rng);
  EXPECT_LE((r.average - a).norm(), 1e-2);
}

TEST(Psgd, AverageIterateErrorDecaysLikeOneOverT) {
  const Vector a = vec({0.5, -1.0, 0.25});
  const Vector curvature = vec({1.0, 2.5, 4.0});
  const auto ball = make_ball(Vector::Zero(3), 10.0);
  std::vector<double> log_t, log_err;
  for (std::size_t steps : {1000u, 10000u, 100000u}) {
    Rng rng(3);
    const auto r = minimize_projected(a + vec({3.0, -2.0, 1.0}), ball, quadratic(a, curvature),
                                      PsgdOptions{steps, 1.0, 1e-3, 0}, rng);
    log_t.push_back(std::log(static_cast<double>(steps)));
    log_err.push_back(std::log((r.average - a).norm()));
  }
  const double s = slope(log_t, log_err);
  EXPECT_GE(s, -1.2);
  EXPECT_LE(s, -0.7);
}

TEST(Psgd, NoisyQuadraticConverges) {
  const Vector a = vec({0.5, -1.0});
  const auto ball = make_ball(Vector::Zero(2), 3.0);
  Rng rng(4);
  const GradientOracle noisy = [&a](const Vector& w, Rng& r, Vector& g) {
    g = w - a;
    g[0] += r.normal();
    g[1] += r.normal();
  };
  const auto out = minimize_projected(Vector::Zero(2), ball, noisy, PsgdOptions{100000, 1.0, 1e-3, 0}, rng);
  EXPECT_LE((out.average - a).norm(), 0.05);
}

TEST(Psgd, EveryIterateIsFeasibleAndStepSizeIsExact) {
  const auto ball = make_ball(vec({1.0, -1.0}), 0.5);
  Rng rng(5);
  std::size_t calls = 0;
  const GradientOracle pushing = [&](const Vector& w, Rng& r, Vector& g) {
    ++calls;
    EXPECT_LE((w - ball.center).norm(), ball.radius);
    g = vec({-50.0 + r.normal(), 30.0 * r.normal()});
  };
  PsgdOptions opt{5000, 0.3, 1e-3, 7};
  const auto out = minimize_projected(ball.center, ball, pushing, opt, rng);
  EXPECT_EQ(calls, opt.steps);
  EXPECT_LE((out.last - ball.center).norm(), ball.radius);
  EXPECT_LE((out.average - ball.center).norm(), ball.radius);
  ASSERT_EQ(out.trace.size(), opt.steps / 7);
  for (const auto& row : out.trace) {
    EXPECT_EQ(row.t % 7, 0u);
    EXPECT_EQ(row.eta, 1.0 / (0.3 * static_cast<double>(row.t)));
    EXPECT_LE(row.dist_to_center, ball.radius);
  }
}

TEST(Psgd, RejectsBadArguments) {
  const auto ball = make_ball(Vector::Zero(2), 1.0);
  Rng rng(6);
  const auto oracle = quadratic(Vector::Zero(2), Vector::Ones(2));
  EXPECT_THROW(minimize_projected(vec({2.0, 0.0}), ball, oracle, PsgdOptions{10, 1.0, 1e-3, 0}, rng), InvalidArgument);
  EXPECT_THROW(minimize_projected(Vector::Zero(2), ball, oracle, PsgdOptions{0, 1.0, 1e-3, 0}, rng), InvalidArgument);
  EXPECT_THROW(minimize_projected(Vector::Zero(2), ball, oracle, PsgdOptions{10, 0.0, 1e-3, 0}, rng), InvalidArgument);
}

TEST(Psgd, SkipsZeroMassStepsWithinBudgetAndAbortsBeyondIt) {
  const auto ball = make_ball(Vector::Zero(1), 5.0);
  const Vector a = vec({1.0});
  std::size_t t = 0;
  const GradientOracle sometimes = [&](const Vector& w, Rng&, Vector& g) {
    if (++t % 2000 == 0) throw ZeroMassError("no mass");
    g = w - a;
  };
  Rng rng(7);
  const auto ok = minimize_projected(Vector::Zero(1), ball, sometimes, PsgdOptions{10000, 1.0, 1e-3, 0}, rng);
  EXPECT_EQ(ok.skipped, 5u);
  EXPECT_LE((ok.average - a).norm(), 2e-2);

  t = 0;
  const GradientOracle often = [&](const Vector& w, Rng&, Vector& g) {
    if (++t % 500 == 0) throw ZeroMassError("no mass");
    g = w - a;
  };
  EXPECT_THROW(minimize_projected(Vector::Zero(1), ball, often, PsgdOptions{10000, 1.0, 1e-3, 0}, rng), Error);

  const GradientOracle other = [](const Vector&, Rng&, Vector&) { throw TruncationTooSevere("cap"); };
  EXPECT_THROW(minimize_projected(Vector::Zero(1), ball, other, PsgdOptions{10, 1.0, 1e-3, 0}, rng),
               TruncationTooSevere);
}

TEST(Psgd, FixedSeedGivesIdenticalTrajectory) {
  const auto model = fixtures::desk_model();
  const auto ball = make_ball(model.w_star(), 1.0);
  PsgdOptions opt{20000, 0.5, 1e-3, 100};
  auto run = [&](std::uint64_t seed) {
    ModelSource source(model);
    Rng rng(seed);
    return run_psgd_detailed(project(ball, Vector::Zero(5)), ball, model.survival_set(), opt, 0.1, source, rng);
  };
  const auto a = run(11), b = run(11), c = run(12);
  EXPECT_EQ(a.average, b.average);
  EXPECT_EQ(a.last, b.last);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].grad_norm, b.trace[i].grad_norm);
  EXPECT_NE(a.average, c.average);
}

TEST(Psgd, DeskModelWithLearnedSetRecoversTruthOnMostSeeds) {
  const auto model = fixtures::desk_model();
  int good = 0;
  const int seeds = 30;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(derive_seed(static_cast<std::uint64_t>(seed), "psgd-desk"));
    const auto data = sample_truncated(model, 100000, rng);
    const Vector w_hat = ols_estimate(data);
    const auto s = learn_survival_set(data, w_hat, 2, 0.02, default_window(data), rng);
    const auto stats = design_stats(data);
    const auto ball = make_ball(w_hat, default_ball_radius(stats.sigma_hat, stats.beta_hat, stats.min_eigenvalue,
                                                           model.alpha_hat()));
    Dataset sub;
    sub.xs = data.xs.topRows(20000);
    sub.ys = data.ys.head(20000);
    const auto kappa = estimate_kappa(w_hat, ball, s, sub, 20, rng);
    ModelSource source(model);
    const Vector out = run_psgd(project(ball, w_hat), ball, s, 200000, kappa.kappa, 0.1, source, rng);
    if ((out - model.w_star()).norm() <= 0.15) ++good;
  }
  EXPECT_GE(3 * good, 2 * seeds) << good << " of " << seeds;
}

TEST(Aggregate, SingleRunIsReturned) {
  const auto r = aggregate({vec({1.5, -2.0})}, 0.1);
  EXPECT_EQ(r.estimate, vec({1.5, -2.0}));
  EXPECT_EQ(r.index, 0u);
  EXPECT_FALSE(r.low_confidence);
}

TEST(Aggregate, MajorityClusterWins) {
  const std::vector<Vector> runs{vec({100.0}), vec({0.0}), vec({0.0}), vec({0.0}), vec({0.0})};
  const auto r = aggregate(runs, 1.0);
  EXPECT_EQ(r.estimate, vec({0.0}));
  EXPECT_EQ(r.index, 1u);
  EXPECT_FALSE(r.low_confidence);
}

TEST(Aggregate, FallsBackWithLowConfidenceFlag) {
  const std::vector<Vector> runs{vec({0.0}), vec({10.0}), vec({20.0}), vec({21.0}), vec({22.0})};
  const auto r = aggregate(runs, 1.0);
  EXPECT_TRUE(r.low_confidence);
  // ceil(3K/5) = 3 counts the run itself; 21 has both others within 1.
  EXPECT_EQ(r.estimate, vec({21.0}));
  EXPECT_EQ(r.index, 3u);
  EXPECT_THROW(aggregate({}, 1.0), InvalidArgument);
  EXPECT_THROW(aggregate(runs, 0.0), InvalidArgument);
}

TEST(Aggregate, OutputNearAnyDenseClusterCentre) {
  Rng rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + rng.below(15);
    const int d = 1 + static_cast<int>(rng.below(4));
    const double zeta = 0.01 + rng.uniform() * 2;
    const std::size_t m = (3 * k + 4) / 5;
    Vector p(d);
    for (int i = 0; i < d; ++i) p[i] = 10 * rng.normal();
    std::vector<Vector> runs;
    for (std::size_t i = 0; i < k; ++i) {
      Vector v(d);
      for (int j = 0; j < d; ++j) v[j] = rng.normal();
      if (i < m) {
        v *= zeta / 3 * std::pow(rng.uniform(), 1.0 / d) / v.norm();
        runs.push_back(p + v);
      } else {
        // Outliers either scattered far away or just outside the cluster.
        const double scale = rng.uniform() < 0.5 ? 50.0 : zeta * (0.4 + rng.uniform()) / v.norm();
        runs.push_back(p + scale * v);
      }
    }
    for (std::size_t i = runs.size(); i > 1; --i) std::swap(runs[i - 1], runs[rng.below(i)]);
    const auto r = aggregate(runs, zeta);
    EXPECT_FALSE(r.low_confidence) << trial;
    EXPECT_LE((r.estimate - p).norm(), zeta) << trial;
  }
}

TEST(EstimateKappa, FullLineIsSmallestSecondMomentEigenvalue) {
  Rng rng(9);
  const auto data = sample_truncated(fixtures::desk_model(), 5000, rng);
  const Matrix m = data.xs.transpose() * data.xs / static_cast<double>(data.size());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const auto ball = make_ball(Vector::Zero(5), 3.0);
  const auto k = estimate_kappa(Vector::Zero(5), ball, IntervalUnion::real_line(), data, 10, rng);
  EXPECT_NEAR(k.kappa, eig.eigenvalues().minCoeff(), 1e-10);
  EXPECT_FALSE(k.floored);
}

TEST(EstimateKappa, PositiveOnDeskModelWithLearnedSet) {
  const auto model = fixtures::desk_model();
  Rng rng(10);
  const auto data = sample_truncated(model, 100000, rng);
  const Vector w_hat = ols_estimate(data);
  const auto s = learn_survival_set(data, w_hat, 2, 0.05, default_window(data), rng);
  const auto ball = make_ball(w_hat, 1.0);
  Dataset sub;
  sub.xs = data.xs.topRows(20000);
  sub.ys = data.ys.head(20000);
  const auto k = estimate_kappa(w_hat, ball, s, sub, 20, rng);
  EXPECT_GT(k.raw_min, kKappaFloor);
  EXPECT_EQ(k.kappa, k.raw_min);
}

TEST(EstimateKappa, FloorEngagesWhenSetIsFarFromEveryMean) {
  Rng rng(11);
  Dataset data;
  data.xs.resize(200, 2);
  for (Eigen::Index i = 0; i < data.xs.size(); ++i) data.xs.data()[i] = rng.normal();
  data.ys = Vector::Constant(200, 5000.5);
  const auto k = estimate_kappa(Vector::Zero(2), make_ball(Vector::Zero(2), 1.0),
                                IntervalUnion::single(5000.0, 5001.0), data, 5, rng);
  EXPECT_TRUE(k.floored);
  EXPECT_EQ(k.kappa, kKappaFloor);
  EXPECT_LT(k.raw_min, kKappaFloor);
  EXPECT_THROW(estimate_kappa(Vector::Zero(2), make_ball(Vector::Zero(2), 1.0), IntervalUnion::real_line(), data, 0,
                              rng),
               InvalidArgument);
}

TEST(UniformInBall, DrawsStayInsideAndFillTheVolume) {
  const auto ball = make_ball(vec({1.0, 2.0, 3.0}), 0.5);
  Rng rng(12);
  int inner = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Vector v = uniform_in_ball(ball, rng);
    const double r = (v - ball.center).norm();
    ASSERT_LE(r, ball.radius);
    if (r <= ball.radius / 2) ++inner;
  }
  // Volume fraction of the half-radius ball in 3-d is 1/8.
  EXPECT_NEAR(inner / static_cast<double>(n), 0.125, 4 * std::sqrt(0.125 * 0.875 / n));
}
