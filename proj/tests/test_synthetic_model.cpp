#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "support/stats.hpp"
#include "trunclr/errors.hpp"
#include "trunclr/fixtures.hpp"
#include "trunclr/synthetic_model.hpp"

using namespace trunclr;
namespace tst = trunclr::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FeatureDistSpec std_gaussian(int d) { return FeatureDistSpec::gaussian(Vector::Zero(d), Matrix::Identity(d, d)); }

}  // namespace

TEST(SampleTruncated, NoTruncationAcceptsEverythingAndResidualsAreNormal) {
  const auto model = fixtures::untruncated(4);
  Rng rng(1);
  SampleStats stats;
  const auto data = sample_truncated(model, 50000, rng, &stats);
  EXPECT_EQ(stats.attempts, stats.accepted);
  std::vector<double> residuals(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    residuals[i] = data.ys[r] - data.xs.row(r).dot(model.w_star());
  }
  EXPECT_GT(tst::ks_test(residuals, tst::std_normal_cdf), 0.01);
}

TEST(SampleTruncated, AppendixEFeatureOneNeverSurvives) {
  const auto model = fixtures::appendix_e_pair(10.0, 3).first;
  Rng rng(2);
  const auto data = sample_truncated(model, 100000, rng);
  EXPECT_EQ((data.xs.col(0).array() != 0.0).count(), 0);
  EXPECT_LT(fixtures::appendix_e_leak_bound(10.0, 3, model.alpha_hat()), 1e-17);
}

TEST(SampleTruncated, HalfLineAtZeroHasHalfNormalMean) {
  const auto model = TruncatedModel::create(Vector::Zero(1), IntervalUnion::normalize({{0, kInf}}), std_gaussian(1));
  Rng rng(3);
  const auto data = sample_truncated(model, 100000, rng);
  EXPECT_GE(data.ys.minCoeff(), 0.0);
  const double se = std::sqrt((1 - 2 / M_PI) / 100000);
  EXPECT_NEAR(data.ys.mean(), std::sqrt(2 / M_PI), 4 * se);
}

TEST(SampleTruncated, ConditionalLawIsTruncatedGaussian) {
  Vector w(3);
  w << 0.5, -1.0, 2.0;
  const auto s = IntervalUnion::normalize({{-1, 0.5}, {1, 3}});
  const auto model = TruncatedModel::create(w, s, FeatureDistSpec::simplex_vertices(3));
  Rng rng(4);
  const auto data = sample_truncated(model, 60000, rng);
  for (int v = 0; v < 3; ++v) {
    std::vector<double> ys;
    for (Eigen::Index i = 0; i < data.xs.rows(); ++i) {
      if (data.xs(i, v) == 1.0) ys.push_back(data.ys[i]);
    }
    const double mu = w[v], mass = gaussian_mass(s, mu);
    auto cdf = [&](double y) { return gaussian_mass(intersect(s, IntervalUnion::normalize({{-kInf, y}})), mu) / mass; };
    EXPECT_GT(tst::ks_test(ys, cdf), 0.01) << "vertex " << v;
  }
}

TEST(SampleTruncated, RejectionRateMatchesAlpha) {
  const auto model = fixtures::desk_model();
  Rng rng(5);
  SampleStats stats;
  sample_truncated(model, 40000, rng, &stats);
  const double rate = static_cast<double>(stats.accepted) / static_cast<double>(stats.attempts);
  Rng rng2(6);
  const auto a = estimate_alpha(model, 100000, rng2);
  const double se_rate = std::sqrt(rate * (1 - rate) / static_cast<double>(stats.attempts));
  EXPECT_NEAR(rate, a.alpha, 3 * std::hypot(se_rate, a.std_error));
}

TEST(SampleTruncated, DeterministicGivenSeed) {
  const auto model = fixtures::desk_model();
  Rng a(7), b(7);
  const auto da = sample_truncated(model, 2000, a);
  const auto db = sample_truncated(model, 2000, b);
  EXPECT_TRUE(da.xs == db.xs);
  EXPECT_TRUE(da.ys == db.ys);
}

TEST(SampleTruncated, RejectionCapRaises) {
  const auto model =
      TruncatedModel::create(Vector::Zero(1), IntervalUnion::normalize({{3, kInf}}), std_gaussian(1), 5);
  Rng rng(8);
  EXPECT_THROW(sample_truncated(model, 1000, rng), TruncationTooSevere);
}

TEST(TruncatedModelCreate, ValidatesInputs) {
  EXPECT_THROW(TruncatedModel::create(Vector::Zero(2), IntervalUnion{}, std_gaussian(2)), InvalidArgument);
  EXPECT_THROW(TruncatedModel::create(Vector::Zero(3), IntervalUnion::real_line(), std_gaussian(2)), InvalidArgument);
  EXPECT_THROW(TruncatedModel::create(Vector::Zero(1), IntervalUnion::single(8, 9), std_gaussian(1)), InvalidArgument);
  Matrix bad(2, 2);
  bad << 1, 0, 0, -0.5;
  try {
    TruncatedModel::create(Vector::Zero(2), IntervalUnion::real_line(), FeatureDistSpec::gaussian(Vector::Zero(2), bad));
    FAIL() << "indefinite covariance accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("-0.5"), std::string::npos) << e.what();
  }
}

TEST(TruncatedModelCreate, AcceptsSingularCovariance) {
  Matrix cov = Matrix::Zero(2, 2);
  cov(0, 0) = 1.0;
  const auto model = TruncatedModel::create(Vector::Ones(2), IntervalUnion::real_line(),
                                            FeatureDistSpec::gaussian(Vector::Zero(2), cov));
  Rng rng(9);
  Vector x;
  model.draw_features(rng, x);
  EXPECT_EQ(x[1], 0.0);
}

TEST(SurvivalProbability, Examples) {
  const Vector x = Vector::Ones(3);
  EXPECT_NEAR(survival_probability(x, Vector::Zero(3), IntervalUnion::single(-1, 1)), 0.6827, 1e-3);
  EXPECT_EQ(survival_probability(x, Vector::Constant(3, 4.0), IntervalUnion::real_line()), 1.0);
  Vector e1 = Vector::Zero(2), w = Vector::Zero(2);
  e1[0] = 1.0;
  w[0] = 2.0;
  EXPECT_NEAR(survival_probability(e1, w, IntervalUnion::normalize({{2, kInf}})), 0.5, 1e-15);
  EXPECT_THROW(survival_probability(Vector::Ones(2), Vector::Ones(3), IntervalUnion::real_line()), InvalidArgument);
}

TEST(EstimateAlpha, FullLineIsExactlyOne) {
  Rng rng(10);
  const auto a = estimate_alpha(fixtures::untruncated(3), 1000, rng);
  EXPECT_EQ(a.alpha, 1.0);
  EXPECT_EQ(a.std_error, 0.0);
}

TEST(EstimateAlpha, AppendixEIsAtLeastHalfBeta) {
  const double beta = gaussian_mass(IntervalUnion::single(-1, 1), 0.0);
  for (int d : {2, 3, 6}) {
    const auto model = fixtures::appendix_e_pair(10.0, d).first;
    double exact = 0.0;
    for (int v = 0; v < d; ++v) exact += survival_probability(Vector::Unit(d, v), model.w_star(), model.survival_set()) / d;
    EXPECT_GE(exact, beta / 2) << d;
    Rng rng(11);
    const auto a = estimate_alpha(model, 20000, rng);
    EXPECT_NEAR(a.alpha, exact, 4 * a.std_error) << d;
  }
}

TEST(EstimateAlpha, SymmetricHalfLine) {
  Rng rng(12);
  const auto a = estimate_alpha(fixtures::half_line_1d(), 100000, rng);
  EXPECT_NEAR(a.alpha, 0.5, 3 * a.std_error);
  EXPECT_THROW(estimate_alpha(fixtures::half_line_1d(), 0, rng), InvalidArgument);
}

TEST(Dataset, ValidateRejectsBadShapes) {
  Dataset d;
  EXPECT_THROW(d.validate(), InvalidArgument);
  d.xs = RowMatrix::Zero(3, 2);
  d.ys = Vector::Zero(2);
  EXPECT_THROW(d.validate(), InvalidArgument);
  d.ys = Vector::Zero(3);
  d.validate();
  d.ys[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(d.validate(), InvalidArgument);
}
