#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support/stats.hpp"
#include "trunclr/errors.hpp"
#include "trunclr/fixtures.hpp"
#include "trunclr/pipeline.hpp"
#include "trunclr/set_learner.hpp"

using namespace trunclr;
namespace tst = trunclr::testing;

namespace {

std::vector<double> vertex_counts(const Dataset& data) {
  std::vector<double> counts(static_cast<std::size_t>(data.dim()), 0.0);
  for (Eigen::Index i = 0; i < data.xs.rows(); ++i) {
    Eigen::Index j;
    data.xs.row(i).maxCoeff(&j);
    counts[static_cast<std::size_t>(j)] += 1.0;
  }
  return counts;
}

std::vector<double> responses(const Dataset& data) { return {data.ys.data(), data.ys.data() + data.ys.size()}; }

}  // namespace

TEST(AppendixE, PairIsMirroredAlongFirstVertex) {
  const auto [plus, minus] = fixtures::appendix_e_pair(10.0, 3);
  EXPECT_EQ(plus.w_star(), (Vector(3) << 10.0, 0.0, 0.0).finished());
  EXPECT_EQ(minus.w_star(), -plus.w_star());
  EXPECT_EQ(plus.survival_set(), IntervalUnion::single(-1.0, 1.0));
  EXPECT_EQ(minus.survival_set(), plus.survival_set());
  EXPECT_EQ(plus.features().kind, FeatureDistSpec::Kind::SimplexVertices);
}

TEST(AppendixE, FirstVertexNeverObservedInAMillionSamples) {
  const auto model = fixtures::appendix_e_pair(10.0, 3).first;
  Rng rng(1);
  const auto data = sample_truncated(model, 1000000, rng);
  EXPECT_EQ(vertex_counts(data)[0], 0.0);
  EXPECT_LT(1e6 * fixtures::appendix_e_leak_bound(10.0, 3, model.alpha_hat()), 1e-11);
}

TEST(AppendixE, PairedModelsAreIndistinguishable) {
  const auto [plus, minus] = fixtures::appendix_e_pair(10.0, 3);
  Rng rng_a(2), rng_b(3);
  const auto a = sample_truncated(plus, 100000, rng_a);
  const auto b = sample_truncated(minus, 100000, rng_b);
  const auto ca = vertex_counts(a), cb = vertex_counts(b);
  EXPECT_GT(tst::chi_square_two_sample(ca, cb), 0.01);
  EXPECT_GT(tst::ks_two_sample(responses(a), responses(b)), 0.01);
}

TEST(AppendixE, SurvivalMassIsAtLeastHalfTheUntruncatedMass) {
  const double beta = tst::std_normal_cdf(1.0) - tst::std_normal_cdf(-1.0);
  EXPECT_NEAR(beta, 0.6827, 1e-4);
  for (int d = 2; d <= 6; ++d) {
    const auto model = fixtures::appendix_e_pair(10.0, d).first;
    // Exact average over the uniform vertex law.
    const double alpha = ((d - 1) * beta + tst::std_normal_cdf(-9.0) - tst::std_normal_cdf(-11.0)) / d;
    EXPECT_GE(alpha, beta / 2) << d;
    EXPECT_NEAR(model.alpha_hat(), alpha, 0.01) << d;
  }
}

TEST(Figure2, InstanceMatchesItsDescription) {
  const auto g = fixtures::figure2_instance();
  EXPECT_EQ(g.k, 2);
  EXPECT_EQ(g.eps, 0.2);
  EXPECT_EQ(g.expected_discard_count, 5u);
  EXPECT_EQ(discard_budget(g.k, g.eps), 5u);
  const auto learned = learn_intervals(g.positives, g.unlabeled, g.k, g.eps);
  EXPECT_EQ(learned.discarded_gaps.size(), 5u);
  EXPECT_LE(learned.components(), 6u);
  for (double p : g.positives) EXPECT_TRUE(learned.contains(p)) << p;
}

TEST(ModelFixtures, EveryNameBuildsAndUnknownNamesFail) {
  for (const auto& name : fixtures::model_fixture_names()) {
    const auto model = fixtures::model_fixture(name);
    EXPECT_GT(model.alpha_hat(), 0.0) << name;
  }
  EXPECT_THROW(fixtures::model_fixture("nope"), ConfigError);
}

TEST(ModelFixtures, DeskModelShape) {
  const auto model = fixtures::desk_model();
  EXPECT_EQ(model.dim(), 5);
  EXPECT_NEAR(model.w_star().norm(), 2.0, 1e-15);
  EXPECT_EQ(model.survival_set().size(), 2u);
  // ||w*|| = 2 makes <w*, x> + noise ~ N(0, 5); alpha is its mass on S*.
  const double sd = std::sqrt(5.0);
  const double alpha = tst::std_normal_cdf(-2 / sd) + tst::std_normal_cdf(2.8 / sd) - tst::std_normal_cdf(1 / sd);
  EXPECT_NEAR(model.alpha_hat(), alpha, 0.005);
}

TEST(ModelFixtures, GeneratedDataIsHashPinned) {
  RunConfig c;
  c.model = fixtures::desk_model();
  c.n = 1000;
  c.seed = 0;
  const auto a = generate_dataset(c);
  const auto b = generate_dataset(c);
  EXPECT_EQ(fixtures::dataset_hash(a), fixtures::dataset_hash(b));
  EXPECT_EQ(fixtures::dataset_hash(a), 12216422669723592414ull);
  c.seed = 1;
  EXPECT_NE(fixtures::dataset_hash(generate_dataset(c)), fixtures::dataset_hash(a));
}
