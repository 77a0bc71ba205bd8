#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "trunclr/interval_union.hpp"
#include "trunclr/rng.hpp"

namespace trunclr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base distribution of the covariates, before truncation.
struct FeatureDistSpec {
  enum class Kind { Gaussian, UniformBall, SimplexVertices };

  Kind kind = Kind::Gaussian;
  int dimension = 0;
  Vector mean;        // Gaussian only
  Matrix covariance;  // Gaussian only
  double radius = 0;  // UniformBall only

  static FeatureDistSpec gaussian(Vector mean, Matrix covariance);
  static FeatureDistSpec uniform_ball(int dimension, double radius);
  /// Uniform over the standard basis vectors e_1, ..., e_d.
  static FeatureDistSpec simplex_vertices(int dimension);

  /// Mean of the base distribution.
  Vector expected_value() const;
};

/// Observed samples: row i of xs pairs with ys[i].
struct Dataset {
  RowMatrix xs;
  Vector ys;

  std::size_t size() const { return static_cast<std::size_t>(ys.size()); }
  int dim() const { return static_cast<int>(xs.cols()); }

  /// Throws InvalidArgument unless n >= 1, shapes agree and entries are finite.
  void validate() const;
};

/// Truncated linear regression model with unit noise: x ~ D, y = <w*, x> + N(0, 1),
/// and the pair is kept only when y lies in the survival set.
class TruncatedModel {
 public:
  static constexpr std::size_t kDefaultRejectionCap = 1'000'000;
  static constexpr std::size_t kAlphaCheckDraws = 10'000;
  static constexpr double kMinAlpha = 1e-4;

  /// Validates shapes, rejects an empty survival set, and checks by Monte
  /// Carlo (fixed internal seed) that the survival mass exceeds 1e-4.
  static TruncatedModel create(Vector w_star, IntervalUnion survival_set, FeatureDistSpec features,
                               std::size_t rejection_cap = kDefaultRejectionCap);

  const Vector& w_star() const { return w_star_; }
  const IntervalUnion& survival_set() const { return survival_set_; }
  const FeatureDistSpec& features() const { return features_; }
  int dim() const { return features_.dimension; }
  std::size_t rejection_cap() const { return rejection_cap_; }
  /// Survival mass estimated at construction.
  double alpha_hat() const { return alpha_hat_; }

  /// Draws x from the base distribution into `x` (resized as needed).
  void draw_features(Rng& rng, Vector& x) const;

  /// One accepted sample; returns y and writes x. Adds the number of draws
  /// consumed to `attempts` when given.
  double draw(Rng& rng, Vector& x, std::uint64_t* attempts = nullptr) const;

 private:
  TruncatedModel() = default;

  Vector w_star_;
  IntervalUnion survival_set_;
  FeatureDistSpec features_;
  Matrix factor_;  // covariance square root for Gaussian features
  std::size_t rejection_cap_ = kDefaultRejectionCap;
  double alpha_hat_ = 0.0;
};

struct SampleStats {
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
};

Dataset sample_truncated(const TruncatedModel& model, std::size_t n, Rng& rng,
                         SampleStats* stats = nullptr);

/// p(x, w; S): mass of N(<w, x>, 1) on S.
double survival_probability(const Vector& x, const Vector& w, const IntervalUnion& s);

struct AlphaEstimate {
  double alpha;
  double std_error;
};

/// Monte Carlo estimate of E_{x~D}[p(x, w*, S*)] from m base draws.
AlphaEstimate estimate_alpha(const TruncatedModel& model, std::size_t m, Rng& rng);

/// Source of i.i.d. observed (x, y) pairs.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual int dim() const = 0;
  /// Writes x (already sized to dim()) and returns y.
  virtual double draw(Rng& rng, Vector& x) = 0;
};

/// Fresh draws from the generative model.
class ModelSource final : public SampleSource {
 public:
  explicit ModelSource(const TruncatedModel& model) : model_(&model) {}
  int dim() const override { return model_->dim(); }
  double draw(Rng& rng, Vector& x) override { return model_->draw(rng, x); }

 private:
  const TruncatedModel* model_;
};

/// Uniform draws with replacement from a fixed dataset (its empirical law).
class DatasetSource final : public SampleSource {
 public:
  explicit DatasetSource(const Dataset& data) : data_(&data) {}
  int dim() const override { return data_->dim(); }
  double draw(Rng& rng, Vector& x) override {
    const auto i = static_cast<Eigen::Index>(rng.below(data_->size()));
    x = data_->xs.row(i).transpose();
    return data_->ys[i];
  }

 private:
  const Dataset* data_;
};

}  // namespace trunclr
