#include "trunclr/synthetic_model.hpp"

#include <cmath>
#include <sstream>

#include "trunclr/errors.hpp"

namespace trunclr {

FeatureDistSpec FeatureDistSpec::gaussian(Vector mean, Matrix covariance) {
  FeatureDistSpec spec;
  spec.kind = Kind::Gaussian;
  spec.dimension = static_cast<int>(mean.size());
  spec.mean = std::move(mean);
  spec.covariance = std::move(covariance);
  return spec;
}

FeatureDistSpec FeatureDistSpec::uniform_ball(int dimension, double radius) {
  FeatureDistSpec spec;
  spec.kind = Kind::UniformBall;
  spec.dimension = dimension;
  spec.radius = radius;
  return spec;
}

FeatureDistSpec FeatureDistSpec::simplex_vertices(int dimension) {
  FeatureDistSpec spec;
  spec.kind = Kind::SimplexVertices;
  spec.dimension = dimension;
  return spec;
}

Vector FeatureDistSpec::expected_value() const {
  switch (kind) {
    case Kind::Gaussian:
      return mean;
    case Kind::UniformBall:
      return Vector::Zero(dimension);
    case Kind::SimplexVertices:
      return Vector::Constant(dimension, 1.0 / dimension);
  }
  return Vector::Zero(dimension);
}

void Dataset::validate() const {
  if (ys.size() < 1) throw InvalidArgument("dataset is empty");
  if (xs.rows() != ys.size()) throw InvalidArgument("dataset xs/ys length mismatch");
  if (xs.cols() < 1) throw InvalidArgument("dataset has zero feature columns");
  if (!xs.allFinite() || !ys.allFinite()) throw InvalidArgument("dataset has non-finite entries");
}

namespace {

Matrix covariance_factor(const Matrix& cov) {
  if (cov.rows() != cov.cols()) throw InvalidArgument("covariance must be square");
  if (!cov.isApprox(cov.transpose(), 1e-12)) throw InvalidArgument("covariance must be symmetric");
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Semidefinite or indefinite: fall back to the symmetric square root.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const double min_eig = eig.eigenvalues().minCoeff();
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (min_eig < -1e-12 * scale) {
    std::ostringstream msg;
    msg << "covariance is not positive semidefinite (minimum eigenvalue " << min_eig << ")";
    throw InvalidArgument(msg.str());
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

TruncatedModel TruncatedModel::create(Vector w_star, IntervalUnion survival_set,
                                      FeatureDistSpec features, std::size_t rejection_cap) {
  const int d = features.dimension;
  if (d < 1) throw InvalidArgument("feature dimension must be positive");
  if (w_star.size() != d) throw InvalidArgument("w_star dimension does not match features");
  if (!w_star.allFinite()) throw InvalidArgument("w_star must be finite");
  if (survival_set.empty()) throw InvalidArgument("survival set must be nonempty");
  if (rejection_cap < 1) throw InvalidArgument("rejection cap must be positive");

  TruncatedModel model;
  switch (features.kind) {
    case FeatureDistSpec::Kind::Gaussian:
      if (features.mean.size() != d || features.covariance.rows() != d) {
        throw InvalidArgument("gaussian feature mean/covariance shape mismatch");
      }
      model.factor_ = covariance_factor(features.covariance);
      break;
    case FeatureDistSpec::Kind::UniformBall:
      if (!(features.radius > 0.0)) throw InvalidArgument("uniform_ball radius must be positive");
      break;
    case FeatureDistSpec::Kind::SimplexVertices:
      break;
  }
  model.w_star_ = std::move(w_star);
  model.survival_set_ = std::move(survival_set);
  model.features_ = std::move(features);
  model.rejection_cap_ = rejection_cap;

  Rng rng(derive_seed(0, "model/alpha-check"));
  const auto est = estimate_alpha(model, kAlphaCheckDraws, rng);
  if (!(est.alpha > kMinAlpha)) {
    std::ostringstream msg;
    msg << "estimated survival mass " << est.alpha << " does not exceed " << kMinAlpha;
    throw InvalidArgument(msg.str());
  }
  model.alpha_hat_ = est.alpha;
  return model;
}

void TruncatedModel::draw_features(Rng& rng, Vector& x) const {
  const int d = features_.dimension;
  x.resize(d);
  switch (features_.kind) {
    case FeatureDistSpec::Kind::Gaussian: {
      Vector z(d);
      for (int i = 0; i < d; ++i) z[i] = rng.normal();
      x.noalias() = features_.mean + factor_ * z;
      break;
    }
    case FeatureDistSpec::Kind::UniformBall: {
      double norm;
      do {
        for (int i = 0; i < d; ++i) x[i] = rng.normal();
        norm = x.norm();
      } while (norm == 0.0);
      x *= features_.radius * std::pow(rng.uniform(), 1.0 / d) / norm;
      break;
    }
    case FeatureDistSpec::Kind::SimplexVertices:
      x.setZero();
      x[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(d)))] = 1.0;
      break;
  }
}

double TruncatedModel::draw(Rng& rng, Vector& x, std::uint64_t* attempts) const {
  for (std::size_t tries = 1; tries <= rejection_cap_; ++tries) {
    draw_features(rng, x);
    const double y = w_star_.dot(x) + rng.normal();
    if (survival_set_.contains(y)) {
      if (attempts) *attempts += tries;
      return y;
    }
  }
  std::ostringstream msg;
  msg << "no accepted sample within " << rejection_cap_ << " draws";
  throw TruncationTooSevere(msg.str());
}

Dataset sample_truncated(const TruncatedModel& model, std::size_t n, Rng& rng, SampleStats* stats) {
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
  Dataset data;
  data.xs.resize(static_cast<Eigen::Index>(n), model.dim());
  data.ys.resize(static_cast<Eigen::Index>(n));
  Vector x(model.dim());
  std::uint64_t attempts = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    data.ys[row] = model.draw(rng, x, &attempts);
    data.xs.row(row) = x.transpose();
  }
  if (stats) {
    stats->attempts += attempts;
    stats->accepted += n;
  }
  return data;
}

double survival_probability(const Vector& x, const Vector& w, const IntervalUnion& s) {
  if (x.size() != w.size()) throw InvalidArgument("survival_probability: dimension mismatch");
  return gaussian_mass(s, w.dot(x));
}

AlphaEstimate estimate_alpha(const TruncatedModel& model, std::size_t m, Rng& rng) {
  if (m < 1) throw InvalidArgument("estimate_alpha needs at least one draw");
  Vector x(model.dim());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    model.draw_features(rng, x);
    const double p = survival_probability(x, model.w_star(), model.survival_set());
    sum += p;
    sum_sq += p * p;
  }
  const double md = static_cast<double>(m);
  const double mean = sum / md;
  const double var = m > 1 ? std::max(0.0, (sum_sq - md * mean * mean) / (md - 1.0)) : 0.0;
  return {mean, std::sqrt(var / md)};
}

}  // namespace trunclr
