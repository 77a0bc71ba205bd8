#include "trunclr/warm_start.hpp"

#include <cmath>
#include <sstream>

#include "trunclr/errors.hpp"

namespace trunclr {

namespace {

constexpr double kSingularThreshold = 1e-10;

struct NormalEquations {
  Matrix lhs;
  Vector rhs;
};

NormalEquations normal_equations(const Dataset& data) {
  data.validate();
  const double n = static_cast<double>(data.size());
  NormalEquations ne;
  ne.lhs = Matrix(data.xs.transpose() * data.xs) / n;
  ne.rhs = Vector(data.xs.transpose() * data.ys) / n;
  return ne;
}

}  // namespace

ProjectionBall make_ball(Vector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("projection ball radius must be positive and finite");
  }
  if (!center.allFinite()) throw InvalidArgument("projection ball center must be finite");
  return {std::move(center), radius};
}

Vector project(const ProjectionBall& ball, const Vector& w) {
  const Vector diff = w - ball.center;
  const double dist = diff.norm();
  if (dist <= ball.radius) return w;
  double scale = ball.radius / dist;
  Vector out = ball.center + scale * diff;
  while ((out - ball.center).norm() > ball.radius) {
    scale = std::nextafter(scale, 0.0);
    out = ball.center + scale * diff;
  }
  return out;
}

Vector ols_estimate(const Dataset& data) {
  if (data.size() < static_cast<std::size_t>(data.dim())) {
    throw InsufficientSamples("least squares needs at least d samples");
  }
  const auto ne = normal_equations(data);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ne.lhs, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  const double max_eig = eig.eigenvalues().maxCoeff();
  if (!(min_eig > kSingularThreshold * std::max(max_eig, 1e-300))) {
    std::ostringstream msg;
    msg << "singular design: minimum eigenvalue of the second-moment matrix is " << min_eig
        << " (maximum " << max_eig << ")";
    throw SingularDesign(msg.str(), min_eig);
  }
  const Eigen::LDLT<Matrix> ldlt(ne.lhs);
  Vector w = ldlt.solve(ne.rhs);
  // One step of iterative refinement keeps the residual at solver precision.
  w += ldlt.solve(Vector(ne.rhs - ne.lhs * w));
  return w;
}

Vector ols_min_norm(const Dataset& data) {
  const auto ne = normal_equations(data);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ne.lhs);
  cod.setThreshold(1e-8);
  return cod.solve(ne.rhs);
}

DesignStats design_stats(const Dataset& data) {
  data.validate();
  const double n = static_cast<double>(data.size());
  DesignStats st;
  st.second_moment = Matrix(data.xs.transpose() * data.xs) / n;
  st.mean = Vector(data.xs.colwise().sum().transpose()) / n;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(st.second_moment, Eigen::EigenvaluesOnly);
  st.min_eigenvalue = eig.eigenvalues().minCoeff();
  st.max_eigenvalue = eig.eigenvalues().maxCoeff();
  const Matrix cov = st.second_moment - st.mean * st.mean.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> cov_eig(cov, Eigen::EigenvaluesOnly);
  st.sigma_hat = std::sqrt(std::max(0.0, cov_eig.eigenvalues().maxCoeff()));
  st.beta_hat = st.mean.norm();
  return st;
}

double default_ball_radius(double sigma, double beta, double rho_sq, double alpha, double c_ball) {
  if (!(rho_sq > 0.0) || !(alpha > 0.0) || !(c_ball > 0.0)) {
    throw InvalidArgument("ball radius needs positive rho^2, alpha and c_ball");
  }
  return c_ball * (sigma + beta) / (rho_sq * alpha);
}

}  // namespace trunclr
