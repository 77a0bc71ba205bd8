#pragma once

#include "trunclr/synthetic_model.hpp"

namespace trunclr {

/// Closed Euclidean ball used as the PSGD feasible region.
struct ProjectionBall {
  Vector center;
  double radius;
};

ProjectionBall make_ball(Vector center, double radius);

/// Euclidean projection onto the ball.
Vector project(const ProjectionBall& ball, const Vector& w);

/// Least squares ignoring truncation: (sum x x^T / n)^{-1} (sum y x / n).
/// Throws SingularDesign when the second-moment matrix has a relative
/// minimum eigenvalue at or below 1e-10, and InsufficientSamples when n < d.
Vector ols_estimate(const Dataset& data);

/// Minimum-norm least squares; used only when the design is singular.
Vector ols_min_norm(const Dataset& data);

/// Plug-in summaries of the observed covariates.
struct DesignStats {
  Matrix second_moment;    // sum x x^T / n
  Vector mean;             // sample mean of x
  double min_eigenvalue;   // of second_moment (rho^2 estimate)
  double max_eigenvalue;
  double sigma_hat;        // largest directional standard deviation
  double beta_hat;         // norm of the sample mean
};

DesignStats design_stats(const Dataset& data);

inline constexpr double kDefaultBallConstant = 6.0;

/// c_ball * (sigma + beta) / (rho^2 * alpha).
double default_ball_radius(double sigma, double beta, double rho_sq, double alpha,
                           double c_ball = kDefaultBallConstant);

}  // namespace trunclr
