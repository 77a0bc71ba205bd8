#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trunclr/synthetic_model.hpp"

namespace trunclr::fixtures {

/// d = 5, x ~ N(0, I), ||w*|| = 2, S* = (-inf, -2] u [1, 2.8]; alpha ~ 0.40.
TruncatedModel desk_model();
/// d = 5, x ~ N(0, I), same w* as desk_model, S* = [0, inf); alpha ~ 0.5.
TruncatedModel desk_half_line();
/// d = 1, x ~ N(0, 1), w* = 1, S* = [0, inf).
TruncatedModel half_line_1d();
/// d = 1, x ~ N(0.5, 0.25), w* = 1, S* = [0, inf). Asymmetric features make
/// least squares on the truncated data biased.
TruncatedModel half_line_shifted_1d();
/// d-dimensional standard Gaussian features, w* = (1, ..., 1) / sqrt(d), no truncation.
TruncatedModel untruncated(int d);

/// Features uniform over the basis vectors e_1..e_d, S* = [-1, 1], and
/// w = +B e_1 versus w = -B e_1. Observed data from the two models differ only
/// through the feature e_1, whose observed frequency is at most
/// exp(-(B - 1)^2 / 2) / (alpha d).
std::pair<TruncatedModel, TruncatedModel> appendix_e_pair(double b, int d);

/// Upper bound on the observed frequency of e_1 in either appendix_e_pair model.
double appendix_e_leak_bound(double b, int d, double alpha);

struct GreedyInstance {
  std::vector<double> positives;
  std::vector<double> unlabeled;
  int k;
  double eps;
  std::size_t expected_discard_count;
};

/// Two-interval walkthrough with k = 2, eps = 0.2: the learner removes five
/// gaps and returns six intervals.
GreedyInstance figure2_instance();

/// Names accepted by model_fixture.
std::vector<std::string> model_fixture_names();
/// Throws ConfigError for unknown names. "appendix_e" is the +B model with
/// B = 10, d = 3 and "appendix_e_neg" its mirror.
TruncatedModel model_fixture(const std::string& name);

/// FNV-1a hash of the dataset's CSV rendering.
std::uint64_t dataset_hash(const Dataset& data);

}  // namespace trunclr::fixtures
