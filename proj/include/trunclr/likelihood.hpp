#pragma once

#include <cstddef>
#include <cstdint>

#include "trunclr/interval_union.hpp"
#include "trunclr/synthetic_model.hpp"

namespace trunclr {

/// One biased stochastic gradient of the perturbed negative log-likelihood.
struct GradSample {
  Vector g;
  std::uint64_t attempts;  // observed pairs consumed from the stream
};

/// Draws two independent observed pairs (x^, y^), (x~, y~) from the stream,
/// samples z~ ~ N(<w, x~>, 1, S) and returns z~ x~ - y^ x^. Reuses its buffers
/// across calls; one instance per stream.
class GradientSampler {
 public:
  GradientSampler(IntervalUnion s, double zeta, SampleSource& source);

  /// Writes the gradient sample into g (resized as needed).
  void sample(const Vector& w, Rng& rng, Vector& g);

  const IntervalUnion& set() const { return set_; }

 private:
  IntervalUnion set_;
  double zeta_;
  SampleSource* source_;
  Vector x_hat_;
  Vector x_tilde_;
};

GradSample gradient_sample(const Vector& w, const IntervalUnion& s, double zeta, SampleSource& source,
                           Rng& rng);

/// Plug-in evaluation of the perturbed NLL over the samples whose response
/// lies in S. Observed responses are already truncated to the true survival
/// set, so filtering to S realises the S-and-S* truncation of the population
/// objective. The additive constant log(2 pi)/2 is dropped.
struct LikelihoodEval {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
  std::size_t used = 0;      // samples with y in S
  std::size_t excluded = 0;  // samples with y outside S
};

enum LikelihoodParts : unsigned { kValue = 1u, kGradient = 2u, kHessian = 4u, kAll = 7u };

/// Throws NoSurvivingSamples when no response lies in S.
LikelihoodEval evaluate_likelihood(const Vector& w, const IntervalUnion& s, const Dataset& data,
                                   unsigned parts = kAll);

/// Mean over surviving samples of (y - <w,x>)^2 / 2 + log N(S; <w,x>, 1).
double perturbed_nll(const Vector& w, const IntervalUnion& s, const Dataset& data);

/// Mean over surviving samples of (E[z | <w,x>, S] - y) x.
Vector population_gradient(const Vector& w, const IntervalUnion& s, const Dataset& data);

/// Mean over surviving samples of Var[z | <w,x>, S] x x^T.
Matrix population_hessian(const Vector& w, const IntervalUnion& s, const Dataset& data);

}  // namespace trunclr
