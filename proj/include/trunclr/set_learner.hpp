#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trunclr/interval_union.hpp"
#include "trunclr/synthetic_model.hpp"

namespace trunclr {

/// Output of the positive-only interval learner: the hull of the positives
/// with some open gaps removed. A positive left isolated between two removed
/// gaps survives as a closed singleton; singletons carry no Lebesgue measure
/// and are dropped from `set`, which is what downstream stages consume.
struct LearnedIntervals {
  IntervalUnion set;
  std::vector<double> singletons;
  std::vector<std::size_t> discarded_gaps;  // indices into the sorted positives

  bool contains(double y) const;
  /// Number of connected components including singletons.
  std::size_t components() const { return set.size() + singletons.size(); }
};

/// r = ceil((k - 1) / eps).
std::size_t discard_budget(int k, double eps);

/// Counts of unlabeled points strictly inside each gap (y(i), y(i+1)) of the
/// sorted positives.
std::vector<std::size_t> gap_counts(std::span<const double> sorted_positives,
                                    std::span<const double> unlabeled);

/// Sorts the positives and removes the `budget` gaps holding the most
/// unlabeled points. Ties prefer the wider gap, then the lower index; gaps of
/// zero width are never removed.
LearnedIntervals greedy_discard(std::span<const double> positives, std::span<const double> unlabeled,
                                std::size_t budget);

/// Learns a union of at most k intervals from positives and an equally sized
/// sample of a smooth reference distribution. Throws InsufficientSamples when
/// the discard budget is not below n - 1.
LearnedIntervals learn_intervals(std::span<const double> positives, std::span<const double> unlabeled,
                                 int k, double eps);

/// Exhaustive pessimistic ERM over unions of k intervals with endpoints among
/// the positives: tries every choice of k - 1 removed gaps. Test-scale only;
/// rejects problems with more than 1e7 candidate choices.
LearnedIntervals pessimistic_erm_oracle(std::span<const double> positives,
                                        std::span<const double> unlabeled, int k);

/// Number of unlabeled points covered by a hypothesis.
std::size_t covered_count(const LearnedIntervals& h, std::span<const double> unlabeled);

/// z_i = <w_hat, x_i> + N(0, 1) for each row of xs.
std::vector<double> make_smooth_samples(const RowMatrix& xs, const Vector& w_hat, Rng& rng);

/// Default clipping window: 1.5 times the largest observed |y|.
double default_window(const Dataset& data);

struct SetLearningResult {
  LearnedIntervals raw;
  IntervalUnion set;  // raw.set clipped to [-window, window]
  double window;
};

/// Phase I: learn from the observed responses against smooth samples drawn
/// around w_hat, then clip to the window. Throws DegenerateWindow when the
/// clipped set is empty.
SetLearningResult learn_survival_set_detailed(const Dataset& data, const Vector& w_hat, int k,
                                              double eps, double window, Rng& rng);

inline IntervalUnion learn_survival_set(const Dataset& data, const Vector& w_hat, int k, double eps,
                                        double window, Rng& rng) {
  return learn_survival_set_detailed(data, w_hat, k, eps, window, rng).set;
}

/// Accuracy implied by n samples under the sample-size schedule
/// n ~ (k + log(1/delta)) / eps^2 with unit smoothness constants.
double implied_set_accuracy(std::size_t n, int k, double delta);

}  // namespace trunclr
