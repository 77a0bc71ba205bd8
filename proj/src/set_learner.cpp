#include "trunclr/set_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "trunclr/errors.hpp"

namespace trunclr {

namespace {

constexpr double kMaxOracleChoices = 1e7;

LearnedIntervals assemble(const std::vector<double>& sorted, std::vector<std::size_t> discarded) {
  std::sort(discarded.begin(), discarded.end());
  LearnedIntervals out;
  std::vector<Interval> pieces;
  double start = sorted.front();
  auto close = [&](double end) {
    if (start < end) {
      pieces.push_back({start, end});
    } else {
      out.singletons.push_back(start);
    }
  };
  for (std::size_t gap : discarded) {
    close(sorted[gap]);
    start = sorted[gap + 1];
  }
  close(sorted.back());
  out.set = IntervalUnion::normalize(pieces);
  out.discarded_gaps = std::move(discarded);
  return out;
}

void check_positives(std::span<const double> positives) {
  if (positives.size() < 2) throw InsufficientSamples("need at least two positive samples");
  for (double v : positives) {
    if (!std::isfinite(v)) throw InvalidArgument("positive samples must be finite");
  }
}

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

}  // namespace

bool LearnedIntervals::contains(double y) const {
  return set.contains(y) || std::find(singletons.begin(), singletons.end(), y) != singletons.end();
}

std::size_t discard_budget(int k, double eps) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");
  // The slack absorbs representation error, e.g. 1 / 0.2.
  return static_cast<std::size_t>(std::ceil((k - 1) / eps - 1e-9));
}

std::vector<std::size_t> gap_counts(std::span<const double> sorted_positives,
                                    std::span<const double> unlabeled) {
  const std::size_t n = sorted_positives.size();
  std::vector<std::size_t> counts(n > 0 ? n - 1 : 0, 0);
  for (double u : unlabeled) {
    // last positive <= u
    auto it = std::upper_bound(sorted_positives.begin(), sorted_positives.end(), u);
    if (it == sorted_positives.begin() || it == sorted_positives.end()) continue;
    const auto i = static_cast<std::size_t>(std::distance(sorted_positives.begin(), it)) - 1;
    if (sorted_positives[i] < u) ++counts[i];
  }
  return counts;
}

LearnedIntervals greedy_discard(std::span<const double> positives, std::span<const double> unlabeled,
                                std::size_t budget) {
  check_positives(positives);
  std::vector<double> sorted(positives.begin(), positives.end());
  std::stable_sort(sorted.begin(), sorted.end());
  const auto counts = gap_counts(sorted, unlabeled);

  std::vector<std::size_t> order;
  order.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (sorted[i + 1] > sorted[i]) order.push_back(i);
  }
  const std::size_t take = std::min(budget, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    const double wa = sorted[a + 1] - sorted[a];
    const double wb = sorted[b + 1] - sorted[b];
    if (wa != wb) return wa > wb;
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    better);
  order.resize(take);
  return assemble(sorted, std::move(order));
}

LearnedIntervals learn_intervals(std::span<const double> positives, std::span<const double> unlabeled,
                                 int k, double eps) {
  if (positives.size() != unlabeled.size()) {
    throw InvalidArgument("learn_intervals needs equally many positive and unlabeled samples");
  }
  check_positives(positives);
  const std::size_t r = discard_budget(k, eps);
  if (r >= positives.size() - 1) {
    std::ostringstream msg;
    msg << "discard budget " << r << " is not below n - 1 = " << positives.size() - 1;
    throw InsufficientSamples(msg.str());
  }
  return greedy_discard(positives, unlabeled, r);
}

LearnedIntervals pessimistic_erm_oracle(std::span<const double> positives,
                                        std::span<const double> unlabeled, int k) {
  check_positives(positives);
  if (k < 1) throw InvalidArgument("k must be at least 1");
  std::vector<double> sorted(positives.begin(), positives.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t gaps = sorted.size() - 1;
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(k - 1), gaps);
  if (binomial(gaps, m) > kMaxOracleChoices) {
    throw InvalidArgument("pessimistic ERM oracle: too many candidate gap choices");
  }

  // Brute-force per-gap counts, independent of the binary search used above.
  std::vector<long> inside(gaps, 0);
  for (double u : unlabeled) {
    for (std::size_t i = 0; i < gaps; ++i) {
      if (sorted[i] < u && u < sorted[i + 1]) ++inside[i];
    }
  }

  std::vector<std::size_t> pick(m);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<std::size_t> best = pick;
  long best_removed = -1;
  while (true) {
    long removed = 0;
    for (std::size_t g : pick) removed += inside[g];
    if (removed > best_removed) {
      best_removed = removed;
      best = pick;
    }
    // next combination in lexicographic order
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == gaps - m + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return assemble(sorted, std::move(best));
}

std::size_t covered_count(const LearnedIntervals& h, std::span<const double> unlabeled) {
  return static_cast<std::size_t>(
      std::count_if(unlabeled.begin(), unlabeled.end(), [&](double u) { return h.contains(u); }));
}

std::vector<double> make_smooth_samples(const RowMatrix& xs, const Vector& w_hat, Rng& rng) {
  if (xs.cols() != w_hat.size()) throw InvalidArgument("make_smooth_samples: dimension mismatch");
  std::vector<double> z(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    z[static_cast<std::size_t>(i)] = xs.row(i).dot(w_hat) + rng.normal();
  }
  return z;
}

double default_window(const Dataset& data) { return 1.5 * data.ys.cwiseAbs().maxCoeff(); }

SetLearningResult learn_survival_set_detailed(const Dataset& data, const Vector& w_hat, int k,
                                              double eps, double window, Rng& rng) {
  data.validate();
  const auto smooth = make_smooth_samples(data.xs, w_hat, rng);
  std::span<const double> positives(data.ys.data(), data.size());
  SetLearningResult out{learn_intervals(positives, smooth, k, eps), {}, window};
  out.set = clip(out.raw.set, window);
  if (out.set.empty()) {
    std::ostringstream msg;
    msg << "learned set is empty after clipping to [-" << window << ", " << window << "]";
    throw DegenerateWindow(msg.str());
  }
  return out;
}

double implied_set_accuracy(std::size_t n, int k, double delta) {
  if (n == 0 || !(delta > 0.0 && delta < 1.0)) throw InvalidArgument("implied_set_accuracy");
  return std::sqrt((k + std::log(1.0 / delta)) / static_cast<double>(n));
}

}  // namespace trunclr
