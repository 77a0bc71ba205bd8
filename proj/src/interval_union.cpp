#include "trunclr/interval_union.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trunclr/errors.hpp"
#include "trunclr/normal.hpp"

namespace trunclr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A point strictly inside the open segment (a, b), a < b.
double interior_point(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0.0;
  if (std::isinf(a)) return b - 1.0;
  if (std::isinf(b)) return a + 1.0;
  return a + 0.5 * (b - a);
}

bool apply(SetOp op, bool in_a, bool in_b) {
  switch (op) {
    case SetOp::Union:
      return in_a || in_b;
    case SetOp::Intersect:
      return in_a && in_b;
    case SetOp::SymDiff:
      return in_a != in_b;
  }
  return false;
}

}  // namespace

IntervalUnion IntervalUnion::normalize(std::span<const Interval> raw) {
  std::vector<Interval> pieces;
  pieces.reserve(raw.size());
  for (const auto& iv : raw) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi)) {
      throw InvalidArgument("interval endpoint is NaN");
    }
    if (iv.lo > iv.hi) {
      throw InvalidArgument("interval has lo > hi: (" + std::to_string(iv.lo) + ", " +
                            std::to_string(iv.hi) + ")");
    }
    if (iv.lo < iv.hi) pieces.push_back(iv);
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : pieces) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return IntervalUnion(std::move(merged));
}

IntervalUnion IntervalUnion::real_line() { return IntervalUnion({{-kInf, kInf}}); }

IntervalUnion IntervalUnion::single(double lo, double hi) { return normalize({{lo, hi}}); }

bool IntervalUnion::contains(double y) const {
  if (std::isnan(y)) throw InvalidArgument("membership query with NaN");
  // first piece with hi >= y
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), y,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  return it != pieces_.end() && it->lo <= y;
}

double IntervalUnion::length() const {
  double total = 0.0;
  for (const auto& iv : pieces_) total += iv.hi - iv.lo;
  return total;
}

IntervalUnion boolean_op(SetOp kind, const IntervalUnion& a, const IntervalUnion& b) {
  std::vector<double> cuts;
  cuts.reserve(2 * (a.size() + b.size()) + 2);
  cuts.push_back(-kInf);
  cuts.push_back(kInf);
  for (const auto* s : {&a, &b}) {
    for (const auto& iv : s->pieces()) {
      cuts.push_back(iv.lo);
      cuts.push_back(iv.hi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = interior_point(cuts[i], cuts[i + 1]);
    if (apply(kind, a.contains(mid), b.contains(mid))) out.push_back({cuts[i], cuts[i + 1]});
  }
  return IntervalUnion::normalize(out);
}

IntervalUnion complement(const IntervalUnion& a) {
  return symdiff(a, IntervalUnion::real_line());
}

IntervalUnion clip(const IntervalUnion& a, double half_width) {
  if (!(half_width > 0.0)) throw InvalidArgument("clip window must be positive");
  return intersect(a, IntervalUnion::single(-half_width, half_width));
}

double gaussian_mass(const IntervalUnion& a, double nu) {
  double total = 0.0;
  for (const auto& iv : a.pieces()) total += normal::interval_mass(iv.lo - nu, iv.hi - nu);
  return std::clamp(total, 0.0, 1.0);
}

double log_gaussian_mass(const IntervalUnion& a, double nu) {
  double best = -kInf;
  std::vector<double> logs;
  logs.reserve(a.size());
  for (const auto& iv : a.pieces()) {
    logs.push_back(normal::log_interval_mass(iv.lo - nu, iv.hi - nu));
    best = std::max(best, logs.back());
  }
  if (best == -kInf) return -kInf;
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - best);
  return best + std::log(sum);
}

}  // namespace trunclr
