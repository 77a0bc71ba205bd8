#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace trunclr {

struct Interval {
  double lo;
  double hi;

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class SetOp { Union, Intersect, SymDiff };

/// Canonical finite union of disjoint real intervals.
///
/// Pieces are sorted, pairwise separated by a strictly positive gap and
/// nonempty (lo < hi). Endpoints may be infinite. Finite endpoints are treated
/// as closed for membership; every distribution used with these sets is
/// absolutely continuous, so the convention carries no probability mass.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  /// Canonicalises arbitrary (lo, hi) pairs: sorts, merges overlapping and
  /// touching pieces, drops empty ones. Throws InvalidArgument on NaN or lo > hi.
  static IntervalUnion normalize(std::span<const Interval> raw);
  static IntervalUnion normalize(std::initializer_list<Interval> raw) {
    return normalize(std::span<const Interval>(raw.begin(), raw.size()));
  }

  static IntervalUnion real_line();
  static IntervalUnion single(double lo, double hi);

  const std::vector<Interval>& pieces() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }
  bool empty() const noexcept { return pieces_.empty(); }

  bool contains(double y) const;

  /// Total Lebesgue length (may be infinite).
  double length() const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  explicit IntervalUnion(std::vector<Interval> pieces) : pieces_(std::move(pieces)) {}

  std::vector<Interval> pieces_;
};

IntervalUnion boolean_op(SetOp kind, const IntervalUnion& a, const IntervalUnion& b);

inline IntervalUnion set_union(const IntervalUnion& a, const IntervalUnion& b) {
  return boolean_op(SetOp::Union, a, b);
}
inline IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b) {
  return boolean_op(SetOp::Intersect, a, b);
}
inline IntervalUnion symdiff(const IntervalUnion& a, const IntervalUnion& b) {
  return boolean_op(SetOp::SymDiff, a, b);
}

IntervalUnion complement(const IntervalUnion& a);

/// Intersection with the window [-L, L]; L must be positive.
IntervalUnion clip(const IntervalUnion& a, double half_width);

/// Mass that N(nu, 1) assigns to the set.
double gaussian_mass(const IntervalUnion& a, double nu);

/// log of gaussian_mass, computed without underflow; -inf for the empty set.
double log_gaussian_mass(const IntervalUnion& a, double nu);

}  // namespace trunclr
