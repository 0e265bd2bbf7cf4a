#pragma once

#include <cstdint>

namespace elt {

/// Half-open span [on, off) of sample indices on a shared discrete time axis.
/// Empty intervals are unrepresentable: construction enforces on < off and
/// on >= 0, so adjacent intervals share zero samples by definition.
struct Interval {
  std::int64_t on = 0;
  std::int64_t off = 1;

  Interval() = default;
  Interval(std::int64_t t_on, std::int64_t t_off);

  std::int64_t length() const { return off - on; }
  bool contains(std::int64_t t) const { return t >= on && t < off; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Number of samples shared by a and b: max(0, min(off) - max(on)).
std::int64_t intersection_length(const Interval& a, const Interval& b);

/// Set-measure IoU: |a∩b| / (|a| + |b| - |a∩b|). Disjoint unions use the
/// summed set length, not the covering span.
double iou(const Interval& a, const Interval& b);

/// Smallest interval covering both arguments.
Interval span(const Interval& a, const Interval& b);

}  // namespace elt
