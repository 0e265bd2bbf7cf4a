#include "elt/interval.hpp"

#include <algorithm>
#include <string>

#include "elt/errors.hpp"

namespace elt {

Interval::Interval(std::int64_t t_on, std::int64_t t_off) : on(t_on), off(t_off) {
  if (t_on < 0) {
    raise(Errc::BadInterval, "t_on must be >= 0, got " + std::to_string(t_on));
  }
  if (t_off <= t_on) {
    raise(Errc::BadInterval, "t_off must exceed t_on, got [" + std::to_string(t_on) + ", " +
                                 std::to_string(t_off) + ")");
  }
}

std::int64_t intersection_length(const Interval& a, const Interval& b) {
  return std::max<std::int64_t>(0, std::min(a.off, b.off) - std::max(a.on, b.on));
}

double iou(const Interval& a, const Interval& b) {
  const std::int64_t inter = intersection_length(a, b);
  const std::int64_t uni = a.length() + b.length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Interval span(const Interval& a, const Interval& b) {
  return Interval(std::min(a.on, b.on), std::max(a.off, b.off));
}

}  // namespace elt
