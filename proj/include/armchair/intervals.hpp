#ifndef ARMCHAIR_INTERVALS_HPP
#define ARMCHAIR_INTERVALS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace armchair {

struct Interval {
  double lo;
  double hi;
  bool empty() const noexcept { return !(lo < hi); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Sorted union of closed intervals; components closer than `join` merge.
inline std::vector<Interval> interval_union(std::vector<Interval> xs, double join = 0.0) {
  std::erase_if(xs, [](const Interval& i) { return i.hi < i.lo; });
  std::sort(xs.begin(), xs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& x : xs) {
    if (!out.empty() && x.lo <= out.back().hi + join)
      out.back().hi = std::max(out.back().hi, x.hi);
    else
      out.push_back(x);
  }
  return out;
}

inline std::vector<Interval> clip(const std::vector<Interval>& xs, double lo, double hi) {
  std::vector<Interval> out;
  for (auto x : xs) {
    x.lo = std::max(x.lo, lo);
    x.hi = std::min(x.hi, hi);
    if (x.lo <= x.hi) out.push_back(x);
  }
  return out;
}

inline double distance_to(double x, const std::vector<Interval>& set) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : set) {
    if (s.contains(x)) return 0.0;
    d = std::min({d, std::abs(x - s.lo), std::abs(x - s.hi)});
  }
  return d;
}

namespace detail {

// sup over a in A of dist(a, B); d(., B) is piecewise linear, so its maxima on
// A sit at endpoints of A or at midpoints of the holes of B.
inline double directed_hausdorff(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  double worst = 0.0;
  std::vector<double> probes;
  for (const auto& i : a) {
    probes.push_back(i.lo);
    probes.push_back(i.hi);
  }
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    const double mid = 0.5 * (b[j].hi + b[j + 1].lo);
    for (const auto& i : a)
      if (i.contains(mid)) probes.push_back(mid);
  }
  for (double x : probes) worst = std::max(worst, distance_to(x, b));
  return worst;
}

}  // namespace detail

/// Hausdorff distance between two finite unions of closed intervals.
inline double hausdorff_distance(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  const auto ua = interval_union(a);
  const auto ub = interval_union(b);
  if (ua.empty() || ub.empty())
    return (ua.empty() && ub.empty()) ? 0.0 : std::numeric_limits<double>::infinity();
  return std::max(detail::directed_hausdorff(ua, ub), detail::directed_hausdorff(ub, ua));
}

}  // namespace armchair

#endif  // ARMCHAIR_INTERVALS_HPP
