#ifndef ARMCHAIR_POTENTIAL_HPP
#define ARMCHAIR_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "armchair/error.hpp"

namespace armchair {

struct Segment {
  double start;  // breakpoint in [0,1)
  double value;
  bool operator==(const Segment&) const = default;
};

struct Delta {
  double position;  // in (0,1)
  double weight;    // y'(a+) = y'(a-) + weight * y(a)
  bool operator==(const Delta&) const = default;
};

struct FourierCoefficients {
  double q0;
  double qs;  // \int q(s) sin(2 pi n s) ds
  double qc;  // \int q(s) cos(2 pi n s) ds
};

/// One-periodic potential: piecewise constant on [0,1) plus point interactions.
///
/// Segment i covers [start_i, start_{i+1}); the last one runs to 1. The value
/// is immutable after construction, and the propagation steps used by the
/// monodromy are precomputed here.
class PeriodicPotential {
 public:
  /// A propagation step: free motion over `length` in constant `value`, then
  /// a derivative jump of `jump` (zero when no delta sits at the step end).
  struct Step {
    double length;
    double value;
    double jump;
  };

  PeriodicPotential() : PeriodicPotential(std::vector<Segment>{{0.0, 0.0}}) {}

  explicit PeriodicPotential(std::vector<Segment> segments, std::vector<Delta> deltas = {})
      : segments_(std::move(segments)), deltas_(std::move(deltas)) {
    if (segments_.empty()) throw invalid_input("potential: at least one segment is required");
    if (segments_.front().start != 0.0) throw invalid_input("potential: first breakpoint must be 0");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const auto& s = segments_[i];
      if (!std::isfinite(s.start) || !std::isfinite(s.value))
        throw invalid_input("potential: non-finite segment entry");
      if (s.start < 0.0 || s.start >= 1.0) throw invalid_input("potential: breakpoint outside [0,1)");
      if (i > 0 && !(s.start > segments_[i - 1].start))
        throw invalid_input("potential: breakpoints must be strictly increasing");
    }
    for (std::size_t i = 0; i < deltas_.size(); ++i) {
      const auto& d = deltas_[i];
      if (!std::isfinite(d.position) || !std::isfinite(d.weight))
        throw invalid_input("potential: non-finite delta entry");
      if (d.position <= 0.0 || d.position >= 1.0) throw invalid_input("potential: delta position outside (0,1)");
      if (i > 0 && !(d.position > deltas_[i - 1].position))
        throw invalid_input("potential: delta positions must be strictly increasing");
    }
    build_steps();
  }

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const std::vector<Delta>& deltas() const noexcept { return deltas_; }
  const std::vector<Step>& steps() const noexcept { return steps_; }

  double segment_end(std::size_t i) const { return i + 1 < segments_.size() ? segments_[i + 1].start : 1.0; }

  /// Value of the regular part at t (taken modulo 1).
  double value_at(double t) const {
    t -= std::floor(t);
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double x, const Segment& s) { return x < s.start; });
    return std::prev(it)->value;
  }

  double min_value() const {
    double m = segments_.front().value;
    for (const auto& s : segments_) m = std::min(m, s.value);
    return m;
  }

  /// Lower bound for the 1-periodic ground state, hence for every spectrum
  /// computed from the monodromy: min q - W - W^2 with W the negative delta mass.
  double spectral_lower_bound() const {
    double w = 0.0;
    for (const auto& d : deltas_)
      if (d.weight < 0.0) w -= d.weight;
    return min_value() - w - w * w;
  }

  bool operator==(const PeriodicPotential& o) const {
    return segments_ == o.segments_ && deltas_ == o.deltas_;
  }

 private:
  void build_steps() {
    // Merge segment ends with delta positions; a delta sitting on a breakpoint
    // is applied at the end of the segment to its left.
    std::size_t di = 0;
    double pos = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const double end = segment_end(i);
      const double v = segments_[i].value;
      while (di < deltas_.size() && deltas_[di].position < end) {
        steps_.push_back({deltas_[di].position - pos, v, deltas_[di].weight});
        pos = deltas_[di].position;
        ++di;
      }
      double jump = 0.0;
      if (di < deltas_.size() && deltas_[di].position == end) jump = deltas_[di++].weight;
      steps_.push_back({end - pos, v, jump});
      pos = end;
    }
  }

  std::vector<Segment> segments_;
  std::vector<Delta> deltas_;
  std::vector<Step> steps_;
};

/// M equal-width constant segments carrying the given midpoint samples.
inline PeriodicPotential from_samples(std::span<const double> samples) {
  if (samples.empty()) throw invalid_input("from_samples: at least one sample is required");
  const auto m = samples.size();
  std::vector<Segment> segs;
  segs.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    segs.push_back({static_cast<double>(i) / static_cast<double>(m), samples[i]});
  return PeriodicPotential(std::move(segs));
}

/// Exact Fourier data q0, q_sn, q_cn of the represented distribution.
inline FourierCoefficients fourier_coeffs(const PeriodicPotential& q, int n) {
  if (n < 1) throw invalid_input("fourier_coeffs: n must be >= 1");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double w = two_pi * n;
  FourierCoefficients r{0.0, 0.0, 0.0};
  const auto& segs = q.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double a = segs[i].start;
    const double b = q.segment_end(i);
    const double v = segs[i].value;
    r.q0 += v * (b - a);
    r.qs += v * (std::cos(w * a) - std::cos(w * b)) / w;
    r.qc += v * (std::sin(w * b) - std::sin(w * a)) / w;
  }
  for (const auto& d : q.deltas()) {
    r.q0 += d.weight;
    r.qs += d.weight * std::sin(w * d.position);
    r.qc += d.weight * std::cos(w * d.position);
  }
  return r;
}

/// True iff q(t) = q(1 - t) within tol in both breakpoint position and value.
inline bool is_even(const PeriodicPotential& q, double tol) {
  if (!(tol > 0.0)) throw invalid_input("is_even: tol must be positive");
  // Common refinement of the breakpoints of q and of its mirror image.
  std::vector<double> cuts{0.0, 1.0};
  const auto& segs = q.segments();
  for (std::size_t i = 1; i < segs.size(); ++i) {
    cuts.push_back(segs[i].start);
    cuts.push_back(1.0 - segs[i].start);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b - a <= tol) continue;  // slivers from breakpoints that match within tol
    const double mid = 0.5 * (a + b);
    if (std::abs(q.value_at(mid) - q.value_at(1.0 - mid)) > tol) return false;
  }
  for (const auto& d : q.deltas()) {
    const bool mirrored = std::any_of(q.deltas().begin(), q.deltas().end(), [&](const Delta& e) {
      return std::abs(e.position - (1.0 - d.position)) <= tol && std::abs(e.weight - d.weight) <= tol;
    });
    if (!mirrored) return false;
  }
  return true;
}

}  // namespace armchair

#endif  // ARMCHAIR_POTENTIAL_HPP
