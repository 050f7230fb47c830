#ifndef ARMCHAIR_LOCALIZATION_HPP
#define ARMCHAIR_LOCALIZATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string_view>
#include <vector>

#include "armchair/error.hpp"
#include "armchair/hill.hpp"
#include "armchair/lyapunov.hpp"
#include "armchair/rootfind.hpp"

namespace armchair {

/// Function families whose large-n zeros sit in explicit disks:
/// D_0^- (antiperiodic), D_k^+ (periodic) and rho_k (resonance).
enum class ZeroFamily { antiperiodic, periodic, resonance };

constexpr std::string_view to_string(ZeroFamily f) {
  switch (f) {
    case ZeroFamily::antiperiodic: return "antiperiodic";
    case ZeroFamily::periodic: return "periodic";
    case ZeroFamily::resonance: return "resonance";
  }
  return "?";
}

/// Zeros each disk of the family is asserted to hold.
constexpr int zeros_per_disk(ZeroFamily f) { return f == ZeroFamily::antiperiodic ? 2 : 1; }

/// Disks (in z = sqrt(lambda)) around the index-n zeros of the family.
inline std::vector<Disk> localization_disks(ZeroFamily family, const TubeAngle& a, int n) {
  if (n < 0) throw invalid_input("localization_disks: n must be >= 0");
  const double pi = std::numbers::pi;
  const double mid = pi * n + pi / 2;
  std::vector<Disk> out;
  switch (family) {
    case ZeroFamily::antiperiodic: {
      const double off = std::asin(1.0 / 3.0);
      out = {{mid - off, 1.0 / 3.0}, {mid + off, 1.0 / 3.0}};
      break;
    }
    case ZeroFamily::periodic: {
      const double c = std::abs(a.c());
      const double hi = std::asin(std::min(1.0, std::sqrt(5.0 + 4.0 * c) / 3.0));
      const double lo = std::asin(std::sqrt(std::max(0.0, 5.0 - 4.0 * c)) / 3.0);
      out = {{mid - hi, 1.0 / 3.0}, {mid - lo, 1.0 / 3.0}, {mid + lo, 1.0 / 3.0}, {mid + hi, 1.0 / 3.0}};
      break;
    }
    case ZeroFamily::resonance: {
      if (a.is_zero() || a.is_half())
        throw invalid_input("localization_disks: resonance disks need k not in {0, N/2}");
      const double s = a.s();
      const double off = std::asin(s / 3.0);
      out = {{pi * n - pi / 2 - off, s / 3.0}, {pi * n - pi / 2 + off, s / 3.0}};
      break;
    }
  }
  return out;
}

/// Complex evaluator of the family's function of lambda.
inline auto family_function(ZeroFamily family, const PeriodicPotential& q, const TubeAngle& a) {
  using C = std::complex<double>;
  return [family, &q, a](C lambda) -> C {
    const auto d = evaluate(monodromy(q, lambda), a);
    switch (family) {
      case ZeroFamily::antiperiodic: return 4.0 * ((d.xi + 1.0) * (d.xi + 1.0) - d.rho);
      case ZeroFamily::periodic: return 4.0 * ((d.xi - 1.0) * (d.xi - 1.0) - d.rho);
      case ZeroFamily::resonance: return d.rho;
    }
    return C{};
  };
}

/// A group of overlapping disks replaced by the disk spanning their union on
/// the real axis, with the summed asserted count.
struct DiskCluster {
  Disk disk;
  int expected;
  std::vector<Disk> members;
};

namespace detail {

inline std::vector<DiskCluster> cluster_disks(std::vector<Disk> disks, int per_disk) {
  std::sort(disks.begin(), disks.end(),
            [](const Disk& x, const Disk& y) { return x.center.real() < y.center.real(); });
  // Coincident disks (e.g. shared between indices n and n + 1) hold zeros of both.
  std::vector<DiskCluster> out;
  for (const auto& d : disks) {
    if (!out.empty()) {
      const auto& last = out.back().members.back();
      if (d.center.real() - last.center.real() < d.radius + last.radius) {
        out.back().members.push_back(d);
        out.back().expected += per_disk;
        continue;
      }
    }
    out.push_back({d, per_disk, {d}});
  }
  for (auto& c : out) {
    double lo = c.members.front().center.real() - c.members.front().radius;
    double hi = lo;
    for (const auto& m : c.members) {
      lo = std::min(lo, m.center.real() - m.radius);
      hi = std::max(hi, m.center.real() + m.radius);
    }
    c.disk = {0.5 * (lo + hi), 0.5 * (hi - lo)};
  }
  return out;
}

}  // namespace detail

/// Clusters touching the index-n disks, formed together with the disks of
/// n - 1 and n + 1 so that shared or overlapping disks are counted once.
inline std::vector<DiskCluster> disk_clusters(ZeroFamily family, const TubeAngle& a, int n) {
  std::vector<Disk> all;
  for (int m = std::max(0, n - 1); m <= n + 1; ++m) {
    auto ds = localization_disks(family, a, m);
    all.insert(all.end(), ds.begin(), ds.end());
  }
  const auto own = localization_disks(family, a, n);
  std::vector<DiskCluster> out;
  for (auto& c : detail::cluster_disks(std::move(all), zeros_per_disk(family))) {
    const bool mine = std::any_of(c.members.begin(), c.members.end(), [&](const Disk& m) {
      return std::any_of(own.begin(), own.end(), [&](const Disk& o) { return o.center == m.center; });
    });
    if (mine) out.push_back(std::move(c));
  }
  return out;
}

/// Whether every cluster of index n holds exactly its asserted zero count.
inline bool disks_hold(ZeroFamily family, const PeriodicPotential& q, const TubeAngle& a, int n,
                       const CountOptions& opts = {}) {
  const auto f = family_function(family, q, a);
  for (const auto& c : disk_clusters(family, a, n)) {
    try {
      if (count_zeros(f, c.disk, opts) != c.expected) return false;
    } catch (const numeric_failure&) {
      return false;
    }
  }
  return true;
}

inline std::vector<ZeroFamily> families_for(const TubeAngle& a) {
  std::vector<ZeroFamily> fs{ZeroFamily::antiperiodic, ZeroFamily::periodic};
  if (!a.is_zero() && !a.is_half()) fs.push_back(ZeroFamily::resonance);
  return fs;
}

struct N0Result {
  int n0;
  std::map<ZeroFamily, int> per_family;
};

/// Smallest n* >= 2 from which six consecutive indices have correct disk
/// counts, per family; the overall threshold is the largest of these.
inline N0Result find_n0_detail(const PeriodicPotential& q, const TubeAngle& a, const CountOptions& opts = {}) {
  constexpr int first = 2;
  constexpr int window = 6;
  constexpr int limit = 64;
  N0Result r{first, {}};
  for (auto family : families_for(a)) {
    int run = 0;
    int found = -1;
    for (int n = first; n < limit + window; ++n) {
      run = disks_hold(family, q, a, n, opts) ? run + 1 : 0;
      if (run == window) {
        found = n - window + 1;
        break;
      }
    }
    if (found < 0 || found > limit)
      throw numeric_failure("find_n0: no threshold below n = 64 for the " + std::string(to_string(family)) +
                                " family",
                            a.k());
    r.per_family[family] = found;
    r.n0 = std::max(r.n0, found);
  }
  return r;
}

inline int find_n0(const PeriodicPotential& q, const TubeAngle& a, const CountOptions& opts = {}) {
  return find_n0_detail(q, a, opts).n0;
}

/// Asserted zero total below the first localized index n0:
/// 4 n0 for D_0^- in |z| < pi n0, 4 n0 + 2 for D_k^+ in |z| < pi n0 + pi/2,
/// 2 n0 for rho_k in |z| < pi n0.
struct LowEnergyCount {
  double radius;  // in z
  int expected;
  int found;
};

inline LowEnergyCount low_energy_count(ZeroFamily family, const PeriodicPotential& q, const TubeAngle& a, int n0,
                                       const CountOptions& opts = {}) {
  const double pi = std::numbers::pi;
  LowEnergyCount r{};
  switch (family) {
    case ZeroFamily::antiperiodic: r = {pi * n0, 4 * n0, 0}; break;
    case ZeroFamily::periodic: r = {pi * n0 + pi / 2, 4 * n0 + 2, 0}; break;
    case ZeroFamily::resonance:
      if (a.is_zero() || a.is_half()) throw invalid_input("low_energy_count: resonance needs k not in {0, N/2}");
      r = {pi * n0, 2 * n0, 0};
      break;
  }
  r.found = count_zeros_origin(family_function(family, q, a), r.radius, opts);
  return r;
}

/// Real zeros of the family for indices n0 < n <= n_hi lying outside the real
/// projections of their disks. An empty result means the disks capture all.
inline std::vector<RealRoot> stray_real_roots(ZeroFamily family, const PeriodicPotential& q, const TubeAngle& a,
                                              int n0, int n_hi, const RootOptions& base = {}) {
  std::vector<std::pair<double, double>> proj;
  for (int n = n0 + 1; n <= n_hi; ++n)
    for (const auto& d : localization_disks(family, a, n))
      proj.emplace_back(d.center.real() - d.radius, d.center.real() + d.radius);
  if (proj.empty()) return {};
  double lo = proj.front().first, hi = proj.front().second;
  for (const auto& [x, y] : proj) {
    lo = std::min(lo, x);
    hi = std::max(hi, y);
  }
  RootOptions ro = base;
  std::vector<std::function<double(double)>> parts;
  switch (family) {
    case ZeroFamily::antiperiodic:
      for (int nu : {1, 2})
        parts.emplace_back([&q, nu](double l) {
          const auto m = monodromy(q, l);
          return 9.0 * m.F * m.F - h_factor(nu, m.Fminus);
        });
      break;
    case ZeroFamily::periodic:
      for (int nu : {1, 2})
        parts.emplace_back([&q, nu, c2 = a.c2()](double l) {
          const auto m = monodromy(q, l);
          return 9.0 * m.F * m.F - g_factor(nu, m.Fminus, c2);
        });
      break;
    case ZeroFamily::resonance:
      ro.step = std::min(ro.step, std::asin(a.s() / 3.0) / 2.0);
      parts.emplace_back([&q, a](double l) { return evaluate(monodromy(q, l), a).rho; });
      break;
  }
  std::vector<RealRoot> stray;
  for (const auto& f : parts)
    for (const auto& r : real_roots(f, Bracket{lo, hi, std::nullopt}, ro)) {
      const bool inside = std::any_of(proj.begin(), proj.end(),
                                      [&](const auto& p) { return p.first <= r.zeta && r.zeta <= p.second; });
      if (!inside) stray.push_back(r);
    }
  return stray;
}

}  // namespace armchair

#endif  // ARMCHAIR_LOCALIZATION_HPP
