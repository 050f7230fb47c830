#ifndef ARMCHAIR_INVARIANTS_HPP
#define ARMCHAIR_INVARIANTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "armchair/intervals.hpp"
#include "armchair/lyapunov.hpp"
#include "armchair/spectrum.hpp"

namespace armchair {

struct InvariantResult {
  explicit InvariantResult(std::string n = {}) : name(std::move(n)) {}

  std::string name;
  long checked = 0;
  long violations = 0;
  std::string first_violation;
  bool passed() const noexcept { return violations == 0; }

  void expect(bool ok, const std::string& what) {
    ++checked;
    if (ok) return;
    if (violations++ == 0) first_violation = what;
  }
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline bool le(double a, double b, double tol) { return a <= b + tol * (1.0 + std::abs(b)); }

/// Checks a chain x_0 <= x_1 <= ... and reports the first broken link. Each
/// link allows tol plus the attainable accuracy of both values.
inline void expect_chain(InvariantResult& r, const std::vector<double>& xs, const std::string& where, double tol,
                         const PeriodicPotential* q = nullptr) {
  auto slack = [&](double x) { return q && std::isfinite(x) ? edge_uncertainty(*q, x) : 0.0; };
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (le(xs[i], xs[i + 1], tol)) {
      r.expect(true, "");
      continue;
    }
    r.expect(xs[i] <= xs[i + 1] + tol * (1.0 + std::abs(xs[i + 1])) + slack(xs[i]) + slack(xs[i + 1]),
             where + ": link " + std::to_string(i) + " " + fmt(xs[i]) + " > " + fmt(xs[i + 1]));
  }
}

inline std::string at(int k, int n) { return "k=" + std::to_string(k) + " n=" + std::to_string(n); }

}  // namespace detail

/// lambda~_{n-1}^+ <= lambda_{2,p-1}^{k,+} <= min{...} <= max{...} <= lambda_{1,p}^{0,-} <= eta_n
/// <= lambda_{1,p}^{0,+} <= min{...} <= max{...} <= lambda_{2,p+1}^{k,-} <= lambda~_n^-.
inline InvariantResult check_interlacing(const PeriodicPotential& q, const SpectrumReport& rep,
                                         double tol = 1e-9) {
  InvariantResult r{"periodic-antiperiodic-interlacing"};
  auto hill_gap = [&](int n) -> const HillGap* {
    for (const auto& g : rep.hill.gaps)
      if (g.n == n) return &g;
    return nullptr;
  };
  for (const auto& f : rep.fibers) {
    for (int n = 1; n <= rep.layers; ++n) {
      const auto i = static_cast<std::size_t>(n - 1);
      const auto& per = f.periodic_layers[i];
      const auto& anti = rep.antiperiodic;
      double a1m = 0, a1p = 0, a2m = 0, a2p = 0;
      for (const auto& e : anti) {
        if (e.n != 2 * n - 1) continue;
        (e.nu == 1 ? (e.sign < 0 ? a1m : a1p) : (e.sign < 0 ? a2m : a2p)) = e.value;
      }
      const double below = n == 1 ? rep.hill.lambda0_plus : (hill_gap(n - 1) ? hill_gap(n - 1)->plus : -INFINITY);
      const double above = hill_gap(n) ? hill_gap(n)->minus : INFINITY;
      const double eta = rep.lyapunov_zeros[i].value;
      detail::expect_chain(r,
                           {below, per.lam2_plus_prev, std::min(a2m, per.lam1_plus_prev),
                            std::max(a2m, per.lam1_plus_prev), a1m, eta, a1p, std::min(per.lam1_minus_next, a2p),
                            std::max(per.lam1_minus_next, a2p), per.lam2_minus_next, above},
                           detail::at(f.k, n), tol, &q);
    }
  }
  return r;
}

/// E_{2,p-1}^+ <= min{E_{2,p}^-, E_{1,p-1}^+} <= max{...} <= E_{1,p}^- <= E_{1,p}^+
/// <= min{E_{1,p+1}^-, E_{2,p}^+} <= max{...} <= E_{2,p+1}^-.
inline InvariantResult check_edge_order(const SpectrumReport& rep, double tol = 1e-9) {
  InvariantResult r{"band-edge-order"};
  for (const auto& f : rep.fibers) {
    for (int n = 1; n <= rep.layers; ++n) {
      const int p = 2 * n - 1;
      const double e2prev = f.band(2, p).lo.value, e1prev = f.band(1, p).lo.value;
      const double e2m = f.band(2, p).hi.value, e1m = f.band(1, p).hi.value;
      const double e1p = f.band(1, p + 1).lo.value, e2p = f.band(2, p + 1).lo.value;
      const double e1next = f.band(1, p + 1).hi.value, e2next = f.band(2, p + 1).hi.value;
      detail::expect_chain(r,
                           {e2prev, std::min(e2m, e1prev), std::max(e2m, e1prev), e1m, e1p, std::min(e1next, e2p),
                            std::max(e1next, e2p), e2next},
                           detail::at(f.k, n), tol);
    }
  }
  return r;
}

/// E_{2,p}^- > E_{1,p-1}^+ iff u_k(E_{2,p}^-) < 0; E_{1,p+1}^- > E_{2,p}^+ iff u_k(E_{2,p}^+) < 0.
/// Near-ties of either side (within tol) are not decidable and are skipped.
inline InvariantResult check_overlap_criteria(const PeriodicPotential& q, const SpectrumReport& rep,
                                              double tol = 1e-9) {
  InvariantResult r{"overlap-sign-criteria"};
  for (const auto& f : rep.fibers) {
    const TubeAngle a = f.angle();
    for (int n = 1; n <= rep.layers; ++n) {
      const int p = 2 * n - 1;
      const auto test = [&](double at, double lhs, double rhs, const char* which) {
        const double u = std::abs(monodromy(q, at).Fminus) - a.s2();
        if (std::abs(u) <= tol || std::abs(lhs - rhs) <= tol * (1.0 + std::abs(lhs))) return;
        r.expect((lhs > rhs) == (u < 0.0), detail::at(f.k, n) + " " + which + ": u=" + detail::fmt(u));
      };
      test(f.band(2, p).hi.value, f.band(2, p).hi.value, f.band(1, p).lo.value, "lower overlap");
      test(f.band(2, p + 1).lo.value, f.band(1, p + 1).hi.value, f.band(2, p + 1).lo.value, "upper overlap");
    }
  }
  return r;
}

/// Fibers k and N - k agree to 1e-12 (bands, gaps, multiplicity).
inline InvariantResult check_symmetry(const SpectralSkeleton& sk, const SpectrumReport& rep, double tol = 1e-12) {
  InvariantResult r{"fiber-symmetry"};
  std::vector<int> mirrored;
  for (const auto& f : rep.fibers)
    if (f.k != 0 && 2 * f.k != rep.N) mirrored.push_back(rep.N - f.k);
  const auto others = analyze_fibers(sk, rep.N, mirrored);
  auto close = [&](double x, double y) { return x == y || std::abs(x - y) <= tol * (1.0 + std::abs(x)); };
  for (const auto& g : others) {
    const auto& f = rep.fiber(rep.N - g.k);
    r.expect(f.bands.size() == g.bands.size() && f.gaps.size() == g.gaps.size() &&
                 f.multiplicity.size() == g.multiplicity.size(),
             "k=" + std::to_string(g.k) + ": table sizes differ");
    for (std::size_t i = 0; i < std::min(f.bands.size(), g.bands.size()); ++i)
      r.expect(close(f.bands[i].lo.value, g.bands[i].lo.value) && close(f.bands[i].hi.value, g.bands[i].hi.value) &&
                   f.bands[i].lo.source == g.bands[i].lo.source && f.bands[i].hi.source == g.bands[i].hi.source,
               "k=" + std::to_string(g.k) + ": band " + std::to_string(i) + " differs");
    for (std::size_t i = 0; i < std::min(f.gaps.size(), g.gaps.size()); ++i)
      r.expect(f.gaps[i].kind == g.gaps[i].kind && close(f.gaps[i].lo.value, g.gaps[i].lo.value) &&
                   close(f.gaps[i].hi.value, g.gaps[i].hi.value),
               "k=" + std::to_string(g.k) + ": gap " + std::to_string(g.gaps[i].n) + " differs");
    for (std::size_t i = 0; i < std::min(f.multiplicity.size(), g.multiplicity.size()); ++i)
      r.expect(f.multiplicity[i].multiplicity == g.multiplicity[i].multiplicity &&
                   close(f.multiplicity[i].lo, g.multiplicity[i].lo) && close(f.multiplicity[i].hi, g.multiplicity[i].hi),
               "k=" + std::to_string(g.k) + ": multiplicity piece " + std::to_string(i) + " differs");
  }
  return r;
}

/// G_{k,4n} within G_{l,4n} and G_{l,2n-1} within G_{k,2n-1} for 0 <= k < l <= N/2.
inline InvariantResult check_monotonicity(const SpectrumReport& rep, double tol = 1e-9) {
  InvariantResult r{"gap-monotonicity"};
  auto inside = [&](const Gap& small, const Gap& big) {
    if (small.empty()) return true;
    return detail::le(big.lo.value, small.lo.value, tol) && detail::le(small.hi.value, big.hi.value, tol);
  };
  for (std::size_t a = 0; a < rep.fibers.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.fibers.size(); ++b) {
      const auto& fk = rep.fibers[a];
      const auto& fl = rep.fibers[b];
      for (const auto& g : fk.gaps) {
        if (g.n == 0) continue;
        const std::string where = "k=" + std::to_string(fk.k) + " l=" + std::to_string(fl.k) + " G_" +
                                  std::to_string(g.n);
        if (g.n % 4 == 0) r.expect(inside(g, fl.gap(g.n)), where);
        if (g.n % 2 == 1) r.expect(inside(fl.gap(g.n), g), where);
      }
    }
  }
  return r;
}

namespace detail {

inline int multiplicity_at(const MultiplicityMap& m, double x) {
  for (const auto& p : m)
    if (p.lo <= x && x <= p.hi) return p.multiplicity;
  return 0;
}

inline std::vector<double> cut_points(const SpectrumReport& rep, const FiberReport& f) {
  std::vector<double> cuts;
  for (const auto& b : f.bands) {
    cuts.push_back(b.lo.value);
    cuts.push_back(b.hi.value);
  }
  for (const auto& k : rep.kappa) {
    cuts.push_back(k.lo);
    cuts.push_back(k.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

inline double distance_to_cuts(const std::vector<double>& cuts, double x) {
  auto it = std::lower_bound(cuts.begin(), cuts.end(), x);
  double d = INFINITY;
  if (it != cuts.end()) d = std::min(d, *it - x);
  if (it != cuts.begin()) d = std::min(d, x - *std::prev(it));
  return d;
}

}  // namespace detail

/// Compares the assembled bands with the real-axis predicates: at grid points
/// farther than 10 tol_edge from every computed edge, lambda lies in the band
/// union iff some branch F_{k,nu} is in [-1, 1], and the multiplicity map
/// equals twice the number of such branches.
inline std::vector<InvariantResult> check_membership(const PeriodicPotential& q, const SpectrumReport& rep,
                                                     double lambda_lo, double lambda_hi, int points = 10000) {
  InvariantResult uni{"band-union-vs-membership"};
  InvariantResult mult{"multiplicity-vs-branch-count"};
  const double tol = rep.options.tol_edge;
  for (const auto& f : rep.fibers) {
    const TubeAngle a = f.angle();
    const auto bands = f.band_union();
    const auto cuts = detail::cut_points(rep, f);
    for (int i = 0; i < points; ++i) {
      const double lam = lambda_lo + (lambda_hi - lambda_lo) * i / (points - 1);
      if (detail::distance_to_cuts(cuts, lam) <= 10.0 * tol) continue;
      const auto m = membership(evaluate(monodromy(q, lam), a), tol);
      const bool in_bands = distance_to(lam, bands) == 0.0;
      const std::string where = "k=" + std::to_string(f.k) + " lambda=" + detail::fmt(lam);
      uni.expect(in_bands == (m.in_sigma1 || m.in_sigma2), where);
      mult.expect(detail::multiplicity_at(f.multiplicity, lam) == 2 * (int(m.in_sigma1) + int(m.in_sigma2)), where);
    }
  }
  return {uni, mult};
}

/// Where E_{1,p}^{k,+-} is a resonance r, xi_k(r) lies in (-1, -1/2]; where it
/// is antiperiodic although kappa_n holds resonances, xi_k(r) <= -1 there.
inline InvariantResult check_resonance_values(const PeriodicPotential& q, const SpectrumReport& rep,
                                              double tol = 1e-7) {
  InvariantResult r{"resonance-lyapunov-values"};
  for (const auto& f : rep.fibers) {
    if (f.k == 0 || 2 * f.k == rep.N) continue;
    const TubeAngle a = f.angle();
    for (const auto& layer : f.resonance_layers) {
      if (layer.zeros.empty() || layer.n > rep.layers) continue;
      const int p = 2 * layer.n - 1;
      for (int sign : {-1, +1}) {
        const BandEdge& e = sign < 0 ? f.band(1, p).hi : f.band(1, p + 1).lo;
        const double res = sign < 0 ? *layer.minus() : *layer.plus();
        const double xi = evaluate(monodromy(q, res), a).xi;
        const std::string where = detail::at(f.k, layer.n) + " xi=" + detail::fmt(xi);
        if (e.source == EigenKind::resonance)
          r.expect(xi > -1.0 - tol && xi <= -0.5 + tol, where);
        else
          r.expect(xi <= -1.0 + tol, where);
      }
    }
  }
  return r;
}

/// Union of the Hill bands below lambda_max.
inline std::vector<Interval> hill_band_union(const HillBandEdges& h, double lambda_max) {
  std::vector<Interval> out;
  double lo = h.lambda0_plus;
  for (const auto& g : h.gaps) {
    if (g.degenerate) continue;
    out.push_back({lo, g.minus});
    lo = g.plus;
  }
  out.push_back({lo, INFINITY});
  return clip(interval_union(out), -INFINITY, lambda_max);
}

/// For even q: sigma_ac(H) equals the Hill spectrum, and every nonempty
/// G_{k,4n-2} with k not in {0, N/2} is a resonance gap.
inline std::vector<InvariantResult> check_even_potential(const SpectrumReport& rep, double lambda_cut,
                                                         double tol = 1e-5) {
  InvariantResult set{"even-potential-hill-spectrum"};
  InvariantResult cls{"even-potential-resonance-gaps"};
  const auto ac = clip(rep.sigma_ac(), -INFINITY, lambda_cut);
  const double d = hausdorff_distance(ac, hill_band_union(rep.hill, lambda_cut));
  set.expect(d <= tol, "Hausdorff distance " + detail::fmt(d));
  for (const auto& f : rep.fibers) {
    if (f.k == 0 || 2 * f.k == rep.N) continue;
    for (const auto& g : f.gaps)
      if (g.n % 4 == 2 && !g.empty())
        cls.expect(g.kind == GapKind::resonance, "k=" + std::to_string(f.k) + " G_" + std::to_string(g.n) + " is " +
                                                     std::string(to_string(g.kind)));
  }
  return {set, cls};
}

inline std::vector<InvariantResult> check_all(const SpectralSkeleton& sk, const SpectrumReport& rep,
                                              int membership_points = 10000) {
  const auto& q = sk.potential();
  std::vector<InvariantResult> out{check_interlacing(q, rep), check_edge_order(rep), check_overlap_criteria(q, rep),
                                   check_symmetry(sk, rep), check_monotonicity(rep), check_resonance_values(q, rep)};
  // Above the last band of layer L the next gap G_{k,4L} reaches past mu_L.
  const double hi = rep.options.n_max > 0 ? rep.dirichlet.back().value : rep.options.lambda_max;
  for (auto& r : check_membership(q, rep, sk.floor(), hi, membership_points)) out.push_back(std::move(r));
  if (rep.even)
    for (auto& r : check_even_potential(rep, hi)) out.push_back(std::move(r));
  for (const auto& c : rep.checks) {
    InvariantResult r{c.name};
    r.expect(c.passed, c.detail);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace armchair

#endif  // ARMCHAIR_INVARIANTS_HPP
