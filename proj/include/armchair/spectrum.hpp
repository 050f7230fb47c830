#ifndef ARMCHAIR_SPECTRUM_HPP
#define ARMCHAIR_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "armchair/error.hpp"
#include "armchair/hill.hpp"
#include "armchair/intervals.hpp"
#include "armchair/labels.hpp"
#include "armchair/lyapunov.hpp"
#include "armchair/potential.hpp"
#include "armchair/rootfind.hpp"

namespace armchair {

struct SpectrumOptions {
  double lambda_max = 100.0;
  int n_max = 0;  // when positive, the number of layers replaces lambda_max
  double tol_root = 1e-12;
  double tol_edge = 1e-9;
  double tol_tang = 1e-9;
  double step = 0.02;
  unsigned threads = 1;  // 0: one per hardware thread
};

/// Layer n of the real axis: [mu_{n-1}, eta_n] and [eta_n, mu_n], where each
/// of the factors 9F^2 - g_{k,nu}, 9F^2 - h_nu has exactly one zero.
/// For n = 1 the lower end is a point below the whole spectrum.
struct AnchorLayer {
  int n;
  double lo;
  double eta;
  double mu;
  bool operator==(const AnchorLayer&) const = default;
};

/// lambda_{nu,2n-1}^{0,+-}, shared by every fiber.
struct AntiperiodicLayer {
  int n;
  double lam2_minus;
  double lam1_minus;
  double lam1_plus;
  double lam2_plus;
  bool operator==(const AntiperiodicLayer&) const = default;
};

enum class Factor { g1, g2, h1, h2 };

inline double factor_value(Factor f, double nine_F2, double Fminus, double c2) {
  switch (f) {
    case Factor::g1: return nine_F2 - g_factor(1, Fminus, c2);
    case Factor::g2: return nine_F2 - g_factor(2, Fminus, c2);
    case Factor::h1: return nine_F2 - h_factor(1, Fminus);
    case Factor::h2: return nine_F2 - h_factor(2, Fminus);
  }
  return 0.0;
}

namespace detail {

struct GridSample {
  double zeta;
  double lambda;
  double F;
  double phi1;
  double Fminus;
};

inline std::vector<GridSample> build_grid(const PeriodicPotential& q, double z_lo, double z_hi, double step) {
  std::vector<GridSample> g;
  for (double z : scan_grid(z_lo, z_hi, step)) {
    const double l = lambda_of_zeta(z);
    const auto m = monodromy(q, l);
    g.push_back({z, l, m.F, m.phi1, m.Fminus});
  }
  return g;
}

template <class Pick, class Eval>
std::vector<double> grid_zeros(const std::vector<GridSample>& g, Pick pick, Eval eval, double tol) {
  std::vector<double> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = pick(g[i]);
    if (v == 0.0) {
      out.push_back(g[i].lambda);
      continue;
    }
    if (i + 1 < g.size()) {
      const double w = pick(g[i + 1]);
      if (w != 0.0 && (v > 0.0) != (w > 0.0))
        out.push_back(lambda_of_zeta(refine_sign_change(eval, g[i].zeta, g[i + 1].zeta, v, w, tol)));
    }
  }
  return out;
}

inline bool strictly_interlaced(const std::vector<double>& eta, const std::vector<double>& mu) {
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (i < mu.size() && !(eta[i] < mu[i])) return false;
    if (i > 0 && i - 1 < mu.size() && !(mu[i - 1] < eta[i])) return false;
  }
  return true;
}

}  // namespace detail

/// The k-independent skeleton shared by all fibers: zeros eta_n of F and mu_n
/// of phi(1, .), Hill band edges, antiperiodic eigenvalues, and a cached scan
/// of F, F_- used to certify that each anchor interval holds a single zero.
class SpectralSkeleton {
 public:
  SpectralSkeleton(const PeriodicPotential& q, const SpectrumOptions& opts) : q_(q), opts_(opts) {
    if (!(opts.step > 0.0) || opts.step > 0.02) throw invalid_input("spectrum: scan step must lie in (0, 0.02]");
    if (opts.n_max <= 0 && !std::isfinite(opts.lambda_max)) throw invalid_input("spectrum: lambda_max must be finite");
    even_ = is_even(q_, 1e-12);
    build();
  }

  const PeriodicPotential& potential() const noexcept { return q_; }
  const SpectrumOptions& options() const noexcept { return opts_; }
  /// Number of reported layers; anchors() carries one more.
  int layers() const noexcept { return layers_; }
  bool even() const noexcept { return even_; }
  double floor() const noexcept { return floor_; }
  const std::vector<AnchorLayer>& anchors() const noexcept { return anchors_; }
  const std::vector<AntiperiodicLayer>& antiperiodic() const noexcept { return anti_; }
  const HillBandEdges& hill() const noexcept { return hill_; }
  const std::vector<detail::GridSample>& grid() const noexcept { return grid_; }
  std::vector<double> eta() const {
    std::vector<double> v;
    for (const auto& a : anchors_) v.push_back(a.eta);
    return v;
  }
  std::vector<double> mu() const {
    std::vector<double> v;
    for (const auto& a : anchors_) v.push_back(a.mu);
    return v;
  }

  /// The unique zero of the factor in the decreasing part [lo, eta] or the
  /// increasing part [eta, mu] of the given layer (1-based).
  double anchored_root(Factor fac, double c2, int n, bool increasing, int k = -1) const {
    const auto& L = anchors_.at(static_cast<std::size_t>(n - 1));
    const double a = increasing ? L.eta : L.lo;
    const double b = increasing ? L.mu : L.eta;
    const auto f = [&](double lam) {
      const auto m = monodromy(q_, lam);
      return factor_value(fac, 9.0 * m.F * m.F, m.Fminus, c2);
    };
    const double fa = f(a);
    const double fb = f(b);
    // On [lo, eta] the factor falls from >= 0 to <= 0; on [eta, mu] it rises.
    const double sa = increasing ? -fa : fa;
    const double sb = increasing ? fb : -fb;
    const double slack = opts_.tol_edge;
    auto fail = [&](const std::string& why) {
      return numeric_failure("anchored root: " + why + " (layer " + std::to_string(n) + ")", k, n);
    };
    if (sa < -slack || sb < -slack) throw fail("endpoint signs violate interlacing");
    certify_single_crossing(fac, c2, a, b, fa, fb, k, n);

    // The factor is <= 0 at eta and >= 0 at the far end. Walk away from eta and
    // take the first sign change: when the far end is itself a zero (a gap
    // edge meeting a Dirichlet eigenvalue), an interior crossing still wins.
    const double eta = L.eta;
    const double f_eta = increasing ? fa : fb;
    if (f_eta >= 0.0) return eta;
    std::vector<std::pair<double, double>> walk;
    if (increasing) {
      for (auto it = grid_after(a); it != grid_.end() && it->lambda < b; ++it)
        walk.emplace_back(it->lambda, factor_value(fac, 9.0 * it->F * it->F, it->Fminus, c2));
      walk.emplace_back(b, fb);
    } else {
      for (auto it = std::make_reverse_iterator(grid_after(b)); it != grid_.rend(); ++it) {
        if (it->lambda >= b) continue;
        if (it->lambda <= a) break;
        walk.emplace_back(it->lambda, factor_value(fac, 9.0 * it->F * it->F, it->Fminus, c2));
      }
      walk.emplace_back(a, fa);
    }
    constexpr double floor_value = 1e-12;
    auto solve = [&](double x_neg, double v_neg, double x_pos, double v_pos) {
      if (x_neg < x_pos)
        return lambda_of_zeta(
            refine_sign_change(f, zeta_of_lambda(x_neg), zeta_of_lambda(x_pos), v_neg, v_pos, opts_.tol_root));
      return lambda_of_zeta(
          refine_sign_change(f, zeta_of_lambda(x_pos), zeta_of_lambda(x_neg), v_pos, v_neg, opts_.tol_root));
    };
    double prev_x = eta, prev_v = f_eta;
    for (const auto& [x, v] : walk) {
      if (v > floor_value) return prev_v >= 0.0 ? prev_x : solve(prev_x, prev_v, x, v);
      if (&x != &walk.back().first) {
        prev_x = x;
        prev_v = v;
      }
    }
    // The far end is a zero within slack. A gap narrower than the grid may
    // still hold the crossing just inside it: probe towards the far end.
    const double far = increasing ? b : a;
    const double resolution = 10.0 * opts_.tol_root * (1.0 + std::abs(far));
    for (double d = 0.5 * std::abs(far - prev_x); d > resolution; d *= 0.5) {
      const double x = increasing ? far - d : far + d;
      const double v = f(x);
      if (v > floor_value) return solve(prev_x, prev_v, x, v);
      if (v <= 0.0) {
        prev_x = x;
        prev_v = v;
      }
    }
    return far;
  }

 private:
  // First grid sample strictly above lam.
  std::vector<detail::GridSample>::const_iterator grid_after(double lam) const {
    return std::upper_bound(grid_.begin(), grid_.end(), lam,
                            [](double x, const detail::GridSample& s) { return x < s.lambda; });
  }

  void certify_single_crossing(Factor fac, double c2, double a, double b, double fa, double fb, int k,
                               int n) const {
    constexpr double floor_value = 1e-12;
    int changes = 0;
    double prev = std::abs(fa) > floor_value ? fa : 0.0;
    auto visit = [&](double v) {
      if (std::abs(v) <= floor_value) return;
      if (prev != 0.0 && (prev > 0.0) != (v > 0.0)) ++changes;
      prev = v;
    };
    for (auto it = grid_after(a); it != grid_.end() && it->lambda < b; ++it)
      visit(factor_value(fac, 9.0 * it->F * it->F, it->Fminus, c2));
    visit(fb);
    if (changes > 1)
      throw numeric_failure("anchored root: " + std::to_string(changes) + " sign changes in one anchor interval", k,
                            n);
  }

  void build() {
    HillOptions ho{opts_.tol_root, opts_.tol_tang, opts_.step};
    const double pi = std::numbers::pi;
    double z_end = opts_.n_max > 0 ? pi * (opts_.n_max + 2) + 1.0
                                   : std::max(zeta_of_lambda(opts_.lambda_max), 0.0) + 2.0 * pi + 1.0;
    for (int attempt = 0; attempt < 32; ++attempt, z_end += 2.0 * pi) {
      hill_ = hill_band_edges(q_, lambda_of_zeta(z_end), ho);
      floor_ = hill_.lambda0_plus - 1.0;
      for (int i = 0; i < 60 && !below_spectrum(floor_); ++i) floor_ -= 1.0 + std::abs(floor_);
      if (!below_spectrum(floor_)) throw numeric_failure("spectrum: no point below the spectrum found");

      const double z_lo = std::min(zeta_of_lambda(floor_), detail::scan_start(q_));
      grid_ = detail::build_grid(q_, z_lo, z_end, opts_.step);
      const auto eta = detail::grid_zeros(
          grid_, [](const detail::GridSample& s) { return s.F; },
          [&](double l) { return monodromy(q_, l).F; }, opts_.tol_root);
      const auto mu = detail::grid_zeros(
          grid_, [](const detail::GridSample& s) { return s.phi1; },
          [&](double l) { return monodromy(q_, l).phi1; }, opts_.tol_root);
      if (!detail::strictly_interlaced(eta, mu))
        throw numeric_failure("spectrum: zeros of F and phi(1, .) do not interlace");

      int L = opts_.n_max;
      if (L <= 0) {
        L = 1;
        for (double m : mu)
          if (m <= opts_.lambda_max) ++L;
      }
      if (static_cast<int>(eta.size()) < L + 2 || static_cast<int>(mu.size()) < L + 1) continue;
      layers_ = L;
      anchors_.clear();
      for (int n = 1; n <= L + 1; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        anchors_.push_back({n, n == 1 ? floor_ : mu[i - 1], eta[i], mu[i]});
      }
      anti_.clear();
      for (int n = 1; n <= L; ++n)
        anti_.push_back({n, anchored_root(Factor::h2, 0.0, n, false), anchored_root(Factor::h1, 0.0, n, false),
                         anchored_root(Factor::h1, 0.0, n, true), anchored_root(Factor::h2, 0.0, n, true)});
      return;
    }
    throw numeric_failure("spectrum: could not cover the requested range");
  }

  // All four factors are positive at lam for every k (g_{k,2} <= g_{0,2}).
  bool below_spectrum(double lam) const {
    const auto m = monodromy(q_, lam);
    const double x = 9.0 * m.F * m.F;
    return lam < hill_.lambda0_plus && x > g_factor(2, m.Fminus, 1.0) && x > h_factor(2, m.Fminus);
  }

  PeriodicPotential q_;
  SpectrumOptions opts_;
  bool even_ = false;
  int layers_ = 0;
  double floor_ = 0.0;
  HillBandEdges hill_;
  std::vector<AnchorLayer> anchors_;
  std::vector<AntiperiodicLayer> anti_;
  std::vector<detail::GridSample> grid_;
};

/// lambda_{nu,2n-2}^{k,+} and lambda_{nu,2n}^{k,-} found in layer n.
struct PeriodicLayer {
  int n;
  double lam2_plus_prev;   // lambda_{2,2n-2}^{k,+}
  double lam1_plus_prev;   // lambda_{1,2n-2}^{k,+}
  double lam1_minus_next;  // lambda_{1,2n}^{k,-}
  double lam2_minus_next;  // lambda_{2,2n}^{k,-}
  bool operator==(const PeriodicLayer&) const = default;
};

/// Real zeros of rho_k in the closed interval kappa_n.
struct ResonanceLayer {
  int n;
  std::vector<double> zeros;  // sorted
  std::optional<double> minus() const { return zeros.empty() ? std::nullopt : std::optional(zeros.front()); }
  std::optional<double> plus() const { return zeros.empty() ? std::nullopt : std::optional(zeros.back()); }
  bool operator==(const ResonanceLayer&) const = default;
};

struct BandEdge {
  double value;
  EigenKind source;
  bool operator==(const BandEdge&) const = default;
};

/// S_{nu,n}^k = [E_{nu,n-1}^{k,+}, E_{nu,n}^{k,-}].
struct Band {
  int nu;
  int n;
  int k;
  BandEdge lo;
  BandEdge hi;
  bool warning = false;  // v_k vanished within tol at an edge test point
  bool operator==(const Band&) const = default;
};

enum class GapKind { periodic, antiperiodic, resonance, p_mix, r_mix, empty };

constexpr std::string_view to_string(GapKind g) {
  switch (g) {
    case GapKind::periodic: return "periodic";
    case GapKind::antiperiodic: return "antiperiodic";
    case GapKind::resonance: return "resonance";
    case GapKind::p_mix: return "p-mix";
    case GapKind::r_mix: return "r-mix";
    case GapKind::empty: return "empty";
  }
  return "?";
}

inline GapKind gap_kind_from_string(std::string_view s) {
  for (auto g : {GapKind::periodic, GapKind::antiperiodic, GapKind::resonance, GapKind::p_mix, GapKind::r_mix,
                 GapKind::empty})
    if (to_string(g) == s) return g;
  throw invalid_input("unknown gap kind '" + std::string(s) + "'");
}

/// G_{k,n} (k >= 0) or G_n of the full operator (k = -1), an open interval.
struct Gap {
  int k;
  int n;
  BandEdge lo;
  BandEdge hi;
  GapKind kind;
  bool empty() const noexcept { return !(lo.value < hi.value); }
  bool operator==(const Gap&) const = default;
};

inline GapKind classify_gap(const BandEdge& lo, const BandEdge& hi) {
  if (!(lo.value < hi.value)) return GapKind::empty;
  if (lo.source == hi.source) {
    switch (lo.source) {
      case EigenKind::periodic: return GapKind::periodic;
      case EigenKind::antiperiodic: return GapKind::antiperiodic;
      case EigenKind::resonance: return GapKind::resonance;
      default: break;
    }
  }
  auto has = [&](EigenKind e) { return lo.source == e || hi.source == e; };
  if (has(EigenKind::antiperiodic) && has(EigenKind::periodic)) return GapKind::p_mix;
  if (has(EigenKind::antiperiodic) && has(EigenKind::resonance)) return GapKind::r_mix;
  throw numeric_failure("gap with a periodic and a resonance edge");
}

struct MultiplicityPiece {
  double lo;
  double hi;
  int multiplicity;
  bool operator==(const MultiplicityPiece&) const = default;
};

using MultiplicityMap = std::vector<MultiplicityPiece>;

/// Everything known about the fiber operator H_k.
struct FiberReport {
  int N = 1;
  int k = 0;
  std::vector<PeriodicLayer> periodic_layers;
  std::vector<ResonanceLayer> resonance_layers;
  std::vector<LabeledEigenvalue> periodic;
  std::vector<LabeledEigenvalue> resonances;
  std::vector<Band> bands;
  MultiplicityMap multiplicity;
  std::vector<Gap> gaps;
  std::vector<std::string> warnings;

  TubeAngle angle() const { return TubeAngle(N, k); }
  const Band& band(int nu, int n) const {
    for (const auto& b : bands)
      if (b.nu == nu && b.n == n) return b;
    throw invalid_input("band S_{" + std::to_string(nu) + "," + std::to_string(n) + "} not computed");
  }
  const Gap& gap(int n) const {
    for (const auto& g : gaps)
      if (g.n == n) return g;
    throw invalid_input("gap " + std::to_string(n) + " not computed");
  }
  /// E_{nu,p}^{k,sign}: the upper edge of S_{nu,p} (minus) or the lower edge of S_{nu,p+1} (plus).
  const BandEdge& edge(int nu, int p, int sign) const { return sign < 0 ? band(nu, p).hi : band(nu, p + 1).lo; }
  std::vector<Interval> band_union() const {
    std::vector<Interval> xs;
    for (const auto& b : bands) xs.push_back({b.lo.value, b.hi.value});
    return interval_union(std::move(xs));
  }
  bool operator==(const FiberReport&) const = default;
};

namespace detail {

inline LabeledEigenvalue label(double value, EigenKind kind, int nu, int n, int sign, int k) {
  LabeledEigenvalue e;
  e.value = value;
  e.kind = kind;
  e.nu = nu;
  e.n = n;
  e.sign = sign;
  e.k = k;
  return e;
}

inline void sort_by_value(std::vector<LabeledEigenvalue>& xs) {
  std::stable_sort(xs.begin(), xs.end(),
                   [](const LabeledEigenvalue& a, const LabeledEigenvalue& b) { return a.value < b.value; });
}

}  // namespace detail

inline std::vector<PeriodicLayer> periodic_layers(const SpectralSkeleton& sk, const TubeAngle& a) {
  std::vector<PeriodicLayer> out;
  const double c2 = a.c2();
  for (int n = 1; n <= sk.layers() + 1; ++n) {
    out.push_back({n, sk.anchored_root(Factor::g2, c2, n, false, a.k()),
                   sk.anchored_root(Factor::g1, c2, n, false, a.k()), sk.anchored_root(Factor::g1, c2, n, true, a.k()),
                   sk.anchored_root(Factor::g2, c2, n, true, a.k())});
  }
  return out;
}

/// Periodic eigenvalues lambda_{nu,2n}^{k,+-}, sorted, for all computed layers.
inline std::vector<LabeledEigenvalue> periodic_eigenvalues(const std::vector<PeriodicLayer>& layers,
                                                           const TubeAngle& a) {
  std::vector<LabeledEigenvalue> out;
  for (const auto& p : layers) {
    out.push_back(detail::label(p.lam2_plus_prev, EigenKind::periodic, 2, 2 * p.n - 2, +1, a.k()));
    out.push_back(detail::label(p.lam1_plus_prev, EigenKind::periodic, 1, 2 * p.n - 2, +1, a.k()));
    out.push_back(detail::label(p.lam1_minus_next, EigenKind::periodic, 1, 2 * p.n, -1, a.k()));
    out.push_back(detail::label(p.lam2_minus_next, EigenKind::periodic, 2, 2 * p.n, -1, a.k()));
  }
  detail::sort_by_value(out);
  return out;
}

inline std::vector<LabeledEigenvalue> periodic_eigenvalues(const SpectralSkeleton& sk, const TubeAngle& a) {
  return periodic_eigenvalues(periodic_layers(sk, a), a);
}

/// Antiperiodic eigenvalues lambda_{nu,2n-1}^{0,+-}, sorted.
inline std::vector<LabeledEigenvalue> antiperiodic_eigenvalues(const SpectralSkeleton& sk) {
  std::vector<LabeledEigenvalue> out;
  for (const auto& l : sk.antiperiodic()) {
    const int p = 2 * l.n - 1;
    out.push_back(detail::label(l.lam2_minus, EigenKind::antiperiodic, 2, p, -1, 0));
    out.push_back(detail::label(l.lam1_minus, EigenKind::antiperiodic, 1, p, -1, 0));
    out.push_back(detail::label(l.lam1_plus, EigenKind::antiperiodic, 1, p, +1, 0));
    out.push_back(detail::label(l.lam2_plus, EigenKind::antiperiodic, 2, p, +1, 0));
  }
  detail::sort_by_value(out);
  return out;
}

/// kappa_n = (lambda_{1,2n-1}^{0,-}, lambda_{1,2n-1}^{0,+}).
inline std::vector<Interval> kappa_intervals(const SpectralSkeleton& sk) {
  std::vector<Interval> out;
  for (const auto& l : sk.antiperiodic()) out.push_back({l.lam1_minus, l.lam1_plus});
  return out;
}

/// Real zeros of rho_k grouped by the interval kappa_n holding them.
///
/// For k = 0 the zeros are eta_n (rho_0 = 9F^2). For k = N/2 rho = F_-^2 and
/// its zeros, which never become band edges, are reported as a single group
/// with n = 0.
inline std::vector<ResonanceLayer> resonance_layers(const SpectralSkeleton& sk, const TubeAngle& a) {
  std::vector<ResonanceLayer> out;
  const auto& q = sk.potential();
  const auto& opts = sk.options();
  if (a.is_zero()) {
    for (const auto& l : sk.anchors())
      if (l.n <= sk.layers()) out.push_back({l.n, {l.eta, l.eta}});
    return out;
  }
  if (a.is_half()) {
    if (sk.even()) return out;
    const double top = sk.anchors().at(static_cast<std::size_t>(sk.layers() - 1)).mu;
    std::vector<detail::GridSample> g;
    for (const auto& s : sk.grid())
      if (s.lambda <= top) g.push_back(s);
    auto zs = detail::grid_zeros(
        g, [](const detail::GridSample& s) { return s.Fminus; },
        [&](double l) { return monodromy(q, l).Fminus; }, opts.tol_root);
    out.push_back({0, std::move(zs)});
    return out;
  }
  const auto rho = [&](double l) { return evaluate(monodromy(q, l), a).rho; };
  for (const auto& l : sk.antiperiodic()) {
    ResonanceLayer r{l.n, {}};
    const double za = zeta_of_lambda(l.lam1_minus);
    const double zb = zeta_of_lambda(l.lam1_plus);
    if (zb > za) {
      RootOptions ro;
      ro.tol = opts.tol_root;
      ro.tol_tang = opts.tol_tang;
      ro.step = std::min({opts.step, std::asin(a.s() / 3.0) / 2.0, (zb - za) / 8.0});
      int total = 0;
      for (const auto& root : real_roots(rho, Bracket{za, zb, std::nullopt}, ro)) {
        r.zeros.push_back(root.lambda);
        total += root.multiplicity;
      }
      // rho_k = v_k^2 >= 0 at the ends of kappa_n; strictly positive ends force an even count.
      const bool open_ends = rho(l.lam1_minus) > 1e-14 && rho(l.lam1_plus) > 1e-14;
      if (open_ends && total % 2 != 0)
        throw numeric_failure("resonances: odd number of zeros of rho_k in kappa_n", a.k(), l.n);
    } else if (std::abs(rho(l.lam1_minus)) <= opts.tol_edge) {
      r.zeros = {l.lam1_minus, l.lam1_minus};
    }
    std::sort(r.zeros.begin(), r.zeros.end());
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<LabeledEigenvalue> resonance_list(const std::vector<ResonanceLayer>& layers, const TubeAngle& a) {
  std::vector<LabeledEigenvalue> out;
  for (const auto& r : layers) {
    for (std::size_t i = 0; i < r.zeros.size(); ++i) {
      // r_{k,n}^- and r_{k,n}^+ are the outermost zeros; interior ones get sign 0.
      int sign = 0;
      if (r.n > 0 && i == 0) sign = -1;
      else if (r.n > 0 && i + 1 == r.zeros.size()) sign = +1;
      out.push_back(detail::label(r.zeros[i], EigenKind::resonance, 0, r.n, sign, a.k()));
    }
  }
  detail::sort_by_value(out);
  return out;
}

namespace detail {

struct EdgeChoice {
  BandEdge edge;
  bool warning;
};

/// E_{1,2n-1}^{k,sign}: the antiperiodic eigenvalue when v_k >= 0 there, else
/// the outermost resonance of kappa_n on that side.
inline EdgeChoice first_branch_edge(const SpectralSkeleton& sk, const TubeAngle& a, const AntiperiodicLayer& l,
                                    const ResonanceLayer& r, int sign) {
  const double lam0 = sign < 0 ? l.lam1_minus : l.lam1_plus;
  if (a.is_half()) return {{lam0, EigenKind::antiperiodic}, false};
  const auto m = monodromy(sk.potential(), lam0);
  const double v = std::abs(m.Fminus) - a.c2();
  const bool warn = std::abs(v) <= sk.options().tol_edge;
  if (v >= 0.0) return {{lam0, EigenKind::antiperiodic}, warn};
  const auto res = sign < 0 ? r.minus() : r.plus();
  if (!res) throw numeric_failure("band edges: v_k < 0 but no resonance in kappa_n", a.k(), l.n);
  return {{*res, EigenKind::resonance}, warn};
}

}  // namespace detail

/// Bands S_{nu,n}^k for n = 1 .. 2 layers with attributed edges.
inline std::vector<Band> assemble_bands(const SpectralSkeleton& sk, const TubeAngle& a,
                                        const std::vector<PeriodicLayer>& per,
                                        const std::vector<ResonanceLayer>& res) {
  std::vector<Band> out;
  const int k = a.k();
  for (int n = 1; n <= sk.layers(); ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    const auto& l = sk.antiperiodic()[i];
    const auto& p = per[i];
    const ResonanceLayer none{n, {}};
    const auto& r = (a.is_half() || res.empty()) ? none : res[i];
    const auto lo = detail::first_branch_edge(sk, a, l, r, -1);
    const auto hi = detail::first_branch_edge(sk, a, l, r, +1);
    const int odd = 2 * n - 1;
    out.push_back({1, odd, k, {p.lam1_plus_prev, EigenKind::periodic}, lo.edge, lo.warning});
    out.push_back({2, odd, k, {p.lam2_plus_prev, EigenKind::periodic}, {l.lam2_minus, EigenKind::antiperiodic}});
    out.push_back({1, odd + 1, k, hi.edge, {p.lam1_minus_next, EigenKind::periodic}, hi.warning});
    out.push_back({2, odd + 1, k, {l.lam2_plus, EigenKind::antiperiodic}, {p.lam2_minus_next, EigenKind::periodic}});
  }
  std::sort(out.begin(), out.end(), [](const Band& x, const Band& y) {
    return std::pair(x.n, x.nu) < std::pair(y.n, y.nu);
  });
  return out;
}

/// Piecewise multiplicity over the band union: 4 on overlaps S_{1,n} and S_{2,n}
/// and on the resonance pockets kappa_{k,n}^{+-}, 2 elsewhere. The overlap
/// verdicts are cross-checked against the sign of u_k at the antiperiodic edges.
inline MultiplicityMap multiplicity_map(const SpectralSkeleton& sk, const TubeAngle& a, const std::vector<Band>& bands) {
  std::vector<Interval> pockets;
  std::vector<double> cuts;
  for (const auto& b : bands) {
    cuts.push_back(b.lo.value);
    cuts.push_back(b.hi.value);
  }
  for (const auto& l : sk.antiperiodic()) {
    for (const auto& b : bands) {
      if (b.nu != 1) continue;
      if (b.n == 2 * l.n - 1 && b.hi.source == EigenKind::resonance) pockets.push_back({l.lam1_minus, b.hi.value});
      if (b.n == 2 * l.n && b.lo.source == EigenKind::resonance) pockets.push_back({b.lo.value, l.lam1_plus});
    }
  }
  for (const auto& p : pockets) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  // Edges that coincide analytically (k = 0 with F_- = 0, closed gaps) come
  // out of independent root solves a few ulps apart; slivers below root
  // precision are not resolved.
  std::sort(cuts.begin(), cuts.end());
  const double merge = 10.0 * sk.options().tol_root;
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double x, double y) { return y - x <= merge * (1.0 + std::abs(y)); }),
             cuts.end());

  MultiplicityMap out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    int count = 0;
    for (const auto& b : bands)
      if (b.lo.value <= mid && mid <= b.hi.value) ++count;
    for (const auto& p : pockets)
      if (p.lo < mid && mid < p.hi) ++count;
    if (count == 0) continue;
    if (count > 2) throw numeric_failure("multiplicity: more than two branches cover one point", a.k());
    const int mult = 2 * count;
    if (!out.empty() && out.back().hi == cuts[i] && out.back().multiplicity == mult)
      out.back().hi = cuts[i + 1];
    else
      out.push_back({cuts[i], cuts[i + 1], mult});
  }

  // u_k(E_{2,p}^-) < 0 iff E_{2,p}^- > E_{1,p-1}^+, and u_k(E_{2,p}^+) < 0 iff E_{1,p+1}^- > E_{2,p}^+.
  const auto& q = sk.potential();
  const double tol = sk.options().tol_edge;
  auto find = [&](int nu, int n) -> const Band& {
    for (const auto& b : bands)
      if (b.nu == nu && b.n == n) return b;
    throw invalid_input("missing band");
  };
  for (int n = 1; n <= sk.layers(); ++n) {
    const int p = 2 * n - 1;
    const double e2m = find(2, p).hi.value;
    const double e1prev = find(1, p).lo.value;
    const double e2p = find(2, p + 1).lo.value;
    const double e1next = find(1, p + 1).hi.value;
    const auto test = [&](double at, double lhs, double rhs) {
      const double u = std::abs(monodromy(q, at).Fminus) - a.s2();
      if (std::abs(u) <= tol || std::abs(lhs - rhs) <= tol * (1.0 + std::abs(lhs))) return;
      if ((lhs > rhs) != (u < 0.0))
        throw numeric_failure("multiplicity: u_k sign test contradicts band overlap", a.k(), n);
    };
    test(e2m, e2m, e1prev);
    test(e2p, e1next, e2p);
  }
  return out;
}

/// G_{k,0}, then G_{k,4n-3}, G_{k,4n-2}, G_{k,4n-1}, G_{k,4n} per layer.
inline std::vector<Gap> fiber_gaps(const SpectralSkeleton& sk, const TubeAngle& a, const std::vector<Band>& bands,
                                   const std::vector<PeriodicLayer>& per) {
  auto find = [&](int nu, int n) -> const Band& {
    for (const auto& b : bands)
      if (b.nu == nu && b.n == n) return b;
    throw invalid_input("missing band");
  };
  auto make = [&](int index, BandEdge lo, BandEdge hi) { return Gap{a.k(), index, lo, hi, classify_gap(lo, hi)}; };
  std::vector<Gap> out;
  const double inf = std::numeric_limits<double>::infinity();
  {
    const BandEdge top = find(2, 1).lo;
    out.push_back(Gap{a.k(), 0, {-inf, EigenKind::periodic}, top, GapKind::periodic});
  }
  for (int n = 1; n <= sk.layers(); ++n) {
    const int p = 2 * n - 1;
    out.push_back(make(4 * n - 3, find(2, p).hi, find(1, p).lo));
    out.push_back(make(4 * n - 2, find(1, p).hi, find(1, p + 1).lo));
    out.push_back(make(4 * n - 1, find(1, p + 1).hi, find(2, p + 1).lo));
    const BandEdge next{per[static_cast<std::size_t>(n)].lam2_plus_prev, EigenKind::periodic};
    out.push_back(make(4 * n, find(2, p + 1).hi, next));
  }
  return out;
}

inline FiberReport analyze_fiber(const SpectralSkeleton& sk, const TubeAngle& a) {
  FiberReport r;
  r.N = a.N();
  r.k = a.k();
  r.periodic_layers = periodic_layers(sk, a);
  r.resonance_layers = resonance_layers(sk, a);
  r.periodic = periodic_eigenvalues(r.periodic_layers, a);
  r.resonances = resonance_list(r.resonance_layers, a);
  r.bands = assemble_bands(sk, a, r.periodic_layers, r.resonance_layers);
  for (const auto& b : r.bands)
    if (b.warning)
      r.warnings.push_back("k=" + std::to_string(a.k()) + " band S_{" + std::to_string(b.nu) + "," +
                           std::to_string(b.n) + "}: v_k vanishes at the edge test point");
  r.multiplicity = multiplicity_map(sk, a, r.bands);
  r.gaps = fiber_gaps(sk, a, r.bands, r.periodic_layers);
  return r;
}

/// Leading-order prediction (pi n)^2 + q0 -+ sqrt((2/3) q_sn^2 + q_cn^2) for E_{2,2n}^{+-}.
inline std::pair<double, double> asymptotic_edges(const PeriodicPotential& q, int n) {
  if (n < 1) throw invalid_input("asymptotic_edges: n must be >= 1");
  const auto c = fourier_coeffs(q, n);
  const double base = std::numbers::pi * n * std::numbers::pi * n + c.q0;
  const double w = std::sqrt(2.0 / 3.0 * c.qs * c.qs + c.qc * c.qc);
  return {base - w, base + w};
}

struct AsymptoticRow {
  int n;
  double computed_lo;
  double computed_hi;
  double predicted_lo;
  double predicted_hi;
  bool operator==(const AsymptoticRow&) const = default;
};

struct ConsistencyCheck {
  std::string name;
  bool passed;
  std::string detail;
  bool operator==(const ConsistencyCheck&) const = default;
};

struct SpectrumReport {
  int N = 1;
  SpectrumOptions options;
  int layers = 0;
  bool even = false;
  bool odd_n_intersection = false;  // G_{4n-3}, G_{4n-1} from plain intersection
  HillBandEdges hill;
  std::vector<LabeledEigenvalue> dirichlet;  // flat bands of every H_k
  std::vector<LabeledEigenvalue> lyapunov_zeros;
  std::vector<LabeledEigenvalue> antiperiodic;
  std::vector<Interval> kappa;
  std::vector<FiberReport> fibers;  // k = 0 .. floor(N/2)
  std::vector<Gap> gaps;            // G_n of the full operator
  std::vector<AsymptoticRow> asymptotics;
  std::vector<ConsistencyCheck> checks;

  const FiberReport& fiber(int k) const {
    const int kr = std::min(k, N - k);
    for (const auto& f : fibers)
      if (f.k == kr) return f;
    throw invalid_input("fiber " + std::to_string(k) + " not computed");
  }
  const Gap& gap(int n) const {
    for (const auto& g : gaps)
      if (g.n == n) return g;
    throw invalid_input("gap " + std::to_string(n) + " not computed");
  }
  std::vector<Interval> sigma_ac() const {
    std::vector<Interval> xs;
    for (const auto& f : fibers)
      for (const auto& b : f.bands) xs.push_back({b.lo.value, b.hi.value});
    return interval_union(std::move(xs));
  }
};

inline bool operator==(const SpectrumOptions& a, const SpectrumOptions& b) {
  return a.lambda_max == b.lambda_max && a.n_max == b.n_max && a.tol_root == b.tol_root &&
         a.tol_edge == b.tol_edge && a.tol_tang == b.tol_tang && a.step == b.step;
}

inline bool operator==(const SpectrumReport& a, const SpectrumReport& b) {
  return a.N == b.N && a.options == b.options && a.layers == b.layers && a.even == b.even &&
         a.odd_n_intersection == b.odd_n_intersection && a.hill == b.hill && a.dirichlet == b.dirichlet &&
         a.lyapunov_zeros == b.lyapunov_zeros && a.antiperiodic == b.antiperiodic && a.kappa == b.kappa &&
         a.fibers == b.fibers && a.gaps == b.gaps && a.asymptotics == b.asymptotics && a.checks == b.checks;
}

namespace detail {

inline std::vector<FiberReport> analyze_fibers(const SpectralSkeleton& sk, int N, const std::vector<int>& ks,
                                               unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<FiberReport> out(ks.size());
  if (threads == 1 || ks.size() < 2) {
    for (std::size_t i = 0; i < ks.size(); ++i) out[i] = analyze_fiber(sk, TubeAngle(N, ks[i]));
    return out;
  }
  // Fibers are independent; results land at fixed slots, so the output does
  // not depend on scheduling.
  for (std::size_t start = 0; start < ks.size(); start += threads) {
    std::vector<std::future<FiberReport>> jobs;
    for (std::size_t i = start; i < std::min(ks.size(), start + threads); ++i)
      jobs.push_back(std::async(std::launch::async, [&sk, N, k = ks[i]] { return analyze_fiber(sk, TubeAngle(N, k)); }));
    for (std::size_t j = 0; j < jobs.size(); ++j) out[start + j] = jobs[j].get();
  }
  return out;
}

inline bool near(double x, double y, double tol) {
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= tol * (1.0 + std::abs(x));
}

}  // namespace detail

inline std::vector<FiberReport> analyze_fibers(const SpectralSkeleton& sk, int N, const std::vector<int>& ks) {
  return detail::analyze_fibers(sk, N, ks, sk.options().threads);
}

/// Fibers k = 0 .. floor(N/2), G_n as intersections over k, and the
/// consistency checks tying them to the Hill operator.
inline SpectrumReport full_spectrum(const PeriodicPotential& q, int N, const SpectrumOptions& opts = {}) {
  if (N < 1) throw invalid_input("full_spectrum: N must be >= 1");
  const SpectralSkeleton sk(q, opts);
  SpectrumReport rep;
  rep.N = N;
  rep.options = opts;
  rep.layers = sk.layers();
  rep.even = sk.even();
  rep.odd_n_intersection = N % 2 != 0;
  rep.hill = sk.hill();
  for (const auto& l : sk.anchors()) {
    if (l.n > sk.layers()) break;
    rep.dirichlet.push_back(detail::label(l.mu, EigenKind::dirichlet, 0, l.n, 0, -1));
    rep.lyapunov_zeros.push_back(detail::label(l.eta, EigenKind::lyapunov_zero, 0, l.n, 0, -1));
  }
  rep.antiperiodic = antiperiodic_eigenvalues(sk);
  rep.kappa = kappa_intervals(sk);
  std::vector<int> ks;
  for (int k = 0; 2 * k <= N; ++k) ks.push_back(k);
  rep.fibers = analyze_fibers(sk, N, ks);

  const double tol = opts.tol_edge;
  const std::size_t count = rep.fibers.front().gaps.size();
  for (std::size_t i = 0; i < count; ++i) {
    Gap g = rep.fibers.front().gaps[i];
    for (const auto& f : rep.fibers) {
      const Gap& h = f.gaps[i];
      if (h.lo.value > g.lo.value) g.lo = h.lo;
      if (h.hi.value < g.hi.value) g.hi = h.hi;
    }
    g.k = -1;
    g.kind = g.n == 0 ? GapKind::periodic : classify_gap(g.lo, g.hi);
    rep.gaps.push_back(g);
  }

  // Closed forms: G_{4n} = G_{0,4n}; for even N also G_{4n-3}, G_{4n-1} = G_{N/2,.}.
  auto agree = [&](const Gap& full, const Gap& one) {
    if (full.empty() || one.empty())
      return full.empty() == one.empty() || detail::near(one.lo.value, one.hi.value, tol) ||
             detail::near(full.lo.value, full.hi.value, tol);
    return detail::near(full.lo.value, one.lo.value, tol) && detail::near(full.hi.value, one.hi.value, tol);
  };
  for (const auto& g : rep.gaps) {
    if (g.n == 0) continue;
    const int n = (g.n + 3) / 4;
    if (g.n % 4 == 0 && !agree(g, rep.fibers.front().gap(g.n)))
      throw numeric_failure("full spectrum: G_{4n} differs from G_{0,4n}", 0, n);
    if (N % 2 == 0 && (g.n % 4 == 1 || g.n % 4 == 3) && !agree(g, rep.fibers.back().gap(g.n)))
      throw numeric_failure("full spectrum: G_n differs from the k = N/2 gap", N / 2, n);
  }

  {
    // Hill gaps sit inside G_{4n}; eta_n lies in the closure of G_{4n-2}.
    bool ok = rep.hill.lambda0_plus <= rep.gap(0).hi.value + tol * (1.0 + std::abs(rep.hill.lambda0_plus));
    std::string detail = ok ? "" : "lambda_0^+ above G_0";
    for (const auto& hg : rep.hill.gaps) {
      if (hg.degenerate || hg.n >= sk.layers() + 1) continue;
      const Gap& g = rep.gap(4 * hg.n);
      // Edges of a nearly closed gap are only determined to edge_uncertainty.
      const auto slack = [&](double x, double y) {
        return tol * (1.0 + std::abs(x)) + edge_uncertainty(q, x) + edge_uncertainty(q, y);
      };
      const bool inside = g.lo.value <= hg.minus + slack(hg.minus, g.lo.value) &&
                          hg.plus <= g.hi.value + slack(hg.plus, g.hi.value);
      if (!inside && ok) detail = "Hill gap " + std::to_string(hg.n) + " not inside G_" + std::to_string(4 * hg.n);
      ok = ok && inside;
    }
    rep.checks.push_back({"hill-gaps-inside-periodic-gaps", ok, detail});
  }
  {
    bool ok = true;
    std::string detail;
    for (const auto& l : sk.anchors()) {
      if (l.n > sk.layers()) break;
      const Gap& g = rep.gap(4 * l.n - 2);
      const bool inside = g.lo.value <= l.eta + tol * (1.0 + l.eta) && l.eta <= g.hi.value + tol * (1.0 + l.eta);
      if (!inside && ok) detail = "eta_" + std::to_string(l.n) + " outside closure of G_" + std::to_string(4 * l.n - 2);
      ok = ok && inside;
    }
    rep.checks.push_back({"eta-in-closure-of-resonance-gaps", ok, detail});
  }

  const auto& f0 = rep.fibers.front();
  for (int n = 1; n <= sk.layers(); ++n) {
    const auto pred = asymptotic_edges(q, n);
    const Gap& g = f0.gap(4 * n);
    rep.asymptotics.push_back({n, g.lo.value, g.hi.value, pred.first, pred.second});
  }
  return rep;
}

/// Convenience forms covering [., lambda_max]; entries above lambda_max are dropped.
inline std::vector<LabeledEigenvalue> periodic_eigenvalues(const PeriodicPotential& q, const TubeAngle& a,
                                                           double lambda_max) {
  SpectrumOptions o;
  o.lambda_max = lambda_max;
  auto v = periodic_eigenvalues(SpectralSkeleton(q, o), a);
  std::erase_if(v, [&](const LabeledEigenvalue& e) { return e.value > lambda_max; });
  return v;
}

inline std::vector<LabeledEigenvalue> antiperiodic_eigenvalues(const PeriodicPotential& q, double lambda_max) {
  SpectrumOptions o;
  o.lambda_max = lambda_max;
  auto v = antiperiodic_eigenvalues(SpectralSkeleton(q, o));
  std::erase_if(v, [&](const LabeledEigenvalue& e) { return e.value > lambda_max; });
  return v;
}

inline std::vector<LabeledEigenvalue> resonances(const PeriodicPotential& q, const TubeAngle& a, double lambda_max) {
  SpectrumOptions o;
  o.lambda_max = lambda_max;
  auto v = resonance_list(resonance_layers(SpectralSkeleton(q, o), a), a);
  std::erase_if(v, [&](const LabeledEigenvalue& e) { return e.value > lambda_max; });
  return v;
}

inline FiberReport analyze_fiber(const PeriodicPotential& q, const TubeAngle& a, double lambda_max) {
  SpectrumOptions o;
  o.lambda_max = lambda_max;
  return analyze_fiber(SpectralSkeleton(q, o), a);
}

}  // namespace armchair

#endif  // ARMCHAIR_SPECTRUM_HPP
