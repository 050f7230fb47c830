#ifndef ARMCHAIR_HILL_HPP
#define ARMCHAIR_HILL_HPP

#include <cmath>
#include <limits>
#include <complex>
#include <type_traits>
#include <utility>
#include <vector>

#include "armchair/labels.hpp"
#include "armchair/potential.hpp"
#include "armchair/rootfind.hpp"

namespace armchair {

/// Values at x = 1 of the fundamental solutions of -y'' + q y = lambda y with
/// theta(0) = phi'(0) = 1, theta'(0) = phi(0) = 0, and the derived
/// F = (phi1' + theta1)/2, F_- = (phi1' - theta1)/2.
template <class T>
struct MonodromyData {
  T lambda{};
  T theta1{};
  T theta1p{};
  T phi1{};
  T phi1p{};
  T F{};
  T Fminus{};
};

namespace detail {

template <class T>
struct Mat2 {
  T a, b, c, d;  // [[a, b], [c, d]]
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
};

/// cos(k h) and sin(k h)/k for k^2 = mu, plus their mu-derivatives.
template <class T>
struct FreeMotion {
  T C, S, dC, dS;
};

template <class T>
FreeMotion<T> free_motion(T mu, double h) {
  const T x = mu * (h * h);
  FreeMotion<T> r;
  if (std::abs(x) < 1e-2) {
    // Series in x = mu h^2; both functions are entire in mu.
    r.C = T(1) - x / 2.0 + x * x / 24.0 - x * x * x / 720.0 + x * x * x * x / 40320.0;
    r.S = h * (T(1) - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0 + x * x * x * x / 362880.0);
    r.dS = (h * h * h) * (T(-1) / 6.0 + x * (2.0 / 120.0) - x * x * (3.0 / 5040.0) + x * x * x * (4.0 / 362880.0));
  } else {
    if constexpr (std::is_floating_point_v<T>) {
      if (mu > 0.0) {
        const T k = std::sqrt(mu);
        r.C = std::cos(k * h);
        r.S = std::sin(k * h) / k;
      } else {
        const T k = std::sqrt(-mu);
        r.C = std::cosh(k * h);
        r.S = std::sinh(k * h) / k;
      }
    } else {
      const T k = std::sqrt(mu);
      r.C = std::cos(k * h);
      r.S = std::sin(k * h) / k;
    }
    r.dS = (h * r.C - r.S) / (2.0 * mu);
  }
  r.dC = -0.5 * h * r.S;
  return r;
}

template <class T>
MonodromyData<T> pack(T lambda, const Mat2<T>& m) {
  MonodromyData<T> out;
  out.lambda = lambda;
  out.theta1 = m.a;
  out.phi1 = m.b;
  out.theta1p = m.c;
  out.phi1p = m.d;
  out.F = (m.d + m.a) / 2.0;
  out.Fminus = (m.d - m.a) / 2.0;
  return out;
}

}  // namespace detail

/// Period-one monodromy as an exact product of segment transfer matrices and
/// delta jump matrices. T is double or std::complex<double>.
template <class T>
MonodromyData<T> monodromy(const PeriodicPotential& q, T lambda) {
  detail::Mat2<T> m{T(1), T(0), T(0), T(1)};
  for (const auto& st : q.steps()) {
    if (st.length > 0.0) {
      const T mu = lambda - st.value;
      const auto fm = detail::free_motion(mu, st.length);
      m = detail::Mat2<T>{fm.C, fm.S, -mu * fm.S, fm.C} * m;
    }
    if (st.jump != 0.0) {
      m.c += st.jump * m.a;
      m.d += st.jump * m.b;
    }
  }
  return detail::pack(lambda, m);
}

/// Monodromy together with its lambda-derivative (forward accumulation).
template <class T>
std::pair<MonodromyData<T>, MonodromyData<T>> monodromy_with_derivative(const PeriodicPotential& q, T lambda) {
  detail::Mat2<T> m{T(1), T(0), T(0), T(1)};
  detail::Mat2<T> dm{T(0), T(0), T(0), T(0)};
  for (const auto& st : q.steps()) {
    if (st.length > 0.0) {
      const T mu = lambda - st.value;
      const auto fm = detail::free_motion(mu, st.length);
      const detail::Mat2<T> t{fm.C, fm.S, -mu * fm.S, fm.C};
      const detail::Mat2<T> dt{fm.dC, fm.dS, -fm.S - mu * fm.dS, fm.dC};
      dm = dt * m + t * dm;
      m = t * m;
    }
    if (st.jump != 0.0) {
      m.c += st.jump * m.a;
      m.d += st.jump * m.b;
      dm.c += st.jump * dm.a;
      dm.d += st.jump * dm.b;
    }
  }
  return {detail::pack(lambda, m), detail::pack(lambda, dm)};
}

/// Attainable accuracy of a root of 9F^2 - g(lambda) at lambda: the
/// roundoff level of 9F^2 over its slope. Large where two roots nearly merge
/// (gaps narrower than the scan resolution).
inline double edge_uncertainty(const PeriodicPotential& q, double lambda) {
  const auto [m, dm] = monodromy_with_derivative(q, lambda);
  const double noise = 256.0 * std::numeric_limits<double>::epsilon() * (1.0 + 9.0 * m.F * m.F);
  const double slope = std::abs(18.0 * m.F * dm.F);
  return slope > 0.0 ? noise / slope : std::numeric_limits<double>::infinity();
}

struct HillOptions {
  double tol_root = 1e-12;
  double tol_tang = 1e-9;
  double step = 0.02;
};

namespace detail {

/// Sign-change zeros of f on [zeta_lo, zeta_hi], refined.
template <class F>
std::vector<double> scan_zeros(F&& f, double zeta_lo, double zeta_hi, const HillOptions& opts) {
  RootOptions ro;
  ro.tol = opts.tol_root;
  ro.step = opts.step;
  ro.tol_tang = 0.0;  // only simple zeros are expected here
  std::vector<double> out;
  for (const auto& r : real_roots(f, Bracket{zeta_lo, zeta_hi, std::nullopt}, ro)) out.push_back(r.lambda);
  return out;
}

inline double scan_start(const PeriodicPotential& q) { return zeta_of_lambda(q.spectral_lower_bound() - 1.0); }

}  // namespace detail

/// Real zeros mu_n of phi(1, lambda) up to lambda_max (the Dirichlet spectrum).
inline std::vector<LabeledEigenvalue> dirichlet_spectrum(const PeriodicPotential& q, double lambda_max,
                                                         const HillOptions& opts = {}) {
  if (!std::isfinite(lambda_max)) throw invalid_input("dirichlet_spectrum: lambda_max must be finite");
  std::vector<LabeledEigenvalue> out;
  const double lo = detail::scan_start(q);
  const double hi = zeta_of_lambda(lambda_max);
  if (!(hi > lo)) return out;
  const auto zs = detail::scan_zeros([&](double l) { return monodromy(q, l).phi1; }, lo, hi, opts);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    LabeledEigenvalue e;
    e.value = zs[i];
    e.kind = EigenKind::dirichlet;
    e.n = static_cast<int>(i + 1);
    out.push_back(e);
  }
  return out;
}

/// Real zeros eta_n of the Hill discriminant F up to lambda_max.
inline std::vector<LabeledEigenvalue> lyapunov_zeros(const PeriodicPotential& q, double lambda_max,
                                                     const HillOptions& opts = {}) {
  if (!std::isfinite(lambda_max)) throw invalid_input("lyapunov_zeros: lambda_max must be finite");
  std::vector<LabeledEigenvalue> out;
  const double lo = detail::scan_start(q);
  const double hi = zeta_of_lambda(lambda_max);
  if (!(hi > lo)) return out;
  const auto zs = detail::scan_zeros([&](double l) { return monodromy(q, l).F; }, lo, hi, opts);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    LabeledEigenvalue e;
    e.value = zs[i];
    e.kind = EigenKind::lyapunov_zero;
    e.n = static_cast<int>(i + 1);
    out.push_back(e);
  }
  return out;
}

/// Edges of the Hill gap gamma_n = (minus, plus); minus == plus for a closed gap.
struct HillGap {
  int n;
  double minus;
  double plus;
  bool degenerate;
  bool operator==(const HillGap&) const = default;
};

struct HillBandEdges {
  double lambda0_plus;       // bottom of the Hill spectrum, F = 1
  std::vector<HillGap> gaps;  // gaps n = 1, 2, ... with F(edges) = (-1)^n
  bool operator==(const HillBandEdges&) const = default;
};

/// Periodic/antiperiodic Hill eigenvalues up to lambda_max.
///
/// F has exactly one critical point between consecutive zeros eta_n, eta_{n+1};
/// the gap edges are the solutions of (-1)^n F = 1 on either side of it. A
/// maximum of (-1)^n F within tol_tang below 1 is a closed gap.
inline HillBandEdges hill_band_edges(const PeriodicPotential& q, double lambda_max, const HillOptions& opts = {}) {
  if (!std::isfinite(lambda_max)) throw invalid_input("hill_band_edges: lambda_max must be finite");
  // Zeros of F far enough past lambda_max to close the last gap below it.
  const double z_lo = detail::scan_start(q);
  const double z_hi = std::max(zeta_of_lambda(lambda_max), 0.0) + 2.0 * std::numbers::pi;
  const auto eta = detail::scan_zeros([&](double l) { return monodromy(q, l).F; }, z_lo, z_hi, opts);
  if (eta.empty()) throw numeric_failure("hill_band_edges: no zero of F found");

  const auto F = [&](double l) { return monodromy(q, l).F; };
  HillBandEdges out;
  out.lambda0_plus =
      lambda_of_zeta(refine_sign_change([&](double l) { return F(l) - 1.0; }, z_lo, zeta_of_lambda(eta.front()),
                                        F(lambda_of_zeta(z_lo)) - 1.0, -1.0, opts.tol_root));

  for (std::size_t i = 0; i + 1 < eta.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    const double za = zeta_of_lambda(eta[i]);
    const double zb = zeta_of_lambda(eta[i + 1]);
    // The critical point is the unique sign change of F' on (eta_n, eta_{n+1}).
    const auto dF = [&](double l) { return monodromy_with_derivative(q, l).second.F; };
    const double zc = refine_sign_change(dF, za, zb, dF(eta[i]), dF(eta[i + 1]), opts.tol_root);
    const double lc = lambda_of_zeta(zc);
    const double peak = sgn * F(lc) - 1.0;
    HillGap g{n, lc, lc, true};
    if (peak > 0.0) {
      const auto h = [&](double l) { return sgn * F(l) - 1.0; };
      g.minus = lambda_of_zeta(refine_sign_change(h, za, zc, -1.0, peak, opts.tol_root));
      g.plus = lambda_of_zeta(refine_sign_change(h, zc, zb, peak, -1.0, opts.tol_root));
      g.degenerate = false;
    } else if (peak < -opts.tol_tang) {
      throw numeric_failure("hill_band_edges: |F| < 1 at the critical point of gap " + std::to_string(n), -1, n);
    }
    if (g.minus > lambda_max) break;
    out.gaps.push_back(g);
  }
  return out;
}

}  // namespace armchair

#endif  // ARMCHAIR_HILL_HPP
