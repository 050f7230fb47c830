#ifndef ARMCHAIR_LYAPUNOV_HPP
#define ARMCHAIR_LYAPUNOV_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <type_traits>

#include "armchair/error.hpp"
#include "armchair/hill.hpp"

namespace armchair {

/// Quasi-momentum index k of the tube with circumference index N, with
/// s_k = sin(pi k/N), c_k = cos(pi k/N).
///
/// The trigonometric values are computed from min(k, N - k) so that k and
/// N - k carry bit-identical s_k and c_k^2; c_k keeps its sign.
class TubeAngle {
 public:
  TubeAngle(int N, int k) : N_(N), k_(k) {
    if (N < 1) throw invalid_input("TubeAngle: N must be >= 1");
    if (k < 0 || k >= N) throw invalid_input("TubeAngle: k must lie in 0..N-1");
    const int kr = std::min(k, N - k);
    const double x = std::numbers::pi * kr / N;
    s_ = kr == 0 ? 0.0 : std::sin(x);
    c_ = 2 * kr == N ? 0.0 : std::cos(x);
    if (2 * k > N) c_ = -c_;
  }

  int N() const noexcept { return N_; }
  int k() const noexcept { return k_; }
  double s() const noexcept { return s_; }
  double c() const noexcept { return c_; }
  double s2() const noexcept { return s_ * s_; }
  double c2() const noexcept { return c_ * c_; }
  bool is_zero() const noexcept { return k_ == 0; }
  bool is_half() const noexcept { return 2 * k_ == N_; }

 private:
  int N_;
  int k_;
  double s_;
  double c_;
};

/// Real-axis quantities (defined only for real lambda).
struct RealLyapunov {
  double nine_F2;
  double abs_Fminus;
  double g1, g2;  // g_{k,nu} = 5 + F_-^2 + (-1)^nu 2 sqrt(F_-^2 + 4 c_k^2)
  double h1, h2;  // h_nu = (1 + (-1)^nu |F_-|)^2
  double u;       // |F_-| - s_k^2
  double v;       // |F_-| - c_k^2
  std::optional<double> f;  // s_k^2 (1 - F_-^2 / c_k^2), absent when c_k = 0
};

template <class T>
struct LyapunovData {
  T lambda{};
  T xi{};
  T rho{};
  std::complex<double> Fk1;  // xi + sqrt(rho)
  std::complex<double> Fk2;  // xi - sqrt(rho)
  double s2 = 0.0;
  double c2 = 0.0;
  std::optional<RealLyapunov> real;
};

inline double g_factor(int nu, double Fminus, double c2) {
  const double r = 2.0 * std::sqrt(Fminus * Fminus + 4.0 * c2);
  return 5.0 + Fminus * Fminus + (nu == 1 ? -r : r);
}

inline double h_factor(int nu, double Fminus) {
  const double a = std::abs(Fminus);
  return nu == 1 ? (1.0 - a) * (1.0 - a) : (1.0 + a) * (1.0 + a);
}

template <class T>
LyapunovData<T> evaluate(const MonodromyData<T>& m, const TubeAngle& a) {
  LyapunovData<T> d;
  d.lambda = m.lambda;
  d.s2 = a.s2();
  d.c2 = a.c2();
  const T F2 = m.F * m.F;
  const T Fm2 = m.Fminus * m.Fminus;
  d.xi = (9.0 * F2 - Fm2 - 1.0) / 2.0 - d.s2;
  d.rho = (9.0 * F2 - d.s2) * d.c2 + d.s2 * Fm2;
  const std::complex<double> root = std::sqrt(std::complex<double>(d.rho));
  d.Fk1 = std::complex<double>(d.xi) + root;
  d.Fk2 = std::complex<double>(d.xi) - root;
  if constexpr (std::is_floating_point_v<T>) {
    RealLyapunov r;
    r.nine_F2 = 9.0 * F2;
    r.abs_Fminus = std::abs(m.Fminus);
    r.g1 = g_factor(1, m.Fminus, d.c2);
    r.g2 = g_factor(2, m.Fminus, d.c2);
    r.h1 = h_factor(1, m.Fminus);
    r.h2 = h_factor(2, m.Fminus);
    r.u = r.abs_Fminus - d.s2;
    r.v = r.abs_Fminus - d.c2;
    if (d.c2 != 0.0) r.f = d.s2 * (1.0 - Fm2 / d.c2);
    d.real = r;
  }
  return d;
}

template <class T>
struct Discriminants {
  T Dplus;
  T Dminus;
};

/// D_k^{+-} = 4 (F_{k,1} -+ 1)(F_{k,2} -+ 1).
///
/// On the real axis the factorized forms (9F^2 - g_{k,1})(9F^2 - g_{k,2}) and
/// (9F^2 - h_1)(9F^2 - h_2) are used; off the axis the branch-free expansion
/// 4((xi -+ 1)^2 - rho).
template <class T>
Discriminants<T> discriminants(const LyapunovData<T>& d) {
  if constexpr (std::is_floating_point_v<T>) {
    const auto& r = *d.real;
    return {(r.nine_F2 - r.g1) * (r.nine_F2 - r.g2), (r.nine_F2 - r.h1) * (r.nine_F2 - r.h2)};
  } else {
    return {4.0 * ((d.xi - 1.0) * (d.xi - 1.0) - d.rho), 4.0 * ((d.xi + 1.0) * (d.xi + 1.0) - d.rho)};
  }
}

struct Membership {
  bool in_sigma1;
  bool in_sigma2;
  bool operator==(const Membership&) const = default;
};

/// Whether F_{k,nu}(lambda) lies in [-1, 1], decided from 9F^2, g, h, |F_-|
/// and c_k^2 only. Off the closure of {rho_k > 0} both branches are non-real.
/// Boundary equalities within tol_edge count as membership.
inline Membership membership(const LyapunovData<double>& d, double tol_edge = 1e-9) {
  const auto& r = *d.real;
  if (d.rho < -tol_edge) return {false, false};
  const double x = r.nine_F2;
  const bool below1_1 = x <= r.g1 + tol_edge;
  const bool below1_2 = x <= r.g2 + tol_edge;
  bool above_1, above_2;
  if (d.c2 == 0.0) {
    // c_k = 0: F_{k,nu} + 1 = (9F^2 - h_nu)/2.
    above_1 = x >= r.h1 - tol_edge;
    above_2 = x >= r.h2 - tol_edge;
  } else {
    const bool small_fm = r.abs_Fminus <= d.c2 + tol_edge;
    above_1 = x >= r.h1 - tol_edge || small_fm;
    above_2 = x >= r.h2 - tol_edge || (x <= r.h1 + tol_edge && small_fm);
  }
  return {below1_1 && above_1, below1_2 && above_2};
}

/// Real-axis scalar helpers used by band assembly.
struct RealFactors {
  double nine_F2;
  double Fminus;
};

inline RealFactors real_factors(const PeriodicPotential& q, double lambda) {
  const auto m = monodromy(q, lambda);
  return {9.0 * m.F * m.F, m.Fminus};
}

}  // namespace armchair

#endif  // ARMCHAIR_LYAPUNOV_HPP
