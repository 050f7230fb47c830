// Independent reference computations used by the tests. Nothing here calls
// into the library's monodromy or root finders.
#ifndef ARMCHAIR_TESTS_ORACLES_HPP
#define ARMCHAIR_TESTS_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "armchair/potential.hpp"

namespace oracle {

constexpr double pi = std::numbers::pi;

/// Free tube (q = 0): F = cos z, F_- = 0, so every factor equation becomes
/// 9 cos^2 z = x. Returns all lambda = z^2 with z in [0, z_max], sorted.
inline std::vector<double> free_roots(double x, double z_max) {
  const double r = std::sqrt(x) / 3.0;
  const double w = std::acos(std::clamp(r, -1.0, 1.0));
  std::vector<double> zs;
  for (int n = 0; n * pi <= z_max + pi; ++n)
    for (double z : {w + n * pi, (n + 1) * pi - w})
      if (z >= 0.0 && z <= z_max) zs.push_back(z);
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), zs.end());
  std::vector<double> out;
  for (double z : zs) out.push_back(z * z);
  return out;
}

/// Kronig-Penney: q = w delta(t - a), lambda = z^2 > 0.
inline double delta_F(double lambda, double w) {
  const double z = std::sqrt(lambda);
  return std::cos(z) + w * std::sin(z) / (2.0 * z);
}

inline double delta_Fminus(double lambda, double a, double w) {
  const double z = std::sqrt(lambda);
  return w * std::sin(z * (2.0 * a - 1.0)) / (2.0 * z);
}

/// phi(1, lambda) for q = w delta(t - 1/2): sin z / z + w sin^2(z/2) / z^2.
inline double delta_half_phi1(double z, double w) {
  return std::sin(z) / z + w * std::sin(z / 2.0) * std::sin(z / 2.0) / (z * z);
}

/// Zeros of delta_half_phi1 in lambda up to lambda_max, by bisection in z.
inline std::vector<double> delta_half_dirichlet(double w, double lambda_max) {
  std::vector<double> out;
  const double z_max = std::sqrt(lambda_max);
  const double h = 1e-3;
  for (double z = h; z + h <= z_max + h; z += h) {
    double a = z, b = z + h;
    double fa = delta_half_phi1(a, w), fb = delta_half_phi1(b, w);
    if ((fa > 0) == (fb > 0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = delta_half_phi1(m, w);
      if ((fm > 0) == (fa > 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    const double l = 0.25 * (a + b) * (a + b);
    if (l <= lambda_max) out.push_back(l);
  }
  return out;
}

/// Fundamental matrix [[theta, phi], [theta', phi']] at t = 1 from classical RK4
/// on y'' = (q - lambda) y, with point interactions applied as jumps.
template <class T>
std::array<T, 4> rk4_monodromy(const armchair::PeriodicPotential& q, T lambda, int steps_per_unit = 4000) {
  std::array<T, 4> y{T(1), T(0), T(0), T(1)};  // theta, phi, theta', phi'
  auto rhs = [&](double qv, const std::array<T, 4>& s) {
    return std::array<T, 4>{s[2], s[3], (qv - lambda) * s[0], (qv - lambda) * s[1]};
  };
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& s : q.segments()) cuts.push_back(s.start);
  for (const auto& d : q.deltas()) cuts.push_back(d.position);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double qv = q.value_at(0.5 * (a + b));
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) * steps_per_unit)));
    const double h = (b - a) / n;
    for (int j = 0; j < n; ++j) {
      const auto k1 = rhs(qv, y);
      std::array<T, 4> t;
      for (int c = 0; c < 4; ++c) t[c] = y[c] + 0.5 * h * k1[c];
      const auto k2 = rhs(qv, t);
      for (int c = 0; c < 4; ++c) t[c] = y[c] + 0.5 * h * k2[c];
      const auto k3 = rhs(qv, t);
      for (int c = 0; c < 4; ++c) t[c] = y[c] + h * k3[c];
      const auto k4 = rhs(qv, t);
      for (int c = 0; c < 4; ++c) y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    for (const auto& d : q.deltas())
      if (d.position == b) {
        y[2] += d.weight * y[0];
        y[3] += d.weight * y[1];
      }
  }
  return y;
}

/// Branch values F_{k,1}, F_{k,2} = xi +- sqrt(rho) from F, F_- and the angle.
struct Branches {
  double xi;
  double rho;
  std::complex<double> F1, F2;
};

inline Branches branches(double F, double Fm, double s, double c) {
  const double s2 = s * s, c2 = c * c;
  const double xi = (9.0 * F * F - Fm * Fm - 1.0) / 2.0 - s2;
  const double rho = (9.0 * F * F - s2) * c2 + s2 * Fm * Fm;
  const auto r = std::sqrt(std::complex<double>(rho));
  return {xi, rho, xi + r, xi - r};
}

/// Direct band membership: the branch is real and lies in [-1, 1].
inline bool in_band(std::complex<double> F, double tol = 0.0) {
  return std::abs(F.imag()) <= tol && F.real() >= -1.0 - tol && F.real() <= 1.0 + tol;
}

/// Piecewise-constant potential with `segments` random cells and optional deltas.
inline armchair::PeriodicPotential random_potential(std::mt19937& rng, int segments = 4, int deltas = 0,
                                                    double amplitude = 3.0, double delta_weight = 2.0) {
  std::uniform_real_distribution<double> pos(0.02, 0.98), val(-amplitude, amplitude), wt(-delta_weight, delta_weight);
  std::vector<double> cuts;
  while (static_cast<int>(cuts.size()) < segments - 1) {
    const double c = pos(rng);
    if (std::none_of(cuts.begin(), cuts.end(), [&](double x) { return std::abs(x - c) < 0.02; })) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<armchair::Segment> segs{{0.0, val(rng)}};
  for (double c : cuts) segs.push_back({c, val(rng)});
  std::vector<double> dpos;
  while (static_cast<int>(dpos.size()) < deltas) {
    const double c = pos(rng);
    if (std::none_of(dpos.begin(), dpos.end(), [&](double x) { return std::abs(x - c) < 0.02; })) dpos.push_back(c);
  }
  std::sort(dpos.begin(), dpos.end());
  std::vector<armchair::Delta> ds;
  for (double p : dpos) ds.push_back({p, wt(rng)});
  return armchair::PeriodicPotential(segs, ds);
}

/// Midpoint samples of f on M equal cells.
template <class Fn>
std::vector<double> midpoint_samples(Fn&& f, int M) {
  std::vector<double> xs(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) xs[static_cast<std::size_t>(i)] = f((i + 0.5) / M);
  return xs;
}

}  // namespace oracle

#endif  // ARMCHAIR_TESTS_ORACLES_HPP
