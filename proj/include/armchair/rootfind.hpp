#ifndef ARMCHAIR_ROOTFIND_HPP
#define ARMCHAIR_ROOTFIND_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "armchair/error.hpp"

namespace armchair {

// All real root work happens in the signed square-root coordinate
// zeta = sign(lambda) sqrt|lambda|, where zeros of the Hill quantities are
// asymptotically uniformly spaced. For lambda >= 0 this is z = sqrt(lambda).
inline double lambda_of_zeta(double zeta) { return zeta * std::abs(zeta); }
inline double zeta_of_lambda(double lambda) {
  return lambda >= 0.0 ? std::sqrt(lambda) : -std::sqrt(-lambda);
}

/// Interval in the zeta coordinate.
struct Bracket {
  double z_lo;
  double z_hi;
  std::optional<int> expected_count;
};

struct RealRoot {
  double lambda;
  double zeta;
  int multiplicity;
};

struct RootOptions {
  double tol = 1e-12;       // |delta zeta| at termination
  double step = 0.02;       // scan step in zeta
  double tol_tang = 1e-9;   // |f| below which a local minimum is a double root
  std::uintmax_t max_iter = 200;
};

/// Refines a sign change of f(lambda) on [za, zb] (zeta coordinates) and
/// returns the root in zeta. fa and fb are f at the endpoints.
template <class F>
double refine_sign_change(F&& f, double za, double zb, double fa, double fb, double tol,
                          std::uintmax_t max_iter = 200) {
  if (fa == 0.0) return za;
  if (fb == 0.0) return zb;
  if ((fa > 0.0) == (fb > 0.0))
    throw numeric_failure("refine_sign_change: no sign change on [" + std::to_string(za) + ", " +
                          std::to_string(zb) + "]");
  auto g = [&](double z) { return f(lambda_of_zeta(z)); };
  auto done = [tol](double a, double b) {
    return std::abs(b - a) <= tol ||
           std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  };
  std::uintmax_t iters = max_iter;
  auto [a, b] = boost::math::tools::toms748_solve(g, za, zb, fa, fb, done, iters);
  if (iters >= max_iter && !done(a, b))
    throw numeric_failure("refine_sign_change: no convergence on [" + std::to_string(za) + ", " +
                          std::to_string(zb) + "]");
  return 0.5 * (a + b);
}

/// Minimizes f(lambda) over [za, zb] in zeta; returns (zeta*, f(zeta*)).
template <class F>
std::pair<double, double> minimize_in_zeta(F&& f, double za, double zb) {
  auto g = [&](double z) { return f(lambda_of_zeta(z)); };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::brent_find_minima(g, za, zb, std::numeric_limits<double>::digits / 2, iters);
  return {r.first, r.second};
}

namespace detail {

inline std::vector<double> scan_grid(double lo, double hi, double step) {
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / step)));
  std::vector<double> z(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    z[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
  return z;
}

}  // namespace detail

/// All roots of a real function of lambda inside a zeta bracket.
///
/// Sign changes on a uniform grid are refined to |delta zeta| < tol; local
/// minima of |f| without a sign change are minimized and reported as double
/// roots when the minimum drops below tol_tang.
template <class F>
std::vector<RealRoot> real_roots(F&& f, const Bracket& bracket, const RootOptions& opts = {}) {
  if (!(bracket.z_lo < bracket.z_hi)) throw invalid_input("real_roots: empty bracket");
  const auto z = detail::scan_grid(bracket.z_lo, bracket.z_hi, opts.step);
  std::vector<double> v(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) v[i] = f(lambda_of_zeta(z[i]));

  std::vector<RealRoot> out;
  auto push = [&](double zr, int mult) { out.push_back({lambda_of_zeta(zr), zr, mult}); };
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (v[i] == 0.0) {
      const bool left = i > 0 && v[i - 1] != 0.0;
      const bool right = i + 1 < z.size() && v[i + 1] != 0.0;
      const bool crossing = left && right && ((v[i - 1] > 0.0) != (v[i + 1] > 0.0));
      push(z[i], (left && right && !crossing) ? 2 : 1);
      continue;
    }
    if (i + 1 < z.size() && v[i + 1] != 0.0 && ((v[i] > 0.0) != (v[i + 1] > 0.0))) {
      push(refine_sign_change(f, z[i], z[i + 1], v[i], v[i + 1], opts.tol, opts.max_iter), 1);
      continue;
    }
    if (i > 0 && i + 1 < z.size() && v[i - 1] != 0.0 && v[i + 1] != 0.0 &&
        (v[i - 1] > 0.0) == (v[i] > 0.0) && (v[i + 1] > 0.0) == (v[i] > 0.0) &&
        std::abs(v[i]) <= std::abs(v[i - 1]) && std::abs(v[i]) <= std::abs(v[i + 1])) {
      auto [zm, fm] = minimize_in_zeta([&](double l) { return std::abs(f(l)); }, z[i - 1], z[i + 1]);
      if (fm < opts.tol_tang) push(zm, 2);
    }
  }
  if (bracket.expected_count) {
    int total = 0;
    for (const auto& r : out) total += r.multiplicity;
    if (total != *bracket.expected_count)
      throw numeric_failure("real_roots: found " + std::to_string(total) + " roots, expected " +
                            std::to_string(*bracket.expected_count) + " on [" + std::to_string(bracket.z_lo) +
                            ", " + std::to_string(bracket.z_hi) + "]");
  }
  return out;
}

/// Disk in the z = sqrt(lambda) plane.
struct Disk {
  std::complex<double> center;
  double radius;
};

struct CountOptions {
  std::size_t initial_samples = 256;
  std::size_t max_samples = std::size_t{1} << 14;
  double integer_window = 0.25;
};

namespace detail {

/// Winding number of g(z) along z = center + r e^{it} with m samples; nullopt
/// when a sample value is (numerically) zero.
template <class G>
std::optional<double> winding(G&& g, std::complex<double> center, double r, std::size_t m) {
  std::vector<std::complex<double>> vals(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    vals[j] = g(center + std::polar(r, t));
  }
  // |g| may span many decades along large contours, so compare each sample
  // with its neighbours rather than with the global maximum.
  for (std::size_t j = 0; j < m; ++j) {
    const double local = std::max(std::abs(vals[(j + m - 1) % m]), std::abs(vals[(j + 1) % m]));
    if (!std::isfinite(std::abs(vals[j])) || !(std::abs(vals[j]) > 1e-13 * local)) return std::nullopt;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) total += std::arg(vals[(j + 1) % m] / vals[j]);
  return total / (2.0 * std::numbers::pi);
}

template <class G>
std::optional<int> stable_winding(G&& g, std::complex<double> center, double r, const CountOptions& opts) {
  bool have_previous = false;
  long previous = 0;
  for (std::size_t m = opts.initial_samples; m <= opts.max_samples; m *= 2) {
    const auto w = winding(g, center, r, m);
    if (!w) return std::nullopt;
    const long rounded = std::lround(*w);
    if (std::abs(*w - static_cast<double>(rounded)) >= opts.integer_window) {
      have_previous = false;
      continue;
    }
    if (have_previous && previous == rounded) return static_cast<int>(rounded);
    have_previous = true;
    previous = rounded;
  }
  return std::nullopt;
}

}  // namespace detail

/// Number of zeros (with multiplicity) of f(lambda) for z = sqrt(lambda) inside
/// the disk, by the argument principle applied to z -> f(z^2).
///
/// For disks away from z = 0 this equals the number of zeros of f in the image
/// domain of the lambda plane.
template <class F>
int count_zeros(F&& f, const Disk& disk, const CountOptions& opts = {}) {
  if (!(disk.radius > 0.0)) throw invalid_input("count_zeros: radius must be positive");
  auto g = [&](std::complex<double> z) { return f(z * z); };
  for (double scale : {1.0, 1.05, 0.95}) {
    if (auto w = detail::stable_winding(g, disk.center, disk.radius * scale, opts)) return *w;
  }
  throw numeric_failure("count_zeros: boundary zero or unstable winding near center (" +
                        std::to_string(disk.center.real()) + ", " + std::to_string(disk.center.imag()) +
                        "), radius " + std::to_string(disk.radius));
}

/// Number of zeros of f in the lambda-plane disk |lambda| < radius^2, i.e. the
/// domain |sqrt(lambda)| < radius.
template <class F>
int count_zeros_origin(F&& f, double radius, const CountOptions& opts = {}) {
  if (!(radius > 0.0)) throw invalid_input("count_zeros_origin: radius must be positive");
  auto g = [&](std::complex<double> lam) { return f(lam); };
  for (double scale : {1.0, 1.02, 0.98}) {
    const double r = radius * scale;
    if (auto w = detail::stable_winding(g, std::complex<double>{0.0, 0.0}, r * r, opts)) return *w;
  }
  throw numeric_failure("count_zeros_origin: boundary zero or unstable winding, radius " + std::to_string(radius));
}

}  // namespace armchair

#endif  // ARMCHAIR_ROOTFIND_HPP
