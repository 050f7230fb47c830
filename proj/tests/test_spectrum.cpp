#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "armchair/invariants.hpp"
#include "armchair/spectrum.hpp"
#include "oracles.hpp"

using namespace armchair;
using oracle::pi;

namespace {

double sq(double x) { return x * x; }

int multiplicity_at(const MultiplicityMap& m, double x) {
  for (const auto& p : m)
    if (p.lo <= x && x <= p.hi) return p.multiplicity;
  return 0;
}

SpectrumOptions upto(double lambda_max) {
  SpectrumOptions o;
  o.lambda_max = lambda_max;
  return o;
}

const PeriodicPotential& sampled_cosine() {
  static const auto q = from_samples(oracle::midpoint_samples([](double t) { return std::cos(2 * pi * t); }, 256));
  return q;
}

}  // namespace

TEST(FreeTube, PeriodicEigenvaluesMatchClosedForm) {
  const auto v = periodic_eigenvalues(PeriodicPotential(), TubeAngle(4, 1), 30.0);
  std::vector<double> ref;
  for (double x : {5.0 + 2.0 * std::sqrt(2.0), 5.0 - 2.0 * std::sqrt(2.0)})
    for (double l : oracle::free_roots(x, std::sqrt(30.0))) ref.push_back(l);
  std::sort(ref.begin(), ref.end());
  ASSERT_EQ(v.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(v[i].value, ref[i], 1e-9) << i;
  EXPECT_NEAR(v[0].value, 0.1362, 1e-4);
  EXPECT_NEAR(v[1].value, 1.1177, 1e-3);
  EXPECT_EQ(v[0].nu, 2);
  EXPECT_EQ(v[1].nu, 1);
  EXPECT_EQ(v[0].sign, 1);
  EXPECT_EQ(v[0].n, 0);
}

TEST(FreeTube, ZeroFiberEigenvalues) {
  const auto v = periodic_eigenvalues(PeriodicPotential(), TubeAngle(4, 0), 45.0);
  std::vector<double> ref;
  for (double l : oracle::free_roots(1.0, std::sqrt(45.0))) ref.push_back(l);
  // 9 cos^2 z = 9 gives (pi n)^2, twice for n >= 1 (the lambda^- and lambda^+
  // of a closed gap) and once for the ground state 0.
  for (double l : oracle::free_roots(9.0, std::sqrt(45.0))) {
    ref.push_back(l);
    if (l > 0) ref.push_back(l);
  }
  std::sort(ref.begin(), ref.end());
  ASSERT_EQ(v.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(v[i].value, ref[i], 1e-9) << i;
}

TEST(FreeTube, AntiperiodicDoubleEigenvalues) {
  const auto v = antiperiodic_eigenvalues(PeriodicPotential(), 20.0);
  ASSERT_GE(v.size(), 4u);
  const double a = sq(std::acos(1.0 / 3.0)), b = sq(std::acos(-1.0 / 3.0));
  // lambda_{2,1}^- = lambda_{1,1}^- and lambda_{1,1}^+ = lambda_{2,1}^+.
  EXPECT_NEAR(v[0].value, a, 1e-9);
  EXPECT_NEAR(v[1].value, a, 1e-9);
  EXPECT_NEAR(v[2].value, b, 1e-9);
  EXPECT_NEAR(v[3].value, b, 1e-9);
  const SpectralSkeleton sk(PeriodicPotential(), upto(20.0));
  const auto kappa = kappa_intervals(sk);
  EXPECT_NEAR(kappa[0].lo, a, 1e-9);
  EXPECT_NEAR(kappa[0].hi, b, 1e-9);
}

TEST(FreeTube, Resonances) {
  const auto r = resonances(PeriodicPotential(), TubeAngle(4, 1), 20.0);
  ASSERT_GE(r.size(), 2u);
  EXPECT_NEAR(r[0].value, sq(std::acos(std::sqrt(2.0) / 6)), 1e-9);
  EXPECT_NEAR(r[1].value, sq(std::acos(-std::sqrt(2.0) / 6)), 1e-9);
  EXPECT_NEAR(r[0].value, 1.7765, 1e-4);
  EXPECT_NEAR(r[1].value, 3.2716, 1e-4);
  EXPECT_EQ(r[0].sign, -1);
  EXPECT_EQ(r[1].sign, 1);
  const auto r0 = resonances(PeriodicPotential(), TubeAngle(4, 0), 30.0);
  for (const auto& e : r0) EXPECT_NEAR(e.value, sq(pi * (e.n - 0.5)), 1e-9);
}

TEST(FreeTube, BandTable) {
  const auto f = analyze_fiber(PeriodicPotential(), TubeAngle(4, 1), 30.0);
  const auto g1 = oracle::free_roots(5.0 - 2.0 * std::sqrt(2.0), 10.0);
  const auto g2 = oracle::free_roots(5.0 + 2.0 * std::sqrt(2.0), 10.0);
  const double h_lo = sq(std::acos(1.0 / 3.0)), h_hi = sq(std::acos(-1.0 / 3.0));
  const double r_lo = sq(std::acos(std::sqrt(2.0) / 6)), r_hi = sq(std::acos(-std::sqrt(2.0) / 6));

  EXPECT_NEAR(f.band(2, 1).lo.value, g2[0], 1e-9);
  EXPECT_NEAR(f.band(2, 1).hi.value, h_lo, 1e-9);
  EXPECT_NEAR(f.band(1, 1).lo.value, g1[0], 1e-9);
  EXPECT_NEAR(f.band(1, 1).hi.value, r_lo, 1e-9);
  EXPECT_NEAR(f.band(1, 2).lo.value, r_hi, 1e-9);
  EXPECT_NEAR(f.band(1, 2).hi.value, g1[1], 1e-9);
  EXPECT_NEAR(f.band(2, 2).lo.value, h_hi, 1e-9);
  EXPECT_NEAR(f.band(2, 2).hi.value, g2[1], 1e-9);
  EXPECT_NEAR(f.band(2, 2).hi.value, 7.6866, 1e-4);
  EXPECT_EQ(f.band(1, 1).lo.source, EigenKind::periodic);
  EXPECT_EQ(f.band(1, 1).hi.source, EigenKind::resonance);
  EXPECT_EQ(f.band(1, 2).lo.source, EigenKind::resonance);
  EXPECT_EQ(f.band(2, 1).hi.source, EigenKind::antiperiodic);
  for (const auto& b : f.bands) {
    EXPECT_LE(b.lo.value, b.hi.value);
    EXPECT_FALSE(b.warning);
  }
}

TEST(FreeTube, MultiplicityAndGaps) {
  const auto f = analyze_fiber(PeriodicPotential(), TubeAngle(4, 1), 30.0);
  EXPECT_EQ(multiplicity_at(f.multiplicity, 0.5), 2);
  EXPECT_EQ(multiplicity_at(f.multiplicity, 1.3), 4);
  EXPECT_EQ(multiplicity_at(f.multiplicity, 1.6), 4);  // kappa_{1,1}^-
  EXPECT_EQ(multiplicity_at(f.multiplicity, 2.5), 0);
  EXPECT_EQ(multiplicity_at(f.multiplicity, 3.4), 4);  // kappa_{1,1}^+
  EXPECT_EQ(multiplicity_at(f.multiplicity, 4.0), 4);
  EXPECT_EQ(multiplicity_at(f.multiplicity, 5.0), 2);
  for (std::size_t i = 0; i + 1 < f.multiplicity.size(); ++i) EXPECT_LE(f.multiplicity[i].hi, f.multiplicity[i + 1].lo);

  const auto& g2 = f.gap(2);
  EXPECT_NEAR(g2.lo.value, sq(std::acos(std::sqrt(2.0) / 6)), 1e-9);
  EXPECT_NEAR(g2.hi.value, sq(std::acos(-std::sqrt(2.0) / 6)), 1e-9);
  EXPECT_EQ(g2.kind, GapKind::resonance);
  EXPECT_TRUE(f.gap(1).empty());
  EXPECT_TRUE(f.gap(3).empty());
  EXPECT_EQ(f.gap(1).kind, GapKind::empty);
  EXPECT_TRUE(std::isinf(f.gap(0).lo.value));
  EXPECT_NEAR(f.gap(0).hi.value, 0.1362, 1e-4);
}

TEST(FreeTube, ZeroFiberMultiplicityFromBranches) {
  const auto f = analyze_fiber(PeriodicPotential(), TubeAngle(4, 0), 30.0);
  EXPECT_TRUE(f.gap(2).empty());
  EXPECT_NEAR(f.band(1, 1).hi.value, sq(pi / 2), 1e-9);
  EXPECT_NEAR(f.band(1, 1).lo.value, sq(std::acos(1.0 / 3.0)), 1e-9);
  EXPECT_NEAR(f.band(2, 1).hi.value, sq(std::acos(1.0 / 3.0)), 1e-9);
  for (double l = 0.05; l < 20.0; l += 0.1) {
    const double F = std::cos(std::sqrt(l));
    const auto b = oracle::branches(F, 0.0, 0.0, 1.0);
    const int expected = 2 * (oracle::in_band(b.F1) + oracle::in_band(b.F2));
    EXPECT_EQ(multiplicity_at(f.multiplicity, l), expected) << l;
  }
  // The pocket (lambda_{1,1}^{0,-}, eta_1) lies inside S_{1,1}.
  EXPECT_EQ(multiplicity_at(f.multiplicity, 2.0), 4);
  EXPECT_EQ(multiplicity_at(f.multiplicity, 1.0), 2);
}

TEST(FullSpectrum, FreeTubeHasNoGaps) {
  const auto rep = full_spectrum(PeriodicPotential(), 4, upto(120.0));
  ASSERT_FALSE(rep.gaps.empty());
  EXPECT_NEAR(rep.gap(0).hi.value, 0.0, 1e-8);
  for (const auto& g : rep.gaps) {
    if (g.n == 0) continue;
    EXPECT_TRUE(g.empty() || g.hi.value - g.lo.value <= 1e-8) << g.n;
  }
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  for (const auto& d : rep.dirichlet) EXPECT_NEAR(d.value, sq(pi * d.n), 1e-9);
}

TEST(FullSpectrum, NMaxSetsLayerCount) {
  SpectrumOptions o;
  o.n_max = 3;
  const auto rep = full_spectrum(sampled_cosine(), 4, o);
  EXPECT_EQ(rep.layers, 3);
  EXPECT_EQ(rep.fibers.size(), 3u);
  EXPECT_EQ(rep.fibers.front().bands.size(), 12u);
  EXPECT_EQ(rep.gaps.size(), 13u);
}

TEST(FullSpectrum, OptionValidation) {
  SpectrumOptions o;
  o.step = 0.05;
  EXPECT_THROW(full_spectrum(PeriodicPotential(), 4, o), invalid_input);
  o = SpectrumOptions{};
  o.lambda_max = INFINITY;
  EXPECT_THROW(full_spectrum(PeriodicPotential(), 4, o), invalid_input);
  EXPECT_THROW(full_spectrum(PeriodicPotential(), 0, SpectrumOptions{}), invalid_input);
}

TEST(FullSpectrum, DeterministicAcrossThreads) {
  std::mt19937 rng(41);
  const auto q = oracle::random_potential(rng, 4, 1);
  SpectrumOptions a = upto(80.0), b = upto(80.0);
  b.threads = 4;
  EXPECT_TRUE(full_spectrum(q, 6, a) == full_spectrum(q, 6, b));
}

TEST(EvenPotential, HillSpectrumAndResonanceGaps) {
  const auto& q = sampled_cosine();
  for (int N : {3, 4}) {
    const auto rep = full_spectrum(q, N, upto(200.0));
    ASSERT_TRUE(rep.even);
    for (const auto& r : check_even_potential(rep, 200.0)) EXPECT_TRUE(r.passed()) << r.name << ": " << r.first_violation;
    for (const auto& f : rep.fibers) {
      if (f.k == 0 || 2 * f.k == N) continue;
      for (int n = 1; n <= rep.layers; ++n) {
        const int p = 2 * n - 1;
        EXPECT_EQ(f.band(1, p).hi.source, EigenKind::resonance) << f.k << " " << n;
        EXPECT_EQ(f.band(1, p + 1).lo.source, EigenKind::resonance) << f.k << " " << n;
      }
      for (const auto& l : f.resonance_layers) {
        if (l.n > rep.layers) continue;
        ASSERT_GE(l.zeros.size(), 2u);
        EXPECT_LT(*l.minus(), *l.plus());
      }
    }
    // Antiperiodic eigenvalues collapse pairwise since F_- = 0.
    const auto& ap = rep.antiperiodic;
    for (std::size_t i = 0; i + 1 < ap.size(); i += 2) EXPECT_NEAR(ap[i].value, ap[i + 1].value, 1e-9);
  }
}

TEST(EvenPotential, OverlapsHaveMultiplicityFour) {
  const auto f = analyze_fiber(sampled_cosine(), TubeAngle(4, 1), 150.0);
  for (int p = 1; p <= 8; ++p) {
    const double lo = std::max(f.band(1, p).lo.value, f.band(2, p).lo.value);
    const double hi = std::min(f.band(1, p).hi.value, f.band(2, p).hi.value);
    if (hi - lo > 1e-6) {
      EXPECT_EQ(multiplicity_at(f.multiplicity, 0.5 * (lo + hi)), 4) << p;
    }
  }
}

TEST(Invariants, RandomPotentials) {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 6; ++trial) {
    const auto q = oracle::random_potential(rng, 4, trial % 2);
    const SpectralSkeleton sk(q, upto(150.0));
    SpectrumReport rep = full_spectrum(q, 5, upto(150.0));
    for (const auto& r : {check_edge_order(rep), check_overlap_criteria(q, rep), check_symmetry(sk, rep),
                          check_monotonicity(rep), check_resonance_values(q, rep)})
      EXPECT_TRUE(r.passed()) << trial << " " << r.name << ": " << r.first_violation;
    for (const auto& r : check_membership(q, rep, sk.floor(), 150.0, 4000))
      EXPECT_TRUE(r.passed()) << trial << " " << r.name << ": " << r.first_violation;
    // eta_n lies between the first-branch edges of kappa_n in every fiber.
    for (const auto& f : rep.fibers)
      for (int n = 1; n <= rep.layers; ++n) {
        const double eta = rep.lyapunov_zeros[static_cast<std::size_t>(n - 1)].value;
        EXPECT_LE(f.band(1, 2 * n - 1).hi.value, eta + 1e-9 * (1 + eta));
        EXPECT_LE(eta, f.band(1, 2 * n).lo.value + 1e-9 * (1 + eta));
      }
    // Resonance counts per kappa are even.
    for (const auto& f : rep.fibers)
      for (const auto& l : f.resonance_layers)
        if (l.n > 0) {
          EXPECT_EQ(l.zeros.size() % 2, 0u);
        }
  }
}

TEST(Invariants, InterlacingOuterLinksFollowSecondBranch) {
  // lambda~^+_{n-1} <= lambda^{k,+}_{2,n-1} needs |F_{k,2}| >= 1 at the Hill
  // edge, which large |F_-| there can break. Every other link must hold.
  std::mt19937 rng(47);
  long broken_total = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto q = oracle::random_potential(rng, 4, trial % 2);
    const int N = 5;
    SpectrumReport rep = full_spectrum(q, N, upto(150.0));
    std::erase_if(rep.fibers, [](const FiberReport& f) { return f.k == 0; });
    long predicted = 0;
    for (const auto& f : rep.fibers) {
      const TubeAngle a(N, f.k);
      std::vector<double> edges{rep.hill.lambda0_plus};
      for (const auto& g : rep.hill.gaps)
        if (g.n <= rep.layers) edges.insert(edges.end(), {g.minus, g.plus});
      for (double e : edges) {
        const auto m = monodromy(q, e);
        const auto b = oracle::branches(m.F, m.Fminus, a.s(), a.c());
        if (std::abs(b.F2.imag()) < 1e-12 && std::abs(b.F2.real()) < 1 - 1e-6) ++predicted;
      }
    }
    const auto r = check_interlacing(q, rep);
    EXPECT_EQ(r.violations, predicted) << trial << ": " << r.first_violation;
    EXPECT_GT(r.checked, 0);
    broken_total += predicted;
  }
  // The sample contains at least one genuine counterexample.
  EXPECT_GT(broken_total, 0);
}

TEST(Invariants, ZeroFiberSecondBranchAtHillEdge) {
  // With k = 0 the second branch equals 1 - F_-^2 / 2 where F = +-1, so for
  // F_- != 0 it enters [-1, 1] before the Hill band edge.
  std::mt19937 rng(53);
  const auto q = oracle::random_potential(rng, 4, 1);
  const auto rep = full_spectrum(q, 4, upto(150.0));
  const auto& f0 = rep.fiber(0);
  for (const auto& hg : rep.hill.gaps) {
    if (hg.n >= rep.layers) break;
    const auto m = monodromy(q, hg.plus);
    const auto o = oracle::branches(m.F, m.Fminus, 0.0, 1.0);
    EXPECT_NEAR(o.F2.real(), 1.0 - 0.5 * m.Fminus * m.Fminus, 1e-9 * (1 + std::abs(m.F)));
    if (std::abs(m.Fminus) > 1e-3) {
      EXPECT_LT(f0.periodic_layers[static_cast<std::size_t>(hg.n)].lam2_plus_prev, hg.plus);
    }
  }
}

TEST(Symmetry, MirrorFibersIdentical) {
  std::mt19937 rng(59);
  const auto q = oracle::random_potential(rng, 4, 2);
  const SpectralSkeleton sk(q, upto(100.0));
  for (int k = 1; k < 6; ++k) {
    const auto a = analyze_fiber(sk, TubeAngle(6, k));
    const auto b = analyze_fiber(sk, TubeAngle(6, 6 - k));
    ASSERT_EQ(a.bands.size(), b.bands.size());
    for (std::size_t i = 0; i < a.bands.size(); ++i) {
      EXPECT_EQ(a.bands[i].lo, b.bands[i].lo);
      EXPECT_EQ(a.bands[i].hi, b.bands[i].hi);
    }
    EXPECT_TRUE(a.gaps.size() == b.gaps.size());
    const auto pa = periodic_eigenvalues(sk, TubeAngle(6, k)), pb = periodic_eigenvalues(sk, TubeAngle(6, 6 - k));
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].value, pb[i].value);
  }
}

TEST(Asymptotics, Examples) {
  const auto z = asymptotic_edges(PeriodicPotential(), 3);
  EXPECT_DOUBLE_EQ(z.first, sq(3 * pi));
  EXPECT_DOUBLE_EQ(z.second, sq(3 * pi));
  const auto c = asymptotic_edges(sampled_cosine(), 1);
  EXPECT_NEAR(c.first, pi * pi - 0.5, 1e-4);
  EXPECT_NEAR(c.second, pi * pi + 0.5, 1e-4);
  const auto d = asymptotic_edges(PeriodicPotential({{0.0, 0.0}}, {{0.25, 1.0}}), 1);
  EXPECT_NEAR(d.first, 1 + pi * pi - std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(d.second, 1 + pi * pi + std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_THROW(asymptotic_edges(PeriodicPotential(), 0), invalid_input);
}

TEST(DeltaConstruction, FirstBandEdgesAreAntiperiodic) {
  const double eps = 0.01, c1 = std::cos(pi / 4);
  const PeriodicPotential q({{0.0, 0.0}}, {{0.5 + c1 * eps + eps * eps, 1.0 / eps}});
  const auto f = analyze_fiber(q, TubeAngle(4, 1), 90.0);
  EXPECT_EQ(f.band(1, 1).hi.source, EigenKind::antiperiodic);
  EXPECT_EQ(f.band(1, 2).lo.source, EigenKind::antiperiodic);
  const auto ap = antiperiodic_eigenvalues(q, 90.0);
  double a1m = NAN, a1p = NAN;
  for (const auto& e : ap)
    if (e.nu == 1 && e.n == 1) (e.sign < 0 ? a1m : a1p) = e.value;
  EXPECT_EQ(f.band(1, 1).hi.value, a1m);
  EXPECT_EQ(f.band(1, 2).lo.value, a1p);
}
