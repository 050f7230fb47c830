#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "armchair/lyapunov.hpp"
#include "oracles.hpp"

using namespace armchair;
using oracle::pi;

TEST(TubeAngle, ValuesAndSymmetry) {
  const TubeAngle a(4, 1);
  EXPECT_NEAR(a.s2(), 0.5, 1e-15);
  EXPECT_NEAR(a.c2(), 0.5, 1e-15);
  const TubeAngle b(4, 3);
  EXPECT_EQ(a.s(), b.s());
  EXPECT_EQ(a.c2(), b.c2());
  EXPECT_EQ(b.c(), -a.c());
  EXPECT_TRUE(TubeAngle(4, 0).is_zero());
  EXPECT_TRUE(TubeAngle(4, 2).is_half());
  EXPECT_EQ(TubeAngle(4, 2).c(), 0.0);
  EXPECT_EQ(TubeAngle(5, 0).s(), 0.0);
  EXPECT_THROW(TubeAngle(4, 4), invalid_input);
  EXPECT_THROW(TubeAngle(0, 0), invalid_input);
}

TEST(Evaluate, FreeQuarterPoint) {
  const auto d = evaluate(monodromy(PeriodicPotential(), (pi / 2) * (pi / 2)), TubeAngle(4, 1));
  const auto& r = *d.real;
  EXPECT_NEAR(d.xi, -1.0, 1e-14);
  EXPECT_NEAR(d.rho, -0.25, 1e-14);
  EXPECT_NEAR(r.u, -0.5, 1e-14);
  EXPECT_NEAR(r.v, -0.5, 1e-14);
  EXPECT_NEAR(r.g1, 5.0 - 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.g2, 5.0 + 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.h1, 1.0, 1e-14);
  EXPECT_NEAR(r.h2, 1.0, 1e-14);
}

TEST(Evaluate, SpecialAngles) {
  std::mt19937 rng(17);
  const auto q = oracle::random_potential(rng, 4, 1);
  std::uniform_real_distribution<double> lam(-5.0, 200.0);
  for (int i = 0; i < 100; ++i) {
    const auto m = monodromy(q, lam(rng));
    const auto d0 = evaluate(m, TubeAngle(6, 0));
    EXPECT_NEAR(d0.rho, 9.0 * m.F * m.F, 1e-12 * (1 + 9.0 * m.F * m.F));
    const auto dh = evaluate(m, TubeAngle(6, 3));
    EXPECT_NEAR(dh.rho, m.Fminus * m.Fminus, 1e-12 * (1 + m.Fminus * m.Fminus));
  }
}

TEST(Evaluate, BranchesMatchScalarOracle) {
  std::mt19937 rng(19);
  const auto q = oracle::random_potential(rng, 4, 2);
  std::uniform_real_distribution<double> lam(-5.0, 150.0);
  const int N = 5;
  for (int i = 0; i < 200; ++i) {
    const auto m = monodromy(q, lam(rng));
    for (int k = 0; k < N; ++k) {
      const TubeAngle a(N, k);
      const auto d = evaluate(m, a);
      const auto o = oracle::branches(m.F, m.Fminus, std::sin(pi * k / N), std::cos(pi * k / N));
      const double scale = 1.0 + std::abs(o.xi) + std::abs(o.rho);
      EXPECT_NEAR(d.xi, o.xi, 1e-12 * scale);
      EXPECT_NEAR(d.rho, o.rho, 1e-12 * scale);
    }
  }
}

TEST(Discriminants, FreePerfectSquare) {
  const PeriodicPotential q;
  for (double l : {0.3, 1.7, 5.0, 22.0}) {
    const auto d = evaluate(monodromy(q, l), TubeAngle(4, 1));
    const double c = std::cos(std::sqrt(l));
    const double sq = (9 * c * c - 1) * (9 * c * c - 1);
    EXPECT_NEAR(discriminants(d).Dminus, sq, 1e-12 * (1 + sq));
  }
}

TEST(Discriminants, FactorizedAndExpandedFormsAgree) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> lam(-5.0, 150.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto q = oracle::random_potential(rng, 4, trial % 3);
    for (int i = 0; i < 200; ++i) {
      const double l = lam(rng);
      const auto m = monodromy(q, l);
      const auto mc = monodromy(q, std::complex<double>(l, 0.0));
      for (int k = 0; k < 6; ++k) {
        const TubeAngle a(6, k);
        const auto re = discriminants(evaluate(m, a));
        const auto cx = discriminants(evaluate(mc, a));
        const double sp = 1.0 + std::abs(re.Dplus), sm = 1.0 + std::abs(re.Dminus);
        EXPECT_NEAR(re.Dplus, cx.Dplus.real(), 1e-9 * sp);
        EXPECT_NEAR(re.Dminus, cx.Dminus.real(), 1e-9 * sm);
        // 4 (F_1 - 1)(F_2 - 1) through the explicit branches.
        const auto o = oracle::branches(m.F, m.Fminus, a.s(), a.c());
        const auto prod = 4.0 * (o.F1 - 1.0) * (o.F2 - 1.0);
        EXPECT_NEAR(prod.real(), re.Dplus, 1e-9 * sp);
      }
    }
  }
}

TEST(Discriminants, MirrorFibersIdentical) {
  std::mt19937 rng(29);
  const auto q = oracle::random_potential(rng, 4, 1);
  for (double l : {0.2, 7.0, 31.0, 99.0}) {
    const auto m = monodromy(q, l);
    for (int k = 1; k < 7; ++k) {
      const auto a = discriminants(evaluate(m, TubeAngle(7, k)));
      const auto b = discriminants(evaluate(m, TubeAngle(7, 7 - k)));
      EXPECT_EQ(a.Dplus, b.Dplus);
      EXPECT_EQ(a.Dminus, b.Dminus);
    }
  }
}

TEST(Factors, ChainAndMonotoneInK) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> lam(-5.0, 150.0);
  const int N = 8;
  for (int trial = 0; trial < 5; ++trial) {
    const auto q = oracle::random_potential(rng, 4, 1);
    for (int i = 0; i < 200; ++i) {
      const auto m = monodromy(q, lam(rng));
      std::vector<RealLyapunov> rs;
      for (int k = 0; 2 * k <= N; ++k) rs.push_back(*evaluate(m, TubeAngle(N, k)).real);
      for (const auto& r : rs) {
        const double tol = 1e-12 * (1 + r.g2);
        EXPECT_LE(r.h1, std::min(r.h2, r.g1) + tol);
        EXPECT_LE(std::max(r.h2, r.g1), r.g2 + tol);
      }
      for (std::size_t k = 0; k + 1 < rs.size(); ++k)
        for (std::size_t l = k + 1; l < rs.size(); ++l) {
          EXPECT_LT(rs[l].g2, rs[k].g2);
          EXPECT_LT(rs[k].g1, rs[l].g1);
        }
    }
  }
}

TEST(Membership, FreeExamples) {
  const PeriodicPotential q;
  const auto at = [&](double l, int N, int k) { return membership(evaluate(monodromy(q, l), TubeAngle(N, k))); };
  EXPECT_EQ(at(1.3, 4, 1), (Membership{true, true}));
  EXPECT_EQ(at(2.4, 4, 1), (Membership{false, false}));
  EXPECT_EQ(at(0.05, 4, 0), (Membership{false, true}));
  const auto m = monodromy(q, 1.3);
  const double c = std::cos(std::sqrt(1.3));
  EXPECT_NEAR(9 * m.F * m.F, 9 * c * c, 1e-12);
  EXPECT_GT(9 * m.F * m.F, 1.0);
  EXPECT_LT(9 * m.F * m.F, 5 - 2 * std::sqrt(2.0));
}

TEST(Membership, AgreesWithDirectBranchTest) {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> lam(-5.0, 150.0);
  const double tol = 1e-9;
  long checked = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto q = oracle::random_potential(rng, 4, trial % 2);
    const int N = 4 + trial;
    for (int i = 0; i < 1000; ++i) {
      const auto m = monodromy(q, lam(rng));
      for (int k = 0; k < N; ++k) {
        const TubeAngle a(N, k);
        const auto d = evaluate(m, a);
        const auto o = oracle::branches(m.F, m.Fminus, a.s(), a.c());
        if (std::abs(o.rho) <= 1e-6) continue;  // boundary layer of the branch point
        const auto got = membership(d, tol);
        // Skip points within tol of a band edge in the compared quantity.
        auto margin = [](std::complex<double> F) { return std::min(std::abs(F.real() - 1.0), std::abs(F.real() + 1.0)); };
        if (o.rho > 0 && (margin(o.F1) < 1e-7 || margin(o.F2) < 1e-7)) continue;
        EXPECT_EQ(got.in_sigma1, oracle::in_band(o.F1)) << "k=" << k;
        EXPECT_EQ(got.in_sigma2, oracle::in_band(o.F2)) << "k=" << k;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 10000);
}
