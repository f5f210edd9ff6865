#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracle_values.hpp"
#include "singosc/transitions.hpp"

using namespace singosc;
using namespace singosc::transitions;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }
}  // namespace

TEST(Exact, IdentityAtZeroReflection) {
  for (double d : {0.5, -0.5, 10.0, 1e5}) {
    for (int n = 0; n <= 20; ++n) {
      for (int m = 0; m <= 20; ++m) ASSERT_EQ(w_exact(n, m, d, 0.0), n == m ? 1.0 : 0.0);
    }
  }
}

TEST(Exact, FrozenValues) {
  EXPECT_LE(rel(w_exact(0, 0, 1e5, 1e-6), oracle::kW00_d1e5_r1em6), 1e-12);
  EXPECT_NEAR(w_exact(0, 0, 1e5, 1e-6), std::exp(-0.1), 1e-6);
  EXPECT_LE(rel(w_exact(3, 5, 1e5, 1e-5), oracle::kW35_d1e5_r1em5), 1e-10);
  EXPECT_LE(rel(w_exact(7, 2, 10.0, 0.3), oracle::kW72_d10_r03), 1e-12);
  EXPECT_LE(rel(w_exact(10, 20, 2.5, 0.7), oracle::kW1020_d2p5_r07), 1e-11);
  EXPECT_LE(rel(w_exact(5, 5, 0.5, 0.5), oracle::kW55_dhalf_r05), 1e-12);
}

TEST(Exact, TinyReflectionDoesNotCancel) {
  EXPECT_LE(rel(1.0 - w_exact(0, 0, 1e5, 1e-12), (1e5 + 1) * 1e-12), 1e-4);
}

TEST(Exact, Preconditions) {
  EXPECT_THROW(w_exact(0, 0, 0.3, 0.1), DomainError);
  EXPECT_THROW(w_exact(0, 0, 2.0, 1.0), DomainError);
  EXPECT_THROW(w_exact(-1, 0, 2.0, 0.1), DomainError);
}

TEST(Hypergeom, Examples) {
  EXPECT_NEAR(w_exact_hypergeom(0, 0, 2.0, 0.5), 0.125, 1e-15);
  for (int m : {0, 1, 4, 9}) {
    const double d = 3.5, r = 0.2;
    const double p0m = std::exp(std::lgamma(m + d + 1) - std::lgamma(m + 1.0) - std::lgamma(d + 1) + m * std::log(r) + (d + 1) * std::log1p(-r));
    EXPECT_LE(rel(w_exact_hypergeom(0, m, d, r), p0m), 1e-13);
  }
}

TEST(Hypergeom, AgreesWithJacobi) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> logd(0.0, std::log(1e5)), rr(0.0, 0.9);
  for (int i = 0; i < 500; ++i) {
    const int n = static_cast<int>(rng() % 31), m = static_cast<int>(rng() % 31);
    const double d = std::exp(logd(rng)), r = rr(rng);
    const double a = w_exact(n, m, d, r), b = w_exact_hypergeom(n, m, d, r);
    if (a == 0.0 && b == 0.0) continue;
    ASSERT_LE(std::fabs(a - b), 1e-10 * std::max(a, b)) << n << "," << m << " d=" << d << " r=" << r;
  }
}

TEST(Oscillator, Examples) {
  for (double r : {0.0, 0.3, 0.8}) EXPECT_NEAR(w_oscillator(0, 0, r), std::sqrt(1.0 - r), 1e-15);
  EXPECT_LE(rel(w_oscillator(0, 2, 0.5), oracle::kWosc_0_2_half), 1e-14);
  EXPECT_LE(rel(w_oscillator(3, 7, 0.3), oracle::kWosc_3_7_03), 1e-13);
  EXPECT_EQ(w_oscillator(0, 1, 0.4), 0.0);
  EXPECT_EQ(w_oscillator(5, 2, 0.4), 0.0);
}

TEST(Oscillator, RowsSumToOne) {
  for (double r : {0.1, 0.5}) {
    for (int k : {0, 1, 6}) {
      long double acc = 0;
      for (int j = 0; j < 2000; ++j) acc += w_oscillator(k, j, r);
      EXPECT_NEAR(static_cast<double>(acc), 1.0, 1e-10) << "k=" << k << " r=" << r;
    }
  }
}

TEST(Oscillator, ParityMapping) {
  for (double r : {0.1, 0.5, 0.9}) {
    for (int n = 0; n <= 20; ++n) {
      for (int m = 0; m <= 20; ++m) {
        const double odd = w_oscillator(2 * n + 1, 2 * m + 1, r), even = w_oscillator(2 * n, 2 * m, r);
        ASSERT_LE(std::fabs(w_exact(n, m, 0.5, r) - odd), 1e-9 * odd) << n << "," << m << " r=" << r;
        ASSERT_LE(std::fabs(w_exact(n, m, -0.5, r) - even), 1e-9 * even) << n << "," << m << " r=" << r;
      }
    }
  }
}

TEST(LargeD, Examples) {
  for (int m = 0; m <= 10; ++m) {
    EXPECT_LE(rel(w_large_d(0, m, 1.0), std::exp(-1.0 - std::lgamma(m + 1.0))), 1e-13);
  }
  EXPECT_NEAR(w_large_d(0, 1, 1.0), std::exp(-1.0), 1e-15);
  for (int n = 0; n < 6; ++n) {
    for (int m = 0; m < 6; ++m) EXPECT_EQ(w_large_d(n, m, 0.0), n == m ? 1.0 : 0.0);
  }
}

namespace {

void expect_large_d_agreement(double r) {
  const double d = 1e5;
  for (int n = 0; n <= 15; ++n) {
    for (int m = 0; m <= 15; ++m) {
      const double e = w_exact(n, m, d, r);
      if (e <= 1e-8) continue;
      EXPECT_LE(rel(w_large_d(n, m, r * d), e), 0.01) << n << "," << m << " r=" << r;
      EXPECT_LE(rel(w_large_d_full(n, m, d, r), e), 0.01) << n << "," << m << " r=" << r;
    }
  }
}

}  // namespace

TEST(LargeD, AgreesWithExactAtRdOne) { expect_large_d_agreement(1e-5); }

TEST(LargeD, AgreesWithExactAtRdTenth) { expect_large_d_agreement(1e-6); }

TEST(LargeD, PoissonModeOfGroundRow) {
  for (double rd : {0.5, 3.7, 10.0, 25.3}) {
    int best = 0;
    for (int m = 1; m < 100; ++m) {
      if (w_large_d(0, m, rd) > w_large_d(0, best, rd)) best = m;
    }
    const int floor_rd = static_cast<int>(std::floor(rd));
    if (rd == floor_rd) {
      EXPECT_TRUE(best == floor_rd || best == floor_rd - 1) << rd;
      EXPECT_LE(rel(w_large_d(0, floor_rd, rd), w_large_d(0, floor_rd - 1, rd)), 1e-13);
    } else {
      EXPECT_EQ(best, floor_rd) << rd;
    }
  }
}

TEST(LargeD, PoissonLeadingTermForLargeRd) {
  const double rd = 400.0;
  for (int n : {0, 1, 2}) {
    for (int m : {0, 1, 3}) {
      EXPECT_LE(rel(w_large_d_poisson(n, m, rd), w_large_d(n, m, rd)), 0.05) << n << "," << m;
    }
  }
  EXPECT_LE(rel(w_large_d_poisson(0, 4, 2.0), w_large_d(0, 4, 2.0)), 1e-13);
}

TEST(Adiabatic, DiagonalExpansion) {
  const int n = 3;
  const double d = 2.0, r = 1e-4;
  EXPECT_NEAR(w_adiabatic(n, n, d, r), 1.0 - (2.0 * n * n + (d + 1) * (2 * n + 1)) * r, 1e-15);
  EXPECT_THROW(w_adiabatic(0, 0, 1e5, 1e-5), RegimeError);
}

TEST(Adiabatic, ErrorIsSecondOrder) {
  for (auto [n, m, d] : {std::tuple{0, 0, 2.0}, std::tuple{2, 2, 5.0}, std::tuple{1, 3, 10.0}, std::tuple{0, 1, 1.5}}) {
    const double r = 4e-4;
    const int gap = std::abs(n - m);
    // scale out the leading r^{|m-n|} so the residual is O(r^2) in both cases
    const double e1 = std::fabs(w_adiabatic(n, m, d, r) - w_exact(n, m, d, r)) / std::pow(r, gap);
    const double e2 = std::fabs(w_adiabatic(n, m, d, r / 2) - w_exact(n, m, d, r / 2)) / std::pow(r / 2, gap);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1) << n << "," << m;
  }
}

TEST(Adiabatic, CentreOfMassSuppression) {
  const double r = 1e-5;
  const double com = w_exact(0, 1, 0.5, r), rel_motion = w_exact(0, 1, 1e5, r);
  EXPECT_LT(com, 10 * r);
  EXPECT_GT(rel_motion, 0.3);
}

TEST(Symmetry, AllRegimes) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const int n = static_cast<int>(rng() % 12), m = static_cast<int>(rng() % 12);
    EXPECT_EQ(w_exact(n, m, 7.3, 0.21), w_exact(m, n, 7.3, 0.21));
    EXPECT_EQ(w_exact_hypergeom(n, m, 7.3, 0.21), w_exact_hypergeom(m, n, 7.3, 0.21));
    EXPECT_EQ(w_oscillator(n, m, 0.21), w_oscillator(m, n, 0.21));
    EXPECT_EQ(w_large_d(n, m, 2.2), w_large_d(m, n, 2.2));
    EXPECT_EQ(w_large_d_full(n, m, 1e5, 2.2e-5), w_large_d_full(m, n, 1e5, 2.2e-5));
    EXPECT_EQ(w_large_d_poisson(n, m, 2.2), w_large_d_poisson(m, n, 2.2));
    EXPECT_EQ(w_adiabatic(n, m, 3.0, 1e-5), w_adiabatic(m, n, 3.0, 1e-5));
  }
}

TEST(Matrix, IdentityAtZero) {
  const auto t = transition_matrix(1e5, 0.0, 4, 4, Regime::ExactJacobi);
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 4; ++m) EXPECT_EQ(t.at(n, m), n == m ? 1.0 : 0.0);
  }
  EXPECT_EQ(t.tail_bound, 0.0);
}

TEST(Matrix, Unitarity) {
  struct Case {
    double d, r;
    Regime regime;
    int cols;
  };
  for (const Case c : {Case{1e5, 1e-6, Regime::ExactJacobi, 40}, Case{1e5, 1e-5, Regime::ExactJacobi, 60},
                       Case{10.0, 0.3, Regime::ExactJacobi, 150}, Case{0.5, 0.5, Regime::Oscillator, 120},
                       Case{1e5, 1e-5, Regime::LargeD, 60}, Case{1e5, 1e-5, Regime::LargeDPoisson, 60}}) {
    const auto t = transition_matrix(c.d, c.r, 11, c.cols, c.regime);
    for (int n = 0; n <= 10; ++n) {
      EXPECT_LE(t.row_sums[n], 1.0 + 1e-10) << to_string(c.regime) << " n=" << n;
      if (c.regime == Regime::LargeDPoisson) continue;  // leading term only, not normalized
      EXPECT_LE(1.0 - t.row_sums[n], t.tail_bounds[n] + 1e-12) << to_string(c.regime) << " d=" << c.d << " n=" << n;
      EXPECT_LE(t.tail_bounds[n], 1e-8) << to_string(c.regime) << " d=" << c.d << " n=" << n;
      EXPECT_GE(t.tail_onsets[n], 0);
    }
  }
}

TEST(Matrix, InsufficientColumnsGiveTrivialBound) {
  const auto t = transition_matrix(1e5, 1e-5, 3, 3, Regime::LargeD);
  EXPECT_EQ(t.tail_bound, 1.0);
}

TEST(Matrix, Preconditions) {
  EXPECT_THROW(transition_matrix(1e5, 1e-5, 0, 3, Regime::ExactJacobi), DomainError);
  EXPECT_THROW(transition_matrix(1e5, 1e-5, 3, 201, Regime::ExactJacobi), DomainError);
  EXPECT_THROW(transition_matrix(10.0, 1e-5, 3, 3, Regime::LargeD), RegimeError);
  EXPECT_THROW(transition_matrix(10.0, 1e-5, 3, 3, Regime::Oscillator), RegimeError);
  EXPECT_THROW(regime_from_string("nope"), DomainError);
  EXPECT_EQ(regime_from_string("large-d"), Regime::LargeD);
}
