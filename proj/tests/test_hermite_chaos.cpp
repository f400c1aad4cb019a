#include "sojourn/errors.hpp"
#include "sojourn/gaussian.hpp"
#include "sojourn/hermite_chaos.hpp"
#include "sojourn/variance_theory.hpp"

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace sojourn;

namespace {

// Probabilists' polynomials from physicists' ones: He_n(x) = 2^{-n/2} H_n(x/√2).
double he_oracle(int n, double x) {
  return std::pow(2.0, -0.5 * n) * boost::math::hermite(static_cast<unsigned>(n), x / std::numbers::sqrt2);
}

}  // namespace

TEST(Hermite, SmallOrders) {
  EXPECT_EQ(hermite(0, 7.3), 1.0);
  EXPECT_EQ(hermite(3, 1.0), -2.0);
  EXPECT_EQ(hermite(4, 0.0), 3.0);
}

TEST(Hermite, MatchesExplicitPolynomials) {
  const auto explicit_he = [](int n, double x) {
    const double x2 = x * x;
    switch (n) {
      case 0: return 1.0;
      case 1: return x;
      case 2: return x2 - 1;
      case 3: return x * (x2 - 3);
      case 4: return x2 * x2 - 6 * x2 + 3;
      case 5: return x * (x2 * x2 - 10 * x2 + 15);
      default: return x2 * x2 * x2 - 15 * x2 * x2 + 45 * x2 - 15;
    }
  };
  for (int n = 0; n <= 6; ++n) {
    for (int i = 0; i < 100; ++i) {
      const double x = -5.0 + 10.0 * (i + 0.37) / 100.0;
      const double want = explicit_he(n, x);
      EXPECT_NEAR(hermite(n, x), want, 1e-12 * std::max(1.0, std::abs(want))) << n << ' ' << x;
    }
  }
}

TEST(Hermite, MatchesBoostPhysicistsConversion) {
  for (int n : {7, 15, 30}) {
    for (double x : {-3.3, -0.4, 0.9, 4.1}) {
      const double want = he_oracle(n, x);
      EXPECT_NEAR(hermite(n, x), want, 1e-11 * std::abs(want));
    }
  }
}

TEST(Hermite, Parity) {
  for (int n = 0; n <= 20; ++n) {
    for (double x : {0.3, 1.7, 3.9}) {
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      EXPECT_NEAR(hermite(n, -x), sign * hermite(n, x), 1e-14 * std::abs(hermite(n, x)));
    }
  }
}

TEST(Hermite, OrthogonalityUnderGaussianWeight) {
  // The trapezoid rule is spectrally accurate for Gaussian-weighted polynomials.
  const int steps = 8000;
  const double a = -40.0, b = 40.0, dx = (b - a) / steps;
  for (int m = 0; m <= 12; ++m) {
    for (int n = m; n <= 12; ++n) {
      double sum = 0.0;
      for (int i = 0; i <= steps; ++i) {
        const double x = a + dx * i;
        sum += normal_pdf(x) * hermite(m, x) * hermite(n, x);
      }
      // Relative to the norms √(m! n!); off-diagonal sums cancel terms of that size.
      const double norm = std::sqrt(boost::math::factorial<double>(static_cast<unsigned>(m)) *
                                    boost::math::factorial<double>(static_cast<unsigned>(n)));
      const double want = m == n ? norm : 0.0;
      EXPECT_NEAR(sum * dx, want, 1e-8 * norm) << m << ' ' << n;
    }
  }
}

TEST(HermiteScaled, Examples) {
  EXPECT_DOUBLE_EQ(hermite_scaled(0, 0.0), 1.0);
  EXPECT_NEAR(hermite_scaled(3, 1.0), std::exp(-0.25) * -2.0 / std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(hermite_scaled(3, 1.0), -0.635888, 1e-6);
  const double v = hermite_scaled(2000, 0.0);
  ASSERT_TRUE(std::isfinite(v));
  EXPECT_LE(std::abs(v), 1.0);
  // H_{2m}(0) = (-1)^m (2m-1)!!, so |value| = (2m)! / (2^m m! √((2m)!)).
  const double log_abs = 0.5 * std::lgamma(2001.0) - 1000.0 * std::log(2.0) - std::lgamma(1001.0);
  EXPECT_NEAR(v, std::exp(log_abs), 1e-12);
}

TEST(HermiteScaled, AgreesWithDirectFormulaAndStaysFinite) {
  for (int n : {0, 1, 5, 20, 60}) {
    for (double x : {-4.0, -1.2, 0.0, 2.5}) {
      const double want = std::exp(-x * x / 4.0) * he_oracle(n, x) /
                          std::sqrt(boost::math::factorial<double>(static_cast<unsigned>(n)));
      EXPECT_NEAR(hermite_scaled(n, x), want, 1e-11 * std::max(1e-3, std::abs(want)));
    }
  }
  for (int n : {1000, 5000, 10000}) {
    for (double x : {-50.0, -7.0, 0.5, 13.0, 50.0}) {
      const double v = hermite_scaled(n, x);
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_LE(std::abs(v), kCramer);
    }
  }
}

TEST(HermiteScaled, SequenceMatchesPointwise) {
  std::vector<double> seq(40);
  hermite_scaled_sequence(1.3, seq);
  for (int n = 0; n < 40; ++n) EXPECT_NEAR(seq[n], hermite_scaled(n, 1.3), 1e-14);
}

TEST(ChaosCoefficient, Examples) {
  EXPECT_NEAR(chaos_coefficient(1, 0.0).value, 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_EQ(chaos_coefficient(2, 0.0).value, 0.0);
  EXPECT_NEAR(chaos_coefficient(2, 1.0).value, normal_pdf(1.0) / 2.0, 1e-15);
  EXPECT_NEAR(chaos_coefficient(2, 1.0).value, 0.1209854, 5e-8);
}

TEST(ChaosCoefficient, DirectAndLogDomainAgree) {
  for (int n = 1; n <= 30; ++n) {
    for (double u : {-1.5, 0.4, 2.2}) {
      const double want =
          normal_pdf(u) * hermite(n - 1, u) / boost::math::factorial<double>(static_cast<unsigned>(n));
      EXPECT_NEAR(chaos_coefficient(n, u).value, want, 1e-13 * std::abs(want) + 1e-300);
    }
  }
  // Across the n = 30 switch the representation changes; the identity
  // n! c_n² = φ(u)² H²_{n-1} / n! must hold on both sides.
  for (int n : {29, 30, 31, 32, 60}) {
    const double u = 0.7;
    const double c = chaos_coefficient(n, u).value;
    const double h = hermite_scaled(n - 1, u);
    const double want = std::exp(-u * u / 2.0) / (2.0 * std::numbers::pi) * h * h / n;
    EXPECT_NEAR(std::exp(std::lgamma(n + 1.0)) * c * c, want, 1e-12 * want);
  }
}

TEST(IndicatorVariance, Examples) {
  EXPECT_NEAR(indicator_variance_series(0.0, 1e-8), 0.25, 1e-8);
  const double t2 = normal_tail(2.0);
  EXPECT_NEAR(indicator_variance_series(2.0, 1e-8), t2 * (1.0 - t2), 1e-8);
  EXPECT_NEAR(indicator_variance_series(2.0, 1e-8), 0.0222326, 5e-8);
  EXPECT_LT(indicator_variance_series(8.0, 1e-8), 1e-14);
}

TEST(IndicatorVariance, UnreachableToleranceThrows) {
  EXPECT_THROW(indicator_variance_series(0.5, 1e-8, 10), ConvergenceError);
}

TEST(Mehler, Examples) {
  EXPECT_DOUBLE_EQ(mehler_covariance(1, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(mehler_covariance(2, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(mehler_covariance(3, -1.0), -6.0);
}

TEST(Mehler, SeriesMatchesIndicatorCovarianceQuadrature) {
  for (double u : {0.0, 1.0, 2.0}) {
    for (double rho : {0.1, 0.5, 0.9}) {
      EXPECT_NEAR(chaos_covariance_series(u, rho), covariance_of_indicators(u, rho), 1e-8) << u << ' ' << rho;
    }
  }
}

TEST(Inequality, Examples) {
  const auto c2 = chaos_variance_inequality(2);
  EXPECT_EQ(c2.lhs, BigRational(2));
  EXPECT_EQ(c2.rhs, BigInt(9));
  EXPECT_TRUE(c2.holds);
  const auto c3 = chaos_variance_inequality(3);
  EXPECT_EQ(c3.lhs, BigRational(14));
  EXPECT_EQ(c3.rhs, BigInt(81));
  EXPECT_TRUE(c3.holds);
  EXPECT_TRUE(chaos_variance_inequality(15).holds);
}

TEST(Inequality, HoldsUpTo50WithIndependentLhs) {
  for (int p = 2; p <= 50; ++p) {
    const auto cert = chaos_variance_inequality(p);
    // Σ_r C(p-1,r)² C(2(p-1-r), p-1-r) recomputed with Pascal's triangle.
    std::vector<std::vector<BigInt>> pascal(2 * p, std::vector<BigInt>(2 * p, 0));
    for (int i = 0; i < 2 * p; ++i) {
      pascal[i][0] = 1;
      for (int j = 1; j <= i; ++j) pascal[i][j] = pascal[i - 1][j - 1] + (j < i ? pascal[i - 1][j] : BigInt(0));
    }
    BigInt lhs = 0;
    for (int r = 0; r <= p - 2; ++r) {
      lhs += pascal[p - 1][r] * pascal[p - 1][r] * pascal[2 * (p - 1 - r)][p - 1 - r];
    }
    BigInt nine = 1;
    for (int i = 0; i < p - 1; ++i) nine *= 9;
    EXPECT_EQ(cert.lhs, BigRational(lhs)) << p;
    EXPECT_EQ(cert.rhs, nine) << p;
    EXPECT_TRUE(cert.holds) << p;
  }
}

TEST(MalliavinBound, Examples) {
  EXPECT_NEAR(malliavin_derivative_variance_bound(2, 1.0, 1, 1.0).value, 32.0, 1e-12 * 32.0);
  EXPECT_NEAR(malliavin_derivative_variance_bound(2, 16.0, 1, 1.0).value, 2.0, 1e-12 * 2.0);
  // r=0: (0!)²·C(2,0)⁴·4! = 24; r=1: (1!)²·C(2,1)⁴·2! = 32; 81·56.
  EXPECT_NEAR(malliavin_derivative_variance_bound(3, 1.0, 1, 1.0).value, 4536.0, 1e-12 * 4536.0);
  EXPECT_EQ(malliavin_combinatorial_sum(3), BigInt(56));
}

TEST(MalliavinBound, OverflowKeepsExactLog) {
  const auto v = malliavin_derivative_variance_bound(400, 10.0, 1, 2.0);
  EXPECT_TRUE(v.overflow);
  EXPECT_TRUE(std::isinf(v.value));
  const double want = 4.0 * std::log(400.0) - std::log(10.0) + log_of(malliavin_combinatorial_sum(400)) +
                      3.0 * std::log(2.0);
  EXPECT_NEAR(v.log_value, want, 1e-9 * want);
}

TEST(HermiteBoundScan, KhatAtZero) {
  const std::vector<double> grid{0.0};
  const auto scan = hermite_bound_scan(grid, 200);
  EXPECT_NEAR(scan.K_hat, 0.3989, 1e-4);
  EXPECT_EQ(scan.K_argmax_n, 0);
}

TEST(HermiteBoundScan, ParityAndEn3Stability) {
  const std::vector<double> pos{0.5, 1.5, 3.0};
  const std::vector<double> neg{-0.5, -1.5, -3.0};
  EXPECT_DOUBLE_EQ(hermite_bound_scan(pos, 300).K_hat, hermite_bound_scan(neg, 300).K_hat);
  const double r500 = en3_peak_ratio(500).ratio;
  const double r2000 = en3_peak_ratio(2000).ratio;
  EXPECT_LT(std::abs(r2000 / r500 - 1.0), 0.05);
}

TEST(HermiteBoundScan, En1ConstantDominatesScaledSequence) {
  // e^{-u²/4}|H_n(u)| ≤ C_u (n/e)^{n/2} over the scanned range, by definition.
  const double u = 1.1;
  const double cu = en1_constant(u, 400);
  for (int n = 1; n <= 400; n += 37) {
    const double log_lhs = std::log(std::abs(hermite_scaled(n, u))) + 0.5 * std::lgamma(n + 1.0);
    EXPECT_LE(log_lhs, std::log(cu) + 0.5 * n * (std::log(n) - 1.0) + 1e-12);
  }
}
