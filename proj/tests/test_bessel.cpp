#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "abguide/bessel.hpp"
#include "oracles.hpp"

using namespace abguide::bessel;

namespace {
constexpr double kPi = std::numbers::pi;
const double kOrders[] = {0.1, 0.5, 1.0, 2.5, 5.0};
}  // namespace

TEST(Bessel, ValuesMatchBoost) {
  for (const double nu : {0.0, 0.1, 0.3, 0.5, 1.0, 2.5, 5.0, 12.0}) {
    for (const double x : {1e-3, 0.2, 1.0, 3.7, 9.9, 17.0, 35.5, 80.0}) {
      const double ref = oracle::j(nu, x);
      EXPECT_NEAR(j(Order(nu), x), ref, 1e-13 + 1e-12 * std::fabs(ref)) << nu << " " << x;
    }
  }
}

TEST(Bessel, SmallArgumentsMatchSeries) {
  for (const double nu : {0.05, 0.5, 0.9, 3.0}) {
    for (const double x : {1e-6, 1e-2, 0.5, 2.0}) {
      const double ref = oracle::j_series(nu, x);
      EXPECT_NEAR(j(Order(nu), x), ref, 1e-15 + 1e-13 * std::fabs(ref));
    }
  }
}

TEST(Bessel, DerivativeMatchesBoost) {
  for (const double nu : {0.1, 0.5, 1.0, 2.5, 5.0}) {
    for (const double x : {0.3, 1.1, 4.0, 12.0, 40.0}) {
      const double ref = oracle::jp(nu, x);
      EXPECT_NEAR(j_prime(Order(nu), x), ref, 1e-12 + 1e-11 * std::fabs(ref));
    }
  }
}

TEST(Bessel, HalfOrderZerosAreMultiplesOfPi) {
  const auto z = zeros_j(Order(0.5), 5);
  ASSERT_EQ(z.size(), 5u);
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(z[static_cast<std::size_t>(n - 1)], n * kPi, 1e-12);
}

TEST(Bessel, HalfOrderDerivativeZerosSolveTanEqualsTwoX) {
  const auto ref = oracle::half_order_prime_zeros(5);
  const auto z = zeros_j_prime(Order(0.5), 5);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(z[i], ref[i], 1e-11);
}

TEST(Bessel, ZerosMatchBoost) {
  for (const double nu : kOrders) {
    for (int n = 1; n <= 8; ++n) {
      EXPECT_NEAR(zero_j(Order(nu), ZeroIndex(n)), oracle::zero_j(nu, n), 1e-11) << nu << " " << n;
    }
  }
}

TEST(Bessel, DerivativeZerosMatchScan) {
  for (const double nu : {0.05, 0.1, 0.5, 1.0, 2.5, 5.0, 9.0}) {
    for (int n = 1; n <= 5; ++n) {
      EXPECT_NEAR(zero_j_prime(Order(nu), ZeroIndex(n)), oracle::zero_jp(nu, n), 1e-10) << nu << " " << n;
    }
  }
}

TEST(Bessel, ZerosInterlace) {
  // x'_{nu,n} < x_{nu,n} < x'_{nu,n+1} for nu > 0.
  for (const double nu : kOrders) {
    const auto z = zeros_j(Order(nu), 6);
    const auto zp = zeros_j_prime(Order(nu), 7);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_LT(zp[i], z[i]);
      EXPECT_LT(z[i], zp[i + 1]);
    }
  }
}

TEST(Bessel, ZeroOrderDerivativeZeroIsRejected) {
  EXPECT_THROW(zero_j_prime(Order(0.0), ZeroIndex(1)), std::domain_error);
}

TEST(Bessel, InvalidArgumentsThrow) {
  EXPECT_THROW(Order(-0.5), std::domain_error);
  EXPECT_THROW(Order(std::nan("")), std::domain_error);
  EXPECT_THROW(ZeroIndex(0), std::domain_error);
  EXPECT_THROW(j(Order(1.0), 0.0), std::domain_error);
  EXPECT_THROW(j(Order(1.0), -1.0), std::domain_error);
}

TEST(Bessel, AiryRootsMatchAiryPrimeZeros) {
  // beta_n 2^{-1/3} and the zeros of Ai'(-x) differ by the factor 2^{1/3}.
  for (int n = 1; n <= 4; ++n) {
    const double a = airy_constant(ZeroIndex(n));
    EXPECT_NEAR(a * std::cbrt(2.0), oracle::airy_prime_zero(n), 1e-9) << n;
    EXPECT_NEAR(airy_root(ZeroIndex(n)) * std::cbrt(0.5), a, 1e-14);
  }
}

TEST(Bessel, McMahonApproachesZerosForLargeIndex) {
  for (const double nu : {0.5, 2.5}) {
    EXPECT_NEAR(mcmahon_zero(Order(nu), ZeroIndex(30)), oracle::zero_j(nu, 30), 1e-7);
    EXPECT_NEAR(mcmahon_zero_prime(Order(nu), ZeroIndex(30)), oracle::zero_jp(nu, 30), 1e-6);
  }
}

TEST(Bessel, DirichletZeroLowerBoundHolds) {
  for (const double nu : kOrders) {
    for (int n = 1; n <= 5; ++n) {
      EXPECT_LT(lower_bound_zero(Order(nu), ZeroIndex(n)), oracle::zero_j(nu, n));
    }
  }
}

TEST(Bessel, AiryTypeEstimateFailsForSmallOrder) {
  // Counterexample that keeps the estimate from being a lower bound at nu = 0.1.
  EXPECT_GT(lower_bound_zero_prime(Order(0.1), ZeroIndex(1)), oracle::zero_jp(0.1, 1));
  for (const double nu : {0.2, 0.5, 1.0, 2.5, 5.0}) {
    EXPECT_LT(lower_bound_zero_prime(Order(nu), ZeroIndex(1)), oracle::zero_jp(nu, 1)) << nu;
  }
}
