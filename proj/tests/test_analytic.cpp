#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "abguide/analytic.hpp"
#include "oracles.hpp"

using namespace abguide;
using namespace abguide::analytic;

namespace {
constexpr double kPi = std::numbers::pi;
const double kRadiusScale = 2.0 / (std::sqrt(3.0) * kPi);
}  // namespace

TEST(Analytic, Thresholds) {
  const Geometry g{2.0, 1.0, 10.0};
  EXPECT_DOUBLE_EQ(essential_threshold(g), kPi * kPi / 4.0);
  EXPECT_DOUBLE_EQ(lower_threshold(g), kPi * kPi / 16.0);
  EXPECT_THROW(essential_threshold(Geometry{0.0, 1.0, 2.0}), std::invalid_argument);
}

TEST(Analytic, GeometryValidation) {
  EXPECT_NO_THROW(validate(Geometry::with_default_truncation(kPi, 3.0)));
  EXPECT_DOUBLE_EQ(Geometry::with_default_truncation(1.0, 2.0).r_max, 8.0);
  EXPECT_THROW(validate(Geometry{-1.0, 1.0, 5.0}), std::invalid_argument);
  EXPECT_THROW(validate(Geometry{1.0, -1.0, 5.0}), std::invalid_argument);
  EXPECT_THROW(validate(Geometry{1.0, 5.0, 5.0}), std::invalid_argument);
}

TEST(Analytic, FluxMode) {
  const FluxMode f(0.3, -2);
  EXPECT_DOUBLE_EQ(f.nu(), 2.3);
  EXPECT_THROW(FluxMode(1.0, 0), std::domain_error);
  EXPECT_THROW(FluxMode(std::nan(""), 0), std::domain_error);
  EXPECT_NEAR(nearest_order(0.7), 0.3, 1e-15);
  EXPECT_NEAR(nearest_order(-1.2), 0.2, 1e-15);
}

TEST(Analytic, InteriorSpectrumIsSortedLattice) {
  // Brute-force the (j, n) lattice with oracle zeros and compare.
  const Geometry g{kPi, 2.0, 20.0};
  for (const auto side : {Wall::Neumann, Wall::Dirichlet}) {
    const double nu = 0.7;
    std::vector<double> ref;
    for (int n = 1; n <= 12; ++n) {
      const double x = side == Wall::Neumann ? oracle::zero_jp(nu, n) : oracle::zero_j(nu, n);
      for (int j = 0; j < 12; ++j) {
        const double kz = (2.0 * j + 1.0) / 2.0;
        ref.push_back(x * x / 4.0 + kz * kz);
      }
    }
    std::sort(ref.begin(), ref.end());
    const auto got = interior_spectrum(g, nu, 1, side, 15);
    ASSERT_EQ(got.size(), 15u);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i].value, ref[i], 1e-10);
      EXPECT_EQ(got[i].m, 1);
      EXPECT_EQ(got[i].side, side);
    }
  }
}

TEST(Analytic, NeumannBelowDirichlet) {
  const Geometry g{kPi, 3.0, 21.0};
  const FluxMode mode(0.5, 0);
  const auto n = interior_spectrum(g, mode, Wall::Neumann, 6);
  const auto d = interior_spectrum(g, mode, Wall::Dirichlet, 6);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_LT(n[i].value, d[i].value);
}

TEST(Analytic, CriticalRadiiAtHalfFlux) {
  const auto tan_root = oracle::half_order_prime_zeros(1)[0];
  EXPECT_NEAR(critical_radius_a0(0.5), kRadiusScale * tan_root, 1e-12);
  EXPECT_NEAR(critical_radius_a1(0.5), 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(critical_radius_a0(0.5), 0.428405, 1e-5);
}

TEST(Analytic, CriticalRadiiUseNearestOrder) {
  // Periodic in alpha with period 1 and symmetric about 1/2.
  EXPECT_NEAR(critical_radius_a1(0.3), critical_radius_a1(0.7), 1e-13);
  EXPECT_NEAR(critical_radius_a1(0.3), critical_radius_a1(2.3), 1e-13);
  EXPECT_NEAR(critical_radius_a0(0.3), kRadiusScale * oracle::zero_jp(0.3, 1), 1e-10);
  EXPECT_NEAR(critical_radius_a1(0.7, RadiusVariant::Sharp, OrderRule::Literal),
              kRadiusScale * oracle::zero_j(0.7, 1), 1e-10);
}

TEST(Analytic, SharpRadiiOrdered) {
  for (int i = 1; i < 200; ++i) {
    const double alpha = i / 200.0;
    EXPECT_LT(critical_radius_a0(alpha), critical_radius_a1(alpha)) << alpha;
  }
}

TEST(Analytic, ConservativeA1IsBelowSharp) {
  for (int i = 1; i < 200; ++i) {
    const double alpha = i / 200.0;
    EXPECT_LE(critical_radius_a1(alpha, RadiusVariant::Conservative),
              critical_radius_a1(alpha, RadiusVariant::Sharp));
  }
}

TEST(Analytic, ConservativeA0ExceedsSharpForSmallOrder) {
  // The 0.6538 floor overshoots x'_{nu,1} for small nu, so the conservative
  // a0 is not conservative there. Crossing lies between 0.47 and 0.48.
  EXPECT_GT(critical_radius_a0(0.1, RadiusVariant::Conservative), critical_radius_a0(0.1));
  EXPECT_GT(kConservativeZeroFloor + 0.47, oracle::zero_jp(0.47, 1));
  EXPECT_LT(kConservativeZeroFloor + 0.48, oracle::zero_jp(0.48, 1));
  EXPECT_LT(critical_radius_a0(0.5, RadiusVariant::Conservative), critical_radius_a0(0.5));
}

TEST(Analytic, Classify) {
  EXPECT_EQ(classify(Geometry{kPi, 0.9, 20.0}, 0.5), Regime::NoDiscreteSpectrum);
  EXPECT_EQ(classify(Geometry{kPi, 4.0, 20.0}, 0.5), Regime::DiscreteSpectrumExists);
  EXPECT_EQ(classify(Geometry{kPi, 3.0, 20.0}, 0.5), Regime::Indeterminate);
  EXPECT_EQ(to_string(Regime::Indeterminate), "Indeterminate");
}

TEST(Analytic, BracketAtReferenceGeometry) {
  const Geometry g{kPi, 3.0, 21.0};
  const auto modes = default_bracket_modes(0.5);
  EXPECT_EQ(modes, (std::vector<int>{-2, -1, 0, 1, 2, 3}));
  const auto b = bracket(1, g, 0.5, modes);
  // nu = 1/2 is the smallest order; first Neumann zero from tan x = 2x.
  const double x = oracle::half_order_prime_zeros(1)[0];
  EXPECT_NEAR(b.lower, x * x / 9.0 + 0.25, 1e-12);
  EXPECT_NEAR(b.lower, 0.40097, 0.01);
  EXPECT_NEAR(b.upper, kPi * kPi / 9.0 + 0.25, 1e-12);
  for (int k = 1; k <= 6; ++k) {
    const auto bk = bracket(k, g, 0.5, modes);
    EXPECT_LT(bk.lower, bk.upper);
  }
  EXPECT_THROW(bracket(0, g, 0.5, modes), std::out_of_range);
}
