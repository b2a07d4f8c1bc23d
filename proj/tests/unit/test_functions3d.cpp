#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "thermolim/functions3d.hpp"

using namespace thermolim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(CompositeGauss, Polynomial) {
  EXPECT_NEAR(composite_gauss([](double x) { return x * x * x - x; }, 0, 2, 4), 2.0, 1e-13);
  EXPECT_NEAR(composite_gauss([](double x) { return std::sin(x); }, 0, kPi), 2.0, 1e-13);
}

TEST(AxialBumpTest, IntegratesToWeight) {
  for (double r : {0.5, 1.0, 3.0}) {
    const AxialBump b{0.0, r, 2.5};
    const double I = composite_gauss([&](double rho) { return 4 * kPi * rho * rho * b.profile(rho); }, 0, r, 64);
    EXPECT_NEAR(I, 2.5, 1e-12);
  }
}

TEST(AxialBumpTest, FourierAtZeroAndPlancherel) {
  const AxialBump b{0.0, 1.3, 1.0};
  EXPECT_NEAR(b.fourier_radial(0.0), std::pow(2 * kPi, -1.5), 1e-13);
  const double x2 = composite_gauss([&](double r) { return 4 * kPi * r * r * std::pow(b.profile(r), 2); }, 0, 1.3, 64);
  const double p2 = composite_gauss([&](double p) { return 4 * kPi * p * p * std::pow(b.fourier_radial(p), 2); }, 0, 200, 800);
  EXPECT_NEAR(p2, x2, 1e-9 * x2);
}

TEST(TestFunction, IntegralAndSupport) {
  const TestFunction3D f({AxialBump{2.0, 1.0, 1.0}, AxialBump{-1.0, 0.5, -0.3}});
  EXPECT_NEAR(f.integral(), 0.7, 1e-15);
  EXPECT_NEAR(f.support_radius(), 3.0, 1e-15);
  EXPECT_EQ(f.value(2.0, 0.0), 0.0);
  EXPECT_GT(f.value(0.0, 2.0), 0.0);
}

TEST(TestFunction, PairingsReproduceMoments) {
  const TestFunction3D f({AxialBump{2.0, 1.0, 1.5}});
  EXPECT_NEAR(f.pair_radial([](double) { return 1.0; }), 1.5, 1e-12);
  // int f z = weight * z0 by symmetry of the bump about its centre.
  EXPECT_NEAR(f.pair_z_weighted([](double) { return 1.0; }), 3.0, 1e-12);
  // int f |x|^2 = weight (z0^2 + <rho^2>)
  const AxialBump& b = f.parts()[0];
  const double rho2 = composite_gauss([&](double r) { return 4 * kPi * r * r * r * r * b.profile(r); }, 0, 1, 64);
  EXPECT_NEAR(f.pair_radial([](double r) { return r * r; }), 1.5 * 4.0 + rho2, 1e-11);
}

TEST(TestFunction, ReflectionFlipsZPairing) {
  const TestFunction3D f({AxialBump{2.0, 1.0, 1.0}, AxialBump{0.5, 0.3, 0.2}});
  auto s = [](double r) { return std::exp(-r); };
  EXPECT_NEAR(f.reflected().pair_z_weighted(s), -f.pair_z_weighted(s), 1e-14);
}
