#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "thermolim/errors.hpp"
#include "thermolim/hamiltonians.hpp"

using namespace thermolim;

TEST(Potential, TruncatedHarmonicValues) {
  const auto v = PotentialSpec::truncated_harmonic(4, 1);
  EXPECT_EQ(v(5), 9.0);
  EXPECT_EQ(v(3), 0.0);
  EXPECT_EQ(v(-5), 9.0);
  EXPECT_EQ(PotentialSpec::free()(123.0), 0.0);
}

TEST(Assemble, FreeDiagonalHasNoPotential) {
  const Grid1D g(8, 64);
  const auto h = assemble(g, PotentialSpec::free());
  const double inv = 1.0 / (g.dx() * g.dx());
  for (double d : h.diagonal()) EXPECT_EQ(d, 2 * inv);
  for (double e : h.off_diagonal()) EXPECT_EQ(e, -inv);
}

TEST(Assemble, GeneralPotentialGridMismatch) {
  const Grid1D a(8, 64), b(8, 128);
  const auto pot = PotentialSpec::general(1, 0, std::vector<double>(64, 0.0), a);
  EXPECT_THROW(assemble(b, pot), UsageError);
}

TEST(Assemble, RadialCentrifugalTerm) {
  const RadialGrid r(10, 100);
  const auto h0 = radial_assemble(r, 0, PotentialSpec::free());
  const auto h1 = radial_assemble(r, 1, PotentialSpec::free());
  for (std::size_t j = 0; j < r.size(); ++j)
    EXPECT_NEAR(h1.diagonal()[j] - h0.diagonal()[j], 2.0 / (r.r(j) * r.r(j)), 1e-9);
  EXPECT_THROW(radial_assemble(r, -1, PotentialSpec::free()), ConfigError);
}

TEST(Diagonalize, TwoByTwo) {
  TridiagonalOperator h({2, 2}, {-1}, 1.0);
  for (auto backend : {EigenBackend::Mrrr, EigenBackend::QlImplicit}) {
    const auto d = diagonalize(h, backend);
    EXPECT_NEAR(d.eigenvalue(0), 1.0, 1e-14);
    EXPECT_NEAR(d.eigenvalue(1), 3.0, 1e-14);
  }
}

TEST(Diagonalize, ParticleInBox) {
  const double L = 5;
  const Grid1D g(L, 1024);
  const auto d = diagonalize_lowest(assemble(g, PotentialSpec::free()), 6);
  for (std::size_t k = 0; k < 6; ++k) {
    const double expected = std::pow(std::numbers::pi * (k + 1) / (2 * L), 2);
    EXPECT_NEAR(d.eigenvalue(k), expected, 0.01 * expected);
  }
}

TEST(Diagonalize, HarmonicOscillator) {
  const Grid1D g(10, 2048);
  const auto d = diagonalize_lowest(assemble(g, PotentialSpec::truncated_harmonic(0, 1)), 6);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(d.eigenvalue(k), 2.0 * k + 1.0, 0.01 * (2.0 * k + 1.0));
}

TEST(Diagonalize, BackendsAgree) {
  const Grid1D g(6, 200);
  const auto h = assemble(g, PotentialSpec::truncated_harmonic(3, 1.5));
  const auto a = diagonalize(h, EigenBackend::Mrrr);
  const auto b = diagonalize(h, EigenBackend::QlImplicit);
  for (std::size_t k = 0; k < a.count(); ++k) {
    EXPECT_NEAR(a.eigenvalue(k), b.eigenvalue(k), 1e-9 * std::max(1.0, a.eigenvalue(k)));
  }
  // Well-separated low modes: the sign convention makes the vectors comparable.
  for (std::size_t k = 0; k < 5; ++k) {
    auto ca = a.column(k), cb = b.column(k);
    double diff = 0;
    for (std::size_t j = 0; j < ca.size(); ++j) diff = std::max(diff, std::abs(ca[j] - cb[j]));
    EXPECT_LT(diff, 1e-8);
  }
  EXPECT_LT(b.max_residual(h), 1e-9);
  EXPECT_LT(b.orthonormality_defect(), 1e-10);
}

TEST(Diagonalize, ResidualsOrthonormalityPositivity) {
  const Grid1D g(28, 1024);
  const auto h = assemble(g, PotentialSpec::truncated_harmonic(6, 1));
  const auto d = diagonalize(h);
  EXPECT_LT(d.max_residual(h), 1e-9);
  EXPECT_LT(d.orthonormality_defect(), 1e-10);
  EXPECT_GE(d.eigenvalue(0), -1e-9);
  EXPECT_GE(h.gershgorin_lower(), -4.0 / (g.dx() * g.dx()) - 1e-9);
  for (std::size_t k = 1; k < d.count(); ++k) EXPECT_LE(d.eigenvalue(k - 1), d.eigenvalue(k));
}

TEST(Diagonalize, WindowMatchesFull) {
  const Grid1D g(10, 256);
  const auto h = assemble(g, PotentialSpec::truncated_harmonic(2, 1));
  const auto full = diagonalize(h);
  const auto win = diagonalize_window(h, 12.0);
  std::size_t expected = 0;
  while (expected < full.count() && full.eigenvalue(expected) < 12.0) ++expected;
  ASSERT_EQ(win.count(), expected);
  for (std::size_t k = 0; k < win.count(); ++k)
    EXPECT_NEAR(win.eigenvalue(k), full.eigenvalue(k), 1e-10);
}

TEST(Diagonalize, SignConvention) {
  const Grid1D g(10, 256);
  const auto d = diagonalize_lowest(assemble(g, PotentialSpec::truncated_harmonic(2, 1)), 4);
  for (std::size_t k = 0; k < d.count(); ++k) {
    auto c = d.column(k);
    double big = 0;
    for (double v : c) big = std::max(big, std::abs(v));
    for (double v : c) {
      if (std::abs(v) > 1e-10 * big) {
        EXPECT_GT(v, 0.0);
        break;
      }
    }
  }
}

TEST(Radial, SWaveBox) {
  const double R = 10;
  const RadialGrid r(R, 2000);
  const auto d = diagonalize_lowest(radial_assemble(r, 0, PotentialSpec::free()), 1);
  const double expected = std::pow(std::numbers::pi / R, 2);
  EXPECT_NEAR(d.eigenvalue(0), expected, 0.01 * expected);
}

TEST(Radial, PWaveTrapBelowBound) {
  for (double R : {20.0, 40.0}) {
    const RadialGrid r(2 * R + 16, static_cast<std::size_t>((2 * R + 16) * 16));
    const auto d = diagonalize_lowest(radial_assemble(r, 1, PotentialSpec::truncated_harmonic(R, 1)), 1);
    EXPECT_LE(std::sqrt(d.eigenvalue(0)), 3 * std::numbers::pi / (2 * R) * 1.1);
  }
}

TEST(Parity, SymmetricTrapGroundEvenFirstOdd) {
  const Grid1D g(28, 1024);
  const auto d = diagonalize_lowest(assemble(g, PotentialSpec::truncated_harmonic(6, 1)), 2);
  EXPECT_EQ(ground_pair(d, 0).parity, Parity::Even);
  EXPECT_EQ(ground_pair(d, 1).parity, Parity::Odd);
  EXPECT_LT(edge_amplitude(d, 0), 1e-8);
}

TEST(Parity, AsymmetricPotentialHasNone) {
  const Grid1D g(10, 256);
  std::vector<double> u(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) u[j] = 0.5 * g.x(j);
  const auto d = diagonalize_lowest(assemble(g, PotentialSpec::general(1, 0, u, g)), 1);
  EXPECT_EQ(ground_pair(d, 0).parity, Parity::None);
}

TEST(Scaling, LowLevelsScaleAsInverseSquare) {
  std::vector<double> lr, le0, le1;
  for (double R : {10.0, 20.0, 40.0, 80.0}) {
    const double L = 2 * R + 16;
    const Grid1D g(L, static_cast<std::size_t>(L * 8) * 2);
    const auto d = diagonalize_lowest(assemble(g, PotentialSpec::truncated_harmonic(R, 1)), 2);
    lr.push_back(std::log(R));
    le0.push_back(std::log(d.eigenvalue(0)));
    le1.push_back(std::log(d.eigenvalue(1)));
  }
  auto slope = [&](const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < y.size(); ++i) mx += lr[i], my += y[i];
    mx /= y.size(), my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < y.size(); ++i) sxy += (lr[i] - mx) * (y[i] - my), sxx += (lr[i] - mx) * (lr[i] - mx);
    return sxy / sxx;
  };
  EXPECT_NEAR(slope(le0), -2.0, 0.15);
  EXPECT_NEAR(slope(le1), -2.0, 0.15);
  for (std::size_t i = 1; i < le0.size(); ++i) EXPECT_LT(le0[i], le0[i - 1]);
}
