#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "thermolim/errors.hpp"
#include "thermolim/propagators.hpp"
#include "thermolim/quasifree.hpp"

using namespace thermolim;

namespace {

constexpr double kPi = std::numbers::pi;

// sum_k z^k / k^a
double polylog(double a, double z) {
  double s = 0.0, zk = 1.0;
  for (int k = 1; k < 100000; ++k) {
    zk *= z;
    const double term = zk / std::pow(k, a);
    s += term;
    if (term < 1e-18 * s) break;
  }
  return s;
}

std::shared_ptr<const SpectralDecomposition> trap(double R, double L, std::size_t n) {
  const Grid1D g(L, n);
  return std::make_shared<const SpectralDecomposition>(
      diagonalize(assemble(g, PotentialSpec::truncated_harmonic(R, 1.0))));
}

struct TrappedState : ::testing::Test {
  std::shared_ptr<const SpectralDecomposition> decomp = trap(8, 16, 512);
  const Grid1D& grid = *decomp->grid;
  QuasifreeState state{1.0, -0.5, decomp};
};

}  // namespace

TEST(BoseWeights, MonotoneAndPositive) {
  const BoseWeightTable w({0.1, 0.5, 1.0, 4.0}, 2.0, -0.3);
  for (std::size_t k = 0; k < w.size(); ++k) EXPECT_GT(w[k], 0.0);
  for (std::size_t k = 1; k < w.size(); ++k) EXPECT_LT(w[k], w[k - 1]);
  EXPECT_NEAR(w[0], 1.0 / (std::exp(2.0 * 0.4) - 1.0), 1e-14);
}

TEST(BoseWeights, MuAboveGroundLevelRejected) {
  EXPECT_THROW(BoseWeightTable({0.1, 0.5}, 1.0, 0.1), DomainError);
  EXPECT_THROW(BoseWeightTable({0.1, 0.5}, 1.0, 0.1 - 1e-7), DomainError);
  EXPECT_NO_THROW(BoseWeightTable({0.1, 0.5}, 1.0, 0.1 - 2e-6));
}

TEST(HomogeneousDensity, LineMatchesPolylogSeries) {
  for (double beta : {0.5, 1.0, 3.0})
    for (double mu : {-1.0, -0.1, -0.01}) {
      const double want = polylog(0.5, std::exp(beta * mu)) / std::sqrt(4.0 * kPi * beta);
      EXPECT_NEAR(homogeneous_density(beta, mu, 1), want, 1e-8 * want) << beta << " " << mu;
    }
}

TEST(HomogeneousDensity, PlaneMatchesLogarithm) {
  const double beta = 1.5, mu = -0.2;
  const double want = -std::log1p(-std::exp(beta * mu)) / (4.0 * kPi * beta);
  EXPECT_NEAR(homogeneous_density(beta, mu, 2), want, 1e-8 * want);
}

TEST(HomogeneousDensity, SpaceCriticalDensityMatchesZeta) {
  const double zeta32 = 2.612375348685488;
  for (double beta : {0.5, 1.0, 2.0}) {
    const double want = zeta32 * std::pow(4.0 * kPi * beta, -1.5);
    EXPECT_NEAR(homogeneous_density(beta, 0.0, 3), want, 1e-8 * want);
  }
  const double want = polylog(1.5, std::exp(-0.3)) * std::pow(4.0 * kPi, -1.5);
  EXPECT_NEAR(homogeneous_density(1.0, -0.3, 3), want, 1e-8 * want);
}

TEST(HomogeneousDensity, DivergesAsMuApproachesZeroOnTheLine) {
  const double a = homogeneous_density(1, -0.1, 1);
  const double b = homogeneous_density(1, -0.01, 1);
  const double c = homogeneous_density(1, -0.001, 1);
  EXPECT_GT(b / a, 2.0);
  EXPECT_GT(c / b, 2.0);
}

TEST(HomogeneousDensity, DomainErrors) {
  EXPECT_THROW(homogeneous_density(1, 0.0, 1), DomainError);
  EXPECT_THROW(homogeneous_density(1, 0.0, 2), DomainError);
  EXPECT_THROW(homogeneous_density(1, 0.1, 3), DomainError);
  EXPECT_THROW(homogeneous_density(1, -1, 4), ConfigError);
}

TEST(FieldResolvent, ClosedFormErfc) {
  for (double lambda : {0.5, 1.0, 2.0})
    for (double s2 : {0.01, 1.0, 7.0}) {
      const double s = std::sqrt(s2);
      const double want = std::sqrt(kPi / 2.0) / s * std::exp(lambda * lambda / (2 * s2)) *
                          std::erfc(lambda / (s * std::sqrt(2.0)));
      EXPECT_NEAR(field_resolvent_from_variance(lambda, s2), want, 1e-10 * want);
    }
}

TEST(FieldResolvent, ZeroVarianceAndBounds) {
  EXPECT_EQ(field_resolvent_from_variance(2.0, 0.0), 0.5);
  EXPECT_LT(field_resolvent_from_variance(2.0, 0.3), 0.5);
  EXPECT_THROW(field_resolvent_from_variance(0.0, 1.0), DomainError);
}

TEST(NumberResolvent, VacuumAndRange) {
  EXPECT_EQ(number_resolvent_from_occupation(2.0, 1.0, 0.0), 0.5);
  double prev = 1.0;
  for (double nbar : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double v = number_resolvent_from_occupation(1.0, 1.0, nbar);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_THROW(number_resolvent_from_occupation(-1.0, 1.0, 1.0), DomainError);
}

TEST(NumberResolvent, GeometricSumForUnitNorm) {
  // lambda = 1, ||f|| = 1, nbar = 1: sum 2^{-(n+1)}/(1+n) = ln 2.
  EXPECT_NEAR(number_resolvent_from_occupation(1.0, 1.0, 1.0), std::log(2.0), 1e-11);
}

TEST_F(TrappedState, KmsRelationHoldsSpectrally) { EXPECT_LT(state.kms_residual(), 1e-10); }

TEST_F(TrappedState, HermitianPositiveFamily) {
  std::vector<WaveFunction> fam;
  for (double c : {-3.0, -1.0, 0.0, 1.5, 3.0}) fam.push_back(bump(c, 1.5, grid));
  fam.push_back(WaveFunction::sample(grid, [](double x) {
    return bump_profile(x, 0.5, 2.0) * std::polar(1.0, 0.7 * x);
  }));
  const std::size_t m = fam.size();
  Eigen::MatrixXcd G(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) G(i, j) = state.two_point(fam[j], fam[i]);
  EXPECT_LT((G - G.adjoint()).norm(), 1e-13 * G.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST_F(TrappedState, GaugeInvariance) {
  const WaveFunction f = bump(0.5, 2, grid);
  const WaveFunction g = std::polar(1.0, 1.1) * f;
  EXPECT_NEAR(state.two_point(f, f).real(), state.two_point(g, g).real(), 1e-13);
  EXPECT_NEAR(state.two_point(g, g).imag(), 0.0, 1e-14);
}

TEST_F(TrappedState, LocalNumberAdditiveAndMatchesDeltaBasis) {
  const double n1 = state.local_particle_number(-4, 1);
  const double n2 = state.local_particle_number(1, 5);
  const double n12 = state.local_particle_number(-4, 5);
  EXPECT_NEAR(n1 + n2, n12, 1e-12 * n12);
  EXPECT_EQ(state.local_particle_number(2, 2), 0.0);
  EXPECT_THROW(state.local_particle_number(-20, 0), UsageError);

  // N(O) as a trace over the grid delta basis of L^2([a, b)).
  double trace = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    if (x < -4 || x >= 5) continue;
    WaveFunction e(grid);
    e.set(j, 1.0 / std::sqrt(grid.dx()));
    trace += state.two_point(e, e).real();
  }
  EXPECT_NEAR(trace, n12, 1e-11 * n12);
}

TEST_F(TrappedState, DensityIntegratesToLocalNumber) {
  const std::vector<double> rho = state.density();
  double s = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    EXPECT_GE(rho[j], 0.0);
    s += rho[j];
  }
  EXPECT_NEAR(s * grid.dx(), state.local_particle_number(-16, 16), 1e-10);
  EXPECT_NEAR(state.position_density(0.0), rho[grid.index_of(0.0)], 1e-13);
}

TEST(TrappedVacuum, ColdStateHasNoThermalParticles) {
  auto d = trap(8, 16, 512);
  const QuasifreeState cold(200.0, -1.0, d);
  const WaveFunction f = bump(0, 2, *d->grid);
  EXPECT_LE(std::abs(cold.two_point(f, f)), 1e-8);
}

TEST(TrappedCondensate, AmplitudeSquaredForAlignedMode) {
  auto d = trap(8, 16, 512);
  const WaveFunction h = d->mode(0);
  Condensate c{0.5, h, LimitMode::None};
  const QuasifreeState cold(200.0, -1.0, d, c);
  EXPECT_NEAR(cold.two_point(h, h).real(), 0.25, 1e-8);
  // Orthogonal to h: odd mode, condensate term exactly absent.
  const WaveFunction g = d->mode(1);
  const QuasifreeState bare(200.0, -1.0, d);
  EXPECT_EQ(cold.two_point(g, g), bare.two_point(g, g) + 0.25 * std::norm(inner(h, g)));
}

TEST(TrappedCondensate, StationaryUnderTrapDynamics) {
  auto d = trap(8, 16, 512);
  Condensate c{0.5, d->mode(0), LimitMode::None};
  const QuasifreeState st(1.0, -0.2, d, c);
  const WaveFunction f = bump(0.7, 2, *d->grid);
  const WaveFunction g = bump(-1.0, 1.5, *d->grid);
  const cdouble base = st.two_point(f, g);
  for (double t : {0.5, 1.0}) {
    const cdouble moved = st.two_point(evolve_spectral(*d, f, t), evolve_spectral(*d, g, t));
    EXPECT_LT(std::abs(moved - base), 1e-8);
  }
}

TEST(TrappedTruncation, ReportsWeightOfFirstMissingLevel) {
  const Grid1D g(16, 512);
  auto d = std::make_shared<const SpectralDecomposition>(
      diagonalize_lowest(assemble(g, PotentialSpec::truncated_harmonic(8, 1)), 20));
  const QuasifreeState st(1.0, -0.5, d);
  EXPECT_NEAR(st.truncation_weight(), bose_weight(1.0, d->eigenvalue(19), -0.5), 1e-15);
  auto full = trap(8, 16, 512);
  EXPECT_EQ(QuasifreeState(1.0, -0.5, full).truncation_weight(), 0.0);
  EXPECT_THROW(QuasifreeState(1.0, 0.5, full), DomainError);
}

TEST(LimitLine, ZeroTimeReducesToTwoPoint) {
  const Grid1D g(40, 2048);
  const LimitState1D st(1.0, -1.0);
  const WaveFunction f = bump(0, 2, g), h = bump(1, 1.5, g);
  EXPECT_LT(std::abs(st.temporal_correlation(f, h, 0.0) - st.two_point(f, h)), 1e-14);
}

TEST(LimitLine, QuadratureMatchesDiscreteMomentumSum) {
  const Grid1D g(40, 2048);
  const LimitState1D st(1.0, -1.0);
  const WaveFunction f = bump(0, 2, g), h = bump(1, 1.5, g);
  for (double t : {0.0, 0.5, 2.0}) {
    const cdouble a = st.temporal_correlation(f, h, t);
    const cdouble b = st.temporal_correlation_fft(f, h, t);
    EXPECT_LT(std::abs(a - b), 1e-8) << t;
  }
}

TEST(LimitLine, HermitianAndGaugeInvariant) {
  const Grid1D g(40, 2048);
  const LimitState1D st(0.7, -0.3);
  const WaveFunction f = bump(0, 2, g), h = bump(1, 1.5, g);
  EXPECT_LT(std::abs(st.two_point(f, h) - std::conj(st.two_point(h, f))), 1e-12);
  const WaveFunction fr = std::polar(1.0, 2.0) * f;
  EXPECT_NEAR(st.number_resolvent_expectation(1.0, f), st.number_resolvent_expectation(1.0, fr), 1e-13);
}

TEST(LimitLine, DensityIsHomogeneousPlusCondensate) {
  const LimitState1D thermal(1.0, -1.0);
  EXPECT_NEAR(thermal.position_density(3.0), homogeneous_density(1.0, -1.0, 1), 1e-15);
  const LimitState1D odd(1.0, -1.0, Condensate{0.5, std::nullopt, LimitMode::Odd});
  EXPECT_NEAR(odd.position_density(2.0) - thermal.position_density(2.0), 1.0, 1e-14);
  const LimitState1D even(1.0, -1.0, Condensate{0.5, std::nullopt, LimitMode::Even});
  EXPECT_NEAR(even.position_density(-7.0) - thermal.position_density(-7.0), 0.25, 1e-14);
}

TEST(LimitLine, ResolventGuards) {
  const Grid1D g(40, 2048);
  const WaveFunction f = bump_unit_integral(0, 2, g);
  const LimitState1D even(1.0, -1.0, Condensate{0.5, std::nullopt, LimitMode::Even});
  EXPECT_THROW(even.field_resolvent_expectation(1.0, f), UsageError);
  EXPECT_THROW(even.number_resolvent_expectation(1.0, f), UsageError);
  const WaveFunction d0 = bump_antisymmetrized(1, 1, 0.5, g);
  EXPECT_NO_THROW(even.number_resolvent_expectation(1.0, d0));
  EXPECT_THROW(LimitState1D(1.0, 0.0), DomainError);
}

TEST(LimitLine, FieldResolventUsesTwoPointVariance) {
  const Grid1D g(40, 2048);
  const LimitState1D st(1.0, -0.5);
  const WaveFunction f = bump(0, 2, g);
  const double s2 = st.two_point(f, f).real();
  EXPECT_NEAR(st.field_resolvent_expectation(1.5, f), field_resolvent_from_variance(1.5, s2), 1e-15);
}

TEST(MuScan, ZeroIntegralConvergesPositive) {
  const Grid1D g(60, 4096);
  const WaveFunction f = bump_antisymmetrized(1, 1, 0.5, g);
  // nbar approaches its limit like sqrt|mu|, so the decade steps only settle
  // below 1e-4 once mu reaches 1e-8.
  const std::vector<double> mus{-0.1, -0.01, -1e-3, -1e-4, -1e-5, -1e-6, -1e-7, -1e-8};
  const MuScanReport rep = mu_limit_scan(1.0, f, 1.0, mus);
  EXPECT_EQ(rep.verdict, "converges-positive");
  const MuScanReport with_kappa =
      mu_limit_scan(1.0, f, 1.0, mus, Condensate{0.5, std::nullopt, LimitMode::Even});
  EXPECT_EQ(with_kappa.verdict, rep.verdict);
}

TEST(MuScan, UnitIntegralDecreases) {
  const Grid1D g(60, 4096);
  const WaveFunction f = bump_unit_integral(0, 2, g);
  const MuScanReport rep = mu_limit_scan(1.0, f, 1.0, {-0.1, -0.01, -0.001, -1e-4});
  EXPECT_TRUE(rep.decreasing);
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    EXPECT_GT(rep.rows[i].occupation, rep.rows[i - 1].occupation);
  EXPECT_THROW(mu_limit_scan(1.0, f, 1.0, {-0.01, -0.1}), ConfigError);
}

TEST(MemorySpace, CondensateTermIsTimeIndependent) {
  const LimitState3D st(1.0, 0.0, 0.5);
  const AxialBump f{0.0, 1.0, 1.0};
  const cdouble first = st.temporal_correlation(f, f, 0.0).condensate;
  EXPECT_NEAR(first.real(), 0.25, 1e-14);
  for (double t : {0.0, 5.0, 40.0}) {
    const MemoryResult r = st.temporal_correlation(f, f, t);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.condensate, first);
    EXPECT_LT(std::abs(r.total - r.thermal - 0.25), 1e-14);
  }
}

TEST(MemorySpace, ThermalTermAtZeroTimeMatchesRadialIntegral) {
  // <f, T f> = 4 pi int p^2 n(p) fhat(p)^2 dp, evaluated here with boost-free Simpson.
  const LimitState3D st(1.0, -0.4);
  const AxialBump f{0.0, 1.5, 1.0};
  const int m = 20000;
  const double P = 12.0, h = P / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double p = i * h;
    const double v = p == 0.0 ? 0.0 : p * p / std::expm1(p * p + 0.4) * std::pow(f.fourier_radial(p), 2);
    s += v * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
  }
  const double want = 4.0 * kPi * s * h / 3.0;
  EXPECT_NEAR(st.temporal_correlation(f, f, 0.0).thermal.real(), want, 1e-9 * want);
}

TEST(MemorySpace, ThermalTermDecays) {
  const LimitState3D st(1.0, 0.0, 0.0);
  const AxialBump f{0.0, 1.0, 1.0};
  double prev = std::abs(st.temporal_correlation(f, f, 5.0).thermal);
  for (double t : {10.0, 20.0, 40.0}) {
    const double v = std::abs(st.temporal_correlation(f, f, t).thermal);
    EXPECT_LT(v, prev) << t;
    prev = v;
  }
}
