#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "thermolim/errors.hpp"
#include "thermolim/fock.hpp"
#include "thermolim/quasifree.hpp"

using namespace thermolim;
using cd = std::complex<double>;

namespace {

std::vector<cd> random_vector(std::mt19937& rng, int m) {
  std::normal_distribution<double> d;
  std::vector<cd> v(static_cast<std::size_t>(m));
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

double norm2(const std::vector<cd>& v) {
  double s = 0.0;
  for (auto x : v) s += std::norm(x);
  return s;
}

// Random unitary from the QR factor of a complex Gaussian matrix.
Eigen::MatrixXcd random_unitary(std::mt19937& rng, int m) {
  std::normal_distribution<double> d;
  Eigen::MatrixXcd g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = {d(rng), d(rng)};
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
}

std::vector<cd> apply(const Eigen::MatrixXcd& u, const std::vector<cd>& v) {
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
  Eigen::VectorXcd y = u * x;
  return {y.data(), y.data() + y.size()};
}

}  // namespace

TEST(FockSpaceTest, Dimensions) {
  EXPECT_EQ(FockSpace(1, 3, 3).dimension(), 4u);
  const FockSpace s(2, 2, 2);
  EXPECT_EQ(s.dimension(), 6u);
  const std::vector<Occupation> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(s.occupation(i), want[i]);
    EXPECT_EQ(s.index_of(want[i]), i);
  }
  EXPECT_FALSE(s.index_of({3, 0}).has_value());
  EXPECT_EQ(FockSpace(3, 4, 4).dimension(), 35u);  // C(7, 3)
}

TEST(FockSpaceTest, Limits) {
  EXPECT_THROW(FockSpace(4, 2, 2), ConfigError);
  EXPECT_THROW(FockSpace(3, 200, 200, 1000), ConfigError);
  EXPECT_EQ(FockSpace(2, 1, 3).closed_sectors(), 2);
}

TEST(FockSpaceTest, CanonicalCommutationOnInterior) {
  // Exact up to the rounding of sqrt(n) sqrt(n).
  EXPECT_LE(FockSpace(2, 4, 4).ccr_defect(), 4e-15);
  EXPECT_LE(FockSpace(3, 3, 3).ccr_defect(), 4e-15);
}

TEST(NumberResolvent, VacuumAndOneParticle) {
  const FockSpace s(3, 3, 3);
  const std::vector<cd> f{1.0, 0.0, 0.0};
  const SectorOperator a = number_resolvent_matrix(s, 2.0, f);
  EXPECT_NEAR(a.block(0)(0, 0).real(), 0.5, 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.block(1));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 3);
  std::sort(ev.begin(), ev.end());
  EXPECT_NEAR(ev[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(ev[1], 0.5, 1e-14);
  EXPECT_NEAR(ev[2], 0.5, 1e-14);
}

TEST(NumberResolvent, SectorNormIsInverseLambda) {
  std::mt19937 rng(7);
  const FockSpace s(3, 5, 5);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<cd> f = random_vector(rng, 3);
    const SectorOperator a = number_resolvent_matrix(s, 1.5, f);
    for (double v : a.norms()) EXPECT_NEAR(v, 1.0 / 1.5, 1e-13);
    EXPECT_LT(a.hermiticity_defect(), 1e-14);
  }
}

TEST(NumberResolvent, SpectrumInRotatedBasis) {
  // On F_n the eigenvalues are 1/(lambda + k ||f||^2), k = 0..n, with the
  // multiplicity of Sym^{n-k} of the 2-dimensional complement: n - k + 1.
  std::mt19937 rng(11);
  const FockSpace s(3, 4, 4);
  const std::vector<cd> f = random_vector(rng, 3);
  const double lambda = 0.7, nf = norm2(f);
  const SectorOperator a = number_resolvent_matrix(s, lambda, f);
  for (int n = 0; n <= 4; ++n) {
    std::vector<double> want;
    for (int k = 0; k <= n; ++k)
      for (int r = 0; r < n - k + 1; ++r) want.push_back(1.0 / (lambda + k * nf));
    std::sort(want.begin(), want.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.block(n));
    ASSERT_EQ(static_cast<std::size_t>(es.eigenvalues().size()), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(es.eigenvalues()(static_cast<Eigen::Index>(i)), want[i], 1e-12);
  }
}

TEST(NumberResolvent, WrongCoefficientCount) {
  const FockSpace s(2, 2, 2);
  const std::vector<cd> f{1.0};
  EXPECT_THROW(number_resolvent_matrix(s, 1.0, f), ConfigError);
  const std::vector<cd> g{1.0, 0.0};
  EXPECT_THROW(number_resolvent_matrix(s, 0.0, g), DomainError);
}

TEST(EvolvedResolventNorm, IdenticalVectorsGiveZero) {
  const std::vector<cd> g{0.3, cd(0.1, 0.4)};
  EXPECT_EQ(lemma33_lhs_exact(1.0, g, g, 3), 0.0);
}

TEST(EvolvedResolventNorm, OrthonormalPairOneParticle) {
  const std::vector<cd> g1{1.0, 0.0}, g2{0.0, 1.0};
  EXPECT_NEAR(lemma33_lhs_exact(1.0, g1, g2, 1), 0.5, 1e-14);
}

TEST(EvolvedResolventNorm, ParallelVectorsClosedForm) {
  const std::vector<cd> g1{1.0, 0.0}, g2{cd(0.0, 2.0), 0.0};
  double want = 0.0;
  for (int k = 0; k <= 4; ++k) want = std::max(want, 1.0 / (1.0 + k) - 1.0 / (1.0 + 4.0 * k));
  EXPECT_NEAR(lemma33_lhs_exact(1.0, g1, g2, 4), want, 1e-15);
}

TEST(EvolvedResolventNorm, MatchesBruteForceThreeModeSector) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    const std::vector<cd> g1 = random_vector(rng, 3), g2 = random_vector(rng, 3);
    for (int n : {1, 2, 3}) {
      const FockSpace s(3, n, n);
      const SectorOperator d = number_resolvent_matrix(s, 1.0, g1) - number_resolvent_matrix(s, 1.0, g2);
      EXPECT_NEAR(lemma33_lhs_exact(1.0, g1, g2, n), d.norm(n), 1e-12);
    }
  }
}

TEST(EvolvedResolventNorm, UnitaryInvariance) {
  std::mt19937 rng(5);
  const std::vector<cd> g1 = random_vector(rng, 3), g2 = random_vector(rng, 3);
  const double base = lemma33_lhs_exact(0.8, g1, g2, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXcd u = random_unitary(rng, 3);
    EXPECT_NEAR(lemma33_lhs_exact(0.8, apply(u, g1), apply(u, g2), 3), base, 1e-12);
  }
}

TEST(EvolvedResolventNorm, BelowResolventEstimate) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cd> g1 = random_vector(rng, 3);
    const double s = 1.0 / std::sqrt(norm2(g1));
    for (auto& x : g1) x *= s;
    std::vector<cd> g2 = g1;
    const std::vector<cd> e = random_vector(rng, 3);
    for (std::size_t i = 0; i < 3; ++i) g2[i] += 0.05 * e[i];
    double gap = 0.0;
    for (std::size_t i = 0; i < 3; ++i) gap += std::norm(g1[i] - g2[i]);
    gap = std::sqrt(gap);
    for (int n : {1, 2, 3})
      EXPECT_LE(lemma33_lhs_exact(1.0, g1, g2, n), 2.0 * n * 1.0 * gap + 1e-10);
  }
}

TEST(SectorNorms, ResolventAloneIsFlat) {
  const FockSpace s(2, 4, 4);
  const std::vector<cd> f{0.6, 0.8};
  const SectorNormReport r = sector_norm_monotonicity(number_resolvent_matrix(s, 1.0, f), {0, 1, 2, 3, 4});
  EXPECT_TRUE(r.monotone);
  for (double v : r.norms) EXPECT_NEAR(v, 1.0, 1e-13);
}

TEST(SectorNorms, DifferenceOfOrthogonalResolventsNondecreasing) {
  const FockSpace s(3, 3, 3);
  const std::vector<cd> f{1.0, 0.0, 0.0}, g{0.0, 1.0, 0.0};
  const SectorOperator d = number_resolvent_matrix(s, 1.0, f) - number_resolvent_matrix(s, 1.0, g);
  const SectorNormReport r = sector_norm_monotonicity(d, {1, 2, 3});
  EXPECT_TRUE(r.monotone);
  EXPECT_EQ(r.running_max.back(), r.norms.back());
}

TEST(SectorNorms, RandomProductsMonotone) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> lam(0.3, 3.0);
  const FockSpace s(3, 4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    // Vectors in the first two modes; the third provides the orthogonal
    // direction along which a particle can be added.
    auto v = [&] {
      std::vector<cd> x = random_vector(rng, 3);
      x[2] = 0.0;
      return x;
    };
    const SectorOperator a = number_resolvent_matrix(s, lam(rng), v());
    const SectorOperator b = number_resolvent_matrix(s, lam(rng), v());
    const SectorOperator c = number_resolvent_matrix(s, lam(rng), v());
    const SectorOperator expr = a * b - cd(0.5, 0.2) * c;
    EXPECT_TRUE(sector_norm_monotonicity(expr, {0, 1, 2, 3, 4}).monotone) << trial;
  }
}

TEST(Gibbs, IdentityAndOccupation) {
  const FockSpace s(2, 60, 60);
  const std::vector<double> eps{0.5, 1.5};
  EXPECT_NEAR(gibbs_trace_expectation(s, identity_operator(s), eps, 1.0, -0.2), 1.0, 1e-15);
  const std::vector<cd> e1{1.0, 0.0};
  EXPECT_NEAR(gibbs_trace_expectation(s, number_operator(s, e1), eps, 1.0, -0.2), bose_weight(1.0, 0.5, -0.2), 1e-9);
}

TEST(Gibbs, TruncationAndDomain) {
  const FockSpace small(2, 5, 5);
  const std::vector<double> eps{0.5, 1.5};
  EXPECT_THROW(gibbs_trace_expectation(small, identity_operator(small), eps, 1.0, -0.2), TruncationError);
  const FockSpace s(2, 40, 40);
  EXPECT_THROW(gibbs_trace_expectation(s, identity_operator(s), eps, 1.0, 0.6), DomainError);
}

TEST(Gibbs, ResolventMatchesGeometricLaw) {
  const FockSpace s(2, 60, 60);
  const std::vector<double> eps{0.5, 1.5};
  const double beta = 1.0, mu = -0.2;
  const std::vector<cd> e1{1.0, 0.0};
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double oracle = gibbs_trace_expectation(s, number_resolvent_matrix(s, lambda, e1), eps, beta, mu);
    const double nbar = bose_weight(beta, 0.5, mu);
    EXPECT_NEAR(number_resolvent_from_occupation(lambda, 1.0, nbar), oracle, 1e-8);
  }
  // A mixed vector: nbar = <f, T f> / ||f||^2 with T diagonal in the modes.
  const std::vector<cd> f{0.6, cd(0.0, 0.5)};
  const double nf = norm2(f);
  const double nbar = (0.36 * bose_weight(beta, 0.5, mu) + 0.25 * bose_weight(beta, 1.5, mu)) / nf;
  const double oracle = gibbs_trace_expectation(s, number_resolvent_matrix(s, 1.0, f), eps, beta, mu);
  EXPECT_NEAR(number_resolvent_from_occupation(1.0, nf, nbar), oracle, 1e-8);
}

TEST(Gibbs, PhaseRotationOfModesInvariant) {
  const FockSpace s(2, 50, 50);
  const std::vector<double> eps{0.5, 1.5};
  const std::vector<cd> f{0.6, 0.5}, g{0.6 * std::polar(1.0, 0.4), 0.5 * std::polar(1.0, -1.3)};
  EXPECT_NEAR(gibbs_trace_expectation(s, number_resolvent_matrix(s, 1.0, f), eps, 1.0, -0.2),
              gibbs_trace_expectation(s, number_resolvent_matrix(s, 1.0, g), eps, 1.0, -0.2), 1e-12);
}

TEST(Gibbs, FieldResolventIsGaussianWithVacuumVariance) {
  // omega(e^{iu Phi(f)}) = exp(-u^2 (||f||^2 + 2<f,Tf>) / 2) for Phi = a* + a.
  // Phi couples neighbouring sectors, so small lambda needs a high cap.
  const double beta = 1.0, mu = -0.2;
  const FockSpace one(1, 640, 640);
  const std::vector<cd> e1{1.0};
  const double nb = bose_weight(beta, 0.5, mu);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double oracle = gibbs_field_resolvent(one, lambda, e1, {0.5}, beta, mu);
    EXPECT_NEAR(field_resolvent_from_variance(lambda, 1.0 + 2.0 * nb), oracle, 1e-8) << lambda;
  }
  const FockSpace two(2, 40, 40);
  const std::vector<double> eps{0.5, 1.5};
  const std::vector<cd> f{0.6, 0.5};
  const double tf = 0.36 * nb + 0.25 * bose_weight(beta, 1.5, mu);
  EXPECT_NEAR(field_resolvent_from_variance(2.0, norm2(f) + 2.0 * tf),
              gibbs_field_resolvent(two, 2.0, f, eps, beta, mu), 1e-8);
}

TEST(Gibbs, TrappedStateResolventMatchesTwoModeTrace) {
  // f in the span of two trap eigenmodes: the Gibbs state factorizes over
  // eigenmodes, so the two-mode trace is exact for A(lambda, f).
  const Grid1D g(16, 512);
  auto d = std::make_shared<const SpectralDecomposition>(
      diagonalize(assemble(g, PotentialSpec::truncated_harmonic(8, 1.0))));
  const double beta = 1.0, mu = -0.2;
  const QuasifreeState st(beta, mu, d);
  const cd c0{0.8, 0.1}, c1{-0.3, 0.4};
  const WaveFunction f = c0 * d->mode(0) + c1 * d->mode(2);
  const FockSpace s(2, 140, 140);
  const std::vector<cd> coeffs{c0, c1};
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double oracle = gibbs_trace_expectation(s, number_resolvent_matrix(s, lambda, coeffs),
                                                  {d->eigenvalue(0), d->eigenvalue(2)}, beta, mu);
    EXPECT_NEAR(st.number_resolvent_expectation(lambda, f), oracle, 1e-8);
  }
}

TEST(Gibbs, ProductFieldResolventMatchesDenseTrace) {
  const std::vector<double> eps{0.5, 1.5};
  const std::vector<cd> f{cd(0.6, 0.2), 0.5};
  const FockSpace s(2, 25, 50);  // product truncation: every n_i <= 25
  for (double lambda : {1.0, 2.0}) {
    const double dense = gibbs_field_resolvent(s, lambda, f, eps, 1.0, -0.2, 1e-3);
    const double product = gibbs_field_resolvent_product(lambda, f, eps, 1.0, -0.2, 25, 1e-3);
    EXPECT_NEAR(dense, product, 1e-12) << lambda;
  }
}

TEST(Gibbs, ProductFieldResolventConvergesToGaussian) {
  const double beta = 1.0, mu = -0.2;
  const std::vector<double> eps{0.5, 1.5};
  const std::vector<cd> f{0.6, cd(0.0, 0.5)};
  const double tf = 0.36 * bose_weight(beta, 0.5, mu) + 0.25 * bose_weight(beta, 1.5, mu);
  for (double lambda : {0.5, 1.0, 2.0})
    EXPECT_NEAR(gibbs_field_resolvent_product(lambda, f, eps, beta, mu, 800),
                field_resolvent_from_variance(lambda, norm2(f) + 2.0 * tf), 1e-8);
}
