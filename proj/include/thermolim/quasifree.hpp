#pragma once

// Gauge-invariant quasifree states of the ideal Bose gas.
//
// The one-particle density matrix is T = (e^{beta(H - mu)} - 1)^{-1}, so that
// omega(a*(f) a(g)) = <g, T f>, optionally plus a coherent condensate term
// kappa^2 <h, f><g, h>. QuasifreeState evaluates this spectrally for a trapped
// Hamiltonian; LimitState1D / LimitState3D evaluate the infinite-volume
// (homogeneous) limit in momentum space with H = p^2.

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thermolim/functions3d.hpp"
#include "thermolim/grid.hpp"
#include "thermolim/hamiltonians.hpp"

namespace thermolim {

/// n = 1/(e^{beta(e - mu)} - 1)
double bose_weight(double beta, double energy, double mu);

/// Occupations of every level of a decomposition. Throws DomainError unless
/// mu <= eps_0 - 1e-6.
class BoseWeightTable {
 public:
  BoseWeightTable(const std::vector<double>& energies, double beta, double mu);
  double operator[](std::size_t k) const { return n_[k]; }
  std::size_t size() const { return n_.size(); }
  const std::vector<double>& values() const { return n_; }

 private:
  std::vector<double> n_;
};

/// Limit distributions for 1D condensate modes: h = 1 (even) or h = x (odd).
enum class LimitMode { None, Even, Odd };

struct Condensate {
  double kappa = 0.0;
  std::optional<WaveFunction> mode;  // used when limit == None
  LimitMode limit = LimitMode::None;

  bool present() const { return kappa != 0.0 && (mode || limit != LimitMode::None); }
  /// <h, f>; for the limit modes integral f and integral x f.
  cdouble pairing(const WaveFunction& f) const;
  /// |h(x_j)|^2 on f's grid index j
  double density(const Grid1D& grid, std::size_t j) const;
};

class QuasifreeState {
 public:
  QuasifreeState(double beta, double mu, std::shared_ptr<const SpectralDecomposition> decomp,
                 Condensate condensate = {});

  double beta() const { return beta_; }
  double mu() const { return mu_; }
  const Condensate& condensate() const { return condensate_; }
  const SpectralDecomposition& decomposition() const { return *decomp_; }
  const BoseWeightTable& weights() const { return weights_; }
  /// Occupation of the first level not contained in the decomposition (0 if complete);
  /// bounds the relative error of every truncated spectral sum.
  double truncation_weight() const { return truncation_; }

  /// <g, T f>
  cdouble thermal_two_point(const WaveFunction& f, const WaveFunction& g) const;
  /// omega(a*(f) a(g)) = <g, T f> + kappa^2 <h, f><g, h>
  cdouble two_point(const WaveFunction& f, const WaveFunction& g) const;

  /// Diagonal of T (thermal part only) at every grid point.
  std::vector<double> thermal_density() const;
  /// thermal_density + kappa^2 |h|^2
  std::vector<double> density() const;
  double position_density(double x) const;

  /// sum of density over grid points with a <= x_j < b, times dx.
  double local_particle_number(double a, double b) const;

  /// Gaussian formula with sigma^2 = <f, T f>; UsageError when a condensate is present.
  double field_resolvent_expectation(double lambda, const WaveFunction& f) const;
  /// Geometric occupation law of the mode f/||f|| with nbar = <f, T f>/||f||^2.
  double number_resolvent_expectation(double lambda, const WaveFunction& f) const;

  /// max_k |n_k - e^{-beta(eps_k - mu)}(1 + n_k)| / max(1, n_k), the spectral form of
  /// the KMS relation.
  double kms_residual() const;

 private:
  double beta_;
  double mu_;
  std::shared_ptr<const SpectralDecomposition> decomp_;
  Condensate condensate_;
  BoseWeightTable weights_;
  double truncation_;
};

/// (2 pi)^{-s} integral d^s p (e^{beta(p^2 - mu)} - 1)^{-1}, s in {1, 2, 3}.
/// DomainError for mu >= 0 when s < 3, or mu > 0.
double homogeneous_density(double beta, double mu, int s);

/// integral_0^inf e^{-u lambda} e^{-u^2 sigma2 / 2} du
double field_resolvent_from_variance(double lambda, double sigma2);

/// sum_n nbar^n (1+nbar)^{-(n+1)} (lambda + n ||f||^2)^{-1}, summed until the
/// geometric tail bound (nbar/(1+nbar))^{N+1}/lambda drops below 1e-12.
double number_resolvent_from_occupation(double lambda, double norm2, double nbar);

/// Homogeneous 1D limit state (H = p^2 on the line).
class LimitState1D {
 public:
  LimitState1D(double beta, double mu, Condensate condensate = {});

  double beta() const { return beta_; }
  double mu() const { return mu_; }
  const Condensate& condensate() const { return condensate_; }

  /// integral dp conj(ghat) n(p) fhat e^{itp^2}, adaptive quadrature (rtol 1e-10).
  cdouble thermal_two_point(const WaveFunction& f, const WaveFunction& g, double t = 0.0) const;
  cdouble two_point(const WaveFunction& f, const WaveFunction& g) const;
  double position_density(double x) const;

  double field_resolvent_expectation(double lambda, const WaveFunction& f) const;
  double number_resolvent_expectation(double lambda, const WaveFunction& f) const;

  /// <g, T e^{itH} f> + kappa^2 <h, e^{itH} f><g, h>; requires mu < 0.
  cdouble temporal_correlation(const WaveFunction& f, const WaveFunction& g, double t) const;
  /// Same thermal term on the discrete momentum grid of f (FFT route, cross-check).
  cdouble temporal_correlation_fft(const WaveFunction& f, const WaveFunction& g, double t) const;

 private:
  double beta_;
  double mu_;
  Condensate condensate_;
};

struct MemoryResult {
  double t = 0.0;
  cdouble thermal;
  cdouble condensate;
  cdouble total;
  std::size_t panels = 0;
  double quadrature_delta = 0.0;  // |order-16 - order-8| on the thermal term
  bool converged = false;
};

/// Homogeneous 3D limit state; f, g radial bumps (z0 = 0). The condensate is
/// the zero-energy distribution h = 1, so its term is kappa^2 (int f)(int g),
/// with both integrals evaluated by radial quadrature.
class LimitState3D {
 public:
  LimitState3D(double beta, double mu, double kappa = 0.0);

  double beta() const { return beta_; }
  double mu() const { return mu_; }
  double kappa() const { return kappa_; }

  MemoryResult temporal_correlation(const AxialBump& f, const AxialBump& g, double t,
                                    double rtol = 1e-8) const;

 private:
  double beta_;
  double mu_;
  double kappa_;
};

/// 1D-only guard used by temporal correlation requests: mu = 0 needs s >= 3.
void require_integrable(int s, double mu);

struct MuScanRow {
  double mu = 0.0;
  double occupation = 0.0;  // nbar = <f,Tf>/||f||^2
  double value = 0.0;       // omega(A(lambda, f))
};

struct MuScanReport {
  std::vector<MuScanRow> rows;
  bool decreasing = false;
  double ratio = 0.0;            // last / first
  double last_difference = 0.0;  // |v_N - v_{N-1}|
  std::string verdict;           // vanishes, converges-positive, indeterminate
};

/// Homogeneous 1D state at each mu (ascending towards 0-).
MuScanReport mu_limit_scan(double lambda, const WaveFunction& f, double beta,
                           const std::vector<double>& mus, Condensate condensate = {},
                           double cauchy_tol = 1e-4);

}  // namespace thermolim
