#pragma once

// Exact bosonic Fock space over a few modes, truncated by total particle
// number. This is the brute-force oracle for sector norms of resolvent
// observables and for Gibbs expectations of quasifree formulas.
//
// Conventions: a(f) = sum_i conj(f_i) a_i, a*(f) = sum_i f_i a_i^*, so
// [a(f), a*(g)] = <f, g>. The field is Phi(f) = a*(f) + a(f).

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "thermolim/grid.hpp"

namespace thermolim {

using Occupation = std::vector<int>;

class FockSpace {
 public:
  /// Tuples (n_1..n_m) with n_i <= n_max and sum <= total_cap, ordered by total
  /// number and then with earlier modes more occupied. Throws ConfigError for
  /// m outside 1..3 or a negative cap, and ConfigError if the dimension would
  /// exceed max_dimension.
  FockSpace(int modes, int n_max, int total_cap, std::size_t max_dimension = 200000);

  int modes() const { return m_; }
  int n_max() const { return n_max_; }
  int total_cap() const { return total_; }
  std::size_t dimension() const { return basis_.size(); }
  const Occupation& occupation(std::size_t index) const { return basis_[index]; }
  std::optional<std::size_t> index_of(const Occupation& occ) const;

  /// Basis indices [begin, end) of the n-particle sector.
  std::size_t sector_begin(int n) const { return offsets_[n]; }
  std::size_t sector_end(int n) const { return offsets_[n + 1]; }
  std::size_t sector_size(int n) const { return sector_end(n) - sector_begin(n); }
  /// Sectors 0..closed_sectors()-1 are invariant under a_i^* a_j (n <= n_max).
  int closed_sectors() const;

  /// a_i as a sparse matrix on the whole truncated space.
  Eigen::SparseMatrix<std::complex<double>> annihilation(int mode) const;
  Eigen::SparseMatrix<std::complex<double>> creation(int mode) const;

  /// max |<n'|[a_i, a_j^*]|n> - delta_ij delta_nn'| over states with headroom
  /// (sum n < total_cap and every n_k < n_max).
  double ccr_defect() const;

 private:
  int m_, n_max_, total_;
  std::vector<Occupation> basis_;
  std::vector<std::size_t> offsets_;
};

/// Number-conserving operator stored as one dense block per sector 0..K-1.
class SectorOperator {
 public:
  SectorOperator() = default;
  explicit SectorOperator(std::vector<Eigen::MatrixXcd> blocks) : blocks_(std::move(blocks)) {}

  int sectors() const { return static_cast<int>(blocks_.size()); }
  const Eigen::MatrixXcd& block(int n) const { return blocks_[n]; }
  Eigen::MatrixXcd& block(int n) { return blocks_[n]; }

  /// Operator norm on sector n (largest singular value).
  double norm(int n) const;
  std::vector<double> norms() const;
  double hermiticity_defect() const;

  SectorOperator& operator+=(const SectorOperator& o);
  SectorOperator& operator-=(const SectorOperator& o);
  SectorOperator& operator*=(std::complex<double> a);
  SectorOperator adjoint() const;

 private:
  std::vector<Eigen::MatrixXcd> blocks_;
};

SectorOperator operator+(SectorOperator a, const SectorOperator& b);
SectorOperator operator-(SectorOperator a, const SectorOperator& b);
SectorOperator operator*(const SectorOperator& a, const SectorOperator& b);
SectorOperator operator*(std::complex<double> s, SectorOperator a);

/// a*(f) a(f) on the closed sectors. Throws ConfigError unless coeffs has one
/// entry per mode.
SectorOperator number_operator(const FockSpace& space, std::span<const std::complex<double>> coeffs);
/// (lambda + a*(f) a(f))^{-1} on the closed sectors. DomainError for lambda <= 0.
SectorOperator number_resolvent_matrix(const FockSpace& space, double lambda,
                                       std::span<const std::complex<double>> coeffs);
SectorOperator identity_operator(const FockSpace& space);

struct SectorNormReport {
  std::vector<int> sectors;
  std::vector<double> norms;
  std::vector<double> running_max;  // max_{j <= k} ||A||_j
  bool monotone = false;            // ||A||_k <= ||A||_{k+1} + 1e-12 throughout
};

SectorNormReport sector_norm_monotonicity(const SectorOperator& op, const std::vector<int>& sectors);

/// ||A(lambda, g1) - A(lambda, g2)|| on the n-particle sector of the full Fock
/// space, reduced exactly to Sym^k(span{g1, g2}), k <= n. Euclidean inner product.
double lemma33_lhs_exact(double lambda, std::span<const std::complex<double>> g1,
                         std::span<const std::complex<double>> g2, int n);
/// Same with the L2 inner product of the grid.
double lemma33_lhs_exact(double lambda, const WaveFunction& g1, const WaveFunction& g2, int n);

/// Occupation weight outside the closed sectors of `space` for the product
/// Gibbs state of H = sum (eps_i - mu) N_i.
double gibbs_truncation_weight(const FockSpace& space, const std::vector<double>& energies,
                               double beta, double mu);

/// Tr(e^{-beta H} A) / Tr(e^{-beta H}) over the closed sectors (real part).
/// DomainError unless mu < min eps; TruncationError if the discarded weight
/// exceeds `max_truncation`.
double gibbs_trace_expectation(const FockSpace& space, const SectorOperator& op,
                               const std::vector<double>& energies, double beta, double mu,
                               double max_truncation = 1e-10);

/// Gibbs expectation of the field resolvent (lambda - i Phi(f))^{-1}, Phi(f) =
/// a*(f) + a(f), on the whole truncated space (Phi does not conserve number).
double gibbs_field_resolvent(const FockSpace& space, double lambda,
                             std::span<const std::complex<double>> coeffs,
                             const std::vector<double>& energies, double beta, double mu,
                             double max_truncation = 1e-10);

/// Same expectation on the product truncation n_i <= n_max of every mode, using
/// that the Gibbs state and Phi(f) = sum_i Phi_i factorize over modes:
/// sum_{a,b,..} w_a w_b .. / (lambda - i(phi_a + phi_b + ..)) with phi, w the
/// eigenvalues of Phi_i and their Gibbs weights.
double gibbs_field_resolvent_product(double lambda, std::span<const std::complex<double>> coeffs,
                                     const std::vector<double>& energies, double beta, double mu,
                                     int n_max, double max_truncation = 1e-10);

}  // namespace thermolim
