#pragma once

// Finite-difference single-particle Hamiltonians and their spectra.
//
// H = -d^2/dx^2 + V on the grid, three-point Laplacian, Dirichlet beyond both
// ends of the sample range. Units hbar = 1, 2m = 1.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "thermolim/grid.hpp"

namespace thermolim {

class PotentialSpec {
 public:
  enum class Kind { Free, TruncatedHarmonic, General };

  static PotentialSpec free();
  /// c^2 max(x^2 - R^2, 0)
  static PotentialSpec truncated_harmonic(double radius, double coupling);
  /// c^2 x^2 + U(x) + shift, with U given as samples on `grid`.
  static PotentialSpec general(double coupling, double shift, std::vector<double> u_samples,
                               const Grid1D& grid);

  Kind kind() const { return kind_; }
  double radius() const { return radius_; }
  double coupling() const { return coupling_; }
  double shift() const { return shift_; }

  /// V at an arbitrary point; only for Free and TruncatedHarmonic.
  double operator()(double x) const;
  /// V at every grid point. Throws UsageError if U was sampled on another grid.
  std::vector<double> sample(const Grid1D& grid) const;

 private:
  Kind kind_ = Kind::Free;
  double radius_ = 0.0;
  double coupling_ = 0.0;
  double shift_ = 0.0;
  std::vector<double> u_;
  std::optional<Grid1D> u_grid_;
};

class TridiagonalOperator {
 public:
  TridiagonalOperator(std::vector<double> diagonal, std::vector<double> off_diagonal,
                      double spacing);

  std::size_t size() const { return diag_.size(); }
  double spacing() const { return spacing_; }
  const std::vector<double>& diagonal() const { return diag_; }
  const std::vector<double>& off_diagonal() const { return off_; }

  std::vector<double> apply(std::span<const double> v) const;
  /// min_j d_j - |e_{j-1}| - |e_j|
  double gershgorin_lower() const;

  std::optional<Grid1D> grid;
  std::optional<RadialGrid> radial_grid;

 private:
  std::vector<double> diag_;
  std::vector<double> off_;
  double spacing_;
};

TridiagonalOperator assemble(const Grid1D& grid, const PotentialSpec& pot);
/// -u'' + l(l+1)/r^2 u + V(r) u on r_j = j dr, u = 0 at r = 0 and r = r_max + dr.
TridiagonalOperator radial_assemble(const RadialGrid& grid, int l, const PotentialSpec& pot);

enum class EigenBackend { Mrrr, QlImplicit };

/// Eigenpairs in ascending order. Columns are stored with unit Euclidean norm;
/// mode() rescales by 1/sqrt(dx) so that the continuum L2 norm is one.
/// Sign convention: the first component exceeding 1e-10 of the column's
/// largest magnitude is positive.
class SpectralDecomposition {
 public:
  SpectralDecomposition(std::vector<double> eigenvalues, std::vector<double> columns,
                        std::size_t n_points, double spacing);

  std::size_t count() const { return values_.size(); }
  std::size_t n_points() const { return n_; }
  double spacing() const { return spacing_; }
  double eigenvalue(std::size_t k) const { return values_[k]; }
  const std::vector<double>& eigenvalues() const { return values_; }
  std::span<const double> column(std::size_t k) const {
    return {cols_.data() + k * n_, n_};
  }

  /// Eigenfunction on the 1D grid with continuum normalization.
  WaveFunction mode(std::size_t k) const;
  /// Radial eigenfunction u(r_j), normalized so sum u^2 dr = 1.
  std::vector<double> radial_mode(std::size_t k) const;

  /// max_k ||H psi_k - eps_k psi_k|| / max(1, |eps_k|) (Euclidean, unit columns)
  double max_residual(const TridiagonalOperator& h) const;
  /// max_{k,l} |<psi_k, psi_l> - delta_kl|
  double orthonormality_defect() const;

  std::optional<Grid1D> grid;
  std::optional<RadialGrid> radial_grid;

 private:
  std::vector<double> values_;
  std::vector<double> cols_;
  std::size_t n_;
  double spacing_;
};

SpectralDecomposition diagonalize(const TridiagonalOperator& h,
                                  EigenBackend backend = EigenBackend::Mrrr);
/// The `count` lowest eigenpairs.
SpectralDecomposition diagonalize_lowest(const TridiagonalOperator& h, std::size_t count);
/// All eigenpairs with eigenvalue <= e_max.
SpectralDecomposition diagonalize_window(const TridiagonalOperator& h, double e_max);

enum class Parity { Even, Odd, None };
const char* parity_name(Parity p);

struct EigenPair {
  double energy;
  WaveFunction psi;
  Parity parity;
};

/// Eigenpair `index` with its reflection parity (tolerance 1e-6 in L2).
EigenPair ground_pair(const SpectralDecomposition& decomp, std::size_t index);
Parity classify_parity(const WaveFunction& psi, double tol = 1e-6);

/// max |psi_k| over the outermost `width` samples at either end (continuum normalization).
double edge_amplitude(const SpectralDecomposition& decomp, std::size_t k, std::size_t width = 1);

}  // namespace thermolim
