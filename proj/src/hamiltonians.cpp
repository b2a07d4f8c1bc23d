#include "thermolim/hamiltonians.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "thermolim/errors.hpp"

namespace thermolim {

PotentialSpec PotentialSpec::free() { return PotentialSpec(); }

PotentialSpec PotentialSpec::truncated_harmonic(double radius, double coupling) {
  if (!(radius >= 0.0)) throw ConfigError("trap radius must be non-negative");
  PotentialSpec p;
  p.kind_ = Kind::TruncatedHarmonic;
  p.radius_ = radius;
  p.coupling_ = coupling;
  return p;
}

PotentialSpec PotentialSpec::general(double coupling, double shift, std::vector<double> u_samples,
                                     const Grid1D& grid) {
  if (u_samples.size() != grid.size()) throw UsageError("U samples do not match the grid");
  PotentialSpec p;
  p.kind_ = Kind::General;
  p.coupling_ = coupling;
  p.shift_ = shift;
  p.u_ = std::move(u_samples);
  p.u_grid_ = grid;
  return p;
}

double PotentialSpec::operator()(double x) const {
  switch (kind_) {
    case Kind::Free:
      return 0.0;
    case Kind::TruncatedHarmonic: {
      const double excess = x * x - radius_ * radius_;
      return excess > 0.0 ? coupling_ * coupling_ * excess : 0.0;
    }
    case Kind::General:
      break;
  }
  throw UsageError("general potentials are only defined on their sampling grid");
}

std::vector<double> PotentialSpec::sample(const Grid1D& grid) const {
  std::vector<double> v(grid.size());
  if (kind_ == Kind::General) {
    if (!(*u_grid_ == grid)) throw UsageError("U was sampled on a different grid");
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.x(j);
      v[j] = coupling_ * coupling_ * x * x + u_[j] + shift_;
    }
    return v;
  }
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = (*this)(grid.x(j));
  return v;
}

TridiagonalOperator::TridiagonalOperator(std::vector<double> diagonal,
                                         std::vector<double> off_diagonal, double spacing)
    : diag_(std::move(diagonal)), off_(std::move(off_diagonal)), spacing_(spacing) {
  if (diag_.empty() || off_.size() + 1 != diag_.size())
    throw UsageError("tridiagonal operator needs n diagonal and n-1 off-diagonal entries");
}

std::vector<double> TridiagonalOperator::apply(std::span<const double> v) const {
  const std::size_t n = size();
  if (v.size() != n) throw UsageError("vector length does not match operator");
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = diag_[j] * v[j];
    if (j > 0) s += off_[j - 1] * v[j - 1];
    if (j + 1 < n) s += off_[j] * v[j + 1];
    out[j] = s;
  }
  return out;
}

double TridiagonalOperator::gershgorin_lower() const {
  double lo = diag_[0];
  for (std::size_t j = 0; j < size(); ++j) {
    double r = 0.0;
    if (j > 0) r += std::abs(off_[j - 1]);
    if (j + 1 < size()) r += std::abs(off_[j]);
    lo = std::min(lo, diag_[j] - r);
  }
  return lo;
}

TridiagonalOperator assemble(const Grid1D& grid, const PotentialSpec& pot) {
  const double dx = grid.dx();
  const double inv = 1.0 / (dx * dx);
  std::vector<double> d = pot.sample(grid);
  for (double& v : d) v += 2.0 * inv;
  TridiagonalOperator h(std::move(d), std::vector<double>(grid.size() - 1, -inv), dx);
  h.grid = grid;
  return h;
}

TridiagonalOperator radial_assemble(const RadialGrid& grid, int l, const PotentialSpec& pot) {
  if (l < 0) throw ConfigError("angular momentum l must be non-negative");
  if (pot.kind() == PotentialSpec::Kind::General)
    throw ConfigError("radial operators support free and truncated harmonic potentials only");
  const double dr = grid.dr();
  const double inv = 1.0 / (dr * dr);
  const double ll = static_cast<double>(l) * static_cast<double>(l + 1);
  std::vector<double> d(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.r(j);
    d[j] = 2.0 * inv + ll / (r * r) + pot(r);
  }
  TridiagonalOperator h(std::move(d), std::vector<double>(grid.size() - 1, -inv), dr);
  h.radial_grid = grid;
  return h;
}

// ---------------------------------------------------------------- decomposition

SpectralDecomposition::SpectralDecomposition(std::vector<double> eigenvalues,
                                             std::vector<double> columns, std::size_t n_points,
                                             double spacing)
    : values_(std::move(eigenvalues)), cols_(std::move(columns)), n_(n_points), spacing_(spacing) {
  if (cols_.size() != values_.size() * n_) throw UsageError("eigenvector storage has wrong size");
}

WaveFunction SpectralDecomposition::mode(std::size_t k) const {
  if (!grid) throw UsageError("decomposition has no 1D grid attached");
  if (k >= count()) throw UsageError("mode index out of range");
  const double scale = 1.0 / std::sqrt(spacing_);
  auto col = column(k);
  std::vector<double> re(n_);
  for (std::size_t j = 0; j < n_; ++j) re[j] = scale * col[j];
  return WaveFunction(*grid, std::move(re), std::vector<double>(n_, 0.0));
}

std::vector<double> SpectralDecomposition::radial_mode(std::size_t k) const {
  if (k >= count()) throw UsageError("mode index out of range");
  const double scale = 1.0 / std::sqrt(spacing_);
  auto col = column(k);
  std::vector<double> u(n_);
  for (std::size_t j = 0; j < n_; ++j) u[j] = scale * col[j];
  return u;
}

double SpectralDecomposition::max_residual(const TridiagonalOperator& h) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < count(); ++k) {
    auto col = column(k);
    std::vector<double> hv = h.apply(col);
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double r = hv[j] - values_[k] * col[j];
      s += r * r;
    }
    worst = std::max(worst, std::sqrt(s) / std::max(1.0, std::abs(values_[k])));
  }
  return worst;
}

double SpectralDecomposition::orthonormality_defect() const {
  // Gram matrix through Eigen's blocked product; a plain triple loop is
  // O(n^3) scalar work at n = 8192.
  const Eigen::Map<const Eigen::MatrixXd> v(cols_.data(), static_cast<Eigen::Index>(n_),
                                            static_cast<Eigen::Index>(count()));
  Eigen::MatrixXd gram(v.cols(), v.cols());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose());
  gram.diagonal().array() -= 1.0;
  return gram.triangularView<Eigen::Lower>().toDenseMatrix().cwiseAbs().maxCoeff();
}

const char* parity_name(Parity p) {
  switch (p) {
    case Parity::Even:
      return "even";
    case Parity::Odd:
      return "odd";
    case Parity::None:
      break;
  }
  return "none";
}

Parity classify_parity(const WaveFunction& psi, double tol) {
  // The sample at -L has no mirror; Dirichlet modes are negligible there anyway.
  const WaveFunction r = reflect(psi);
  WaveFunction head = psi;
  head.set(0, 0.0);
  if (norm(head - r) <= tol) return Parity::Even;
  if (norm(head + r) <= tol) return Parity::Odd;
  return Parity::None;
}

EigenPair ground_pair(const SpectralDecomposition& decomp, std::size_t index) {
  if (index >= decomp.count()) throw UsageError("eigenpair index out of range");
  WaveFunction psi = decomp.mode(index);
  const Parity parity = classify_parity(psi);
  return {decomp.eigenvalue(index), std::move(psi), parity};
}

double edge_amplitude(const SpectralDecomposition& decomp, std::size_t k, std::size_t width) {
  auto col = decomp.column(k);
  const std::size_t n = col.size();
  width = std::min(width, n);
  double m = 0.0;
  for (std::size_t j = 0; j < width; ++j) {
    m = std::max(m, std::abs(col[j]));
    m = std::max(m, std::abs(col[n - 1 - j]));
  }
  return m / std::sqrt(decomp.spacing());
}

}  // namespace thermolim
