#include "thermolim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thermolim/errors.hpp"

namespace thermolim {

using cd = std::complex<double>;

namespace {

void enumerate(int mode, int m, int remaining, int n_max, Occupation& cur,
               std::vector<Occupation>& out, std::size_t cap) {
  if (mode == m - 1) {
    if (remaining <= n_max) {
      cur[mode] = remaining;
      out.push_back(cur);
      if (out.size() > cap) throw ConfigError("Fock space dimension exceeds the configured cap");
    }
    return;
  }
  for (int k = std::min(remaining, n_max); k >= 0; --k) {
    cur[mode] = k;
    enumerate(mode + 1, m, remaining - k, n_max, cur, out, cap);
  }
}

struct Index {
  std::map<Occupation, std::size_t> map;
  explicit Index(const FockSpace& space) {
    for (std::size_t i = 0; i < space.dimension(); ++i) map.emplace(space.occupation(i), i);
  }
};

}  // namespace

FockSpace::FockSpace(int modes, int n_max, int total_cap, std::size_t max_dimension)
    : m_(modes), n_max_(n_max), total_(total_cap) {
  if (modes < 1 || modes > 3) throw ConfigError("Fock oracle supports 1 to 3 modes");
  if (n_max < 0 || total_cap < 0) throw ConfigError("occupation caps must be non-negative");
  offsets_.push_back(0);
  Occupation cur(static_cast<std::size_t>(m_), 0);
  for (int n = 0; n <= total_; ++n) {
    enumerate(0, m_, n, n_max_, cur, basis_, max_dimension);
    offsets_.push_back(basis_.size());
  }
}

std::optional<std::size_t> FockSpace::index_of(const Occupation& occ) const {
  if (static_cast<int>(occ.size()) != m_) return std::nullopt;
  int n = 0;
  for (int k : occ) {
    if (k < 0 || k > n_max_) return std::nullopt;
    n += k;
  }
  if (n > total_) return std::nullopt;
  // Sectors are short; a linear scan keeps the class free of a second index.
  for (std::size_t i = sector_begin(n); i < sector_end(n); ++i)
    if (basis_[i] == occ) return i;
  return std::nullopt;
}

int FockSpace::closed_sectors() const { return std::min(total_, n_max_) + 1; }

Eigen::SparseMatrix<cd> FockSpace::annihilation(int mode) const {
  if (mode < 0 || mode >= m_) throw UsageError("mode index out of range");
  const Index idx(*this);
  std::vector<Eigen::Triplet<cd>> t;
  for (std::size_t i = 0; i < dimension(); ++i) {
    const Occupation& occ = basis_[i];
    if (occ[mode] == 0) continue;
    Occupation lower = occ;
    --lower[mode];
    t.emplace_back(static_cast<int>(idx.map.at(lower)), static_cast<int>(i), std::sqrt(static_cast<double>(occ[mode])));
  }
  Eigen::SparseMatrix<cd> a(static_cast<Eigen::Index>(dimension()), static_cast<Eigen::Index>(dimension()));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

Eigen::SparseMatrix<cd> FockSpace::creation(int mode) const {
  return Eigen::SparseMatrix<cd>(annihilation(mode).adjoint());
}

double FockSpace::ccr_defect() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) {
      const Eigen::SparseMatrix<cd> ai = annihilation(i), aj = annihilation(j);
      const Eigen::SparseMatrix<cd> ajs = aj.adjoint();
      const Eigen::MatrixXcd comm = Eigen::MatrixXcd(ai * ajs - ajs * ai);
      for (std::size_t s = 0; s < dimension(); ++s) {
        const Occupation& occ = basis_[s];
        int n = 0;
        bool headroom = true;
        for (int k : occ) {
          n += k;
          if (k >= n_max_) headroom = false;
        }
        if (!headroom || n >= total_) continue;
        for (std::size_t r = 0; r < dimension(); ++r) {
          const cd want = (r == s && i == j) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(comm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) - want));
        }
      }
    }
  return worst;
}

// ---------------------------------------------------------------- sector operators

double SectorOperator::norm(int n) const {
  const Eigen::MatrixXcd& b = blocks_.at(static_cast<std::size_t>(n));
  if (b.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b);
  return svd.singularValues()(0);
}

std::vector<double> SectorOperator::norms() const {
  std::vector<double> out;
  for (int n = 0; n < sectors(); ++n) out.push_back(norm(n));
  return out;
}

double SectorOperator::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& b : blocks_) worst = std::max(worst, (b - b.adjoint()).cwiseAbs().maxCoeff());
  return worst;
}

static void require_same_shape(const SectorOperator& a, const SectorOperator& b) {
  if (a.sectors() != b.sectors()) throw UsageError("sector operators on different truncations");
}

SectorOperator& SectorOperator::operator+=(const SectorOperator& o) {
  require_same_shape(*this, o);
  for (std::size_t n = 0; n < blocks_.size(); ++n) blocks_[n] += o.blocks_[n];
  return *this;
}

SectorOperator& SectorOperator::operator-=(const SectorOperator& o) {
  require_same_shape(*this, o);
  for (std::size_t n = 0; n < blocks_.size(); ++n) blocks_[n] -= o.blocks_[n];
  return *this;
}

SectorOperator& SectorOperator::operator*=(cd a) {
  for (auto& b : blocks_) b *= a;
  return *this;
}

SectorOperator SectorOperator::adjoint() const {
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& b : blocks_) out.emplace_back(b.adjoint());
  return SectorOperator(std::move(out));
}

SectorOperator operator+(SectorOperator a, const SectorOperator& b) { return a += b; }
SectorOperator operator-(SectorOperator a, const SectorOperator& b) { return a -= b; }
SectorOperator operator*(cd s, SectorOperator a) { return a *= s; }

SectorOperator operator*(const SectorOperator& a, const SectorOperator& b) {
  require_same_shape(a, b);
  std::vector<Eigen::MatrixXcd> out;
  for (int n = 0; n < a.sectors(); ++n) out.emplace_back(a.block(n) * b.block(n));
  return SectorOperator(std::move(out));
}

SectorOperator identity_operator(const FockSpace& space) {
  std::vector<Eigen::MatrixXcd> out;
  for (int n = 0; n < space.closed_sectors(); ++n) {
    const auto d = static_cast<Eigen::Index>(space.sector_size(n));
    out.emplace_back(Eigen::MatrixXcd::Identity(d, d));
  }
  return SectorOperator(std::move(out));
}

SectorOperator number_operator(const FockSpace& space, std::span<const cd> coeffs) {
  if (static_cast<int>(coeffs.size()) != space.modes())
    throw ConfigError("test function must have one coefficient per mode");
  std::vector<Eigen::MatrixXcd> out;
  for (int n = 0; n < space.closed_sectors(); ++n) {
    const std::size_t b = space.sector_begin(n);
    const auto d = static_cast<Eigen::Index>(space.sector_size(n));
    Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t s = b; s < space.sector_end(n); ++s) {
      const Occupation& occ = space.occupation(s);
      // a_i^* a_j |occ>
      for (int j = 0; j < space.modes(); ++j) {
        if (occ[j] == 0 || coeffs[j] == 0.0) continue;
        for (int i = 0; i < space.modes(); ++i) {
          if (coeffs[i] == 0.0) continue;
          Occupation t = occ;
          --t[j];
          ++t[i];
          const auto r = space.index_of(t);
          if (!r) throw UsageError("sector is not closed under the number operator");
          const double amp = std::sqrt(static_cast<double>(occ[j]) * static_cast<double>(t[i]));
          blk(static_cast<Eigen::Index>(*r - b), static_cast<Eigen::Index>(s - b)) +=
              coeffs[i] * std::conj(coeffs[j]) * amp;
        }
      }
    }
    out.push_back(std::move(blk));
  }
  return SectorOperator(std::move(out));
}

SectorOperator number_resolvent_matrix(const FockSpace& space, double lambda,
                                       std::span<const cd> coeffs) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  SectorOperator n = number_operator(space, coeffs);
  for (int k = 0; k < n.sectors(); ++k) {
    Eigen::MatrixXcd& b = n.block(k);
    b.diagonal().array() += lambda;
    // Hermitian positive definite: invert through the eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
    b = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  }
  return n;
}

SectorNormReport sector_norm_monotonicity(const SectorOperator& op, const std::vector<int>& sectors) {
  SectorNormReport rep;
  rep.sectors = sectors;
  rep.monotone = true;
  double running = 0.0;
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    if (sectors[i] < 0 || sectors[i] >= op.sectors()) throw UsageError("sector outside the operator");
    if (i > 0 && sectors[i] <= sectors[i - 1]) throw ConfigError("sectors must ascend");
    const double v = op.norm(sectors[i]);
    rep.norms.push_back(v);
    running = std::max(running, v);
    rep.running_max.push_back(running);
    if (i > 0 && rep.norms[i - 1] > v + 1e-12) rep.monotone = false;
  }
  return rep;
}

// ---------------------------------------------------------------- evolved resolvent norms

double lemma33_lhs_exact(double lambda, std::span<const cd> g1, std::span<const cd> g2, int n) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (n < 0) throw ConfigError("sector must be non-negative");
  if (g1.size() != g2.size()) throw UsageError("vectors of different length");
  cd c12 = 0.0;
  double n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    c12 += std::conj(g1[i]) * g2[i];
    n1 += std::norm(g1[i]);
    n2 += std::norm(g2[i]);
  }
  const double a1 = std::sqrt(n1);
  // Coordinates in an orthonormal basis (e1, e2) of span{g1, g2}.
  cd u1{a1, 0.0}, v1 = 0.0, u2, v2;
  if (a1 == 0.0) {
    u1 = 0.0;
    u2 = std::sqrt(n2);
    v2 = 0.0;
  } else {
    u2 = c12 / a1;
    v2 = std::sqrt(std::max(0.0, n2 - std::norm(u2)));
  }
  const double scale = std::max({1.0, n1, n2});
  if (std::norm(v2) <= 1e-28 * scale) {
    // One-dimensional span: A is diagonal in the occupation k of e1.
    double worst = 0.0;
    for (int k = 0; k <= n; ++k)
      worst = std::max(worst, std::abs(1.0 / (lambda + k * std::norm(u1)) - 1.0 / (lambda + k * std::norm(u2))));
    return worst;
  }
  const FockSpace sym(2, n, n);
  const std::vector<cd> c1{u1, v1}, c2{u2, v2};
  const SectorOperator diff = number_resolvent_matrix(sym, lambda, c1) - number_resolvent_matrix(sym, lambda, c2);
  double worst = 0.0;
  for (int k = 0; k <= n; ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff.block(k), Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return worst;
}

double lemma33_lhs_exact(double lambda, const WaveFunction& g1, const WaveFunction& g2, int n) {
  if (!(g1.grid() == g2.grid())) throw UsageError("functions live on different grids");
  const double s = std::sqrt(g1.grid().dx());
  std::vector<cd> a(g1.size()), b(g2.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    a[j] = g1[j] * s;
    b[j] = g2[j] * s;
  }
  return lemma33_lhs_exact(lambda, a, b, n);
}

// ---------------------------------------------------------------- Gibbs traces

namespace {

void check_gibbs(const FockSpace& space, const std::vector<double>& energies, double beta, double mu) {
  if (static_cast<int>(energies.size()) != space.modes()) throw ConfigError("one energy per mode required");
  if (!(beta > 0.0)) throw ConfigError("inverse temperature must be positive");
  if (!(mu < *std::min_element(energies.begin(), energies.end())))
    throw DomainError("chemical potential must lie below every mode energy");
}

double boltzmann(const Occupation& occ, const std::vector<double>& energies, double beta, double mu) {
  double e = 0.0;
  for (std::size_t i = 0; i < occ.size(); ++i) e += occ[i] * (energies[i] - mu);
  return std::exp(-beta * e);
}

// 1 - Z_kept / Z with Z the untruncated product partition function.
double discarded(const FockSpace& space, std::size_t kept_end, const std::vector<double>& energies,
                 double beta, double mu) {
  double z_kept = 0.0;
  for (std::size_t s = 0; s < kept_end; ++s) z_kept += boltzmann(space.occupation(s), energies, beta, mu);
  double inv_z = 1.0;
  for (double e : energies) inv_z *= -std::expm1(-beta * (e - mu));
  return std::max(0.0, 1.0 - z_kept * inv_z);
}

}  // namespace

double gibbs_truncation_weight(const FockSpace& space, const std::vector<double>& energies,
                               double beta, double mu) {
  check_gibbs(space, energies, beta, mu);
  return discarded(space, space.sector_end(space.closed_sectors() - 1), energies, beta, mu);
}

double gibbs_trace_expectation(const FockSpace& space, const SectorOperator& op,
                               const std::vector<double>& energies, double beta, double mu,
                               double max_truncation) {
  check_gibbs(space, energies, beta, mu);
  if (op.sectors() != space.closed_sectors()) throw UsageError("operator does not match the space");
  const double w = gibbs_truncation_weight(space, energies, beta, mu);
  if (w > max_truncation) throw TruncationError("discarded Gibbs weight too large; raise the particle cap");
  double z = 0.0, num = 0.0;
  for (int n = 0; n < op.sectors(); ++n) {
    const std::size_t b = space.sector_begin(n);
    for (std::size_t s = b; s < space.sector_end(n); ++s) {
      const double p = boltzmann(space.occupation(s), energies, beta, mu);
      const auto d = static_cast<Eigen::Index>(s - b);
      z += p;
      num += p * op.block(n)(d, d).real();
    }
  }
  return num / z;
}

double gibbs_field_resolvent(const FockSpace& space, double lambda, std::span<const cd> coeffs,
                             const std::vector<double>& energies, double beta, double mu,
                             double max_truncation) {
  check_gibbs(space, energies, beta, mu);
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (static_cast<int>(coeffs.size()) != space.modes())
    throw ConfigError("test function must have one coefficient per mode");
  const double w = discarded(space, space.dimension(), energies, beta, mu);
  if (w > max_truncation) throw TruncationError("discarded Gibbs weight too large; raise the particle cap");

  const auto dim = static_cast<Eigen::Index>(space.dimension());
  Eigen::SparseMatrix<cd> a_f(dim, dim);
  for (int i = 0; i < space.modes(); ++i) a_f += std::conj(coeffs[i]) * space.annihilation(i);
  const Eigen::SparseMatrix<cd> phi = Eigen::SparseMatrix<cd>(a_f.adjoint()) + a_f;
  Eigen::MatrixXcd m = -cd(0.0, 1.0) * Eigen::MatrixXcd(phi);
  m.diagonal().array() += lambda;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);

  double z = 0.0;
  Eigen::VectorXcd weights(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    weights(s) = boltzmann(space.occupation(static_cast<std::size_t>(s)), energies, beta, mu);
    z += weights(s).real();
  }
  // Tr(rho R) = sum_s rho_s (R)_ss, columns by solve.
  double num = 0.0;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    if (weights(s).real() < 1e-300) continue;
    e.setZero();
    e(s) = 1.0;
    num += weights(s).real() * lu.solve(e)(s).real();
  }
  return num / z;
}

double gibbs_field_resolvent_product(double lambda, std::span<const cd> coeffs,
                                     const std::vector<double>& energies, double beta, double mu,
                                     int n_max, double max_truncation) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (coeffs.size() != energies.size() || coeffs.empty() || coeffs.size() > 3)
    throw ConfigError("one coefficient and one energy per mode (1 to 3 modes)");
  if (!(beta > 0.0)) throw ConfigError("inverse temperature must be positive");
  if (!(mu < *std::min_element(energies.begin(), energies.end())))
    throw DomainError("chemical potential must lie below every mode energy");
  if (n_max < 1) throw ConfigError("occupation cap must be positive");

  struct ModeSpectrum {
    std::vector<double> phi, w;
  };
  std::vector<ModeSpectrum> modes;
  double kept = 1.0;
  const auto d = static_cast<Eigen::Index>(n_max + 1);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double x = std::exp(-beta * (energies[i] - mu));
    // Truncated Gibbs weights of this mode; the discarded mass is x^{n_max+1}.
    std::vector<double> p(static_cast<std::size_t>(d));
    double z = 0.0;
    for (Eigen::Index n = 0; n < d; ++n) z += (p[static_cast<std::size_t>(n)] = std::pow(x, static_cast<double>(n)));
    for (double& v : p) v /= z;
    kept *= 1.0 - std::pow(x, static_cast<double>(n_max + 1));
    // c a* + conj(c) a is unitarily equivalent to |c| (a* + a) by a phase on |n>.
    const double c = std::abs(coeffs[i]);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index n = 0; n + 1 < d; ++n) phi(n, n + 1) = phi(n + 1, n) = c * std::sqrt(static_cast<double>(n + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(phi);
    ModeSpectrum ms;
    for (Eigen::Index a = 0; a < d; ++a) {
      double w = 0.0;
      for (Eigen::Index n = 0; n < d; ++n) w += p[static_cast<std::size_t>(n)] * es.eigenvectors()(n, a) * es.eigenvectors()(n, a);
      ms.phi.push_back(es.eigenvalues()(a));
      ms.w.push_back(w);
    }
    modes.push_back(std::move(ms));
  }
  if (1.0 - kept > max_truncation) throw TruncationError("discarded Gibbs weight too large; raise the occupation cap");

  // Nested sum over the joint spectrum, innermost mode last.
  double total = 0.0;
  const std::size_t n = modes[0].phi.size();
  std::vector<std::size_t> idx(modes.size(), 0);
  while (true) {
    double phi = 0.0, w = 1.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      phi += modes[m].phi[idx[m]];
      w *= modes[m].w[idx[m]];
    }
    total += w * lambda / (lambda * lambda + phi * phi);  // Re 1/(lambda - i phi)
    std::size_t m = modes.size();
    while (m > 0) {
      --m;
      if (++idx[m] < n) break;
      idx[m] = 0;
      if (m == 0) return total;
    }
  }
}

}  // namespace thermolim
