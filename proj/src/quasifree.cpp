#include "thermolim/quasifree.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>
#include <numbers>

#include "thermolim/errors.hpp"
#include "thermolim/kernels.hpp"

namespace thermolim {

double bose_weight(double beta, double energy, double mu) {
  return 1.0 / std::expm1(beta * (energy - mu));
}

BoseWeightTable::BoseWeightTable(const std::vector<double>& energies, double beta, double mu) {
  if (!(beta > 0.0)) throw ConfigError("inverse temperature must be positive");
  if (!energies.empty() && !(mu <= energies.front() - 1e-6))
    throw DomainError("chemical potential must stay 1e-6 below the lowest level");
  n_.reserve(energies.size());
  for (double e : energies) n_.push_back(bose_weight(beta, e, mu));
}

// ---------------------------------------------------------------- condensate

cdouble Condensate::pairing(const WaveFunction& f) const {
  switch (limit) {
    case LimitMode::Even:
      return integral(f);
    case LimitMode::Odd:
      return first_moment(f);
    case LimitMode::None:
      break;
  }
  if (!mode) return 0.0;
  return inner(*mode, f);
}

double Condensate::density(const Grid1D& grid, std::size_t j) const {
  switch (limit) {
    case LimitMode::Even:
      return 1.0;
    case LimitMode::Odd:
      return grid.x(j) * grid.x(j);
    case LimitMode::None:
      break;
  }
  if (!mode) return 0.0;
  if (!(mode->grid() == grid)) throw UsageError("condensate mode lives on another grid");
  return std::norm((*mode)[j]);
}

// ---------------------------------------------------------------- trapped state

static double truncation_for(const SpectralDecomposition& d, double beta, double mu) {
  if (d.count() == d.n_points() || d.count() == 0) return 0.0;
  return bose_weight(beta, d.eigenvalue(d.count() - 1), mu);
}

QuasifreeState::QuasifreeState(double beta, double mu,
                               std::shared_ptr<const SpectralDecomposition> decomp,
                               Condensate condensate)
    : beta_(beta),
      mu_(mu),
      decomp_(std::move(decomp)),
      condensate_(std::move(condensate)),
      weights_(decomp_->eigenvalues(), beta, mu),
      truncation_(truncation_for(*decomp_, beta, mu)) {
  if (mu > 0.0) throw DomainError("chemical potential must not be positive");
  if (!decomp_->grid) throw UsageError("quasifree states need a decomposition on a 1D grid");
  if (condensate_.kappa < 0.0) throw ConfigError("condensate amplitude must be non-negative");
}

cdouble QuasifreeState::thermal_two_point(const WaveFunction& f, const WaveFunction& g) const {
  const Grid1D& grid = *decomp_->grid;
  if (!(f.grid() == grid) || !(g.grid() == grid)) throw UsageError("function not on the state's grid");
  cdouble s = 0.0;
  for (std::size_t k = 0; k < decomp_->count(); ++k) {
    auto col = decomp_->column(k);
    const cdouble pf = kernels::dot_split(col, f.re(), f.im());
    const cdouble pg = kernels::dot_split(col, g.re(), g.im());
    s += weights_[k] * std::conj(pg) * pf;
  }
  return s * grid.dx();
}

cdouble QuasifreeState::two_point(const WaveFunction& f, const WaveFunction& g) const {
  cdouble s = thermal_two_point(f, g);
  if (condensate_.present()) {
    const double k2 = condensate_.kappa * condensate_.kappa;
    s += k2 * condensate_.pairing(f) * std::conj(condensate_.pairing(g));
  }
  return s;
}

std::vector<double> QuasifreeState::thermal_density() const {
  std::vector<double> rho(decomp_->n_points(), 0.0);
  const double inv_dx = 1.0 / decomp_->spacing();
  for (std::size_t k = 0; k < decomp_->count(); ++k)
    kernels::accumulate_square(weights_[k] * inv_dx, decomp_->column(k), rho);
  return rho;
}

std::vector<double> QuasifreeState::density() const {
  std::vector<double> rho = thermal_density();
  if (condensate_.present()) {
    const double k2 = condensate_.kappa * condensate_.kappa;
    for (std::size_t j = 0; j < rho.size(); ++j) rho[j] += k2 * condensate_.density(*decomp_->grid, j);
  }
  return rho;
}

double QuasifreeState::position_density(double x) const {
  const std::size_t j = decomp_->grid->index_of(x);
  double rho = 0.0;
  const double inv_dx = 1.0 / decomp_->spacing();
  for (std::size_t k = 0; k < decomp_->count(); ++k) {
    const double z = decomp_->column(k)[j];
    rho += weights_[k] * z * z * inv_dx;
  }
  if (condensate_.present())
    rho += condensate_.kappa * condensate_.kappa * condensate_.density(*decomp_->grid, j);
  return rho;
}

double QuasifreeState::local_particle_number(double a, double b) const {
  const Grid1D& grid = *decomp_->grid;
  if (a > b) throw UsageError("region must satisfy a <= b");
  if (a < -grid.half_width() || b > grid.half_width()) throw UsageError("region leaves the grid");
  if (a == b) return 0.0;
  const std::vector<double> rho = density();
  double s = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    if (x >= a && x < b) s += rho[j];
  }
  return s * grid.dx();
}

double QuasifreeState::field_resolvent_expectation(double lambda, const WaveFunction& f) const {
  if (condensate_.present())
    throw UsageError("the field resolvent formula is stated for the unperturbed state (kappa = 0)");
  return field_resolvent_from_variance(lambda, thermal_two_point(f, f).real());
}

double QuasifreeState::number_resolvent_expectation(double lambda, const WaveFunction& f) const {
  const double n2 = norm(f) * norm(f);
  if (n2 == 0.0) return 1.0 / lambda;
  if (condensate_.present() && std::abs(condensate_.pairing(f)) > 1e-12 * std::sqrt(n2))
    throw UsageError("displaced-state corrections to the number resolvent are not implemented");
  return number_resolvent_from_occupation(lambda, n2, thermal_two_point(f, f).real() / n2);
}

double QuasifreeState::kms_residual() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < decomp_->count(); ++k) {
    const double boltz = std::exp(-beta_ * (decomp_->eigenvalue(k) - mu_));
    const double n = weights_[k];
    worst = std::max(worst, std::abs(n - boltz * (1.0 + n)) / std::max(1.0, n));
  }
  return worst;
}

// ---------------------------------------------------------------- closed-form pieces

void require_integrable(int s, double mu) {
  if (mu > 0.0) throw DomainError("chemical potential must not be positive");
  if (s < 3 && mu >= 0.0)
    throw DomainError("mu = 0 makes the Bose weight non-integrable in dimension " + std::to_string(s));
}

double homogeneous_density(double beta, double mu, int s) {
  if (s < 1 || s > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (!(beta > 0.0)) throw ConfigError("inverse temperature must be positive");
  require_integrable(s, mu);
  // p = w u puts the Bose peak near u ~ 1.
  const double w = mu < 0.0 ? std::sqrt(-mu) : 1.0 / std::sqrt(beta);
  auto integrand = [&](double u) {
    const double p = w * u;
    const double x = beta * (p * p - mu);
    double v;
    if (s == 3 && mu == 0.0 && x < 1e-8)
      v = (1.0 - 0.5 * x) / beta;  // p^2 / expm1(beta p^2)
    else
      v = std::pow(p, s - 1) / std::expm1(x);
    return w * v;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0, l1 = 0.0;
  const double val = integrator.integrate(integrand, 1e-13, &error, &l1);
  if (!(error <= 1e-8 * std::abs(val)))
    throw NumericalError("homogeneous density quadrature did not reach 1e-8");
  const double angular = s == 1 ? 2.0 : (s == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
  return angular * val / std::pow(2.0 * std::numbers::pi, s);
}

double field_resolvent_from_variance(double lambda, double sigma2) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(sigma2 >= 0.0)) throw DomainError("variance must be non-negative");
  if (sigma2 == 0.0) return 1.0 / lambda;
  const double scale = 1.0 / std::max(lambda, std::sqrt(sigma2));
  auto integrand = [&](double v) {
    const double u = scale * v;
    return scale * std::exp(-u * lambda - 0.5 * u * u * sigma2);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  const double val = integrator.integrate(integrand, 1e-14, &error);
  if (!(error <= 1e-10 * val)) throw NumericalError("field resolvent quadrature did not converge");
  return val;
}

double number_resolvent_from_occupation(double lambda, double norm2, double nbar) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(nbar >= 0.0) || !(norm2 >= 0.0)) throw DomainError("occupation and norm must be non-negative");
  if (nbar == 0.0) return 1.0 / lambda;
  const double r = nbar / (1.0 + nbar);
  const double q = 1.0 / (1.0 + nbar);
  double sum = 0.0;
  double rn = 1.0;  // r^n
  for (std::size_t n = 0;; ++n) {
    sum += q * rn / (lambda + static_cast<double>(n) * norm2);
    rn *= r;
    if (rn / lambda < 1e-12) break;
    if (n > 500000000) throw NumericalError("number resolvent series did not terminate");
  }
  return sum;
}

// ---------------------------------------------------------------- 1D limit state

namespace {

// fhat(p) by direct summation over the support of f.
struct DirectTransform {
  const WaveFunction* f;
  std::size_t first, last;
  explicit DirectTransform(const WaveFunction& fn) : f(&fn) {
    std::tie(first, last) = support_indices(fn);
  }
  cdouble operator()(double p) const {
    cdouble s = 0.0;
    for (std::size_t j = first; j < last; ++j) s += (*f)[j] * std::polar(1.0, -p * f->grid().x(j));
    return s * f->grid().dx() / std::sqrt(2.0 * std::numbers::pi);
  }
};

// Depth-limited: pieces whose integral is negligible would otherwise chase a
// relative tolerance down to roundoff. The caller checks the summed error.
template <class Fn>
double adaptive(Fn&& fn, double a, double b, double& error_sum) {
  double error = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 8, 1e-12, &error);
  error_sum += error;
  return v;
}

}  // namespace

LimitState1D::LimitState1D(double beta, double mu, Condensate condensate)
    : beta_(beta), mu_(mu), condensate_(std::move(condensate)) {
  if (!(beta > 0.0)) throw ConfigError("inverse temperature must be positive");
  require_integrable(1, mu);
}

cdouble LimitState1D::thermal_two_point(const WaveFunction& f, const WaveFunction& g,
                                        double t) const {
  if (!(f.grid() == g.grid())) throw UsageError("functions live on different grids");
  const DirectTransform fh(f), gh(g);
  const bool same = &f == &g || (f.values() == g.values());
  // Bose factor below e^{-46} beyond P.
  const double P = std::sqrt(std::max(50.0 / beta_ + mu_, 0.0)) + 2.0;
  const double w = std::sqrt(-mu_);
  std::vector<double> cuts{0.0};
  for (double c = std::min(w, 1.0); c < P; c *= 4.0) cuts.push_back(c);
  cuts.push_back(P);
  auto integrand = [&](double p) {
    const double n = 1.0 / std::expm1(beta_ * (p * p - mu_));
    const cdouble a = fh(p);
    const cdouble b = same ? a : gh(p);
    return std::conj(b) * a * n * std::polar(1.0, t * p * p);
  };
  double re = 0.0, im = 0.0, err = 0.0, scale = 0.0;
  const bool real_only = same && t == 0.0;
  for (int sign : {-1, 1}) {
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = sign * cuts[i], b = sign * cuts[i + 1];
      const double lo = std::min(a, b), hi = std::max(a, b);
      // Oscillatory for large t: split further so each piece spans a few periods.
      const double span_phase = t * (hi * hi - lo * lo);
      const int pieces = std::max(1, static_cast<int>(std::abs(span_phase) / (4.0 * std::numbers::pi)));
      const double h = (hi - lo) / pieces;
      for (int k = 0; k < pieces; ++k) {
        const double x0 = lo + k * h, x1 = lo + (k + 1) * h;
        re += adaptive([&](double p) { return integrand(p).real(); }, x0, x1, err);
        if (!real_only) im += adaptive([&](double p) { return integrand(p).imag(); }, x0, x1, err);
        // (|fhat|^2 + |ghat|^2) n / 2 bounds the integrand and stays smooth.
        scale += adaptive(
            [&](double p) {
              const double n = 1.0 / std::expm1(beta_ * (p * p - mu_));
              return 0.5 * n * (std::norm(fh(p)) + (same ? std::norm(fh(p)) : std::norm(gh(p))));
            },
            x0, x1, err);
      }
    }
  }
  if (!(err <= 1e-10 * scale + 1e-15))
    throw NumericalError("limit-state momentum quadrature did not converge");
  return {re, im};
}

cdouble LimitState1D::two_point(const WaveFunction& f, const WaveFunction& g) const {
  cdouble s = thermal_two_point(f, g);
  if (condensate_.present()) {
    const double k2 = condensate_.kappa * condensate_.kappa;
    s += k2 * condensate_.pairing(f) * std::conj(condensate_.pairing(g));
  }
  return s;
}

double LimitState1D::position_density(double x) const {
  double rho = homogeneous_density(beta_, mu_, 1);
  if (condensate_.present()) {
    const double k2 = condensate_.kappa * condensate_.kappa;
    if (condensate_.limit == LimitMode::Even)
      rho += k2;
    else if (condensate_.limit == LimitMode::Odd)
      rho += k2 * x * x;
    else
      rho += k2 * std::norm((*condensate_.mode)[condensate_.mode->grid().index_of(x)]);
  }
  return rho;
}

double LimitState1D::field_resolvent_expectation(double lambda, const WaveFunction& f) const {
  if (condensate_.present())
    throw UsageError("the field resolvent formula is stated for the unperturbed state (kappa = 0)");
  return field_resolvent_from_variance(lambda, thermal_two_point(f, f).real());
}

double LimitState1D::number_resolvent_expectation(double lambda, const WaveFunction& f) const {
  const double n2 = norm(f) * norm(f);
  if (n2 == 0.0) return 1.0 / lambda;
  if (condensate_.present() && std::abs(condensate_.pairing(f)) > 1e-12 * std::sqrt(n2))
    throw UsageError("displaced-state corrections to the number resolvent are not implemented");
  const double nbar = thermal_two_point(f, f).real() / n2;
  return number_resolvent_from_occupation(lambda, n2, nbar);
}

cdouble LimitState1D::temporal_correlation(const WaveFunction& f, const WaveFunction& g,
                                           double t) const {
  cdouble s = thermal_two_point(f, g, t);
  if (condensate_.present()) {
    if (condensate_.limit == LimitMode::None)
      throw UsageError("time-independent condensate term needs a zero-energy limit mode");
    const double k2 = condensate_.kappa * condensate_.kappa;
    s += k2 * condensate_.pairing(f) * std::conj(condensate_.pairing(g));
  }
  return s;
}

cdouble LimitState1D::temporal_correlation_fft(const WaveFunction& f, const WaveFunction& g,
                                               double t) const {
  const MomentumFunction fh = to_momentum(f);
  const MomentumFunction gh = to_momentum(g);
  cdouble s = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double p = fh.p(i);
    const double n = 1.0 / std::expm1(beta_ * (p * p - mu_));
    s += std::conj(gh[i]) * fh[i] * n * std::polar(1.0, t * p * p);
  }
  s *= fh.dp();
  if (condensate_.present()) {
    const double k2 = condensate_.kappa * condensate_.kappa;
    s += k2 * condensate_.pairing(f) * std::conj(condensate_.pairing(g));
  }
  return s;
}

// ---------------------------------------------------------------- 3D limit state

namespace {

// Piecewise Chebyshev interpolant of a smooth function on [a, b].
class ChebTable {
 public:
  ChebTable(const std::function<double(double)>& fn, double a, double b, int panels, int order)
      : a_(a), h_((b - a) / panels), panels_(panels), order_(order) {
    nodes_.resize(order);
    bary_.resize(order);
    for (int i = 0; i < order; ++i) {
      nodes_[i] = std::cos(std::numbers::pi * (2 * i + 1) / (2.0 * order));  // first kind
      bary_[i] = (i % 2 == 0 ? 1.0 : -1.0) * std::sin(std::numbers::pi * (2 * i + 1) / (2.0 * order));
    }
    values_.resize(static_cast<std::size_t>(panels) * order);
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < order; ++i)
        values_[static_cast<std::size_t>(p) * order + i] = fn(a_ + h_ * (p + 0.5 * (nodes_[i] + 1.0)));
  }

  double operator()(double x) const {
    int p = static_cast<int>((x - a_) / h_);
    p = std::clamp(p, 0, panels_ - 1);
    const double u = 2.0 * (x - a_ - p * h_) / h_ - 1.0;
    double num = 0.0, den = 0.0;
    const double* v = values_.data() + static_cast<std::size_t>(p) * order_;
    for (int i = 0; i < order_; ++i) {
      const double d = u - nodes_[i];
      if (d == 0.0) return v[i];
      const double c = bary_[i] / d;
      num += c * v[i];
      den += c;
    }
    return num / den;
  }

 private:
  double a_, h_;
  int panels_, order_;
  std::vector<double> nodes_, bary_, values_;
};

}  // namespace

LimitState3D::LimitState3D(double beta, double mu, double kappa) : beta_(beta), mu_(mu), kappa_(kappa) {
  if (!(beta > 0.0)) throw ConfigError("inverse temperature must be positive");
  require_integrable(3, mu);
  if (kappa < 0.0) throw ConfigError("condensate amplitude must be non-negative");
}

MemoryResult LimitState3D::temporal_correlation(const AxialBump& f, const AxialBump& g, double t,
                                                double rtol) const {
  if (f.z0 != 0.0 || g.z0 != 0.0) throw UsageError("memory correlations use radial bumps");
  using boost::math::quadrature::gauss;
  const double P = std::sqrt(std::max(50.0 / beta_ + mu_, 0.0)) + 2.0;
  const double beta = beta_, mu = mu_;
  // G(p) = 4 pi p^2 n(p) fhat(p) ghat(p): smooth, tabulated once.
  const ChebTable G(
      [&](double p) {
        const double x = beta * (p * p - mu);
        const double p2n = (mu == 0.0 && x < 1e-8) ? (1.0 - 0.5 * x) / beta : p * p / std::expm1(x);
        return 4.0 * std::numbers::pi * p2n * f.fourier_radial(p) * g.fourier_radial(p);
      },
      0.0, P, 96, 24);

  // Panel edges: half periods of e^{itp^2}, never wider than 0.1.
  std::vector<double> edges{0.0};
  const double T = std::abs(t);
  for (std::size_t i = 1;; ++i) {
    double next = T > 0.0 ? std::sqrt(static_cast<double>(i) * std::numbers::pi / T) : P;
    while (next - edges.back() > 0.1 && edges.back() + 0.1 < P) edges.push_back(edges.back() + 0.1);
    if (next >= P) break;
    if (next > edges.back()) edges.push_back(next);
  }
  if (edges.back() < P) edges.push_back(P);

  auto integrate = [&](auto rule) {
    cdouble s = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double a = edges[i], b = edges[i + 1];
      const double re = rule([&](double p) { return G(p) * std::cos(t * p * p); }, a, b);
      const double im = rule([&](double p) { return G(p) * std::sin(t * p * p); }, a, b);
      s += cdouble(re, im);
    }
    return s;
  };
  const cdouble coarse = integrate([](auto fn, double a, double b) { return gauss<double, 10>::integrate(fn, a, b); });
  const cdouble fine = integrate([](auto fn, double a, double b) { return gauss<double, 20>::integrate(fn, a, b); });

  MemoryResult r;
  r.t = t;
  r.thermal = fine;
  // <f, h><h, g> with h = 1, i.e. (2 pi)^{3/2} fhat(0) ghat(0), by quadrature.
  const double zero_mode = std::pow(2.0 * std::numbers::pi, 1.5);
  r.condensate = kappa_ * kappa_ * (zero_mode * f.fourier_radial(0.0)) * (zero_mode * g.fourier_radial(0.0));
  r.total = r.thermal + r.condensate;
  r.panels = edges.size() - 1;
  r.quadrature_delta = std::abs(fine - coarse);
  r.converged = r.quadrature_delta <= rtol * std::abs(fine) + 1e-14;
  return r;
}

// ---------------------------------------------------------------- mu scan

MuScanReport mu_limit_scan(double lambda, const WaveFunction& f, double beta,
                           const std::vector<double>& mus, Condensate condensate,
                           double cauchy_tol) {
  if (mus.size() < 2) throw ConfigError("mu scan needs at least two values");
  for (std::size_t i = 1; i < mus.size(); ++i)
    if (!(mus[i] > mus[i - 1])) throw ConfigError("mu values must ascend towards 0");
  MuScanReport rep;
  const double n2 = norm(f) * norm(f);
  for (double mu : mus) {
    const LimitState1D state(beta, mu, condensate);
    MuScanRow row;
    row.mu = mu;
    row.occupation = n2 > 0.0 ? state.thermal_two_point(f, f).real() / n2 : 0.0;
    row.value = state.number_resolvent_expectation(lambda, f);
    rep.rows.push_back(row);
  }
  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].value < rep.rows[i - 1].value)) rep.decreasing = false;
  rep.ratio = rep.rows.back().value / rep.rows.front().value;
  rep.last_difference = std::abs(rep.rows.back().value - rep.rows[rep.rows.size() - 2].value);
  if (rep.decreasing && rep.ratio < 0.05)
    rep.verdict = "vanishes";
  else if (rep.last_difference < cauchy_tol && rep.rows.back().value > 0.0)
    rep.verdict = "converges-positive";
  else
    rep.verdict = "indeterminate";
  return rep;
}

}  // namespace thermolim
