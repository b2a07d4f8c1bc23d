#include "thermolim/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "thermolim/errors.hpp"

namespace thermolim {

Grid1D::Grid1D(double half_width, std::size_t n_points) : half_width_(half_width), n_(n_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("grid half-width must be positive and finite");
  if (n_points < 16 || n_points % 2 != 0)
    throw ConfigError("grid point count must be even and at least 16");
}

double Grid1D::x(std::size_t j) const {
  const double k = static_cast<double>(2 * static_cast<long long>(j) - static_cast<long long>(n_));
  return half_width_ * k / static_cast<double>(n_);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

std::size_t Grid1D::nearest_index(double xv) const {
  const double j = std::round((xv + half_width_) / dx());
  if (j <= 0.0) return 0;
  if (j >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(j);
}

std::size_t Grid1D::index_of(double xv) const {
  const std::size_t j = nearest_index(xv);
  if (std::abs(x(j) - xv) > 1e-12 * std::max(1.0, half_width_))
    throw ConfigError("point " + std::to_string(xv) + " is not a grid point");
  return j;
}

Grid1D Grid1D::widened(unsigned doublings) const {
  const double scale = std::ldexp(1.0, static_cast<int>(doublings));
  return Grid1D(half_width_ * scale, n_ << doublings);
}

Grid1D make_grid(double half_width, std::size_t n_points) { return Grid1D(half_width, n_points); }

RadialGrid::RadialGrid(double r_max, std::size_t n_points) : r_max_(r_max), n_(n_points) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("r_max must be positive");
  if (n_points < 16) throw ConfigError("radial grid needs at least 16 points");
}

// ---------------------------------------------------------------- WaveFunction

WaveFunction::WaveFunction(const Grid1D& grid)
    : grid_(grid), re_(grid.size(), 0.0), im_(grid.size(), 0.0) {}

WaveFunction::WaveFunction(const Grid1D& grid, std::vector<double> re, std::vector<double> im)
    : grid_(grid), re_(std::move(re)), im_(std::move(im)) {
  if (re_.size() != grid.size() || im_.size() != grid.size())
    throw UsageError("sample count does not match grid");
}

WaveFunction::WaveFunction(const Grid1D& grid, std::span<const cdouble> values) : WaveFunction(grid) {
  if (values.size() != grid.size()) throw UsageError("sample count does not match grid");
  for (std::size_t j = 0; j < values.size(); ++j) set(j, values[j]);
}

WaveFunction WaveFunction::sample(const Grid1D& grid, const std::function<cdouble(double)>& fn) {
  WaveFunction f(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) f.set(j, fn(grid.x(j)));
  return f;
}

std::vector<cdouble> WaveFunction::values() const {
  std::vector<cdouble> v(size());
  for (std::size_t j = 0; j < size(); ++j) v[j] = (*this)[j];
  return v;
}

static void require_same_grid(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw UsageError("functions live on different grids");
}

WaveFunction& WaveFunction::operator+=(const WaveFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < size(); ++j) {
    re_[j] += other.re_[j];
    im_[j] += other.im_[j];
  }
  return *this;
}

WaveFunction& WaveFunction::operator-=(const WaveFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < size(); ++j) {
    re_[j] -= other.re_[j];
    im_[j] -= other.im_[j];
  }
  return *this;
}

WaveFunction& WaveFunction::operator*=(cdouble a) {
  for (std::size_t j = 0; j < size(); ++j) set(j, a * (*this)[j]);
  return *this;
}

WaveFunction operator+(WaveFunction a, const WaveFunction& b) { return a += b; }
WaveFunction operator-(WaveFunction a, const WaveFunction& b) { return a -= b; }
WaveFunction operator*(cdouble a, WaveFunction f) { return f *= a; }

cdouble inner(const WaveFunction& f, const WaveFunction& g) {
  require_same_grid(f, g);
  double sr = 0.0;
  double si = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    sr += f.re()[j] * g.re()[j] + f.im()[j] * g.im()[j];
    si += f.re()[j] * g.im()[j] - f.im()[j] * g.re()[j];
  }
  const double dx = f.grid().dx();
  return {sr * dx, si * dx};
}

double norm(const WaveFunction& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.re()[j] * f.re()[j] + f.im()[j] * f.im()[j];
  return std::sqrt(s * f.grid().dx());
}

cdouble integral(const WaveFunction& f) {
  cdouble s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j];
  return s * f.grid().dx();
}

cdouble first_moment(const WaveFunction& f) {
  cdouble s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.grid().x(j) * f[j];
  return s * f.grid().dx();
}

double position_mean(const WaveFunction& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.grid().x(j) * std::norm(f[j]);
  return s * f.grid().dx();
}

WaveFunction reflect(const WaveFunction& f) {
  WaveFunction g(f.grid());
  for (std::size_t j = 1; j < f.size(); ++j) g.set(j, f[f.grid().mirror(j)]);
  return g;
}

static std::size_t embedding_offset(const Grid1D& narrow, const Grid1D& wide) {
  if (narrow.dx() != wide.dx() || wide.size() < narrow.size())
    throw UsageError("grids are not nested with a common spacing");
  return (wide.size() - narrow.size()) / 2;
}

WaveFunction embed(const WaveFunction& f, const Grid1D& wider) {
  const std::size_t off = embedding_offset(f.grid(), wider);
  WaveFunction g(wider);
  std::copy(f.re().begin(), f.re().end(), g.re().begin() + static_cast<std::ptrdiff_t>(off));
  std::copy(f.im().begin(), f.im().end(), g.im().begin() + static_cast<std::ptrdiff_t>(off));
  return g;
}

WaveFunction restrict_to(const WaveFunction& f, const Grid1D& narrower) {
  const std::size_t off = embedding_offset(narrower, f.grid());
  WaveFunction g(narrower);
  for (std::size_t j = 0; j < narrower.size(); ++j) g.set(j, f[j + off]);
  return g;
}

std::pair<std::size_t, std::size_t> support_indices(const WaveFunction& f) {
  std::size_t first = f.size();
  std::size_t last = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f.re()[j] != 0.0 || f.im()[j] != 0.0) {
      first = std::min(first, j);
      last = j + 1;
    }
  }
  if (first == f.size()) return {0, 0};
  return {first, last};
}

double support_edge(const WaveFunction& f) {
  const auto [first, last] = support_indices(f);
  if (first == last) return 0.0;
  return std::max(std::abs(f.grid().x(first)), std::abs(f.grid().x(last - 1)));
}

// ---------------------------------------------------------------- bumps

double bump_profile(double x, double centre, double radius) {
  const double u = (x - centre) / radius;
  const double s = 1.0 - u * u;
  if (!(s > 0.0)) return 0.0;
  return std::exp(-1.0 / s);
}

static WaveFunction raw_bump(double centre, double radius, const Grid1D& grid) {
  if (!(radius > 0.0)) throw ConfigError("bump radius must be positive");
  if (centre - radius < -grid.half_width() || centre + radius > grid.half_width())
    throw ConfigError("bump support leaves the computational box");
  WaveFunction f(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) f.re()[j] = bump_profile(grid.x(j), centre, radius);
  return f;
}

WaveFunction bump(double centre, double radius, const Grid1D& grid) {
  WaveFunction f = raw_bump(centre, radius, grid);
  const double nrm = norm(f);
  for (double& v : f.re()) v /= nrm;
  return f;
}

WaveFunction bump_unit_integral(double centre, double radius, const Grid1D& grid) {
  WaveFunction f = raw_bump(centre, radius, grid);
  const double total = integral(f).real();
  for (double& v : f.re()) v /= total;
  return f;
}

WaveFunction bump_antisymmetrized(double centre, double radius, double shift, const Grid1D& grid) {
  WaveFunction f = bump_unit_integral(centre, radius, grid);
  WaveFunction g = bump_unit_integral(-centre - shift, radius, grid);
  return f - g;
}

// ---------------------------------------------------------------- Fourier

MomentumFunction::MomentumFunction(const Grid1D& grid, std::vector<cdouble> amplitudes)
    : grid_(grid), amp_(std::move(amplitudes)) {
  if (amp_.size() != grid.size()) throw UsageError("momentum sample count does not match grid");
}

double MomentumFunction::dp() const { return std::numbers::pi / grid_.half_width(); }

double MomentumFunction::p(std::size_t i) const {
  const long long k = static_cast<long long>(i) - static_cast<long long>(grid_.size() / 2);
  return static_cast<double>(k) * dp();
}

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cdouble> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericalError("FFTW could not create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void run_fft(std::vector<cdouble>& in, std::vector<cdouble>& out, int sign) {
  fftw_plan plan = PlanCache::instance().get(in.size(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

// With x_j = -L + j dx and p_k = pi k / L, e^{-i p_k x_j} = (-1)^k e^{-2 pi i k j / n}.
MomentumFunction to_momentum(const WaveFunction& f) {
  const std::size_t n = f.size();
  std::vector<cdouble> in = f.values();
  std::vector<cdouble> out(n);
  run_fft(in, out, FFTW_FORWARD);
  const double scale = f.grid().dx() / std::sqrt(2.0 * std::numbers::pi);
  std::vector<cdouble> amp(n);
  const long long half = static_cast<long long>(n / 2);
  for (long long k = -half; k < half; ++k) {
    const std::size_t src = static_cast<std::size_t>((k + static_cast<long long>(n)) % static_cast<long long>(n));
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    amp[static_cast<std::size_t>(k + half)] = sign * scale * out[src];
  }
  return MomentumFunction(f.grid(), std::move(amp));
}

MomentumFunction to_momentum_naive(const WaveFunction& f) {
  const Grid1D& g = f.grid();
  const std::size_t n = f.size();
  std::vector<cdouble> amp(n);
  MomentumFunction tmp(g, std::vector<cdouble>(n));
  const double scale = g.dx() / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = tmp.p(i);
    cdouble s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += f[j] * std::polar(1.0, -p * g.x(j));
    amp[i] = scale * s;
  }
  return MomentumFunction(g, std::move(amp));
}

WaveFunction to_position(const MomentumFunction& fhat) {
  const std::size_t n = fhat.size();
  const double dx = fhat.grid().dx();
  const double scale = std::sqrt(2.0 * std::numbers::pi) / dx;
  std::vector<cdouble> in(n), out(n);
  const long long half = static_cast<long long>(n / 2);
  for (long long k = -half; k < half; ++k) {
    const std::size_t dst = static_cast<std::size_t>((k + static_cast<long long>(n)) % static_cast<long long>(n));
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    in[dst] = sign * scale * fhat[static_cast<std::size_t>(k + half)];
  }
  run_fft(in, out, FFTW_BACKWARD);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= inv_n;
  return WaveFunction(fhat.grid(), out);
}

double norm(const MomentumFunction& fhat) {
  double s = 0.0;
  for (const auto& a : fhat.amplitudes()) s += std::norm(a);
  return std::sqrt(s * fhat.dp());
}

double momentum_quantile(const WaveFunction& f, double q) {
  const MomentumFunction fhat = to_momentum(f);
  const std::size_t n = fhat.size();
  const std::size_t mid = n / 2;
  double total = 0.0;
  for (const auto& a : fhat.amplitudes()) total += std::norm(a);
  if (total == 0.0) return 0.0;
  double acc = std::norm(fhat[mid]);
  if (acc >= q * total) return 0.0;
  for (std::size_t m = 1; m <= mid; ++m) {
    acc += std::norm(fhat[mid - m]);
    if (mid + m < n) acc += std::norm(fhat[mid + m]);
    if (acc >= q * total) return static_cast<double>(m) * fhat.dp();
  }
  return static_cast<double>(mid) * fhat.dp();
}

}  // namespace thermolim
