#pragma once

// Uniform grids, sampled wave functions, and the discrete Fourier transform.
//
// Grid1D samples [-L, L) at x_j = L(2j - n)/n, j = 0..n-1, i.e. x_j = -L + j dx.
// The (2j - n) form keeps the points exactly symmetric: x_{n/2} = 0 and
// x_{n-j} = -x_j bit for bit. x_0 = -L has no mirror point on the grid.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace thermolim {

using cdouble = std::complex<double>;

class Grid1D {
 public:
  /// Throws ConfigError unless half_width > 0 and n_points is even and >= 16.
  Grid1D(double half_width, std::size_t n_points);

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  double dx() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  double x(std::size_t j) const;
  std::vector<double> points() const;

  /// Index j with x_j == x exactly, or throws ConfigError.
  std::size_t index_of(double x) const;
  /// Nearest grid index (clamped).
  std::size_t nearest_index(double x) const;

  /// Mirror index n - j; j = 0 has none and returns size().
  std::size_t mirror(std::size_t j) const { return j == 0 ? n_ : n_ - j; }

  /// Same spacing, 2^doublings times as many points, same centre.
  Grid1D widened(unsigned doublings) const;

  bool operator==(const Grid1D& other) const {
    return half_width_ == other.half_width_ && n_ == other.n_;
  }

 private:
  double half_width_;
  std::size_t n_;
};

Grid1D make_grid(double half_width, std::size_t n_points);

/// r_j = j dr, j = 1..n. The origin is excluded.
class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n_points);

  double r_max() const { return r_max_; }
  std::size_t size() const { return n_; }
  double dr() const { return r_max_ / static_cast<double>(n_); }
  /// j is 0-based storage index; returns r_{j+1}.
  double r(std::size_t j) const { return static_cast<double>(j + 1) * dr(); }

  bool operator==(const RadialGrid& other) const {
    return r_max_ == other.r_max_ && n_ == other.n_;
  }

 private:
  double r_max_;
  std::size_t n_;
};

/// Complex samples on a Grid1D, stored as separate real and imaginary arrays.
class WaveFunction {
 public:
  explicit WaveFunction(const Grid1D& grid);
  WaveFunction(const Grid1D& grid, std::vector<double> re, std::vector<double> im);
  WaveFunction(const Grid1D& grid, std::span<const cdouble> values);

  static WaveFunction sample(const Grid1D& grid, const std::function<cdouble(double)>& fn);

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return re_.size(); }
  cdouble operator[](std::size_t j) const { return {re_[j], im_[j]}; }
  void set(std::size_t j, cdouble v) {
    re_[j] = v.real();
    im_[j] = v.imag();
  }

  std::span<const double> re() const { return re_; }
  std::span<const double> im() const { return im_; }
  std::span<double> re() { return re_; }
  std::span<double> im() { return im_; }
  std::vector<cdouble> values() const;

  WaveFunction& operator+=(const WaveFunction& other);
  WaveFunction& operator-=(const WaveFunction& other);
  WaveFunction& operator*=(cdouble a);

 private:
  Grid1D grid_;
  std::vector<double> re_;
  std::vector<double> im_;
};

WaveFunction operator+(WaveFunction a, const WaveFunction& b);
WaveFunction operator-(WaveFunction a, const WaveFunction& b);
WaveFunction operator*(cdouble a, WaveFunction f);

/// sum_j conj(f_j) g_j dx. Throws UsageError on grid mismatch.
cdouble inner(const WaveFunction& f, const WaveFunction& g);
double norm(const WaveFunction& f);
/// sum_j f_j dx
cdouble integral(const WaveFunction& f);
/// sum_j x_j f_j dx
cdouble first_moment(const WaveFunction& f);
/// sum_j x_j |f_j|^2 dx
double position_mean(const WaveFunction& f);

/// g(x) = f(-x); the unmatched sample at x_0 = -L is set to zero.
WaveFunction reflect(const WaveFunction& f);

/// Copies samples onto a wider grid with the same spacing and centre
/// (zero outside). Throws UsageError if the grids are incompatible.
WaveFunction embed(const WaveFunction& f, const Grid1D& wider);
/// Inverse of embed: keeps the samples that lie on the narrower grid.
WaveFunction restrict_to(const WaveFunction& f, const Grid1D& narrower);

/// Smallest half-open index range [first, last) containing every sample with
/// |f_j| > 0; empty range if f == 0.
std::pair<std::size_t, std::size_t> support_indices(const WaveFunction& f);
/// max |x| over the support of f (0 for f == 0).
double support_edge(const WaveFunction& f);

/// exp(-1/(1-u^2)), u = (x - centre)/radius, zero for |u| >= 1.
double bump_profile(double x, double centre, double radius);

/// L2-normalized bump. Throws ConfigError if radius <= 0 or the support leaves [-L, L].
WaveFunction bump(double centre, double radius, const Grid1D& grid);
/// Same profile scaled so that sum_j f_j dx = 1.
WaveFunction bump_unit_integral(double centre, double radius, const Grid1D& grid);
/// f(x) - f(-x - shift) with f the unit-integral bump; integrates to zero.
WaveFunction bump_antisymmetrized(double centre, double radius, double shift,
                                  const Grid1D& grid);

/// Samples fhat(p_k), p_k = pi k / L, k = -n/2 .. n/2-1 (stored in that order).
class MomentumFunction {
 public:
  MomentumFunction(const Grid1D& grid, std::vector<cdouble> amplitudes);

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return amp_.size(); }
  double dp() const;
  double p(std::size_t i) const;
  cdouble operator[](std::size_t i) const { return amp_[i]; }
  const std::vector<cdouble>& amplitudes() const { return amp_; }
  std::vector<cdouble>& amplitudes() { return amp_; }

 private:
  Grid1D grid_;
  std::vector<cdouble> amp_;
};

/// fhat(p) = (2 pi)^{-1/2} sum_j f_j e^{-i p x_j} dx at the grid momenta.
MomentumFunction to_momentum(const WaveFunction& f);
MomentumFunction to_momentum_naive(const WaveFunction& f);  // O(n^2) reference
WaveFunction to_position(const MomentumFunction& fhat);
/// (sum_k |fhat_k|^2 dp)^{1/2}
double norm(const MomentumFunction& fhat);

/// Smallest P with sum_{|p_k| <= P} |fhat_k|^2 dp >= q ||f||^2.
double momentum_quantile(const WaveFunction& f, double q);

}  // namespace thermolim
