#pragma once

// Low-lying trap modes as R grows: the even and odd 1D ground modes flatten
// into cos(sqrt(eps) x) and sin(sqrt(eps) x)/sqrt(eps) over the trap interior,
// the 3D l = 1 mode into z s(k|x|). Pairings with fixed test functions
// converge to the zero-energy limits int f, int x f and int z f.

#include <functional>
#include <string>
#include <vector>

#include "thermolim/functions3d.hpp"
#include "thermolim/grid.hpp"
#include "thermolim/hamiltonians.hpp"
#include "thermolim/propagators.hpp"

namespace thermolim {

/// Least-squares slope of log y against log x. ConfigError for fewer than two
/// points or non-positive data.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Even: h(0) = 1. Odd: centred-difference slope at 0 equal to 1.
/// UsageError if psi does not have the requested parity; Parity::None is rejected.
WaveFunction mode_renormalize(const WaveFunction& psi, Parity parity);

struct TrapMode {
  double radius = 0.0;
  double energy = 0.0;
  Parity parity = Parity::Even;
  WaveFunction h;  // renormalized
};

/// Lowest even (index 0) or odd (index 1) eigenmode of the truncated harmonic
/// trap with coupling c on box.grid_for(R).
TrapMode trap_mode(double radius, Parity parity, const BoxRule& box = {}, double coupling = 1.0);

/// cos(sqrt(eps) x) for even modes, sin(sqrt(eps) x)/sqrt(eps) for odd ones.
double interior_mode_shape(Parity parity, double energy, double x);
/// sup over |x_j| <= window of |h(x_j) - interior_mode_shape(x_j)|.
double interior_mode_defect(const TrapMode& mode, double window);

using GridFunction = std::function<WaveFunction(const Grid1D&)>;

struct ModeRow {
  double radius = 0.0;
  double energy = 0.0;
  double pairing = 0.0;    // <h_R, f>
  double limit = 0.0;      // int f or int x f
  double deviation = 0.0;  // |pairing - limit|
};

struct ModeAsymptotics {
  Parity parity = Parity::Even;
  std::vector<ModeRow> rows;
  double slope = 0.0;  // log-log slope of deviation against R (NaN if any deviation is 0)
};

/// Throws ConfigError if f's support reaches beyond half of the smallest R.
ModeAsymptotics smeared_mode_limit(Parity parity, const GridFunction& f,
                                   const std::vector<double>& radii, const BoxRule& box = {},
                                   double coupling = 1.0);

struct CountRow {
  double radius = 0.0;
  double energy = 0.0;
  double formula = 0.0;  // kappa^2 int_{-R}^{R} of cos^2 or sin^2/eps with the measured eps
  double measured = 0.0; // kappa^2 sum_{|x_j| < R} |h_R(x_j)|^2 dx
};

struct CountScaling {
  Parity parity = Parity::Even;
  double kappa = 0.0;
  std::vector<CountRow> rows;
  double formula_exponent = 0.0;
  double measured_exponent = 0.0;
};

CountScaling condensate_count_scaling(Parity parity, double kappa, const std::vector<double>& radii,
                                      const BoxRule& box = {}, double coupling = 1.0);

/// 3 (sin u - u cos u) / u^3 = 3 j_1(u) / u, with its Taylor series near 0.
double l1_shape(double u);
/// (u cos u - sin u) / u^3 without normalization; tends to -1/3.
double l1_raw_shape(double u);

struct RadialRule {
  double scale = 2.0;
  double offset = 16.0;
  std::size_t n_points = 4096;
  RadialGrid grid_for(double radius) const;
};

struct L1Row {
  double radius = 0.0;
  double k = 0.0;
  double bound_constant = 0.0;  // sup |h - z| R^2 / (|z| |x|^2)
  double pairing = 0.0;         // integral f z s(k |x|)
  double limit = 0.0;           // integral f z
  double deviation = 0.0;
  double shape_defect = 0.0;    // sup |u(r)/(c r^2) - s(k r)| over r <= R/2
};

struct L1Report {
  std::vector<L1Row> rows;
  double constant_spread = 0.0;  // max / min bound constant
  double pairing_slope = 0.0;
  double k_bound_ratio = 0.0;    // max_R k_R / (3 pi / (2 R))
};

/// Lowest l = 1 radial level of the truncated harmonic trap on rule.grid_for(R).
SpectralDecomposition l1_radial_decomposition(double radius, const RadialRule& rule = {},
                                              double coupling = 1.0);

/// Evaluation set: 16 log-spaced radii in (0, R] on the z-axis and along the
/// direction at 45 degrees. UsageError if f reaches beyond R/2 of the smallest R.
L1Report l1_profile_check(const std::vector<double>& radii, const TestFunction3D& f,
                          const RadialRule& rule = {}, double coupling = 1.0);

}  // namespace thermolim
