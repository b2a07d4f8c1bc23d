#pragma once

// Time evolution under the trapped Hamiltonian (spectral sum) and the free
// Hamiltonian (Fourier multiplier), and the trapped-vs-free comparisons built
// on top of them.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "thermolim/grid.hpp"
#include "thermolim/hamiltonians.hpp"

namespace thermolim {

/// Symbol of the free Hamiltonian. Lattice is 4 sin^2(p dx/2)/dx^2, the exact
/// symbol of the three-point Laplacian on a periodic grid; Continuum is p^2.
enum class Dispersion { Lattice, Continuum };

double dispersion(double p, double dx, Dispersion kind);

/// sum_k e^{-i t eps_k} <psi_k, f> psi_k. Throws UsageError on grid mismatch.
WaveFunction evolve_spectral(const SpectralDecomposition& decomp, const WaveFunction& f, double t);

/// e^{-i t omega(p)} applied in momentum space on f's (periodic) grid.
WaveFunction evolve_free(const WaveFunction& f, double t, Dispersion kind = Dispersion::Lattice);

/// e^{-itH} f by Chebyshev expansion of the tridiagonal operator; independent
/// of any eigendecomposition. Cost grows like t times the spectral width.
WaveFunction evolve_chebyshev(const TridiagonalOperator& h, const WaveFunction& f, double t);

struct GateResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

bool all_ok(const std::vector<GateResult>& gates);
std::string describe_failures(const std::vector<GateResult>& gates);

struct ComparisonOptions {
  Dispersion dispersion = Dispersion::Lattice;
  double margin = 16.0;           // length units kept clear of any box edge
  double quantile = 0.99999;      // momentum-mass quantile defining p_max
  double edge_tolerance = 1e-8;   // max |trapped| allowed on the outer samples
  std::size_t edge_width = 8;
  // Recompute the trapped evolution on a box twice as wide and require the
  // gap to move by at most box_rtol relative.
  bool box_check = true;
  double box_rtol = 1e-6;
  double chebyshev_max_terms = 2e5;
  double quadrature_rtol = 1e-6;  // Duhamel integral node doubling
  std::size_t quadrature_min_intervals = 32;
  std::size_t quadrature_max_intervals = 8192;
};

struct GapMeasurement {
  double t = 0.0;
  double gap = 0.0;
  double bound = -1.0;  // negative when not requested
  std::size_t bound_intervals = 0;
  double p_max = 0.0;
  double free_half_width = 0.0;
  double edge_amplitude = 0.0;
  double wall_bound = -1.0;    // rigorous bound on hard-wall effects; negative if not computed
  double wide_box_gap = -1.0;  // doubled-box gap, negative unless that check ran
  std::vector<GateResult> gates;
  bool valid() const { return all_ok(gates); }
};

/// Trapped H_R = -Laplacian + c^2 max(x^2 - R^2, 0) on the box of f's grid,
/// compared with free evolution on a zero-padded copy of the same lattice
/// that is wide enough for the packet never to wrap around.
///
/// gap(t) = || e^{-itH_R} f - e^{-itH_free} f ||, with the trapped state
/// extended by zero outside the box.
class TrapComparison {
 public:
  TrapComparison(WaveFunction f, double radius, double coupling, ComparisonOptions options = {});
  /// Reuses an existing decomposition of the trapped operator on f's grid.
  TrapComparison(WaveFunction f, double radius, double coupling,
                 std::shared_ptr<const SpectralDecomposition> decomp,
                 ComparisonOptions options = {});

  const WaveFunction& initial() const { return f_; }
  double radius() const { return radius_; }
  double coupling() const { return coupling_; }
  double p_max() const { return p_max_; }
  const SpectralDecomposition& decomposition() const { return *decomp_; }
  std::shared_ptr<const SpectralDecomposition> shared_decomposition() const { return decomp_; }

  Grid1D free_grid(double t) const;
  WaveFunction trapped(double t) const;
  WaveFunction free(double t) const;  // on free_grid(t)

  /// Gap plus validity gates; never throws on gate failure.
  GapMeasurement measure(double t, bool with_bound = false) const;
  /// Throws GateError when any gate fails.
  double gap(double t) const;
  double duhamel_bound(double t) const;

 private:
  std::vector<GateResult> box_gates(double t, const WaveFunction* trapped_state) const;
  GateResult box_sensitivity(double t, GapMeasurement& m, const Grid1D& fg,
                             const WaveFunction& fr) const;

  WaveFunction f_;
  double radius_;
  double coupling_;
  ComparisonOptions options_;
  std::shared_ptr<const SpectralDecomposition> decomp_;
  double p_max_;
  double support_edge_;
};

/// ||(e^{-itH_R} - e^{-itH_free}) f||, throwing GateError on gate failure.
double propagator_gap(const WaveFunction& f, double t, double radius, double coupling,
                      const ComparisonOptions& options = {});
/// Integral over [0, t] of ||(H_R - H_free) e^{-iuH_free} f||.
double duhamel_bound(const WaveFunction& f, double t, double radius, double coupling,
                     const ComparisonOptions& options = {});

/// c(R) used by decay scans: constant or R^q with q <= 2.
struct CouplingRule {
  enum class Kind { Constant, Power };
  Kind kind = Kind::Constant;
  double value = 1.0;  // constant value, or exponent q
  static CouplingRule constant(double c) { return {Kind::Constant, c}; }
  static CouplingRule power(double q);
  double operator()(double radius) const;
  std::string describe() const;
};

/// Box for a given trap radius: L = scale R + offset, with either a fixed
/// point count or (if spacing > 0) a fixed spacing.
struct BoxRule {
  double scale = 2.0;
  double offset = 16.0;
  std::size_t n_points = 4096;
  double spacing = 0.0;
  Grid1D grid_for(double radius) const;
};

struct BumpSpec {
  double centre = 0.0;
  double radius = 2.0;
  WaveFunction on(const Grid1D& grid) const { return bump(centre, radius, grid); }
};

struct DecayRow {
  double radius = 0.0;
  double coupling = 0.0;
  GapMeasurement m;
  bool floor = false;
};

struct DecayReport {
  double t = 0.0;
  std::vector<DecayRow> rows;
  std::vector<double> slopes;  // between consecutive non-floor rows
  bool strictly_decreasing = false;
  bool slopes_negative = false;
  bool magnitudes_nondecreasing = false;
  std::string verdict;  // pass, fail, trivial, inconclusive-floor, invalid-gate
};

inline constexpr double kGapFloor = 1e-14;

struct DecayScanOptions {
  ComparisonOptions comparison;
  BoxRule box;
  bool with_bound = true;
  std::size_t threads = 1;
};

/// Throws ConfigError unless R_list is ascending with at least 4 entries.
DecayReport gap_decay_scan(const BumpSpec& f, double t, const std::vector<double>& radii,
                           const CouplingRule& coupling, const DecayScanOptions& options = {});

/// Several times sharing one decomposition per radius; one report per time.
std::vector<DecayReport> gap_decay_scans(const BumpSpec& f, const std::vector<double>& times,
                                         const std::vector<double>& radii,
                                         const CouplingRule& coupling,
                                         const DecayScanOptions& options = {});

/// Verdict logic on already measured rows (exposed for tests).
void classify_decay(DecayReport& report);

/// 2 n lambda^{-2} ||f|| gap.
double observable_gap_bound(int n, double lambda, double f_norm, double gap);
double observable_gap_bound(int n, double lambda, const WaveFunction& f, double t, double radius,
                            double coupling, const ComparisonOptions& options = {});

}  // namespace thermolim
