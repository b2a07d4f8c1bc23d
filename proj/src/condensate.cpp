#include "thermolim/condensate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "thermolim/errors.hpp"

namespace thermolim {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

WaveFunction mode_renormalize(const WaveFunction& psi, Parity parity) {
  if (parity == Parity::None) throw UsageError("renormalization needs an even or odd mode");
  if (classify_parity(psi) != parity) throw UsageError("mode does not have the requested parity");
  const Grid1D& g = psi.grid();
  const std::size_t j0 = g.index_of(0.0);
  cdouble scale;
  if (parity == Parity::Even)
    scale = psi[j0];
  else
    scale = (psi[j0 + 1] - psi[j0 - 1]) / (2.0 * g.dx());
  if (std::abs(scale) == 0.0) throw NumericalError("mode vanishes at the origin");
  return (1.0 / scale) * psi;
}

TrapMode trap_mode(double radius, Parity parity, const BoxRule& box, double coupling) {
  const Grid1D grid = box.grid_for(radius);
  const SpectralDecomposition d =
      diagonalize_lowest(assemble(grid, PotentialSpec::truncated_harmonic(radius, coupling)), 2);
  const std::size_t k = parity == Parity::Even ? 0 : 1;
  return TrapMode{radius, d.eigenvalue(k), parity, mode_renormalize(d.mode(k), parity)};
}

double interior_mode_shape(Parity parity, double energy, double x) {
  const double k = std::sqrt(energy);
  return parity == Parity::Even ? std::cos(k * x) : std::sin(k * x) / k;
}

double interior_mode_defect(const TrapMode& mode, double window) {
  const Grid1D& g = mode.h.grid();
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    if (std::abs(x) > window) continue;
    worst = std::max(worst, std::abs(mode.h[j] - interior_mode_shape(mode.parity, mode.energy, x)));
  }
  return worst;
}

ModeAsymptotics smeared_mode_limit(Parity parity, const GridFunction& f,
                                   const std::vector<double>& radii, const BoxRule& box,
                                   double coupling) {
  if (radii.empty()) throw ConfigError("radius list is empty");
  ModeAsymptotics out;
  out.parity = parity;
  std::vector<double> rs, devs;
  bool any_zero = false;
  for (double R : radii) {
    const TrapMode m = trap_mode(R, parity, box, coupling);
    const WaveFunction fn = f(m.h.grid());
    if (support_edge(fn) > 0.5 * R) throw ConfigError("test function support reaches beyond R/2");
    ModeRow row;
    row.radius = R;
    row.energy = m.energy;
    row.pairing = inner(m.h, fn).real();
    row.limit = (parity == Parity::Even ? integral(fn) : first_moment(fn)).real();
    row.deviation = std::abs(row.pairing - row.limit);
    any_zero = any_zero || row.deviation == 0.0;
    rs.push_back(R);
    devs.push_back(row.deviation);
    out.rows.push_back(row);
  }
  out.slope = (any_zero || rs.size() < 2) ? std::numeric_limits<double>::quiet_NaN() : loglog_slope(rs, devs);
  return out;
}

CountScaling condensate_count_scaling(Parity parity, double kappa, const std::vector<double>& radii,
                                      const BoxRule& box, double coupling) {
  if (radii.empty()) throw ConfigError("radius list is empty");
  CountScaling out;
  out.parity = parity;
  out.kappa = kappa;
  const double k2 = kappa * kappa;
  std::vector<double> rs, fs, ms;
  for (double R : radii) {
    const TrapMode m = trap_mode(R, parity, box, coupling);
    CountRow row;
    row.radius = R;
    row.energy = m.energy;
    const double k = std::sqrt(m.energy);
    const double osc = std::sin(2.0 * k * R) / (2.0 * k);
    row.formula = k2 * (parity == Parity::Even ? R + osc : (R - osc) / m.energy);
    const Grid1D& g = m.h.grid();
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      if (std::abs(g.x(j)) < R) s += std::norm(m.h[j]);
    row.measured = k2 * s * g.dx();
    out.rows.push_back(row);
    rs.push_back(R);
    fs.push_back(row.formula);
    ms.push_back(row.measured);
  }
  if (kappa != 0.0 && rs.size() >= 2) {
    out.formula_exponent = loglog_slope(rs, fs);
    out.measured_exponent = loglog_slope(rs, ms);
  }
  return out;
}

double l1_shape(double u) {
  u = std::abs(u);
  if (u < 0.1) {
    const double u2 = u * u;
    return 1.0 - u2 / 10.0 * (1.0 - u2 / 28.0 * (1.0 - u2 / 54.0 * (1.0 - u2 / 88.0)));
  }
  return 3.0 * (std::sin(u) - u * std::cos(u)) / (u * u * u);
}

double l1_raw_shape(double u) {
  if (std::abs(u) < 0.1) return -l1_shape(u) / 3.0;
  return (u * std::cos(u) - std::sin(u)) / (u * u * u);
}

RadialGrid RadialRule::grid_for(double radius) const {
  return RadialGrid(scale * radius + offset, n_points);
}

SpectralDecomposition l1_radial_decomposition(double radius, const RadialRule& rule, double coupling) {
  const RadialGrid g = rule.grid_for(radius);
  return diagonalize_lowest(radial_assemble(g, 1, PotentialSpec::truncated_harmonic(radius, coupling)), 1);
}

L1Report l1_profile_check(const std::vector<double>& radii, const TestFunction3D& f,
                          const RadialRule& rule, double coupling) {
  if (radii.empty()) throw ConfigError("radius list is empty");
  const double r_min = *std::min_element(radii.begin(), radii.end());
  if (f.support_radius() > 0.5 * r_min) throw UsageError("test function reaches beyond R/2");
  L1Report rep;
  const double limit = f.pair_z_weighted([](double) { return 1.0; });
  std::vector<double> rs, devs;
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (double R : radii) {
    const SpectralDecomposition d = l1_radial_decomposition(R, rule, coupling);
    const double k = std::sqrt(d.eigenvalue(0));
    L1Row row;
    row.radius = R;
    row.k = k;

    // h(x) = z s(k|x|); along direction theta from the z-axis z = |x| cos theta.
    double sup = 0.0;
    for (double theta : {0.0, std::numbers::pi / 4.0}) {
      const double cz = std::cos(theta);
      for (int i = 0; i < 16; ++i) {
        const double r = R * std::pow(10.0, -3.0 * (15 - i) / 15.0);  // 1e-3 R .. R
        const double z = r * cz;
        const double h = z * l1_shape(k * r);
        sup = std::max(sup, std::abs(h - z) * R * R / (std::abs(z) * r * r));
      }
    }
    row.bound_constant = sup;
    cmin = std::min(cmin, sup);
    cmax = std::max(cmax, sup);

    row.pairing = f.pair_z_weighted([k](double r) { return l1_shape(k * r); });
    row.limit = limit;
    row.deviation = std::abs(row.pairing - limit);

    // u(r) = r R(r) with R(r) proportional to r s(k r); normalize at r = R/4.
    const std::vector<double> u = d.radial_mode(0);
    const RadialGrid& g = *d.radial_grid;
    const std::size_t jref = static_cast<std::size_t>(0.25 * R / g.dr());
    const double rref = g.r(jref);
    const double scale = u[jref] / (rref * rref * l1_shape(k * rref));
    double defect = 0.0;
    for (std::size_t j = 0; j < g.size() && g.r(j) <= 0.5 * R; ++j) {
      const double r = g.r(j);
      defect = std::max(defect, std::abs(u[j] / (scale * r * r) - l1_shape(k * r)));
    }
    row.shape_defect = defect;

    rep.k_bound_ratio = std::max(rep.k_bound_ratio, k / (3.0 * std::numbers::pi / (2.0 * R)));
    rs.push_back(R);
    devs.push_back(row.deviation);
    rep.rows.push_back(row);
  }
  rep.constant_spread = cmax / cmin;
  bool positive = true;
  for (double v : devs) positive = positive && v > 0.0;
  rep.pairing_slope = (positive && rs.size() >= 2) ? loglog_slope(rs, devs) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace thermolim
