#include "thermolim/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thermolim/errors.hpp"
#include "thermolim/kernels.hpp"
#include "thermolim/parallel.hpp"

namespace thermolim {

double dispersion(double p, double dx, Dispersion kind) {
  if (kind == Dispersion::Continuum) return p * p;
  const double s = std::sin(0.5 * p * dx);
  return 4.0 * s * s / (dx * dx);
}

WaveFunction evolve_spectral(const SpectralDecomposition& decomp, const WaveFunction& f, double t) {
  if (!decomp.grid || !(*decomp.grid == f.grid()))
    throw UsageError("function and decomposition live on different grids");
  WaveFunction out(f.grid());
  for (std::size_t k = 0; k < decomp.count(); ++k) {
    auto col = decomp.column(k);
    const cdouble a = kernels::dot_split(col, f.re(), f.im());
    kernels::axpy_split(std::polar(1.0, -t * decomp.eigenvalue(k)) * a, col, out.re(), out.im());
  }
  return out;
}

WaveFunction evolve_free(const WaveFunction& f, double t, Dispersion kind) {
  if (t == 0.0) return f;
  MomentumFunction fh = to_momentum(f);
  const double dx = f.grid().dx();
  for (std::size_t i = 0; i < fh.size(); ++i)
    fh.amplitudes()[i] *= std::polar(1.0, -t * dispersion(fh.p(i), dx, kind));
  return to_position(fh);
}

bool all_ok(const std::vector<GateResult>& gates) {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.ok; });
}

std::string describe_failures(const std::vector<GateResult>& gates) {
  std::ostringstream os;
  for (const auto& g : gates)
    if (!g.ok) os << "[" << g.name << "] " << g.detail << "; ";
  return os.str();
}

WaveFunction evolve_chebyshev(const TridiagonalOperator& h, const WaveFunction& f, double t) {
  if (!h.grid || !(*h.grid == f.grid())) throw UsageError("operator and function grids differ");
  if (t == 0.0) return f;
  if (t < 0.0) {
    // H is real: e^{+i|t|H} f = conj(e^{-i|t|H} conj f)
    WaveFunction fc = f;
    for (double& v : fc.im()) v = -v;
    WaveFunction out = evolve_chebyshev(h, fc, -t);
    for (double& v : out.im()) v = -v;
    return out;
  }
  const std::size_t n = h.size();
  const auto& d = h.diagonal();
  const auto& e = h.off_diagonal();
  double lo = h.gershgorin_lower();
  double hi = d[0];
  for (std::size_t j = 0; j < n; ++j) {
    double r = 0.0;
    if (j > 0) r += std::abs(e[j - 1]);
    if (j + 1 < n) r += std::abs(e[j]);
    hi = std::max(hi, d[j] + r);
  }
  const double pad = 1e-3 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double centre = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  const double x = half * t;

  // J_k(x), k = 0..K, by Miller's backward recurrence normalized with
  // J_0 + 2 sum J_{2k} = 1.
  const auto K = static_cast<std::size_t>(x + 20.0 * std::cbrt(x) + 60.0);
  std::vector<double> J(K + 2, 0.0);
  {
    const std::size_t start = K + 1 + static_cast<std::size_t>(std::sqrt(40.0 * static_cast<double>(K)));
    double jp1 = 0.0, jk = 1e-300;
    for (std::size_t k = start; k > 0; --k) {
      const double jm1 = 2.0 * static_cast<double>(k) / x * jk - jp1;
      jp1 = jk;
      jk = jm1;
      if (k - 1 <= K + 1) J[k - 1] = jk;
      if (std::abs(jk) > 1e250) {
        jk *= 1e-250;
        jp1 *= 1e-250;
        for (std::size_t i = k - 1; i < J.size(); ++i) J[i] *= 1e-250;
      }
    }
    double sum = J[0];
    for (std::size_t k = 2; k < J.size(); k += 2) sum += 2.0 * J[k];
    // The even-index sum must also include terms beyond K+1; they are negligible by construction.
    for (double& v : J) v /= sum;
  }

  // Scaled operator H' = (H - centre)/half applied to split vectors.
  auto apply_scaled = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = (d[j] - centre) * v[j];
      if (j > 0) s += e[j - 1] * v[j - 1];
      if (j + 1 < n) s += e[j] * v[j + 1];
      out[j] = s / half;
    }
  };
  std::vector<double> pr(f.re().begin(), f.re().end()), pi(f.im().begin(), f.im().end());
  std::vector<double> cr(n), ci(n), nr(n), ni(n);
  apply_scaled(pr, cr);
  apply_scaled(pi, ci);
  std::vector<double> out_r(n), out_i(n);
  auto accumulate = [&](cdouble a, const std::vector<double>& vr, const std::vector<double>& vi) {
    for (std::size_t j = 0; j < n; ++j) {
      out_r[j] += a.real() * vr[j] - a.imag() * vi[j];
      out_i[j] += a.real() * vi[j] + a.imag() * vr[j];
    }
  };
  static const cdouble minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  accumulate(J[0], pr, pi);
  accumulate(2.0 * minus_i_pow[1] * J[1], cr, ci);
  for (std::size_t k = 2; k <= K; ++k) {
    apply_scaled(cr, nr);
    apply_scaled(ci, ni);
    for (std::size_t j = 0; j < n; ++j) {
      nr[j] = 2.0 * nr[j] - pr[j];
      ni[j] = 2.0 * ni[j] - pi[j];
    }
    std::swap(pr, cr);
    std::swap(pi, ci);
    std::swap(cr, nr);
    std::swap(ci, ni);
    accumulate(2.0 * minus_i_pow[k % 4] * J[k], cr, ci);
  }
  const cdouble phase = std::polar(1.0, -t * centre);
  WaveFunction out(f.grid());
  for (std::size_t j = 0; j < n; ++j) out.set(j, phase * cdouble(out_r[j], out_i[j]));
  return out;
}

static double outer_amplitude(const WaveFunction& f, std::size_t width) {
  double edge = 0.0;
  const std::size_t n = f.size();
  width = std::min(width, n);
  for (std::size_t j = 0; j < width; ++j)
    edge = std::max({edge, std::abs(f[j]), std::abs(f[n - 1 - j])});
  return edge;
}

// ---------------------------------------------------------------- TrapComparison

static std::shared_ptr<const SpectralDecomposition> trapped_decomposition(const Grid1D& grid,
                                                                          double radius,
                                                                          double coupling) {
  return std::make_shared<const SpectralDecomposition>(
      diagonalize(assemble(grid, PotentialSpec::truncated_harmonic(radius, coupling))));
}

TrapComparison::TrapComparison(WaveFunction f, double radius, double coupling,
                               ComparisonOptions options)
    : TrapComparison(f, radius, coupling, trapped_decomposition(f.grid(), radius, coupling),
                     options) {}

TrapComparison::TrapComparison(WaveFunction f, double radius, double coupling,
                               std::shared_ptr<const SpectralDecomposition> decomp,
                               ComparisonOptions options)
    : f_(std::move(f)),
      radius_(radius),
      coupling_(coupling),
      options_(options),
      decomp_(std::move(decomp)),
      p_max_(momentum_quantile(f_, options.quantile)),
      support_edge_(support_edge(f_)) {
  if (!decomp_->grid || !(*decomp_->grid == f_.grid()))
    throw UsageError("decomposition does not belong to the function's grid");
}

Grid1D TrapComparison::free_grid(double t) const {
  const double need = support_edge_ + options_.margin + 4.0 * std::abs(t) * p_max_;
  unsigned k = 0;
  while (f_.grid().half_width() * std::ldexp(1.0, static_cast<int>(k)) < need) ++k;
  return f_.grid().widened(k);
}

WaveFunction TrapComparison::trapped(double t) const { return evolve_spectral(*decomp_, f_, t); }

WaveFunction TrapComparison::free(double t) const {
  return evolve_free(embed(f_, free_grid(t)), t, options_.dispersion);
}

std::vector<GateResult> TrapComparison::box_gates(double t, const WaveFunction* trapped_state) const {
  std::vector<GateResult> gates;
  const Grid1D& g = f_.grid();
  const double L = g.half_width();
  const double reach = support_edge_ + options_.margin + 4.0 * std::abs(t) * p_max_;

  {
    GateResult r{"resolution", true, ""};
    const double p_nyq = std::numbers::pi / g.dx();
    r.ok = p_max_ <= 0.5 * p_nyq;
    std::ostringstream os;
    os << "p_max=" << p_max_ << " vs pi/(2dx)=" << 0.5 * p_nyq;
    r.detail = os.str();
    gates.push_back(r);
  }
  {
    GateResult r{"spectrum-complete", decomp_->count() == g.size(), ""};
    r.detail = std::to_string(decomp_->count()) + " of " + std::to_string(g.size()) + " eigenpairs";
    gates.push_back(r);
  }
  {
    // Either the walls sit deep in the classically forbidden region of the
    // trap, or a free packet could not reach them within |t|.
    const double wall_potential = PotentialSpec::truncated_harmonic(radius_, coupling_)(L);
    const bool forbidden = wall_potential >= 4.0 * p_max_ * p_max_;
    const bool unreachable = L >= reach;
    GateResult r{"trap-margin", forbidden || unreachable, ""};
    std::ostringstream os;
    os << "L=" << L << ", V(L)=" << wall_potential << ", 4p_max^2=" << 4.0 * p_max_ * p_max_
       << ", free-flight reach=" << reach;
    r.detail = os.str();
    gates.push_back(r);
  }
  if (trapped_state != nullptr) {
    GateResult r{"trap-edge", true, ""};
    const double edge = outer_amplitude(*trapped_state, options_.edge_width);
    r.ok = edge <= options_.edge_tolerance;
    std::ostringstream os;
    os << "edge amplitude " << edge;
    r.detail = os.str();
    gates.push_back(r);
  }
  {
    const Grid1D fg = free_grid(t);
    GateResult r{"free-margin", fg.half_width() >= reach, ""};
    std::ostringstream os;
    os << "padded half-width " << fg.half_width() << " vs reach " << reach;
    r.detail = os.str();
    gates.push_back(r);
  }
  return gates;
}

namespace {

struct BoundResult {
  double value = 0.0;
  std::size_t intervals = 0;
  bool converged = true;
};

BoundResult simpson_bound(const WaveFunction& f0, double t, double radius, double coupling,
                          const ComparisonOptions& opt) {
  if (t == 0.0 || coupling == 0.0) return {0.0, 0, true};
  const Grid1D& g = f0.grid();
  std::vector<double> weight(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double excess = g.x(j) * g.x(j) - radius * radius;
    if (excess > 0.0) weight[j] = excess * excess;
  }
  const double c2 = coupling * coupling;
  const double sign = t < 0 ? -1.0 : 1.0;
  const double T = std::abs(t);
  auto integrand = [&](double u) {
    const WaveFunction fu = evolve_free(f0, sign * u, opt.dispersion);
    return c2 * std::sqrt(g.dx() * kernels::weighted_norm2(weight, fu.re(), fu.im()));
  };

  std::size_t n = opt.quadrature_min_intervals;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = integrand(T * static_cast<double>(i) / static_cast<double>(n));
  auto simpson = [&](const std::vector<double>& v) {
    const std::size_t m = v.size() - 1;
    double s = v.front() + v.back();
    for (std::size_t i = 1; i < m; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * v[i];
    return s * (T / static_cast<double>(m)) / 3.0;
  };
  double prev = simpson(vals);
  while (true) {
    const std::size_t n2 = 2 * n;
    std::vector<double> next(n2 + 1);
    for (std::size_t i = 0; i <= n2; ++i) {
      next[i] = (i % 2 == 0) ? vals[i / 2]
                             : integrand(T * static_cast<double>(i) / static_cast<double>(n2));
    }
    const double cur = simpson(next);
    vals = std::move(next);
    n = n2;
    if (cur == 0.0 || std::abs(cur - prev) <= opt.quadrature_rtol * std::abs(cur))
      return {cur, n, true};
    if (n >= opt.quadrature_max_intervals) return {cur, n, false};
    prev = cur;
  }
}

}  // namespace

// The trapped operator on a wider box equals the present one plus hopping
// across the two walls, so by Duhamel the two evolutions differ by at most
// |t| dx^{-3/2} sup_s (|psi_0(s)|^2 + |psi_{n-1}(s)|^2)^{1/2}, and
// |psi_j(s)| <= sum_k |<z_k, f> z_k(j)|. When that is not small enough the
// evolution is recomputed on a box of twice the width (Chebyshev route).
GateResult TrapComparison::box_sensitivity(double t, GapMeasurement& m, const Grid1D& fg,
                                           const WaveFunction& fr) const {
  const std::size_t n = f_.size();
  double a_first = 0.0, a_last = 0.0;
  for (std::size_t k = 0; k < decomp_->count(); ++k) {
    auto col = decomp_->column(k);
    const double a = std::abs(kernels::dot_split(col, f_.re(), f_.im()));
    a_first += a * std::abs(col[0]);
    a_last += a * std::abs(col[n - 1]);
  }
  const double dx = f_.grid().dx();
  m.wall_bound = std::abs(t) * std::pow(dx, -1.5) * std::hypot(a_first, a_last);
  const double allowed = options_.box_rtol * m.gap + 1e-12;  // spectral-sum roundoff
  GateResult r{"box-sensitivity", true, ""};
  std::ostringstream os;
  if (m.wall_bound <= allowed) {
    os << "wall leakage bound " << m.wall_bound << " <= " << allowed;
    r.detail = os.str();
    return r;
  }
  const Grid1D wide = f_.grid().widened(1);
  const TridiagonalOperator h2 = assemble(wide, PotentialSpec::truncated_harmonic(radius_, coupling_));
  const double width = h2.diagonal().empty() ? 0.0
                                             : (*std::max_element(h2.diagonal().begin(), h2.diagonal().end()) +
                                                4.0 / (dx * dx) - h2.gershgorin_lower());
  if (0.5 * width * std::abs(t) > options_.chebyshev_max_terms) {
    r.ok = false;
    os << "wall leakage bound " << m.wall_bound << " exceeds " << allowed
       << " and the doubled-box check would need too many Chebyshev terms";
    r.detail = os.str();
    return r;
  }
  const Grid1D fg2 = wide.half_width() > fg.half_width() ? wide : fg;
  const WaveFunction tr2 = embed(evolve_chebyshev(h2, embed(f_, wide), t), fg2);
  const WaveFunction fr2 = fg2 == fg ? fr : evolve_free(embed(f_, fg2), t, options_.dispersion);
  m.wide_box_gap = std::sqrt(fg2.dx() * kernels::distance2(tr2.re(), tr2.im(), fr2.re(), fr2.im()));
  r.ok = std::abs(m.wide_box_gap - m.gap) <= allowed;
  os << "gap " << m.gap << " vs doubled box " << m.wide_box_gap << " (leakage bound "
     << m.wall_bound << ")";
  r.detail = os.str();
  return r;
}

GapMeasurement TrapComparison::measure(double t, bool with_bound) const {
  GapMeasurement m;
  m.t = t;
  m.p_max = p_max_;
  const Grid1D fg = free_grid(t);
  m.free_half_width = fg.half_width();

  const WaveFunction tr = trapped(t);
  const WaveFunction fr = evolve_free(embed(f_, fg), t, options_.dispersion);
  const WaveFunction tr_wide = embed(tr, fg);
  m.gap = std::sqrt(fg.dx() * kernels::distance2(tr_wide.re(), tr_wide.im(), fr.re(), fr.im()));
  m.edge_amplitude = outer_amplitude(tr, options_.edge_width);
  m.gates = box_gates(t, options_.box_check ? nullptr : &tr);

  if (options_.box_check) m.gates.push_back(box_sensitivity(t, m, fg, fr));

  if (with_bound) {
    const BoundResult b = simpson_bound(embed(f_, fg), t, radius_, coupling_, options_);
    m.bound = b.value;
    m.bound_intervals = b.intervals;
    GateResult q{"quadrature", b.converged, ""};
    q.detail = std::to_string(b.intervals) + " Simpson intervals";
    m.gates.push_back(q);
  }
  return m;
}

double TrapComparison::gap(double t) const {
  const GapMeasurement m = measure(t, false);
  if (!m.valid()) throw GateError("propagator gap: " + describe_failures(m.gates));
  return m.gap;
}

double TrapComparison::duhamel_bound(double t) const {
  const GapMeasurement m = measure(t, true);
  if (!m.valid()) throw GateError("Duhamel bound: " + describe_failures(m.gates));
  return m.bound;
}

double propagator_gap(const WaveFunction& f, double t, double radius, double coupling,
                      const ComparisonOptions& options) {
  return TrapComparison(f, radius, coupling, options).gap(t);
}

double duhamel_bound(const WaveFunction& f, double t, double radius, double coupling,
                     const ComparisonOptions& options) {
  return TrapComparison(f, radius, coupling, options).duhamel_bound(t);
}

// ---------------------------------------------------------------- scans

CouplingRule CouplingRule::power(double q) {
  if (!(q <= 2.0)) throw ConfigError("coupling growth exponent must be at most 2");
  return {Kind::Power, q};
}

double CouplingRule::operator()(double radius) const {
  return kind == Kind::Constant ? value : std::pow(radius, value);
}

std::string CouplingRule::describe() const {
  std::ostringstream os;
  if (kind == Kind::Constant)
    os << "c=" << value;
  else
    os << "c=R^" << value;
  return os.str();
}

Grid1D BoxRule::grid_for(double radius) const {
  const double L = scale * radius + offset;
  if (spacing > 0.0) {
    const auto half = static_cast<std::size_t>(std::ceil(L / spacing - 1e-9));
    return Grid1D(static_cast<double>(half) * spacing, 2 * half);
  }
  return Grid1D(L, n_points);
}

void classify_decay(DecayReport& report) {
  report.slopes.clear();
  report.strictly_decreasing = report.slopes_negative = report.magnitudes_nondecreasing = false;
  auto& rows = report.rows;
  for (auto& r : rows) r.floor = r.m.gap <= kGapFloor;
  for (const auto& r : rows) {
    if (!r.m.valid()) {
      report.verdict = "invalid-gate";
      return;
    }
  }
  if (report.t == 0.0) {
    report.verdict = "trivial";
    return;
  }
  if (std::all_of(rows.begin(), rows.end(), [](const DecayRow& r) { return r.floor; })) {
    report.verdict = "inconclusive-floor";
    return;
  }
  // Rows up to the first floor entry carry the signal; after that only roundoff.
  std::size_t end = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].floor) {
      end = i;
      break;
    }
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < std::min(end + 1, rows.size()); ++i)
    if (!(rows[i].m.gap < rows[i - 1].m.gap)) decreasing = false;
  for (std::size_t i = end; i < rows.size(); ++i)
    if (!rows[i].floor) decreasing = false;
  for (std::size_t i = 1; i < end; ++i) {
    report.slopes.push_back((std::log(rows[i].m.gap) - std::log(rows[i - 1].m.gap)) /
                            (std::log(rows[i].radius) - std::log(rows[i - 1].radius)));
  }
  bool negative = true;
  bool growing = true;
  for (std::size_t i = 0; i < report.slopes.size(); ++i) {
    if (!(report.slopes[i] < 0.0)) negative = false;
    if (i > 0 && !(std::abs(report.slopes[i]) >= std::abs(report.slopes[i - 1]))) growing = false;
  }
  report.strictly_decreasing = decreasing;
  report.slopes_negative = negative;
  report.magnitudes_nondecreasing = growing;
  report.verdict = (decreasing && negative && growing) ? "pass" : "fail";
}

static void check_radii(const std::vector<double>& radii) {
  if (radii.size() < 4) throw ConfigError("decay scans need at least 4 trap radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw ConfigError("trap radii must be strictly ascending");
}

DecayReport gap_decay_scan(const BumpSpec& f, double t, const std::vector<double>& radii,
                           const CouplingRule& coupling, const DecayScanOptions& options) {
  return gap_decay_scans(f, {t}, radii, coupling, options).front();
}

std::vector<DecayReport> gap_decay_scans(const BumpSpec& f, const std::vector<double>& times,
                                         const std::vector<double>& radii,
                                         const CouplingRule& coupling,
                                         const DecayScanOptions& options) {
  check_radii(radii);
  if (times.empty()) throw ConfigError("decay scan needs at least one time");
  std::vector<std::vector<DecayRow>> per_radius(radii.size());
  parallel_for(radii.size(), options.threads, [&](std::size_t i) {
    const double R = radii[i];
    const double c = coupling(R);
    const Grid1D grid = options.box.grid_for(R);
    const TrapComparison cmp(f.on(grid), R, c, options.comparison);
    for (double t : times) {
      DecayRow row;
      row.radius = R;
      row.coupling = c;
      row.m = cmp.measure(t, options.with_bound);
      per_radius[i].push_back(std::move(row));
    }
  });
  std::vector<DecayReport> reports(times.size());
  for (std::size_t it = 0; it < times.size(); ++it) {
    reports[it].t = times[it];
    for (std::size_t i = 0; i < radii.size(); ++i) reports[it].rows.push_back(per_radius[i][it]);
    classify_decay(reports[it]);
  }
  return reports;
}

double observable_gap_bound(int n, double lambda, double f_norm, double gap) {
  if (n < 1) throw ConfigError("particle number must be at least 1");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  return 2.0 * n / (lambda * lambda) * f_norm * gap;
}

double observable_gap_bound(int n, double lambda, const WaveFunction& f, double t, double radius,
                            double coupling, const ComparisonOptions& options) {
  return observable_gap_bound(n, lambda, norm(f), propagator_gap(f, t, radius, coupling, options));
}

}  // namespace thermolim
