// Symmetric tridiagonal eigensolvers: LAPACK's MRRR driver (dstemr) for
// production runs and an implicit-shift QL iteration kept as an independent
// reference implementation.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "thermolim/errors.hpp"
#include "thermolim/hamiltonians.hpp"

namespace thermolim {
namespace {

void fix_signs(std::vector<double>& cols, std::size_t n, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    double* c = cols.data() + k * n;
    double big = 0.0;
    for (std::size_t j = 0; j < n; ++j) big = std::max(big, std::abs(c[j]));
    const double threshold = 1e-10 * big;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(c[j]) > threshold) {
        if (c[j] < 0.0)
          for (std::size_t i = 0; i < n; ++i) c[i] = -c[i];
        break;
      }
    }
  }
}

SpectralDecomposition finish(const TridiagonalOperator& h, std::vector<double> values,
                             std::vector<double> cols) {
  const std::size_t n = h.size();
  fix_signs(cols, n, values.size());
  SpectralDecomposition d(std::move(values), std::move(cols), n, h.spacing());
  d.grid = h.grid;
  d.radial_grid = h.radial_grid;
  return d;
}

// EISPACK tql2 as transcribed in JAMA, with an iteration cap. z is column-major.
void tql2(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, std::size_t n) {
  const double eps = std::numeric_limits<double>::epsilon();
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60)
          throw NumericalError("QL iteration did not converge for eigenvalue " + std::to_string(l));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double hshift = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= hshift;
        f += hshift;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          hshift = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = hshift + s * (c * g + s * d[ii]);
          double* zi = z.data() + ii * n;
          double* zi1 = z.data() + (ii + 1) * n;
          for (std::size_t k = 0; k < n; ++k) {
            const double t = zi1[k];
            zi1[k] = s * zi[k] + c * t;
            zi[k] = c * zi[k] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

SpectralDecomposition solve_ql(const TridiagonalOperator& h) {
  const std::size_t n = h.size();
  std::vector<double> d = h.diagonal();
  std::vector<double> e(n, 0.0);
  std::copy(h.off_diagonal().begin(), h.off_diagonal().end(), e.begin());
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  tql2(d, e, z, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> values(n);
  std::vector<double> cols(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = d[order[k]];
    std::copy_n(z.begin() + static_cast<std::ptrdiff_t>(order[k] * n), n,
                cols.begin() + static_cast<std::ptrdiff_t>(k * n));
  }
  return finish(h, std::move(values), std::move(cols));
}

// Eigenpairs il..iu (1-based, inclusive) via dstemr.
SpectralDecomposition solve_mrrr(const TridiagonalOperator& h, lapack_int il, lapack_int iu) {
  const lapack_int n = static_cast<lapack_int>(h.size());
  std::vector<double> d = h.diagonal();
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::copy(h.off_diagonal().begin(), h.off_diagonal().end(), e.begin());
  const lapack_int want = iu - il + 1;
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) * static_cast<std::size_t>(want));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max<lapack_int>(1, want)));
  lapack_int m = 0;
  lapack_logical tryrac = 1;
  const char range = (il == 1 && iu == n) ? 'A' : 'I';
  const lapack_int info =
      LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', range, n, d.data(), e.data(), 0.0, 0.0, il, iu, &m,
                     w.data(), z.data(), n, want, isuppz.data(), &tryrac);
  if (info != 0)
    throw NumericalError("dstemr failed with info = " + std::to_string(info) +
                         " (n = " + std::to_string(n) + ")");
  if (m != want) throw NumericalError("dstemr returned an unexpected number of eigenpairs");
  w.resize(static_cast<std::size_t>(m));
  return finish(h, std::move(w), std::move(z));
}

// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia).
std::size_t count_below(const TridiagonalOperator& h, double x) {
  const auto& d = h.diagonal();
  const auto& e = h.off_diagonal();
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = d[0] - x;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
    if (i + 1 == d.size()) break;
    q = d[i + 1] - x - e[i] * e[i] / q;
  }
  return count;
}

}  // namespace

SpectralDecomposition diagonalize(const TridiagonalOperator& h, EigenBackend backend) {
  if (backend == EigenBackend::QlImplicit) return solve_ql(h);
  const lapack_int n = static_cast<lapack_int>(h.size());
  return solve_mrrr(h, 1, n);
}

SpectralDecomposition diagonalize_lowest(const TridiagonalOperator& h, std::size_t count) {
  if (count == 0 || count > h.size()) throw UsageError("requested eigenpair count out of range");
  return solve_mrrr(h, 1, static_cast<lapack_int>(count));
}

SpectralDecomposition diagonalize_window(const TridiagonalOperator& h, double e_max) {
  const std::size_t count = count_below(h, e_max);
  if (count == 0) throw DomainError("no eigenvalues below the requested energy window");
  return solve_mrrr(h, 1, static_cast<lapack_int>(count));
}

}  // namespace thermolim
