// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.
#include <immintrin.h>

#include "thermolim/kernels.hpp"

namespace thermolim::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

std::complex<double> dot_split_avx2(const double* col, const double* re, const double* im,
                                    std::size_t n) {
  __m256d ar0 = _mm256_setzero_pd(), ar1 = _mm256_setzero_pd();
  __m256d ai0 = _mm256_setzero_pd(), ai1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256d c0 = _mm256_loadu_pd(col + j);
    const __m256d c1 = _mm256_loadu_pd(col + j + 4);
    ar0 = _mm256_fmadd_pd(c0, _mm256_loadu_pd(re + j), ar0);
    ar1 = _mm256_fmadd_pd(c1, _mm256_loadu_pd(re + j + 4), ar1);
    ai0 = _mm256_fmadd_pd(c0, _mm256_loadu_pd(im + j), ai0);
    ai1 = _mm256_fmadd_pd(c1, _mm256_loadu_pd(im + j + 4), ai1);
  }
  double sr = hsum(_mm256_add_pd(ar0, ar1));
  double si = hsum(_mm256_add_pd(ai0, ai1));
  for (; j < n; ++j) {
    sr += col[j] * re[j];
    si += col[j] * im[j];
  }
  return {sr, si};
}

void axpy_split_avx2(double ar, double ai, const double* col, double* re, double* im,
                     std::size_t n) {
  const __m256d vr = _mm256_set1_pd(ar);
  const __m256d vi = _mm256_set1_pd(ai);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d c = _mm256_loadu_pd(col + j);
    _mm256_storeu_pd(re + j, _mm256_fmadd_pd(vr, c, _mm256_loadu_pd(re + j)));
    _mm256_storeu_pd(im + j, _mm256_fmadd_pd(vi, c, _mm256_loadu_pd(im + j)));
  }
  for (; j < n; ++j) {
    re[j] += ar * col[j];
    im[j] += ai * col[j];
  }
}

void accumulate_square_avx2(double w, const double* col, double* out, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d c = _mm256_loadu_pd(col + j);
    _mm256_storeu_pd(out + j, _mm256_fmadd_pd(_mm256_mul_pd(vw, c), c, _mm256_loadu_pd(out + j)));
  }
  for (; j < n; ++j) out[j] += w * col[j] * col[j];
}

double weighted_norm2_avx2(const double* weight, const double* re, const double* im,
                           std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d r = _mm256_loadu_pd(re + j);
    const __m256d i = _mm256_loadu_pd(im + j);
    const __m256d m = _mm256_fmadd_pd(r, r, _mm256_mul_pd(i, i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(weight + j), m, acc);
  }
  double s = hsum(acc);
  for (; j < n; ++j) s += weight[j] * (re[j] * re[j] + im[j] * im[j]);
  return s;
}

double distance2_avx2(const double* ra, const double* ia, const double* rb, const double* ib,
                      std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dr = _mm256_sub_pd(_mm256_loadu_pd(ra + j), _mm256_loadu_pd(rb + j));
    const __m256d di = _mm256_sub_pd(_mm256_loadu_pd(ia + j), _mm256_loadu_pd(ib + j));
    acc = _mm256_fmadd_pd(dr, dr, acc);
    acc = _mm256_fmadd_pd(di, di, acc);
  }
  double s = hsum(acc);
  for (; j < n; ++j) {
    const double dr = ra[j] - rb[j];
    const double di = ia[j] - ib[j];
    s += dr * dr + di * di;
  }
  return s;
}

}  // namespace

const Table* avx2_table() {
  static const Table table{dot_split_avx2, axpy_split_avx2, accumulate_square_avx2,
                           weighted_norm2_avx2, distance2_avx2};
  return &table;
}

}  // namespace thermolim::kernels::detail
