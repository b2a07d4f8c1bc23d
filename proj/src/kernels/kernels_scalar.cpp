#include "thermolim/kernels.hpp"

namespace thermolim::kernels::detail {
namespace {

std::complex<double> dot_split_scalar(const double* col, const double* re, const double* im,
                                      std::size_t n) {
  double sr = 0.0;
  double si = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sr += col[j] * re[j];
    si += col[j] * im[j];
  }
  return {sr, si};
}

void axpy_split_scalar(double ar, double ai, const double* col, double* re, double* im,
                       std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    re[j] += ar * col[j];
    im[j] += ai * col[j];
  }
}

void accumulate_square_scalar(double w, const double* col, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] += w * col[j] * col[j];
}

double weighted_norm2_scalar(const double* weight, const double* re, const double* im,
                             std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += weight[j] * (re[j] * re[j] + im[j] * im[j]);
  return s;
}

double distance2_scalar(const double* ra, const double* ia, const double* rb, const double* ib,
                        std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double dr = ra[j] - rb[j];
    const double di = ia[j] - ib[j];
    s += dr * dr + di * di;
  }
  return s;
}

}  // namespace

const Table& scalar_table() {
  static const Table table{dot_split_scalar, axpy_split_scalar, accumulate_square_scalar,
                           weighted_norm2_scalar, distance2_scalar};
  return table;
}

}  // namespace thermolim::kernels::detail
