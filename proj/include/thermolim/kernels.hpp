#pragma once

// Data-parallel inner loops shared by the spectral propagator, the thermal
// density sums and the Duhamel integrand.
//
// Every kernel has a scalar reference implementation and an AVX2/FMA variant.
// The variant is chosen once at runtime from CPUID; THERMOLIM_KERNELS=scalar
// in the environment forces the reference path. The two paths agree to
// rounding (FMA contraction and lane-wise partial sums reorder additions) and
// each is deterministic on a fixed machine.

#include <complex>
#include <cstddef>
#include <span>

namespace thermolim::kernels {

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend backend);
bool backend_supported(Backend backend);

/// Backend used by the free functions below.
Backend active_backend();

/// Override the runtime choice (tests use this to compare paths).
/// Throws UsageError when the backend is not supported on this CPU/build.
void force_backend(Backend backend);

/// RAII override, restoring the previous backend on destruction.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend backend);
  ~ScopedBackend();
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

/// sum_j col[j] * (re[j] + i im[j])
std::complex<double> dot_split(std::span<const double> col, std::span<const double> re,
                               std::span<const double> im);

/// re += Re(a) * col, im += Im(a) * col
void axpy_split(std::complex<double> a, std::span<const double> col, std::span<double> re,
                std::span<double> im);

/// out[j] += w * col[j]^2
void accumulate_square(double w, std::span<const double> col, std::span<double> out);

/// sum_j weight[j] * (re[j]^2 + im[j]^2)
double weighted_norm2(std::span<const double> weight, std::span<const double> re,
                      std::span<const double> im);

/// sum_j (re_a - re_b)^2 + (im_a - im_b)^2
double distance2(std::span<const double> re_a, std::span<const double> im_a,
                 std::span<const double> re_b, std::span<const double> im_b);

namespace detail {

struct Table {
  std::complex<double> (*dot_split)(const double*, const double*, const double*, std::size_t);
  void (*axpy_split)(double, double, const double*, double*, double*, std::size_t);
  void (*accumulate_square)(double, const double*, double*, std::size_t);
  double (*weighted_norm2)(const double*, const double*, const double*, std::size_t);
  double (*distance2)(const double*, const double*, const double*, const double*, std::size_t);
};

const Table& scalar_table();
const Table* avx2_table();  // nullptr when not compiled in

}  // namespace detail
}  // namespace thermolim::kernels
