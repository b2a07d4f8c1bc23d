#include <atomic>
#include <cstdlib>
#include <string_view>

#include "thermolim/errors.hpp"
#include "thermolim/kernels.hpp"

namespace thermolim::kernels {
namespace detail {
#ifndef THERMOLIM_HAVE_AVX2
const Table* avx2_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("THERMOLIM_KERNELS")) {
    if (std::string_view(env) == "scalar") return Backend::Scalar;
  }
  return backend_supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

const detail::Table& table() {
  if (current().load(std::memory_order_relaxed) == Backend::Avx2) return *detail::avx2_table();
  return detail::scalar_table();
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw UsageError("kernel operands differ in length");
}

}  // namespace

const char* backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_supported(Backend backend) {
  if (backend == Backend::Scalar) return true;
  static const bool ok = detail::avx2_table() != nullptr && cpu_has_avx2();
  return ok;
}

Backend active_backend() { return current().load(); }

void force_backend(Backend backend) {
  if (!backend_supported(backend))
    throw UsageError(std::string("kernel backend not available: ") + backend_name(backend));
  current().store(backend);
}

ScopedBackend::ScopedBackend(Backend backend) : previous_(active_backend()) {
  force_backend(backend);
}

ScopedBackend::~ScopedBackend() { current().store(previous_); }

std::complex<double> dot_split(std::span<const double> col, std::span<const double> re,
                               std::span<const double> im) {
  check_sizes(col.size(), re.size());
  check_sizes(col.size(), im.size());
  return table().dot_split(col.data(), re.data(), im.data(), col.size());
}

void axpy_split(std::complex<double> a, std::span<const double> col, std::span<double> re,
                std::span<double> im) {
  check_sizes(col.size(), re.size());
  check_sizes(col.size(), im.size());
  table().axpy_split(a.real(), a.imag(), col.data(), re.data(), im.data(), col.size());
}

void accumulate_square(double w, std::span<const double> col, std::span<double> out) {
  check_sizes(col.size(), out.size());
  table().accumulate_square(w, col.data(), out.data(), col.size());
}

double weighted_norm2(std::span<const double> weight, std::span<const double> re,
                      std::span<const double> im) {
  check_sizes(weight.size(), re.size());
  check_sizes(weight.size(), im.size());
  return table().weighted_norm2(weight.data(), re.data(), im.data(), weight.size());
}

double distance2(std::span<const double> re_a, std::span<const double> im_a,
                 std::span<const double> re_b, std::span<const double> im_b) {
  check_sizes(re_a.size(), im_a.size());
  check_sizes(re_a.size(), re_b.size());
  check_sizes(re_a.size(), im_b.size());
  return table().distance2(re_a.data(), im_a.data(), re_b.data(), im_b.data(), re_a.size());
}

}  // namespace thermolim::kernels
