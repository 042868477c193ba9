// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string>

#include "bhd/error.hpp"
#include "bhd/simd/kernels.hpp"

namespace bhd::simd {

namespace {

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(BHD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(BHD_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("BHDTWIN_SIMD"); env && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
  const auto backends = available_backends();
  return &kernels_for(backends.back());
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidArgument(std::string("simd::") + what + ": length mismatch");
}

}  // namespace

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& kernels_for(Backend backend) {
  if (!cpu_supports(backend)) {
    throw InvalidArgument(std::string("simd backend not supported: ") +
                          std::string(backend_name(backend)));
  }
  switch (backend) {
#if defined(BHD_HAVE_AVX2)
    case Backend::Avx2:
      return avx2_kernels();
#endif
#if defined(BHD_HAVE_NEON)
    case Backend::Neon:
      return neon_kernels();
#endif
    default:
      return scalar_kernels();
  }
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_backend(Backend backend) { slot().store(&kernels_for(backend), std::memory_order_release); }

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size(), "dot");
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size(), "axpy");
  active().axpy(a, x.data(), y.data(), x.size());
}

void scale_add(double a, std::span<const double> x, double b, std::span<const double> y,
               std::span<double> out) {
  check_sizes(x.size(), y.size(), "scale_add");
  check_sizes(x.size(), out.size(), "scale_add");
  active().scale_add(a, x.data(), b, y.data(), out.data(), x.size());
}

void mix(std::span<const double> x, std::span<const double> c, std::span<const double> s,
         std::span<double> out_i, std::span<double> out_q) {
  check_sizes(x.size(), c.size(), "mix");
  check_sizes(x.size(), s.size(), "mix");
  check_sizes(x.size(), out_i.size(), "mix");
  check_sizes(x.size(), out_q.size(), "mix");
  active().mix(x.data(), c.data(), s.data(), out_i.data(), out_q.data(), x.size());
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size(), "trapezoid");
  return active().trapezoid(x.data(), y.data(), x.size());
}

void complex_multiply(std::span<std::complex<double>> a, std::span<const std::complex<double>> b) {
  check_sizes(a.size(), b.size(), "complex_multiply");
  active().complex_multiply(a.data(), b.data(), a.size());
}

}  // namespace bhd::simd
