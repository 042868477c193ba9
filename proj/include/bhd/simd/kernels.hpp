// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops shared by the noise, linearity and modem code.
//
// Every kernel has a scalar reference implementation; SIMD variants (AVX2+FMA
// on x86-64, NEON on aarch64) are chosen once at startup from the CPU's
// feature flags. Variants differ from the scalar reference only by summation
// order and fused multiply-add rounding.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bhd::simd {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  Backend backend;
  double (*sum)(const double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = a * x[i] + b * y[i]
  void (*scale_add)(double a, const double* x, double b, const double* y, double* out, std::size_t n);
  // out_i[k] = x[k] * c[k], out_q[k] = x[k] * s[k]
  void (*mix)(const double* x, const double* c, const double* s, double* out_i, double* out_q,
              std::size_t n);
  // sum of (x[k+1]-x[k]) * (y[k]+y[k+1]) / 2
  double (*trapezoid)(const double* x, const double* y, std::size_t n);
  // a[k] *= b[k] on interleaved complex data
  void (*complex_multiply)(std::complex<double>* a, const std::complex<double>* b, std::size_t n);
};

const KernelTable& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif
#if defined(__aarch64__)
const KernelTable& neon_kernels();
#endif

/// Backends the running CPU can execute, scalar first.
std::vector<Backend> available_backends();
const KernelTable& kernels_for(Backend backend);

/// Active table. Picked on first use: the widest supported backend, unless
/// BHDTWIN_SIMD=scalar is set in the environment.
const KernelTable& active();
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double sum_squares(std::span<const double> x) {
  return active().sum_squares(x.data(), x.size());
}
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale_add(double a, std::span<const double> x, double b, std::span<const double> y,
               std::span<double> out);
void mix(std::span<const double> x, std::span<const double> c, std::span<const double> s,
         std::span<double> out_i, std::span<double> out_q);
double trapezoid(std::span<const double> x, std::span<const double> y);
void complex_multiply(std::span<std::complex<double>> a, std::span<const std::complex<double>> b);

}  // namespace bhd::simd
