// SPDX-License-Identifier: Apache-2.0
#include "bhd/simd/kernels.hpp"

namespace bhd::simd {

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_add_scalar(double a, const double* x, double b, const double* y, double* out,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void mix_scalar(const double* x, const double* c, const double* s, double* out_i, double* out_q,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out_i[i] = x[i] * c[i];
    out_q[i] = x[i] * s[i];
  }
}

double trapezoid_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) acc += (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return 0.5 * acc;
}

void complex_multiply_scalar(std::complex<double>* a, const std::complex<double>* b,
                             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    const double im = a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    a[i] = {re, im};
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::Scalar, sum_scalar,       sum_squares_scalar,
                                 dot_scalar,      axpy_scalar,      scale_add_scalar,
                                 mix_scalar,      trapezoid_scalar, complex_multiply_scalar};
  return table;
}

}  // namespace bhd::simd
