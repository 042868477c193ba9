// SPDX-License-Identifier: Apache-2.0
// aarch64 only. NEON is part of the base ISA there, so no runtime check.
#include <arm_neon.h>

#include "bhd/simd/kernels.hpp"

namespace bhd::simd {

namespace {

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sum_squares_neon(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t a = vld1q_f64(x + i);
    const float64x2_t b = vld1q_f64(x + i + 2);
    acc0 = vfmaq_f64(acc0, a, a);
    acc1 = vfmaq_f64(acc1, b, b);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_add_neon(double a, const double* x, double b, const double* y, double* out,
                    std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t = vmulq_f64(vb, vld1q_f64(y + i));
    vst1q_f64(out + i, vfmaq_f64(t, va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void mix_neon(const double* x, const double* c, const double* s, double* out_i, double* out_q,
              std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    vst1q_f64(out_i + i, vmulq_f64(v, vld1q_f64(c + i)));
    vst1q_f64(out_q + i, vmulq_f64(v, vld1q_f64(s + i)));
  }
  for (; i < n; ++i) {
    out_i[i] = x[i] * c[i];
    out_q[i] = x[i] * s[i];
  }
}

double trapezoid_neon(const double* x, const double* y, std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t m = n - 1;
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(x + i + 1), vld1q_f64(x + i));
    const float64x2_t sy = vaddq_f64(vld1q_f64(y + i), vld1q_f64(y + i + 1));
    acc = vfmaq_f64(acc, dx, sy);
  }
  double total = vaddvq_f64(acc);
  for (; i < m; ++i) total += (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return 0.5 * total;
}

void complex_multiply_neon(std::complex<double>* a, const std::complex<double>* b,
                           std::size_t n) {
  auto* pa = reinterpret_cast<double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t va = vld1q_f64(pa + 2 * i);                 // ar ai
    const float64x2_t vb = vld1q_f64(pb + 2 * i);                 // br bi
    const float64x2_t b_re = vdupq_laneq_f64(vb, 0);
    const float64x2_t b_im = vdupq_laneq_f64(vb, 1);
    const float64x2_t a_sw = vextq_f64(va, va, 1);                // ai ar
    const float64x2_t sign = {-1.0, 1.0};
    vst1q_f64(pa + 2 * i, vfmaq_f64(vmulq_f64(va, b_re), vmulq_f64(a_sw, sign), b_im));
  }
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Backend::Neon, sum_neon,       sum_squares_neon,
                                 dot_neon,      axpy_neon,      scale_add_neon,
                                 mix_neon,      trapezoid_neon, complex_multiply_neon};
  return table;
}

}  // namespace bhd::simd
