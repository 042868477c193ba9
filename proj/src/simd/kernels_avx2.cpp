// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "bhd/simd/kernels.hpp"

namespace bhd::simd {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sum_squares_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d a = _mm256_loadu_pd(x + i);
    const __m256d b = _mm256_loadu_pd(x + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_add_avx2(double a, const double* x, double b, const double* y, double* out,
                    std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void mix_avx2(const double* x, const double* c, const double* s, double* out_i, double* out_q,
              std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out_i + i, _mm256_mul_pd(v, _mm256_loadu_pd(c + i)));
    _mm256_storeu_pd(out_q + i, _mm256_mul_pd(v, _mm256_loadu_pd(s + i)));
  }
  for (; i < n; ++i) {
    out_i[i] = x[i] * c[i];
    out_q[i] = x[i] * s[i];
  }
}

double trapezoid_avx2(const double* x, const double* y, std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t m = n - 1;  // number of intervals
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
    const __m256d sy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(y + i + 1));
    acc = _mm256_fmadd_pd(dx, sy, acc);
  }
  double total = hsum(acc);
  for (; i < m; ++i) total += (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return 0.5 * total;
}

void complex_multiply_avx2(std::complex<double>* a, const std::complex<double>* b,
                           std::size_t n) {
  auto* pa = reinterpret_cast<double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  // two complex values per register: [re0 im0 re1 im1]
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d b_re = _mm256_movedup_pd(vb);        // re re
    const __m256d b_im = _mm256_permute_pd(vb, 0xF);   // im im
    const __m256d a_sw = _mm256_permute_pd(va, 0x5);   // im re
    // (ar*br - ai*bi, ai*br + ar*bi)
    const __m256d r = _mm256_fmaddsub_pd(va, b_re, _mm256_mul_pd(a_sw, b_im));
    _mm256_storeu_pd(pa + 2 * i, r);
  }
  for (; i < n; ++i) {
    const double re = a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    const double im = a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    a[i] = {re, im};
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Backend::Avx2, sum_avx2,       sum_squares_avx2,
                                 dot_avx2,      axpy_avx2,      scale_add_avx2,
                                 mix_avx2,      trapezoid_avx2, complex_multiply_avx2};
  return table;
}

}  // namespace bhd::simd
