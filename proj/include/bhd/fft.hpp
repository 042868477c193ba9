// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bhd {

/// Real-input FFT of a fixed length, backed by FFTW.
///
/// forward: X[k] = sum_m x[m] e^{-2 pi i k m / n}, k = 0..n/2
/// inverse: x[m] = sum_k X[k] e^{+2 pi i k m / n} (Hermitian extension, unnormalized)
///
/// Plans are shared per length; instances are cheap to construct and may be
/// used concurrently from different threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  std::vector<std::complex<double>> forward(std::span<const double> x) const;
  std::vector<double> inverse(std::span<const std::complex<double>> spectrum) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace bhd
