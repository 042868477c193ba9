// SPDX-License-Identifier: Apache-2.0
#include "bhd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "bhd/error.hpp"

namespace bhd {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// The FFTW planner is not thread safe; executing a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  std::vector<double> real(n);
  std::vector<std::complex<double>> cplx(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int len = static_cast<int>(n);
  PlanPair pair{fftw_plan_dft_r2c_1d(len, real.data(), c, flags),
                fftw_plan_dft_c2r_1d(len, c, real.data(), flags | FFTW_DESTROY_INPUT)};
  if (!pair.forward || !pair.inverse) throw InvalidArgument("RealFft: planning failed");
  cache.emplace(n, pair);
  return pair;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("RealFft: length must be even and >= 2");
  const PlanPair p = plans_for(n);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> x) const {
  if (x.size() != n_) throw InvalidArgument("RealFft::forward: length mismatch");
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(bins());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> spectrum) const {
  if (spectrum.size() != bins()) throw InvalidArgument("RealFft::inverse: length mismatch");
  std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
  std::vector<double> out(n_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out;
}

}  // namespace bhd
