// SPDX-License-Identifier: Apache-2.0
#include "bhd/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bhd/error.hpp"
#include "bhd/fft.hpp"
#include "bhd/simd/kernels.hpp"

namespace bhd {

std::string_view to_string(SpectrumLabel label) {
  switch (label) {
    case SpectrumLabel::Electronic:
      return "electronic";
    case SpectrumLabel::Shot:
      return "shot";
    case SpectrumLabel::Total:
      return "total";
  }
  return "unknown";
}

std::string_view to_string(QcnrMethod method) {
  return method == QcnrMethod::TimeDomain ? "time_domain" : "frequency_domain";
}

void NoiseSpectrum::validate() const {
  if (freqs.empty() || freqs.size() != psd.size()) {
    throw InvalidArgument("NoiseSpectrum: freqs and psd must be non-empty and equal length");
  }
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (i > 0 && !(freqs[i] > freqs[i - 1])) {
      throw InvalidArgument("NoiseSpectrum: freqs must be strictly ascending");
    }
    if (!(psd[i] >= 0.0)) throw InvalidArgument("NoiseSpectrum: psd must be >= 0");
  }
}

double NoiseSpectrum::at(double f) const {
  if (freqs.empty() || f < freqs.front() || f > freqs.back()) return 0.0;
  const auto it = std::upper_bound(freqs.begin(), freqs.end(), f);
  if (it == freqs.end()) return psd.back();
  const std::size_t hi = static_cast<std::size_t>(it - freqs.begin());
  if (hi == 0) return psd.front();
  const std::size_t lo = hi - 1;
  const double t = (f - freqs[lo]) / (freqs[hi] - freqs[lo]);
  return psd[lo] + t * (psd[hi] - psd[lo]);
}

double NoiseSpectrum::integrate(double f_lo, double f_hi) const {
  if (freqs.empty() || f_lo < freqs.front() || f_hi > freqs.back() || !(f_hi > f_lo)) {
    throw InvalidArgument("NoiseSpectrum::integrate: band [" + std::to_string(f_lo) + ", " +
                          std::to_string(f_hi) + "] not covered by the grid");
  }
  std::vector<double> x{f_lo};
  std::vector<double> y{at(f_lo)};
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (freqs[i] > f_lo && freqs[i] < f_hi) {
      x.push_back(freqs[i]);
      y.push_back(psd[i]);
    }
  }
  x.push_back(f_hi);
  y.push_back(at(f_hi));
  return simd::trapezoid(x, y);
}

double NoiseTrace::mean() const {
  if (samples.empty()) return 0.0;
  return simd::sum(samples) / static_cast<double>(samples.size());
}

double NoiseTrace::variance() const {
  if (samples.empty()) return 0.0;
  const double n = static_cast<double>(samples.size());
  const double m = simd::sum(samples) / n;
  return std::max(0.0, simd::sum_squares(samples) / n - m * m);
}

void NoiseShape::validate() const {
  if (!(corner_frequency > 0.0)) throw InvalidArgument("noise.corner_frequency: must be > 0");
  if (!(compression_exponent >= 0.0 && compression_exponent <= 1.0)) {
    throw InvalidArgument("noise.compression_exponent: must be in [0, 1]");
  }
}

void TimeDomainCapture::validate() const {
  if (!(band > 0.0)) throw InvalidArgument("noise.time_domain_band: must be > 0");
  if (n_samples < (1u << 16) || (n_samples & (n_samples - 1)) != 0) {
    throw InvalidArgument("noise.time_domain_samples: must be a power of two >= 65536");
  }
}

std::vector<double> log_grid(double f_lo, double f_hi, std::size_t n) {
  if (!(f_lo > 0.0) || !(f_hi > f_lo) || n < 2) throw InvalidArgument("log_grid: bad range");
  std::vector<double> out(n);
  const double step = std::log(f_hi / f_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = f_lo * std::exp(step * static_cast<double>(i));
  out.back() = f_hi;
  return out;
}

std::vector<double> default_grid() { return log_grid(1e6, 2e9, 2048); }

std::vector<double> fft_bin_grid(double sample_rate, std::size_t n) {
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = sample_rate * static_cast<double>(k) / static_cast<double>(n);
  }
  return out;
}

double electronic_floor_density(const ReceiverParams& params, const NoiseShape& shape) {
  const double b = params.reference_bandwidth;
  double norm = b;
  if (std::isfinite(shape.corner_frequency)) {
    norm += b * b * b / (3.0 * shape.corner_frequency * shape.corner_frequency);
  }
  return params.input_noise_current_rms * params.input_noise_current_rms / norm;
}

NoiseSpectrum electronic_noise_psd(const ReceiverParams& params, const NoiseShape& shape,
                                   std::span<const double> freqs) {
  const double i0sq = electronic_floor_density(params, shape);
  const double fc = shape.corner_frequency;
  NoiseSpectrum out{{freqs.begin(), freqs.end()}, std::vector<double>(freqs.size()),
                    SpectrumLabel::Electronic};
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double u = std::isfinite(fc) ? freqs[i] / fc : 0.0;
    out.psd[i] = i0sq * (1.0 + u * u) * tia_response_sq(freqs[i], params);
  }
  return out;
}

NoiseSpectrum shot_noise_psd(PowerWatts p_lo, const ReceiverParams& params,
                             std::span<const double> freqs) {
  if (p_lo.value < 0.0) throw InvalidArgument("shot_noise_psd: negative LO power");
  const double i_dc = params.effective_responsivity() * p_lo.value;
  const double level = 2.0 * kElementaryCharge * i_dc;
  NoiseSpectrum out{{freqs.begin(), freqs.end()}, std::vector<double>(freqs.size()),
                    SpectrumLabel::Shot};
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    out.psd[i] = level * tia_response_sq(freqs[i], params);
  }
  return out;
}

double apply_saturation(PowerWatts p_lo, const ReceiverParams& params, double exponent) {
  if (p_lo.value < 0.0) throw InvalidArgument("apply_saturation: negative LO power");
  const double onset = params.saturation_lo_power;
  if (p_lo.value <= onset) return 1.0;
  return std::pow(p_lo.value / onset, exponent - 1.0);
}

NoiseSpectrum total_noise_psd(PowerWatts p_lo, const ReceiverParams& params,
                              const NoiseShape& shape, std::span<const double> freqs) {
  const double gain = apply_saturation(p_lo, params, shape.compression_exponent);
  NoiseSpectrum out = shot_noise_psd(PowerWatts{p_lo.value * gain}, params, freqs);
  const NoiseSpectrum elec = electronic_noise_psd(params, shape, freqs);
  simd::axpy(1.0, elec.psd, out.psd);
  out.label = SpectrumLabel::Total;
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

NoiseTrace synthesize_trace(const NoiseSpectrum& spectrum, double sample_rate,
                            std::size_t n_samples, std::uint64_t seed) {
  spectrum.validate();
  if (!(sample_rate > 0.0)) throw InvalidArgument("synthesize_trace: sample_rate must be > 0");
  if (n_samples < 2 || (n_samples & (n_samples - 1)) != 0) {
    throw InvalidArgument("synthesize_trace: n_samples must be a power of two >= 2");
  }
  const RealFft fft(n_samples);
  const double df = sample_rate / static_cast<double>(n_samples);
  const std::size_t nyquist = n_samples / 2;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // The unnormalized inverse sums both Hermitian halves, so a bin
  // 0 < k < n/2 with X_k = c (a + ib) adds 2 c^2 (a^2 + b^2) to the variance,
  // 4 c^2 on average. The Nyquist bin is real and carries half a bin of
  // bandwidth. DC is dropped to keep the trace zero-mean.
  std::vector<std::complex<double>> bins(fft.bins());
  std::size_t j = 0;
  for (std::size_t k = 1; k <= nyquist; ++k) {
    const double f = df * static_cast<double>(k);
    while (j + 1 < spectrum.freqs.size() && spectrum.freqs[j + 1] < f) ++j;
    double s = 0.0;
    if (f <= spectrum.freqs.back()) {
      if (f <= spectrum.freqs.front()) {
        s = spectrum.psd.front();
      } else {
        const double t = (f - spectrum.freqs[j]) / (spectrum.freqs[j + 1] - spectrum.freqs[j]);
        s = spectrum.psd[j] + t * (spectrum.psd[j + 1] - spectrum.psd[j]);
      }
    }
    const double a = normal(rng);
    const double b = normal(rng);
    if (k < nyquist) {
      const double c = 0.5 * std::sqrt(s * df);
      bins[k] = {c * a, c * b};
    } else {
      bins[k] = {std::sqrt(s * df / 2.0) * a, 0.0};
    }
  }
  NoiseTrace out{sample_rate, fft.inverse(bins), seed, false};
  return out;
}

namespace {

QcnrReport make_report(double electronic, double total, QcnrMethod method) {
  if (total < electronic) {
    throw NegativeClearance("QCNR: total variance " + std::to_string(total) +
                            " below electronic variance " + std::to_string(electronic));
  }
  QcnrReport r;
  r.electronic_variance = electronic;
  r.total_variance = total;
  r.quantum_variance = total - electronic;
  r.method = method;
  if (r.quantum_variance > 0.0 && electronic > 0.0) {
    r.qcnr_db = std::max(kClearanceFloorDb, linear_to_db(r.quantum_variance / electronic));
  } else if (r.quantum_variance > 0.0) {
    r.qcnr_db = std::numeric_limits<double>::infinity();
  } else {
    r.qcnr_db = kClearanceFloorDb;
  }
  return r;
}

}  // namespace

QcnrReport qcnr_time_domain(const NoiseTrace& total, const NoiseTrace& electronic) {
  if (total.sample_rate != electronic.sample_rate) {
    throw InvalidArgument("qcnr_time_domain: sample rates differ");
  }
  if (total.samples.size() < (1u << 16) || electronic.samples.size() < (1u << 16)) {
    throw InvalidArgument("qcnr_time_domain: traces need at least 65536 samples");
  }
  return make_report(electronic.variance(), total.variance(), QcnrMethod::TimeDomain);
}

QcnrReport qcnr_frequency_domain(const NoiseSpectrum& total, const NoiseSpectrum& electronic,
                                 double f_lo, double f_hi) {
  total.validate();
  electronic.validate();
  QcnrReport r = make_report(electronic.integrate(f_lo, f_hi), total.integrate(f_lo, f_hi),
                             QcnrMethod::FrequencyDomain);
  r.band = std::make_pair(f_lo, f_hi);
  return r;
}

std::vector<double> clearance_spectrum(PowerWatts p_lo, const ReceiverParams& params,
                                       const NoiseShape& shape, std::span<const double> freqs) {
  const NoiseSpectrum lit = total_noise_psd(p_lo, params, shape, freqs);
  const NoiseSpectrum dark = electronic_noise_psd(params, shape, freqs);
  std::vector<double> out(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    out[i] = dark.psd[i] > 0.0 ? linear_to_db(lit.psd[i] / dark.psd[i])
                               : std::numeric_limits<double>::infinity();
  }
  return out;
}

QcnrReport simulate_time_domain_qcnr(PowerWatts p_lo, const ReceiverParams& params,
                                     const NoiseShape& shape, const TimeDomainCapture& capture,
                                     std::uint64_t seed) {
  capture.validate();
  const double fs = capture.sample_rate();
  const auto grid = fft_bin_grid(fs, capture.n_samples);
  const double gain = apply_saturation(p_lo, params, shape.compression_exponent);
  NoiseSpectrum shot = shot_noise_psd(PowerWatts{p_lo.value * gain}, params, grid);
  const NoiseSpectrum elec = electronic_noise_psd(params, shape, grid);

  const NoiseTrace dark = synthesize_trace(elec, fs, capture.n_samples, derive_seed(seed, 0));
  NoiseTrace lit = synthesize_trace(shot, fs, capture.n_samples, derive_seed(seed, 1));
  simd::axpy(1.0, dark.samples, lit.samples);
  return qcnr_time_domain(lit, dark);
}

QcnrReport expected_time_domain_qcnr(PowerWatts p_lo, const ReceiverParams& params,
                                     const NoiseShape& shape, const TimeDomainCapture& capture) {
  std::vector<double> grid(16385);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = capture.band * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  const NoiseSpectrum lit = total_noise_psd(p_lo, params, shape, grid);
  const NoiseSpectrum dark = electronic_noise_psd(params, shape, grid);
  return make_report(simd::trapezoid(grid, dark.psd), simd::trapezoid(grid, lit.psd),
                     QcnrMethod::TimeDomain);
}

QcnrReport model_frequency_domain_qcnr(PowerWatts p_lo, const ReceiverParams& params,
                                       const NoiseShape& shape, double f_lo, double f_hi) {
  const auto grid = default_grid();
  return qcnr_frequency_domain(total_noise_psd(p_lo, params, shape, grid),
                               electronic_noise_psd(params, shape, grid), f_lo, f_hi);
}

}  // namespace bhd
