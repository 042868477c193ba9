// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bhd/receiver.hpp"
#include "bhd/units.hpp"

namespace bhd {

enum class SpectrumLabel { Electronic, Shot, Total };
std::string_view to_string(SpectrumLabel label);

/// One-sided PSD in A^2/Hz referred to the TIA input.
struct NoiseSpectrum {
  std::vector<double> freqs;
  std::vector<double> psd;
  SpectrumLabel label = SpectrumLabel::Total;

  void validate() const;
  /// Trapezoidal integral over [f_lo, f_hi]; the band must lie inside the grid.
  double integrate(double f_lo, double f_hi) const;
  /// Linear interpolation; 0 outside the grid.
  double at(double f) const;
};

/// Input-referred noise current samples (A).
struct NoiseTrace {
  double sample_rate = 0.0;
  std::vector<double> samples;
  std::uint64_t seed = 0;
  /// Set by front ends driven beyond their linear range.
  bool saturation_warning = false;

  double mean() const;
  /// Population variance about the sample mean.
  double variance() const;
};

enum class QcnrMethod { TimeDomain, FrequencyDomain };
std::string_view to_string(QcnrMethod method);

inline constexpr double kClearanceFloorDb = -99.0;

struct QcnrReport {
  double electronic_variance = 0.0;
  double total_variance = 0.0;
  double quantum_variance = 0.0;
  double qcnr_db = kClearanceFloorDb;
  QcnrMethod method = QcnrMethod::TimeDomain;
  std::optional<std::pair<double, double>> band;  // frequency-domain only
};

/// Shape and compression of the calibrated noise model.
struct NoiseShape {
  /// Corner above which the electronic noise rises as (f/f_c)^2. Infinity
  /// gives a flat input noise density.
  double corner_frequency = std::numeric_limits<double>::infinity();
  /// Exponent applied to the LO power above saturation onset (1 = no
  /// compression).
  double compression_exponent = 0.35;

  void validate() const;
};

/// Settings of a simulated time-trace capture.
struct TimeDomainCapture {
  double band = 1.25e9;              // Hz; sample rate is twice this
  std::size_t n_samples = 1u << 20;  // power of two

  double sample_rate() const { return 2.0 * band; }
  void validate() const;
};

/// Logarithmic grid with n points from f_lo to f_hi inclusive.
std::vector<double> log_grid(double f_lo, double f_hi, std::size_t n);
/// 2048 log-spaced points from 1 MHz to 2 GHz.
std::vector<double> default_grid();
/// FFT bin centres 0, fs/n, ..., fs/2 of an n-point real transform.
std::vector<double> fft_bin_grid(double sample_rate, std::size_t n);

/// i0^2: the low-frequency input noise density (A^2/Hz).
double electronic_floor_density(const ReceiverParams& params, const NoiseShape& shape);

/// S_e(f) = i0^2 (1 + (f/f_c)^2) |H_tia(f)|^2
NoiseSpectrum electronic_noise_psd(const ReceiverParams& params, const NoiseShape& shape,
                                   std::span<const double> freqs);

/// S_q(f) = 2 q R_eff P_lo |H_tia(f)|^2, uncompressed.
NoiseSpectrum shot_noise_psd(PowerWatts p_lo, const ReceiverParams& params,
                             std::span<const double> freqs);

/// Gain factor in (0, 1] on the quantum-noise variance at p_lo. Above the
/// saturation onset the LO power is compressed to P_sat (P/P_sat)^exponent.
double apply_saturation(PowerWatts p_lo, const ReceiverParams& params, double exponent);

/// Shot noise after compression plus electronic noise: the lit spectrum.
NoiseSpectrum total_noise_psd(PowerWatts p_lo, const ReceiverParams& params,
                              const NoiseShape& shape, std::span<const double> freqs);

/// Gaussian, zero-mean trace whose spectrum follows `spectrum`, built by
/// random-amplitude spectral synthesis. The spectrum is interpolated onto the
/// FFT bins and taken as zero beyond its last grid point. Deterministic in seed.
NoiseTrace synthesize_trace(const NoiseSpectrum& spectrum, double sample_rate,
                            std::size_t n_samples, std::uint64_t seed);

QcnrReport qcnr_time_domain(const NoiseTrace& total, const NoiseTrace& electronic);

QcnrReport qcnr_frequency_domain(const NoiseSpectrum& total, const NoiseSpectrum& electronic,
                                 double f_lo = 1e6, double f_hi = 1e9);

/// Pointwise lit-to-dark ratio 10 log10((S_q + S_e) / S_e).
std::vector<double> clearance_spectrum(PowerWatts p_lo, const ReceiverParams& params,
                                       const NoiseShape& shape, std::span<const double> freqs);

/// Model QCNR from a simulated lit/dark capture pair. The lit capture reuses
/// the dark realization and adds an independent shot-noise trace.
QcnrReport simulate_time_domain_qcnr(PowerWatts p_lo, const ReceiverParams& params,
                                     const NoiseShape& shape, const TimeDomainCapture& capture,
                                     std::uint64_t seed);

/// Expected value of simulate_time_domain_qcnr: the PSD integrals over
/// [0, capture.band].
QcnrReport expected_time_domain_qcnr(PowerWatts p_lo, const ReceiverParams& params,
                                     const NoiseShape& shape, const TimeDomainCapture& capture);

/// Model QCNR over [f_lo, f_hi] on the default grid.
QcnrReport model_frequency_domain_qcnr(PowerWatts p_lo, const ReceiverParams& params,
                                       const NoiseShape& shape, double f_lo = 1e6,
                                       double f_hi = 1e9);

/// splitmix64 of (seed, stream); used to give every sub-simulation its own
/// reproducible generator.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace bhd
