// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "bhd/model.hpp"
#include "bhd/noise.hpp"
#include "bhd/units.hpp"

namespace bhd {

/// How the pi/2 ambiguity of the fourth-power phase estimate is removed.
enum class AmbiguityResolution {
  Pilot,         // known symbols at the start of each frame
  Differential,  // information carried in quadrant changes
};

struct ModemConfig {
  double baud = 250e6;
  double if_freq = 500e6;
  double rolloff = 0.2;
  double sample_rate = 4e9;
  std::size_t n_symbols = 1u << 16;  // per trial
  PowerWatts p_lo = dbm_to_watts(PowerDbm{13.0});
  /// Signal-path power penalty lumping impairments the model does not
  /// resolve (dB, applied to p_sig before detection).
  double implementation_penalty_db = 0.0;
  AmbiguityResolution ambiguity = AmbiguityResolution::Pilot;
  std::size_t n_pilots = 64;
  std::size_t filter_span = 16;  // RRC length in symbols
  std::uint64_t bit_cap = 10'000'000;
  std::uint64_t min_errors = 100;
  bool noise = true;

  std::size_t samples_per_symbol() const;
  std::size_t samples_per_frame() const { return n_symbols * samples_per_symbol(); }
  std::size_t payload_symbols() const;
  void validate() const;
};

struct QpskFrame {
  std::vector<std::complex<double>> symbols;
  std::vector<std::uint8_t> bits;  // payload bits only
  std::vector<double> waveform;    // unit mean power, real passband at the IF
};

struct Demodulated {
  std::vector<std::complex<double>> soft;  // phase-corrected, unit rms
  std::vector<std::uint8_t> bits;          // payload bits
  long timing_offset = 0;                  // samples
  double carrier_phase = 0.0;              // rad
};

struct BerPoint {
  PowerDbm p_sig;
  double ber = 0.0;
  std::uint64_t errors_counted = 0;
  std::uint64_t bits_tested = 0;
};

struct SensitivityResult {
  PowerDbm sensitivity;
  double target_ber = 1e-3;
  PowerDbm launch{-6.0};
  double budget = 0.0;
  std::vector<BerPoint> evaluated;  // every power the search measured, in order
};

/// Root-raised-cosine taps spanning filter_span symbols, scaled so that the
/// squared taps sum to samples_per_symbol.
std::vector<double> rrc_taps(double rolloff, std::size_t sps, std::size_t span_symbols);

/// Gray-mapped QPSK frame with RRC shaping, upconverted to the IF. The frame
/// is periodic so that filtering in the frequency domain has no edges.
QpskFrame generate_qpsk(const ModemConfig& config, std::uint64_t seed);

/// Balanced photocurrent for the frame waveform at signal power p_sig:
/// sqrt(2) R_eff sqrt(g P_lo P_sig) w(t) through H_tia, plus shot and
/// electronic noise (unless config.noise is false).
NoiseTrace front_end(const std::vector<double>& waveform, PowerWatts p_sig,
                     const ModemConfig& config, const DeviceModel& model, std::uint64_t seed);

/// Waveform plus white Gaussian noise at the given Eb/N0.
NoiseTrace add_awgn(const std::vector<double>& waveform, double ebn0_db, const ModemConfig& config,
                    std::uint64_t seed);

/// Digital 90-degree hybrid, matched filter, symbol timing by maximum energy,
/// fourth-power carrier phase and ambiguity removal.
Demodulated demodulate(const NoiseTrace& trace, const ModemConfig& config);

BerPoint measure_ber(const ModemConfig& config, PowerDbm p_sig, const DeviceModel& model,
                     std::uint64_t seed);

/// Coarse 2 dB scan over [-75, -30] dBm, then bisection to a 0.2 dB bracket.
SensitivityResult sensitivity_search(const ModemConfig& config, const DeviceModel& model,
                                     std::uint64_t seed, double target_ber = 1e-3,
                                     PowerDbm launch = PowerDbm{-6.0});

double optical_budget(PowerDbm launch, PowerDbm sensitivity);

/// Gray QPSK on AWGN: 0.5 erfc(sqrt(Eb/N0)).
double qpsk_ber_theory(double ebn0_linear);

/// Eb/N0 at the IF predicted from the device spectra (no ISI).
double expected_ebn0(PowerDbm p_sig, const ModemConfig& config, const DeviceModel& model);

}  // namespace bhd
