// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bhd/noise.hpp"
#include "bhd/receiver.hpp"
#include "bhd/units.hpp"

namespace bhd {

struct ToneBeatSpec {
  PowerWatts p_lo;
  PowerWatts p_sig;
  double offset_freq = 120e6;

  void validate(const ReceiverParams& params) const;
};

/// Fitted constants of the single-tone linearity model.
struct LinearityCalibration {
  /// Soft-limiter scale: the TIA output follows I_c tanh(i / I_c).
  double ceiling_current = 1e-5;
  /// Noise bandwidth around the tone used for the detectability decision.
  double resolution_bandwidth = 1e6;
  /// Anchor of the LO scaling law for the maximum signal power.
  double reference_lo = 1e-4;
  double reference_ceiling_dbm = -38.0;

  void validate() const;
};

struct SweepPoint {
  double input_dbm;
  double output_db;  // tone power, dB re 1 A^2
  bool detectable;
};

struct DynamicRangeReport {
  PowerDbm floor;
  PowerDbm ceiling;
  double range_db;
};

/// sqrt(2) R_eff sqrt(P_lo P_sig) |H_tia(offset)|
double beat_current_rms(const ToneBeatSpec& spec, const ReceiverParams& params);

/// Output power of the fundamental after the tanh limiter, for an input tone
/// of the given rms current.
double limited_tone_power(double i_rms, double ceiling_current);

/// Input peak amplitude, in units of the limiter scale, at which the
/// fundamental has compressed by 1 dB.
double compression_point_ratio();

/// 1 dB compression input power at p_lo.
PowerDbm compression_ceiling(PowerWatts p_lo, const ReceiverParams& params,
                             const LinearityCalibration& cal, double offset_freq = 120e6);

/// Expected noise power in the resolution band centred on the tone.
double expected_tone_band_noise(PowerWatts p_lo, const ReceiverParams& params,
                                const NoiseShape& shape, const LinearityCalibration& cal,
                                double offset_freq = 120e6);

/// Same quantity measured on a synthesized noise trace.
double measured_tone_band_noise(PowerWatts p_lo, const ReceiverParams& params,
                                const NoiseShape& shape, const LinearityCalibration& cal,
                                double offset_freq, std::uint64_t seed);

std::vector<SweepPoint> single_tone_sweep(PowerWatts p_lo, std::span<const double> p_sig_dbm,
                                          const ReceiverParams& params, const NoiseShape& shape,
                                          const LinearityCalibration& cal, std::uint64_t seed,
                                          double offset_freq = 120e6);

/// Noise-limited floor (tone power equals band noise) and 1 dB compression
/// ceiling at p_lo.
DynamicRangeReport dynamic_range(PowerWatts p_lo, const ReceiverParams& params,
                                 const NoiseShape& shape, const LinearityCalibration& cal,
                                 std::uint64_t seed, double offset_freq = 120e6);

/// Noise-limited floor from the expected band noise (no trace synthesis).
PowerDbm expected_noise_floor(PowerWatts p_lo, const ReceiverParams& params,
                              const NoiseShape& shape, const LinearityCalibration& cal,
                              double offset_freq = 120e6);

/// Ceiling from the sqrt(P_lo P_sig) law anchored at the calibration point.
PowerDbm max_signal_power(PowerWatts p_lo, const LinearityCalibration& cal);

/// Moves floor and ceiling of a report measured at p_ref to p_lo under the
/// same scaling law.
DynamicRangeReport scale_dynamic_range(const DynamicRangeReport& report, PowerWatts p_ref,
                                       PowerWatts p_lo);

}  // namespace bhd
