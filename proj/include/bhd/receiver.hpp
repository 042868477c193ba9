// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "bhd/units.hpp"

namespace bhd {

/// Opto-electronic constants of the balanced receiver under simulation.
///
/// Defaults describe the die-level assembly: 1.0 A/W photodiodes behind a
/// glass 180-degree hybrid with 84 % coupling, a 200 fF PIN pair and a
/// 60 nA (rms) TIA with a 750 MHz response.
struct ReceiverParams {
  double responsivity = 1.0;                 // A/W
  double coupling_efficiency = 0.84;
  double c_pd = 200e-15;                     // F
  double input_noise_current_rms = 60e-9;    // A, over reference_bandwidth
  double reference_bandwidth = 1e9;          // Hz
  double tia_bandwidth = 750e6;              // Hz, -3 dB
  double saturation_lo_power = 1e-3 * 8.709635899560806;  // W (9.4 dBm)
  std::array<double, 2> arm_split{0.5, 0.5};
  double arm_responsivity_mismatch = 0.0;
  double arm_skew = 0.0;                     // s
  double cmrr_ceiling_db = 120.0;

  double effective_responsivity() const { return responsivity * coupling_efficiency; }

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;
};

/// DC photocurrent of each photodiode for a total input power p_in.
std::array<double, 2> per_arm_photocurrent(PowerWatts p_in, const ReceiverParams& params);

/// Complex receiver response: second-order Butterworth low-pass with its
/// -3 dB point at tia_bandwidth.
std::complex<double> tia_response(double freq, const ReceiverParams& params);
double tia_response_sq(double freq, const ReceiverParams& params);

/// Ratio of the single-photodiode response (arm 1) to the balanced residual,
/// in dB, clamped to params.cmrr_ceiling_db.
std::vector<double> cmrr_spectrum(const ReceiverParams& params, std::span<const double> freqs);
double cmrr_db(const ReceiverParams& params, double freq);

/// Responsivity mismatch that yields target_db of CMRR at freq, keeping the
/// split and skew of params. Throws Infeasible when skew alone already limits
/// the CMRR below the target.
double mismatch_for_cmrr(const ReceiverParams& params, double target_db, double freq);

/// TIA input noise scales with sqrt(C_pd).
double noise_current_for_capacitance(double i_ref, double c_ref, double c_new);

}  // namespace bhd
