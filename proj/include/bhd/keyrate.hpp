// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace bhd {

/// Where noises quoted at the receiver input are divided back to the
/// channel input.
enum class NoiseReference {
  Fiber,  // fiber transmittance only
  Total,  // fiber and detection loss
};

struct LinkParams {
  double distance = 0.0;          // km
  double fiber_loss = 0.23;       // dB/km
  double detection_loss = 1.2;    // dB
  double channel_excess = 0.0;    // zeta, SNU at the receiver input
  double receiver_excess = 0.00336;  // SNU at the receiver input
  double beta = 0.97;
  double symbol_rate = 250e6;     // symbols/s
  NoiseReference noise_reference = NoiseReference::Fiber;

  void validate() const;
};

struct KeyRateResult {
  double v_a = 0.0;
  double i_ab = 0.0;     // bits/symbol
  double chi_be = 0.0;   // bits/symbol
  double rate = 0.0;     // bits/symbol
  double skr = 0.0;      // bits/s
  bool feasible = true;
};

double effective_transmittance(const LinkParams& link);
double channel_transmittance(const LinkParams& link);
double total_excess_noise_at_channel_input(const LinkParams& link);

/// (x+1) log2(x+1) - x log2 x, with g(0) = 0.
double holevo_g(double x);

/// nu_1..nu_4 from the closed forms, for modulation variance v_a, effective
/// transmittance t and channel-input excess noise xi.
std::array<double, 4> symplectic_eigenvalues(double v_a, double t, double xi);

/// Mutual information and Holevo bound for explicit (v_a, t, xi).
KeyRateResult key_rate(double v_a, double t, double xi, double beta, double symbol_rate);
KeyRateResult key_rate(double v_a, const LinkParams& link);

KeyRateResult optimize_modulation_variance(const LinkParams& link);

std::vector<std::pair<double, KeyRateResult>> skr_vs_distance(const LinkParams& link,
                                                              std::span<const double> distances);

/// Largest distance (km) at which the optimized SKR stays at or above
/// skr_floor, to a 0.05 km bracket.
double max_reach(const LinkParams& link, double skr_floor);

}  // namespace bhd
