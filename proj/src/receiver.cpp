// SPDX-License-Identifier: Apache-2.0
#include "bhd/receiver.hpp"

#include <cmath>
#include <string>

#include "bhd/error.hpp"

namespace bhd {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw InvalidArgument(std::string("receiver.") + field + ": " + what);
}

}  // namespace

void ReceiverParams::validate() const {
  require(responsivity > 0.0, "responsivity", "must be > 0");
  require(coupling_efficiency > 0.0 && coupling_efficiency <= 1.0, "coupling_efficiency",
          "must be in (0, 1]");
  require(c_pd > 0.0, "c_pd", "must be > 0");
  require(input_noise_current_rms >= 0.0, "input_noise_current_rms", "must be >= 0");
  require(reference_bandwidth > 0.0, "reference_bandwidth", "must be > 0");
  require(tia_bandwidth > 0.0, "tia_bandwidth", "must be > 0");
  require(saturation_lo_power > 0.0, "saturation_lo_power", "must be > 0");
  require(arm_split[0] >= 0.0 && arm_split[1] >= 0.0, "arm_split", "components must be >= 0");
  require(std::abs(arm_split[0] + arm_split[1] - 1.0) <= 1e-12, "arm_split", "must sum to 1");
  require(arm_responsivity_mismatch > -1.0 && arm_responsivity_mismatch < 1.0,
          "arm_responsivity_mismatch", "must be in (-1, 1)");
  require(arm_skew >= 0.0, "arm_skew", "must be >= 0");
  require(cmrr_ceiling_db > 0.0, "cmrr_ceiling_db", "must be > 0");
}

std::array<double, 2> per_arm_photocurrent(PowerWatts p_in, const ReceiverParams& params) {
  if (p_in.value < 0.0) throw InvalidArgument("per_arm_photocurrent: negative input power");
  const double r1 = params.effective_responsivity();
  const double r2 = r1 * (1.0 - params.arm_responsivity_mismatch);
  return {r1 * params.arm_split[0] * p_in.value, r2 * params.arm_split[1] * p_in.value};
}

std::complex<double> tia_response(double freq, const ReceiverParams& params) {
  // H(s) = 1 / (1 + sqrt2 s/w0 + (s/w0)^2), s = j f/f0 after normalization
  const double u = freq / params.tia_bandwidth;
  return 1.0 / std::complex<double>(1.0 - u * u, std::sqrt(2.0) * u);
}

double tia_response_sq(double freq, const ReceiverParams& params) {
  const double u = freq / params.tia_bandwidth;
  return 1.0 / (1.0 + u * u * u * u);
}

double cmrr_db(const ReceiverParams& params, double freq) {
  const double a1 = params.arm_split[0] * params.responsivity;
  const double a2 = params.arm_split[1] * params.responsivity * (1.0 - params.arm_responsivity_mismatch);
  const double phase = 2.0 * kPi * freq * params.arm_skew;
  // |a1 - a2 e^{-j phase}|, written to keep precision when a1 ~ a2 and phase ~ 0
  const double half = 0.5 * phase;
  const double diff = a1 - a2;
  const double residual = std::sqrt(diff * diff + 4.0 * a1 * a2 * std::sin(half) * std::sin(half));
  if (residual <= 0.0) return params.cmrr_ceiling_db;
  const double value = 20.0 * std::log10(std::abs(a1) / residual);
  return std::min(value, params.cmrr_ceiling_db);
}

std::vector<double> cmrr_spectrum(const ReceiverParams& params, std::span<const double> freqs) {
  if (freqs.empty()) throw InvalidArgument("cmrr_spectrum: empty frequency grid");
  std::vector<double> out;
  out.reserve(freqs.size());
  double prev = 0.0;
  for (double f : freqs) {
    if (!(f > prev)) throw InvalidArgument("cmrr_spectrum: frequencies must be positive and ascending");
    prev = f;
    out.push_back(cmrr_db(params, f));
  }
  return out;
}

double mismatch_for_cmrr(const ReceiverParams& params, double target_db, double freq) {
  ReceiverParams p = params;
  p.cmrr_ceiling_db = std::max(params.cmrr_ceiling_db, target_db + 1.0);
  p.arm_responsivity_mismatch = 0.0;
  // Zero mismatch only balances when the split is symmetric; search the side
  // of the mismatch axis that shrinks the residual.
  auto at = [&](double m) {
    p.arm_responsivity_mismatch = m;
    return cmrr_db(p, freq);
  };
  const double balance = 1.0 - params.arm_split[0] / params.arm_split[1];
  if (at(balance) < target_db) {
    throw Infeasible("mismatch_for_cmrr: skew limits CMRR below the target");
  }
  // CMRR decreases monotonically as the mismatch moves away from balance.
  double lo = balance;
  double hi = 0.999;
  if (at(hi) > target_db) throw Infeasible("mismatch_for_cmrr: target below reachable range");
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) > target_db ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double noise_current_for_capacitance(double i_ref, double c_ref, double c_new) {
  if (!(c_ref > 0.0) || !(c_new > 0.0)) {
    throw InvalidArgument("noise_current_for_capacitance: capacitances must be > 0");
  }
  if (i_ref < 0.0) throw InvalidArgument("noise_current_for_capacitance: negative noise current");
  return i_ref * std::sqrt(c_new / c_ref);
}

}  // namespace bhd
