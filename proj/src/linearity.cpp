// SPDX-License-Identifier: Apache-2.0
#include "bhd/linearity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bhd/error.hpp"
#include "bhd/fft.hpp"
#include "bhd/simd/kernels.hpp"

namespace bhd {

namespace {

constexpr std::size_t kCyclePoints = 256;

const std::array<double, kCyclePoints>& sine_table() {
  static const auto table = [] {
    std::array<double, kCyclePoints> t{};
    for (std::size_t i = 0; i < kCyclePoints; ++i) {
      t[i] = std::sin(2.0 * kPi * (static_cast<double>(i) + 0.5) / kCyclePoints);
    }
    return t;
  }();
  return table;
}

// Fundamental amplitude of I_c tanh(A sin(theta) / I_c). The integrand is
// periodic and smooth, so the midpoint rule converges spectrally.
double limited_fundamental(double peak, double ceiling_current) {
  const auto& s = sine_table();
  std::array<double, kCyclePoints> y{};
  for (std::size_t i = 0; i < kCyclePoints; ++i) {
    y[i] = ceiling_current * std::tanh(peak * s[i] / ceiling_current);
  }
  return 2.0 * simd::dot(y, s) / kCyclePoints;
}

}  // namespace

void ToneBeatSpec::validate(const ReceiverParams& params) const {
  if (p_lo.value < 0.0 || p_sig.value < 0.0) throw InvalidArgument("ToneBeatSpec: negative power");
  if (!(offset_freq > 0.0) || offset_freq > params.tia_bandwidth) {
    throw InvalidArgument("ToneBeatSpec: offset_freq must lie in (0, tia_bandwidth]");
  }
}

void LinearityCalibration::validate() const {
  if (!(ceiling_current > 0.0)) throw InvalidArgument("linearity.ceiling_current: must be > 0");
  if (!(resolution_bandwidth > 0.0)) {
    throw InvalidArgument("linearity.resolution_bandwidth: must be > 0");
  }
  if (!(reference_lo > 0.0)) throw InvalidArgument("linearity.reference_lo: must be > 0");
}

double beat_current_rms(const ToneBeatSpec& spec, const ReceiverParams& params) {
  spec.validate(params);
  return std::sqrt(2.0) * params.effective_responsivity() *
         std::sqrt(spec.p_lo.value * spec.p_sig.value) *
         std::abs(tia_response(spec.offset_freq, params));
}

double limited_tone_power(double i_rms, double ceiling_current) {
  if (i_rms <= 0.0) return 0.0;
  const double a1 = limited_fundamental(std::sqrt(2.0) * i_rms, ceiling_current);
  return 0.5 * a1 * a1;
}

double compression_point_ratio() {
  static const double ratio = [] {
    const double target = std::pow(10.0, -1.0 / 20.0);
    double lo = 0.01;
    double hi = 10.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (limited_fundamental(mid, 1.0) / mid > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return ratio;
}

PowerDbm compression_ceiling(PowerWatts p_lo, const ReceiverParams& params,
                             const LinearityCalibration& cal, double offset_freq) {
  if (!(p_lo.value > 0.0)) throw InvalidArgument("compression_ceiling: LO power must be > 0");
  // peak beat amplitude 2 R_eff sqrt(P_lo P_sig) |H| equals ratio * I_c
  const double gain = 2.0 * params.effective_responsivity() *
                      std::abs(tia_response(offset_freq, params));
  const double root = compression_point_ratio() * cal.ceiling_current / gain;
  return watts_to_dbm(PowerWatts{root * root / p_lo.value});
}

namespace {

std::pair<double, double> resolution_band(double offset_freq, double rbw) {
  return {std::max(0.0, offset_freq - 0.5 * rbw), offset_freq + 0.5 * rbw};
}

}  // namespace

double expected_tone_band_noise(PowerWatts p_lo, const ReceiverParams& params,
                                const NoiseShape& shape, const LinearityCalibration& cal,
                                double offset_freq) {
  const auto [lo, hi] = resolution_band(offset_freq, cal.resolution_bandwidth);
  std::vector<double> grid(4097);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  const NoiseSpectrum lit = total_noise_psd(p_lo, params, shape, grid);
  return simd::trapezoid(grid, lit.psd);
}

double measured_tone_band_noise(PowerWatts p_lo, const ReceiverParams& params,
                                const NoiseShape& shape, const LinearityCalibration& cal,
                                double offset_freq, std::uint64_t seed) {
  const auto [lo, hi] = resolution_band(offset_freq, cal.resolution_bandwidth);
  constexpr std::size_t n = 1u << 18;
  // Nyquist at 1.25x the upper band edge; 2^18 bins resolve a 1 MHz band at
  // the default tone offset with a few hundred bins.
  const double sample_rate = 2.5 * hi;
  const auto grid = fft_bin_grid(sample_rate, n);
  const NoiseSpectrum lit = total_noise_psd(p_lo, params, shape, grid);
  const NoiseTrace trace = synthesize_trace(lit, sample_rate, n, seed);

  const RealFft fft(n);
  const auto spec = fft.forward(trace.samples);
  const double df = sample_rate / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  // one-sided periodogram; bins are weighted by their overlap with the band
  double power = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double f = df * static_cast<double>(k);
    const double overlap = std::clamp(std::min(f + 0.5 * df, hi) - std::max(f - 0.5 * df, lo),
                                      0.0, df) / df;
    if (overlap > 0.0) power += overlap * 2.0 * std::norm(spec[k]) / (nn * nn);
  }
  return power;
}

std::vector<SweepPoint> single_tone_sweep(PowerWatts p_lo, std::span<const double> p_sig_dbm,
                                          const ReceiverParams& params, const NoiseShape& shape,
                                          const LinearityCalibration& cal, std::uint64_t seed,
                                          double offset_freq) {
  cal.validate();
  for (std::size_t i = 1; i < p_sig_dbm.size(); ++i) {
    if (!(p_sig_dbm[i] > p_sig_dbm[i - 1])) {
      throw InvalidArgument("single_tone_sweep: signal grid must be ascending");
    }
  }
  const double noise = measured_tone_band_noise(p_lo, params, shape, cal, offset_freq, seed);
  std::vector<SweepPoint> out;
  out.reserve(p_sig_dbm.size());
  for (double dbm : p_sig_dbm) {
    const ToneBeatSpec spec{p_lo, dbm_to_watts(PowerDbm{dbm}), offset_freq};
    const double power = limited_tone_power(beat_current_rms(spec, params), cal.ceiling_current);
    const double out_db = power > 0.0 ? linear_to_db(power) : kClearanceFloorDb * 4.0;
    out.push_back({dbm, out_db, power > 0.0 && power >= noise});
  }
  return out;
}

DynamicRangeReport dynamic_range(PowerWatts p_lo, const ReceiverParams& params,
                                 const NoiseShape& shape, const LinearityCalibration& cal,
                                 std::uint64_t seed, double offset_freq) {
  cal.validate();
  if (!(p_lo.value > 0.0)) throw InvalidArgument("dynamic_range: LO power must be > 0");
  const double noise = measured_tone_band_noise(p_lo, params, shape, cal, offset_freq, seed);
  // linear-region tone power per watt of signal
  const ToneBeatSpec unit{p_lo, PowerWatts{1.0}, offset_freq};
  const double i_unit = beat_current_rms(unit, params);
  const PowerDbm floor = watts_to_dbm(PowerWatts{noise / (i_unit * i_unit)});
  const PowerDbm ceiling = compression_ceiling(p_lo, params, cal, offset_freq);
  return {floor, ceiling, ceiling.value - floor.value};
}

PowerDbm expected_noise_floor(PowerWatts p_lo, const ReceiverParams& params,
                              const NoiseShape& shape, const LinearityCalibration& cal,
                              double offset_freq) {
  if (!(p_lo.value > 0.0)) throw InvalidArgument("expected_noise_floor: LO power must be > 0");
  const double noise = expected_tone_band_noise(p_lo, params, shape, cal, offset_freq);
  const ToneBeatSpec unit{p_lo, PowerWatts{1.0}, offset_freq};
  const double i_unit = beat_current_rms(unit, params);
  return watts_to_dbm(PowerWatts{noise / (i_unit * i_unit)});
}

PowerDbm max_signal_power(PowerWatts p_lo, const LinearityCalibration& cal) {
  if (!(p_lo.value > 0.0)) throw InvalidArgument("max_signal_power: LO power must be > 0");
  return PowerDbm{cal.reference_ceiling_dbm + 10.0 * std::log10(cal.reference_lo / p_lo.value)};
}

DynamicRangeReport scale_dynamic_range(const DynamicRangeReport& report, PowerWatts p_ref,
                                       PowerWatts p_lo) {
  if (!(p_ref.value > 0.0) || !(p_lo.value > 0.0)) {
    throw InvalidArgument("scale_dynamic_range: LO powers must be > 0");
  }
  const double shift = 10.0 * std::log10(p_ref.value / p_lo.value);
  return {PowerDbm{report.floor.value + shift}, PowerDbm{report.ceiling.value + shift},
          report.range_db};
}

}  // namespace bhd
