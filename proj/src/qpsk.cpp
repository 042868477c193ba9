// SPDX-License-Identifier: Apache-2.0
#include "bhd/qpsk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "bhd/error.hpp"
#include "bhd/fft.hpp"
#include "bhd/simd/kernels.hpp"

namespace bhd {

namespace {

constexpr std::uint64_t kPilotSeed = 0x5A17C0DEull;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Gray dibit <-> quadrant increment for differential mode
constexpr std::array<int, 4> kDibitToStep{0, 1, 3, 2};  // index b0*2+b1
constexpr std::array<int, 4> kStepToDibit{0, 1, 3, 2};

std::complex<double> gray_symbol(std::uint8_t b0, std::uint8_t b1) {
  return {(1.0 - 2.0 * b0) * kInvSqrt2, (1.0 - 2.0 * b1) * kInvSqrt2};
}

// point e^{j(pi/4 + q pi/2)}
std::complex<double> quadrant_symbol(int q) {
  static const std::array<std::complex<double>, 4> pts{
      std::complex<double>{kInvSqrt2, kInvSqrt2}, {-kInvSqrt2, kInvSqrt2},
      {-kInvSqrt2, -kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}};
  return pts[static_cast<std::size_t>(q & 3)];
}

int quadrant_of(std::complex<double> y) {
  if (y.real() >= 0.0) return y.imag() >= 0.0 ? 0 : 3;
  return y.imag() >= 0.0 ? 1 : 2;
}

std::vector<std::complex<double>> pilot_symbols(std::size_t n) {
  std::mt19937_64 rng(kPilotSeed);
  std::vector<std::complex<double>> out(n);
  for (auto& s : out) {
    const auto word = rng();
    s = gray_symbol(word & 1u, (word >> 1) & 1u);
  }
  return out;
}

struct CarrierTables {
  std::vector<double> cos;
  std::vector<double> sin;
};

CarrierTables carrier_tables(std::size_t n, double freq, double sample_rate, double c_scale,
                             double s_scale) {
  CarrierTables t{std::vector<double>(n), std::vector<double>(n)};
  const double cycles_per_sample = freq / sample_rate;
  for (std::size_t m = 0; m < n; ++m) {
    const double turns = std::fmod(cycles_per_sample * static_cast<double>(m), 1.0);
    t.cos[m] = c_scale * std::cos(2.0 * kPi * turns);
    t.sin[m] = s_scale * std::sin(2.0 * kPi * turns);
  }
  return t;
}

double rrc_value(double t, double beta) {
  const double eps = 1e-10;
  if (std::abs(t) < eps) return 1.0 - beta + 4.0 * beta / kPi;
  if (std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < eps) {
    return beta / std::sqrt(2.0) *
           ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * beta)) +
            (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * beta)));
  }
  const double x = 4.0 * beta * t;
  return (std::sin(kPi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(kPi * t * (1.0 + beta))) /
         (kPi * t * (1.0 - x * x));
}

}  // namespace

std::size_t ModemConfig::samples_per_symbol() const {
  return static_cast<std::size_t>(std::llround(sample_rate / baud));
}

std::size_t ModemConfig::payload_symbols() const {
  return ambiguity == AmbiguityResolution::Pilot ? n_symbols - n_pilots : n_symbols - 1;
}

void ModemConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("qpsk." + what); };
  if (!(baud > 0.0)) fail("baud: must be > 0");
  if (!(rolloff > 0.0 && rolloff <= 1.0)) fail("rolloff: must be in (0, 1]");
  if (!(if_freq >= 0.0)) fail("if_freq: must be >= 0");
  if (!(sample_rate >= 2.0 * (if_freq + baud * (1.0 + rolloff) / 2.0))) {
    fail("sample_rate: below twice the highest signal frequency");
  }
  const double ratio = sample_rate / baud;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 2.0) {
    fail("sample_rate: must be an integer multiple (>= 2) of baud");
  }
  if (filter_span < 2 || filter_span % 2 != 0) fail("filter_span: must be even and >= 2");
  if (n_symbols < 2 * filter_span || n_symbols < 16) fail("n_symbols: too short for the filter");
  if ((samples_per_frame() % 2) != 0) fail("n_symbols: frame must have an even sample count");
  if (ambiguity == AmbiguityResolution::Pilot && (n_pilots < 8 || n_pilots >= n_symbols)) {
    fail("n_pilots: must be in [8, n_symbols)");
  }
  if (!(p_lo.value > 0.0)) fail("p_lo: must be > 0");
  if (!(implementation_penalty_db >= 0.0)) fail("implementation_penalty_db: must be >= 0");
  if (bit_cap == 0) fail("bit_cap: must be > 0");
}

std::vector<double> rrc_taps(double rolloff, std::size_t sps, std::size_t span_symbols) {
  const std::size_t count = span_symbols * sps + 1;
  const double half = static_cast<double>(count - 1) / 2.0;
  std::vector<double> taps(count);
  for (std::size_t j = 0; j < count; ++j) {
    taps[j] = rrc_value((static_cast<double>(j) - half) / static_cast<double>(sps), rolloff);
  }
  const double energy = simd::sum_squares(taps);
  const double scale = std::sqrt(static_cast<double>(sps) / energy);
  for (double& t : taps) t *= scale;
  return taps;
}

QpskFrame generate_qpsk(const ModemConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t sps = config.samples_per_symbol();
  const std::size_t n = config.n_symbols;
  const std::size_t total = config.samples_per_frame();

  QpskFrame frame;
  frame.symbols.resize(n);
  frame.bits.reserve(2 * config.payload_symbols());
  std::mt19937_64 rng(seed);

  if (config.ambiguity == AmbiguityResolution::Pilot) {
    const auto pilots = pilot_symbols(config.n_pilots);
    std::copy(pilots.begin(), pilots.end(), frame.symbols.begin());
    for (std::size_t k = config.n_pilots; k < n; ++k) {
      const auto word = rng();
      const std::uint8_t b0 = word & 1u;
      const std::uint8_t b1 = (word >> 1) & 1u;
      frame.bits.push_back(b0);
      frame.bits.push_back(b1);
      frame.symbols[k] = gray_symbol(b0, b1);
    }
  } else {
    int q = 0;
    frame.symbols[0] = quadrant_symbol(q);
    for (std::size_t k = 1; k < n; ++k) {
      const auto word = rng();
      const std::uint8_t b0 = word & 1u;
      const std::uint8_t b1 = (word >> 1) & 1u;
      frame.bits.push_back(b0);
      frame.bits.push_back(b1);
      q = (q + kDibitToStep[b0 * 2u + b1]) & 3;
      frame.symbols[k] = quadrant_symbol(q);
    }
  }

  // Circular pulse shaping: symbol k puts its pulse centre on sample k*sps.
  const auto taps = rrc_taps(config.rolloff, sps, config.filter_span);
  const std::size_t half = (taps.size() - 1) / 2;
  std::vector<double> ext_i(total + taps.size());
  std::vector<double> ext_q(total + taps.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::span<double> di(ext_i.data() + k * sps, taps.size());
    const std::span<double> dq(ext_q.data() + k * sps, taps.size());
    simd::axpy(frame.symbols[k].real(), taps, di);
    simd::axpy(frame.symbols[k].imag(), taps, dq);
  }
  std::vector<double> base_i(total);
  std::vector<double> base_q(total);
  for (std::size_t e = 0; e < ext_i.size(); ++e) {
    const std::size_t m = (e + total - half) % total;
    base_i[m] += ext_i[e];
    base_q[m] += ext_q[e];
  }

  // w = sqrt2 (I cos - Q sin)
  const auto lo = carrier_tables(total, config.if_freq, config.sample_rate, 1.0, 1.0);
  std::vector<double> ic(total), is(total), qc(total), qs(total);
  simd::mix(base_i, lo.cos, lo.sin, ic, is);
  simd::mix(base_q, lo.cos, lo.sin, qc, qs);
  frame.waveform.resize(total);
  simd::scale_add(std::sqrt(2.0), ic, -std::sqrt(2.0), qs, frame.waveform);
  return frame;
}

NoiseTrace front_end(const std::vector<double>& waveform, PowerWatts p_sig,
                     const ModemConfig& config, const DeviceModel& model, std::uint64_t seed) {
  config.validate();
  if (p_sig.value < 0.0) throw InvalidArgument("front_end: negative signal power");
  const std::size_t total = waveform.size();
  if (total < 2 || total % 2 != 0) throw InvalidArgument("front_end: waveform length must be even");
  const ReceiverParams& rx = model.receiver;
  const double fs = config.sample_rate;

  const double gain = apply_saturation(config.p_lo, rx, model.noise.compression_exponent);
  const double p_eff = p_sig.value * db_to_linear(-config.implementation_penalty_db);
  const double amp = std::sqrt(2.0) * rx.effective_responsivity() *
                     std::sqrt(gain * config.p_lo.value * p_eff);

  NoiseTrace out{fs, std::vector<double>(total), seed, false};
  if (amp > 0.0) {
    const RealFft fft(total);
    auto spec = fft.forward(waveform);
    const auto grid = fft_bin_grid(fs, total);
    std::vector<std::complex<double>> response(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) response[k] = tia_response(grid[k], rx);
    simd::complex_multiply(spec, response);
    const auto filtered = fft.inverse(spec);
    simd::axpy(amp / static_cast<double>(total), filtered, out.samples);
  }
  if (config.noise) {
    const auto grid = fft_bin_grid(fs, total);
    const NoiseSpectrum lit = total_noise_psd(config.p_lo, rx, model.noise, grid);
    const NoiseTrace noise = synthesize_trace(lit, fs, total, seed);
    simd::axpy(1.0, noise.samples, out.samples);
  }
  out.saturation_warning =
      p_sig.value > max_signal_power(config.p_lo, model.linearity).watts().value;
  return out;
}

NoiseTrace add_awgn(const std::vector<double>& waveform, double ebn0_db,
                    const ModemConfig& config, std::uint64_t seed) {
  config.validate();
  // Unit-power passband at sps samples per symbol: Es = sps samples of power
  // 1, Eb = Es/2 and one-sided N0 spreads over fs/2.
  const double sps = static_cast<double>(config.samples_per_symbol());
  const double sigma = std::sqrt(sps / (4.0 * db_to_linear(ebn0_db)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  NoiseTrace out{config.sample_rate, waveform, seed, false};
  for (double& x : out.samples) x += normal(rng);
  return out;
}

Demodulated demodulate(const NoiseTrace& trace, const ModemConfig& config) {
  config.validate();
  const std::size_t sps = config.samples_per_symbol();
  const std::size_t total = trace.samples.size();
  if (total != config.samples_per_frame()) {
    throw InvalidArgument("demodulate: trace length does not match the frame");
  }
  const std::size_t n = config.n_symbols;

  // digital 90-degree hybrid
  const auto lo = carrier_tables(total, config.if_freq, config.sample_rate, std::sqrt(2.0),
                                 -std::sqrt(2.0));
  std::vector<double> bb_i(total), bb_q(total);
  simd::mix(trace.samples, lo.cos, lo.sin, bb_i, bb_q);

  auto taps = rrc_taps(config.rolloff, sps, config.filter_span);
  for (double& t : taps) t /= static_cast<double>(sps);
  const std::size_t half = (taps.size() - 1) / 2;
  const std::size_t lead = half + sps / 2;
  // ext[e] = bb[(e - lead) mod total]
  const std::size_t ext_len = total + taps.size() + sps;
  std::vector<double> ext_i(ext_len), ext_q(ext_len);
  for (std::size_t e = 0; e < ext_len; ++e) {
    const std::size_t m = (e + total - lead % total) % total;
    ext_i[e] = bb_i[m];
    ext_q[e] = bb_q[m];
  }
  // offset index o = tau + sps/2 in [0, sps)
  auto sample = [&](std::size_t k, std::size_t o) {
    const std::size_t start = k * sps + o;
    return std::complex<double>{
        simd::dot(taps, std::span<const double>(ext_i.data() + start, taps.size())),
        simd::dot(taps, std::span<const double>(ext_q.data() + start, taps.size()))};
  };

  const std::size_t probe = std::min<std::size_t>(n, 2048);
  std::size_t best_o = sps / 2;
  double best_energy = -1.0;
  for (std::size_t o = 0; o < sps; ++o) {
    double energy = 0.0;
    for (std::size_t k = 0; k < probe; ++k) energy += std::norm(sample(k, o));
    if (energy > best_energy) {
      best_energy = energy;
      best_o = o;
    }
  }

  std::vector<std::complex<double>> y(n);
  double power = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = sample(k, best_o);
    power += std::norm(y[k]);
  }
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw DemodulationError("demodulate: no signal energy for phase estimation");
  }
  const double inv_rms = 1.0 / std::sqrt(power / static_cast<double>(n));
  std::complex<double> fourth{0.0, 0.0};
  for (auto& v : y) {
    v *= inv_rms;
    const auto v2 = v * v;
    fourth += v2 * v2;
  }
  if (!(std::abs(fourth) > 0.0)) throw DemodulationError("demodulate: degenerate fourth-power sum");
  // QPSK points satisfy a^4 = -1, so arg(sum y^4) = pi + 4 phi
  const double phase = (std::arg(fourth) - kPi) / 4.0;
  const std::complex<double> derotate = std::polar(1.0, -phase);
  for (auto& v : y) v *= derotate;

  Demodulated out;
  out.timing_offset = static_cast<long>(best_o) - static_cast<long>(sps / 2);
  out.carrier_phase = phase;
  out.bits.reserve(2 * config.payload_symbols());

  if (config.ambiguity == AmbiguityResolution::Pilot) {
    const auto pilots = pilot_symbols(config.n_pilots);
    int best_r = 0;
    std::size_t best_hits = 0;
    for (int r = 0; r < 4; ++r) {
      const auto rot = std::polar(1.0, r * kPi / 2.0);
      std::size_t hits = 0;
      for (std::size_t k = 0; k < pilots.size(); ++k) {
        hits += quadrant_of(y[k] * rot) == quadrant_of(pilots[k]) ? 1u : 0u;
      }
      if (hits > best_hits) {
        best_hits = hits;
        best_r = r;
      }
    }
    const auto rot = std::polar(1.0, best_r * kPi / 2.0);
    for (auto& v : y) v *= rot;
    out.carrier_phase -= best_r * kPi / 2.0;
    for (std::size_t k = config.n_pilots; k < n; ++k) {
      out.bits.push_back(y[k].real() < 0.0 ? 1 : 0);
      out.bits.push_back(y[k].imag() < 0.0 ? 1 : 0);
    }
  } else {
    int prev = quadrant_of(y[0]);
    for (std::size_t k = 1; k < n; ++k) {
      const int q = quadrant_of(y[k]);
      const int dibit = kStepToDibit[static_cast<std::size_t>((q - prev) & 3)];
      out.bits.push_back(static_cast<std::uint8_t>(dibit >> 1));
      out.bits.push_back(static_cast<std::uint8_t>(dibit & 1));
      prev = q;
    }
  }
  out.soft = std::move(y);
  return out;
}

BerPoint measure_ber(const ModemConfig& config, PowerDbm p_sig, const DeviceModel& model,
                     std::uint64_t seed) {
  config.validate();
  BerPoint point{p_sig, 0.0, 0, 0};
  const PowerWatts watts = dbm_to_watts(p_sig);
  // Trial seeds depend on the trial index only, so every power level sees
  // the same symbols and noise shape (common random numbers).
  for (std::uint64_t trial = 0; point.bits_tested < config.bit_cap; ++trial) {
    const QpskFrame frame = generate_qpsk(config, derive_seed(seed, 2 * trial));
    const NoiseTrace trace = front_end(frame.waveform, watts, config, model,
                                       derive_seed(seed, 2 * trial + 1));
    const Demodulated rx = demodulate(trace, config);
    for (std::size_t i = 0; i < frame.bits.size(); ++i) {
      point.errors_counted += frame.bits[i] != rx.bits[i] ? 1u : 0u;
    }
    point.bits_tested += frame.bits.size();
    if (point.errors_counted >= config.min_errors) break;
  }
  point.ber = static_cast<double>(point.errors_counted) / static_cast<double>(point.bits_tested);
  return point;
}

SensitivityResult sensitivity_search(const ModemConfig& config, const DeviceModel& model,
                                     std::uint64_t seed, double target_ber, PowerDbm launch) {
  if (!(target_ber > 1e-6 && target_ber < 1e-1)) {
    throw InvalidArgument("sensitivity_search: target_ber must lie in (1e-6, 1e-1)");
  }
  SensitivityResult result;
  result.target_ber = target_ber;
  result.launch = launch;
  auto ber_at = [&](double dbm) {
    const BerPoint p = measure_ber(config, PowerDbm{dbm}, model, seed);
    result.evaluated.push_back(p);
    return p;
  };

  constexpr double kScanLo = -75.0;
  constexpr double kScanHi = -30.0;
  BerPoint lo = ber_at(kScanLo);
  if (lo.ber <= target_ber) {
    throw SearchFailure("sensitivity_search: BER already below target at -75 dBm");
  }
  std::optional<BerPoint> hi;
  for (double dbm = kScanLo + 2.0; dbm <= kScanHi + 1e-9; dbm = std::min(dbm + 2.0, kScanHi)) {
    BerPoint p = ber_at(dbm);
    if (p.ber <= target_ber) {
      hi = p;
      break;
    }
    lo = p;
    if (dbm >= kScanHi) break;
  }
  if (!hi) throw SearchFailure("sensitivity_search: no BER crossing inside [-75, -30] dBm");

  while (hi->p_sig.value - lo.p_sig.value > 0.2) {
    const double mid = 0.5 * (lo.p_sig.value + hi->p_sig.value);
    BerPoint p = ber_at(mid);
    if (p.ber > target_ber) {
      lo = p;
    } else {
      hi = p;
    }
  }
  // log-BER interpolation inside the final bracket
  double crossing = hi->p_sig.value;
  if (hi->ber > 0.0) {
    const double a = std::log(lo.ber);
    const double b = std::log(hi->ber);
    const double t = (a - std::log(target_ber)) / (a - b);
    crossing = lo.p_sig.value + t * (hi->p_sig.value - lo.p_sig.value);
  }
  result.sensitivity = PowerDbm{crossing};
  result.budget = optical_budget(launch, result.sensitivity);
  return result;
}

double optical_budget(PowerDbm launch, PowerDbm sensitivity) {
  return launch.value - sensitivity.value;
}

double qpsk_ber_theory(double ebn0_linear) { return 0.5 * std::erfc(std::sqrt(ebn0_linear)); }

double expected_ebn0(PowerDbm p_sig, const ModemConfig& config, const DeviceModel& model) {
  const ReceiverParams& rx = model.receiver;
  const double gain = apply_saturation(config.p_lo, rx, model.noise.compression_exponent);
  const double p_eff = p_sig.watts().value * db_to_linear(-config.implementation_penalty_db);
  const double r = rx.effective_responsivity();
  const double h2 = tia_response_sq(config.if_freq, rx);
  const double signal_power = 2.0 * r * r * gain * config.p_lo.value * p_eff * h2;
  if (!config.noise) return std::numeric_limits<double>::infinity();
  const std::array<double, 1> f{config.if_freq};
  const double n0 = total_noise_psd(config.p_lo, rx, model.noise, f).psd[0];
  return signal_power / config.baud / n0 / 2.0;
}

}  // namespace bhd
