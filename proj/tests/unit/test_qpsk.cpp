#include <doctest.h>

#include <cmath>
#include <complex>

#include "bhd/config.hpp"
#include "bhd/error.hpp"
#include "bhd/fft.hpp"
#include "bhd/qpsk.hpp"
#include "oracles.hpp"

using namespace bhd;

namespace {

ModemConfig small_config() {
  ModemConfig c;
  c.n_symbols = 4096;
  return c;
}

// Rotates the analytic signal of a real trace by phi (positive-frequency bins).
std::vector<double> rotate(const std::vector<double>& x, double phi) {
  const RealFft fft(x.size());
  auto spec = fft.forward(x);
  const auto r = std::polar(1.0, phi);
  for (std::size_t k = 1; k + 1 < spec.size(); ++k) spec[k] *= r;
  auto out = fft.inverse(spec);
  for (double& v : out) v /= static_cast<double>(x.size());
  return out;
}

std::size_t bit_errors(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  REQUIRE(a.size() == b.size());
  std::size_t e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
  return e;
}

}  // namespace

TEST_CASE("frame generation") {
  const ModemConfig c = small_config();
  const auto f = generate_qpsk(c, 9);
  REQUIRE(f.symbols.size() == c.n_symbols);
  CHECK(f.bits.size() == 2 * c.payload_symbols());
  CHECK(f.waveform.size() == c.samples_per_frame());
  const double h = 1.0 / std::sqrt(2.0);
  for (const auto& s : f.symbols) {
    CHECK(std::abs(std::abs(s.real()) - h) == 0.0);
    CHECK(std::abs(std::abs(s.imag()) - h) == 0.0);
  }
  double power = 0.0;
  for (double w : f.waveform) power += w * w;
  CHECK(power / static_cast<double>(f.waveform.size()) == approx(1.0).epsilon(0.02));

  const auto g = generate_qpsk(c, 9);
  CHECK(g.symbols == f.symbols);
  CHECK(g.waveform == f.waveform);
  CHECK(generate_qpsk(c, 10).bits != f.bits);
}

TEST_CASE("RRC taps and spectral occupancy") {
  const auto taps = rrc_taps(0.2, 16, 16);
  double e = 0.0;
  for (double t : taps) e += t * t;
  CHECK(e == approx(16.0).epsilon(1e-12));
  for (std::size_t i = 0; i < taps.size(); ++i) CHECK(taps[i] == approx(taps[taps.size() - 1 - i]).epsilon(1e-12));

  const ModemConfig c = small_config();
  const auto f = generate_qpsk(c, 4);
  const RealFft fft(f.waveform.size());
  const auto spec = fft.forward(f.waveform);
  const double df = c.sample_rate / static_cast<double>(f.waveform.size());
  const double lo = c.if_freq - c.baud * (1.0 + c.rolloff) / 2.0;
  const double hi = c.if_freq + c.baud * (1.0 + c.rolloff) / 2.0;
  double in_band = 0.0, total = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double p = std::norm(spec[k]);
    total += p;
    const double fk = df * static_cast<double>(k);
    if (fk >= lo && fk <= hi) in_band += p;
  }
  CHECK(in_band / total >= 0.99);
}

TEST_CASE("noiseless loopback") {
  const DeviceModel model = calibrated_profile().model;
  for (auto mode : {AmbiguityResolution::Pilot, AmbiguityResolution::Differential}) {
    ModemConfig c = small_config();
    c.ambiguity = mode;
    c.noise = false;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto f = generate_qpsk(c, seed);
      const auto trace = front_end(f.waveform, dbm_to_watts(PowerDbm{-60.0}), c, model, seed);
      const auto rx = demodulate(trace, c);
      CHECK(bit_errors(f.bits, rx.bits) == 0);
    }
  }
}

TEST_CASE("front end") {
  const DeviceModel model = calibrated_profile().model;
  ModemConfig c;
  c.n_symbols = 1u << 14;
  const auto f = generate_qpsk(c, 1);

  SUBCASE("dark trace follows the noise spectrum") {
    const auto t = front_end(f.waveform, PowerWatts{0.0}, c, model, 5);
    const auto grid = fft_bin_grid(c.sample_rate, t.samples.size());
    const auto psd = total_noise_psd(c.p_lo, model.receiver, model.noise, grid);
    CHECK(t.variance() == approx(psd.integrate(0.0, c.sample_rate / 2.0)).epsilon(0.03));
  }
  SUBCASE("tone power scales dB for dB") {
    c.noise = false;
    const auto a = front_end(f.waveform, dbm_to_watts(PowerDbm{-60.0}), c, model, 1);
    const auto b = front_end(f.waveform, dbm_to_watts(PowerDbm{-53.0}), c, model, 1);
    CHECK(10.0 * std::log10(b.variance() / a.variance()) == approx(7.0).epsilon(1e-9));
  }
  SUBCASE("SNR gains 3.01 dB per doubling of signal power") {
    const double a = expected_ebn0(PowerDbm{-60.0}, c, model);
    const double b = expected_ebn0(watts_to_dbm(PowerWatts{2.0 * dbm_to_watts(PowerDbm{-60.0}).value}), c, model);
    CHECK(10.0 * std::log10(b / a) == approx(3.0103).epsilon(1e-4));
  }
  SUBCASE("saturation warning above the linear ceiling") {
    c.noise = false;
    const double ceiling = max_signal_power(c.p_lo, model.linearity).value;
    CHECK_FALSE(front_end(f.waveform, dbm_to_watts(PowerDbm{ceiling - 1.0}), c, model, 1).saturation_warning);
    CHECK(front_end(f.waveform, dbm_to_watts(PowerDbm{ceiling + 1.0}), c, model, 1).saturation_warning);
  }
}

TEST_CASE("AWGN BER matches Gray QPSK theory") {
  ModemConfig c;
  c.n_symbols = 1u << 15;
  for (double ebn0 : {4.0, 6.79}) {
    std::size_t errors = 0, bits = 0;
    for (std::uint64_t trial = 0; trial < 4; ++trial) {
      const auto f = generate_qpsk(c, derive_seed(77, 2 * trial));
      const auto rx = demodulate(add_awgn(f.waveform, ebn0, c, derive_seed(77, 2 * trial + 1)), c);
      errors += bit_errors(f.bits, rx.bits);
      bits += f.bits.size();
    }
    const double p = qpsk_ber_theory(std::pow(10.0, ebn0 / 10.0));
    const double ber = static_cast<double>(errors) / static_cast<double>(bits);
    CHECK(std::abs(ber - p) <= 3.0 * oracle::ber_sigma(p, static_cast<double>(bits)));
  }
}

TEST_CASE("phase offsets") {
  ModemConfig c;
  c.n_symbols = 1u << 15;
  const auto f = generate_qpsk(c, 21);
  const auto noisy = add_awgn(f.waveform, 6.79, c, 22);
  const auto ref = demodulate(noisy, c);

  SUBCASE("a static 30 degree offset is absorbed") {
    NoiseTrace rotated = noisy;
    rotated.samples = rotate(noisy.samples, kPi / 6.0);
    const auto rx = demodulate(rotated, c);
    const double bits = static_cast<double>(f.bits.size());
    const double p = qpsk_ber_theory(std::pow(10.0, 0.679));
    const double a = static_cast<double>(bit_errors(f.bits, ref.bits)) / bits;
    const double b = static_cast<double>(bit_errors(f.bits, rx.bits)) / bits;
    CHECK(std::abs(a - b) <= 3.0 * std::sqrt(2.0) * oracle::ber_sigma(p, bits));
    CHECK(std::remainder(rx.carrier_phase - ref.carrier_phase - kPi / 6.0, 2.0 * kPi) ==
          doctest::Approx(0.0).epsilon(0.02));
  }
  SUBCASE("quarter-turn rotations change no decoded bits") {
    for (auto mode : {AmbiguityResolution::Differential, AmbiguityResolution::Pilot}) {
      c.ambiguity = mode;
      const auto g = generate_qpsk(c, 23);
      const auto t = add_awgn(g.waveform, 6.79, c, 24);
      const auto base = demodulate(t, c);
      for (int q = 1; q < 4; ++q) {
        NoiseTrace r = t;
        r.samples = rotate(t.samples, q * kPi / 2.0);
        CHECK(demodulate(r, c).bits == base.bits);
      }
    }
  }
}

TEST_CASE("demodulation errors") {
  const ModemConfig c = small_config();
  const NoiseTrace zero{c.sample_rate, std::vector<double>(c.samples_per_frame(), 0.0), 0, false};
  CHECK_THROWS_AS(demodulate(zero, c), DemodulationError);
  const NoiseTrace wrong{c.sample_rate, std::vector<double>(1024, 1.0), 0, false};
  CHECK_THROWS_AS(demodulate(wrong, c), InvalidArgument);
}

TEST_CASE("configuration invariants") {
  ModemConfig c;
  CHECK_NOTHROW(c.validate());
  c.sample_rate = 1.2e9;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("qpsk.sample_rate"), InvalidArgument);
  c = ModemConfig{};
  c.sample_rate = 4.1e9;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = ModemConfig{};
  c.rolloff = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("BER measurement") {
  const Profile prof = calibrated_profile();
  ModemConfig c = prof.qpsk;
  c.n_symbols = 1u << 14;
  c.bit_cap = 200'000;

  const BerPoint high = measure_ber(c, PowerDbm{-30.0}, prof.model, 1);
  CHECK(high.errors_counted == 0);
  CHECK(high.bits_tested >= c.bit_cap);
  CHECK(high.ber == 0.0);

  double prev = 1.0;
  for (double dbm = -66.0; dbm <= -52.0; dbm += 2.0) {
    const BerPoint p = measure_ber(c, PowerDbm{dbm}, prof.model, 1);
    CHECK((p.errors_counted >= c.min_errors || p.bits_tested >= c.bit_cap));
    CHECK(p.ber == static_cast<double>(p.errors_counted) / static_cast<double>(p.bits_tested));
    CHECK(p.ber <= prev * 1.2 + 1e-12);
    prev = p.ber;
  }
}

TEST_CASE("calibrated BER near the sensitivity") {
  const Profile prof = calibrated_profile();
  const BerPoint p = measure_ber(prof.qpsk, PowerDbm{-55.8}, prof.model, 42);
  CHECK(p.ber >= 1e-3 / 3.0);
  CHECK(p.ber <= 3e-3);
}

TEST_CASE("sensitivity search") {
  const Profile prof = calibrated_profile();
  ModemConfig c = prof.qpsk;
  c.n_symbols = 1u << 13;
  c.bit_cap = 2'000'000;

  const auto base = sensitivity_search(c, prof.model, 5);
  CHECK(base.budget == approx(-6.0 - base.sensitivity.value));
  CHECK(base.evaluated.size() >= 3);

  SUBCASE("a looser BER target lowers the sensitivity") {
    const auto loose = sensitivity_search(c, prof.model, 5, 1e-2);
    CHECK(loose.sensitivity.value < base.sensitivity.value);
  }
  SUBCASE("removing electronic noise helps at least by its noise share") {
    DeviceModel quiet = prof.model;
    quiet.receiver.input_noise_current_rms = 0.0;
    const auto shot_limited = sensitivity_search(c, quiet, 5);
    const std::array<double, 1> f{c.if_freq};
    const double se = electronic_noise_psd(prof.model.receiver, prof.model.noise, f).psd[0];
    const double st = total_noise_psd(c.p_lo, prof.model.receiver, prof.model.noise, f).psd[0];
    const double share_db = -10.0 * std::log10(1.0 - se / st);
    CHECK(base.sensitivity.value - shot_limited.sensitivity.value >= share_db - 0.05);
  }
  SUBCASE("more electronic noise worsens the sensitivity") {
    double prev = base.sensitivity.value;
    for (double rms : {2e-6, 5e-6}) {
      DeviceModel noisy = prof.model;
      noisy.receiver.input_noise_current_rms = rms;
      const double s = sensitivity_search(c, noisy, 5).sensitivity.value;
      CHECK(s > prev);
      prev = s;
    }
  }
  SUBCASE("argument and range errors") {
    CHECK_THROWS_AS(sensitivity_search(c, prof.model, 5, 0.5), InvalidArgument);
    CHECK_THROWS_AS(sensitivity_search(c, prof.model, 5, 1e-7), InvalidArgument);
    ModemConfig hopeless = c;
    hopeless.implementation_penalty_db = 60.0;
    CHECK_THROWS_AS(sensitivity_search(hopeless, prof.model, 5), SearchFailure);
  }
}

TEST_CASE("optical budget") {
  CHECK(optical_budget(PowerDbm{-6.0}, PowerDbm{-55.8}) == approx(49.8));
  CHECK(optical_budget(PowerDbm{0.0}, PowerDbm{-50.0}) == approx(50.0));
  CHECK(optical_budget(PowerDbm{-6.0}, PowerDbm{-50.0}) == approx(44.0));
  CHECK(qpsk_ber_theory(std::pow(10.0, 0.679)) == approx(1e-3).epsilon(0.01));
}
