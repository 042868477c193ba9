#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bhd/config.hpp"
#include "bhd/error.hpp"
#include "bhd/noise.hpp"
#include "oracles.hpp"

using namespace bhd;

namespace {

NoiseSpectrum flat(double level, double f_hi) {
  return NoiseSpectrum{{0.0, f_hi}, {level, level}, SpectrumLabel::Total};
}

}  // namespace

TEST_CASE("electronic PSD normalization") {
  ReceiverParams p;
  SUBCASE("flat input density") {
    const NoiseShape shape;  // corner at infinity
    CHECK(electronic_floor_density(p, shape) == approx(3.6e-24).epsilon(1e-12));
  }
  SUBCASE("unshaped input PSD integrates to the rms current") {
    for (double fc : {1e8, 3e8, 2e9, std::numeric_limits<double>::infinity()}) {
      const NoiseShape shape{fc, 0.35};
      const auto grid = oracle::linspace(0.0, p.reference_bandwidth, 20001);
      const auto s = electronic_noise_psd(p, shape, grid);
      std::vector<double> input(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) input[i] = s.psd[i] / tia_response_sq(grid[i], p);
      CHECK(oracle::trapezoid(grid, input) == approx(3.6e-15).epsilon(1e-6));
    }
  }
  SUBCASE("zero noise current") {
    p.input_noise_current_rms = 0.0;
    for (double v : electronic_noise_psd(p, NoiseShape{3e8, 0.35}, default_grid()).psd) CHECK(v == 0.0);
  }
}

TEST_CASE("shot-noise PSD") {
  const ReceiverParams p;
  const std::vector<double> grid{1e3, 1e6, 5e8, 1e9};
  for (double v : shot_noise_psd(PowerWatts{0.0}, p, grid).psd) CHECK(v == 0.0);

  const double i_dc = p.effective_responsivity() * 12.3e-3;
  CHECK(i_dc == approx(10.33e-3).epsilon(1e-3));
  const auto s = shot_noise_psd(PowerWatts{12.3e-3}, p, grid);
  CHECK(s.psd[0] == approx(3.31e-21).epsilon(2e-3));
  CHECK(s.psd[0] == approx(2.0 * 1.602176634e-19 * i_dc).epsilon(1e-9));

  const auto d = shot_noise_psd(PowerWatts{24.6e-3}, p, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(d.psd[i] == approx(2.0 * s.psd[i]).epsilon(1e-14));
  CHECK_THROWS_AS(shot_noise_psd(PowerWatts{-1.0}, p, grid), InvalidArgument);
}

TEST_CASE("saturation") {
  const ReceiverParams p;
  CHECK(apply_saturation(dbm_to_watts(PowerDbm{9.4}), p, 0.35) == approx(1.0));
  CHECK(apply_saturation(dbm_to_watts(PowerDbm{5.0}), p, 0.35) == 1.0);
  for (double dbm : {9.5, 11.0, 13.0, 20.0}) {
    const double g = apply_saturation(dbm_to_watts(PowerDbm{dbm}), p, 0.35);
    CHECK(g > 0.0);
    CHECK(g < 1.0);
    CHECK(apply_saturation(dbm_to_watts(PowerDbm{dbm}), p, 1.0) == 1.0);
  }
  const Profile cal = calibrated_profile();
  const auto& m = cal.model;
  const double q94 = model_frequency_domain_qcnr(dbm_to_watts(PowerDbm{9.4}), m.receiver, m.noise).qcnr_db;
  const double q109 = model_frequency_domain_qcnr(dbm_to_watts(PowerDbm{10.9}), m.receiver, m.noise).qcnr_db;
  CHECK(q109 > q94);
  CHECK(q109 - q94 < 1.5);
}

TEST_CASE("trace synthesis") {
  constexpr std::size_t n = 1u << 20;
  const double fs = 2e9;
  SUBCASE("zero PSD gives a zero trace") {
    const auto t = synthesize_trace(flat(0.0, 1e9), fs, n, 1);
    CHECK(std::all_of(t.samples.begin(), t.samples.end(), [](double x) { return x == 0.0; }));
  }
  SUBCASE("flat PSD variance follows Parseval") {
    const double s0 = 4e-24;
    const auto t = synthesize_trace(flat(s0, 1e9), fs, n, 2);
    CHECK(t.variance() == approx(s0 * fs / 2.0).epsilon(0.03));
    CHECK(std::abs(t.mean()) < 1e-3 * std::sqrt(t.variance()));
  }
  SUBCASE("deterministic in the seed") {
    const auto a = synthesize_trace(flat(1.0, 1e9), fs, 1u << 16, 99);
    const auto b = synthesize_trace(flat(1.0, 1e9), fs, 1u << 16, 99);
    const auto c = synthesize_trace(flat(1.0, 1e9), fs, 1u << 16, 100);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(synthesize_trace(flat(1.0, 1e9), fs, 1000, 1), InvalidArgument);
    CHECK_THROWS_AS(synthesize_trace(flat(1.0, 1e9), 0.0, 1024, 1), InvalidArgument);
    CHECK_THROWS_AS(synthesize_trace(NoiseSpectrum{{1.0, 0.5}, {1.0, 1.0}}, fs, 1024, 1), InvalidArgument);
  }
}

TEST_CASE("time-domain estimator") {
  const auto e = synthesize_trace(flat(1e-24, 1e9), 2e9, 1u << 16, 5);
  NoiseTrace doubled = e;
  for (double& x : doubled.samples) x *= std::sqrt(2.0);
  CHECK(std::abs(qcnr_time_domain(doubled, e).qcnr_db) < 1e-9);

  const auto same = qcnr_time_domain(e, e);
  CHECK(same.quantum_variance == 0.0);
  CHECK(same.qcnr_db == kClearanceFloorDb);

  NoiseTrace half = e;
  for (double& x : half.samples) x *= 0.5;
  CHECK_THROWS_AS(qcnr_time_domain(half, e), NegativeClearance);

  NoiseTrace short_trace = e;
  short_trace.samples.resize(1000);
  CHECK_THROWS_AS(qcnr_time_domain(short_trace, e), InvalidArgument);
  NoiseTrace other_rate = e;
  other_rate.sample_rate = 1e9;
  CHECK_THROWS_AS(qcnr_time_domain(other_rate, e), InvalidArgument);
}

TEST_CASE("frequency-domain estimator") {
  const auto grid = default_grid();
  NoiseSpectrum total{grid, std::vector<double>(grid.size()), SpectrumLabel::Total};
  NoiseSpectrum elec{grid, std::vector<double>(grid.size()), SpectrumLabel::Electronic};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    total.psd[i] = 1e-21 / (1.0 + grid[i] / 1e9);
    elec.psd[i] = total.psd[i] / 2.0;
  }
  const auto r = qcnr_frequency_domain(total, elec);
  CHECK(std::abs(r.qcnr_db) < 1e-9);
  REQUIRE(r.band.has_value());
  CHECK(r.band->first == 1e6);
  CHECK(r.band->second == 1e9);

  const NoiseSpectrum ft{grid, std::vector<double>(grid.size(), 5e-21), SpectrumLabel::Total};
  const NoiseSpectrum fe{grid, std::vector<double>(grid.size(), 1e-22), SpectrumLabel::Electronic};
  CHECK(qcnr_frequency_domain(ft, fe, 1e6, 5e8).qcnr_db ==
        approx(qcnr_frequency_domain(ft, fe, 1e6, 1e9).qcnr_db).epsilon(1e-12));
  CHECK_THROWS_AS(qcnr_frequency_domain(ft, fe, 1e5, 1e9), InvalidArgument);
  CHECK_THROWS_AS(qcnr_frequency_domain(ft, fe, 1e6, 3e9), InvalidArgument);
}

TEST_CASE("clearance spectrum") {
  const Profile cal = calibrated_profile();
  const auto& m = cal.model;
  const auto grid = default_grid();
  for (double v : clearance_spectrum(PowerWatts{0.0}, m.receiver, m.noise, grid)) CHECK(v == 0.0);
  std::vector<double> prev(grid.size(), 0.0);
  for (double dbm = -10.0; dbm <= 9.4; dbm += 1.0) {
    const auto c = clearance_spectrum(dbm_to_watts(PowerDbm{dbm}), m.receiver, m.noise, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(c[i] >= prev[i]);
      prev[i] = c[i];
    }
  }
}

TEST_CASE("calibrated QCNR anchors") {
  const Profile cal = calibrated_profile();
  const auto& m = cal.model;
  const PowerWatts lo = dbm_to_watts(PowerDbm{10.9});
  CHECK(std::abs(model_frequency_domain_qcnr(PowerWatts{12.3e-3}, m.receiver, m.noise).qcnr_db - 26.8) <= 1.0);
  const std::array<double, 1> f{1e9};
  CHECK(std::abs(clearance_spectrum(lo, m.receiver, m.noise, f)[0] - 21.5) <= 1.5);
  const auto td = simulate_time_domain_qcnr(lo, m.receiver, m.noise, m.capture, 42);
  CHECK(std::abs(td.qcnr_db - 24.74) <= 1.5);
  const auto expected = expected_time_domain_qcnr(lo, m.receiver, m.noise, m.capture);
  CHECK(std::abs(td.qcnr_db - expected.qcnr_db) < 0.1);
}

TEST_CASE("noise properties") {
  const Profile cal = calibrated_profile();
  const auto& m = cal.model;
  constexpr std::size_t n = 1u << 20;

  SUBCASE("variance additivity") {
    const double fs = 2.5e9;
    const auto grid = fft_bin_grid(fs, n);
    const auto shot = shot_noise_psd(PowerWatts{2e-3}, m.receiver, grid);
    const auto elec = electronic_noise_psd(m.receiver, m.noise, grid);
    const auto a = synthesize_trace(shot, fs, n, 11);
    const auto b = synthesize_trace(elec, fs, n, 12);
    NoiseTrace sum = a;
    for (std::size_t i = 0; i < n; ++i) sum.samples[i] += b.samples[i];
    CHECK(sum.variance() == approx(a.variance() + b.variance()).epsilon(0.03));
    CHECK(a.variance() == approx(shot.integrate(0.0, fs / 2.0)).epsilon(0.03));
    CHECK(b.variance() == approx(elec.integrate(0.0, fs / 2.0)).epsilon(0.03));
  }

  SUBCASE("trace and spectrum estimators agree over the same band") {
    for (double dbm : {0.0, 6.0, 10.9}) {
      const PowerWatts lo = dbm_to_watts(PowerDbm{dbm});
      const TimeDomainCapture capture{1e9, n};
      const auto td = simulate_time_domain_qcnr(lo, m.receiver, m.noise, capture, 7);
      const auto grid = oracle::linspace(0.0, 1e9, 8193);
      const auto fd = qcnr_frequency_domain(total_noise_psd(lo, m.receiver, m.noise, grid),
                                            electronic_noise_psd(m.receiver, m.noise, grid), 0.0, 1e9);
      CHECK(std::abs(td.qcnr_db - fd.qcnr_db) <= 0.3);
    }
  }

  SUBCASE("common rescaling leaves QCNR unchanged") {
    const auto grid = default_grid();
    auto t = total_noise_psd(PowerWatts{1e-3}, m.receiver, m.noise, grid);
    auto e = electronic_noise_psd(m.receiver, m.noise, grid);
    const double base = qcnr_frequency_domain(t, e).qcnr_db;
    for (double& v : t.psd) v *= 37.5;
    for (double& v : e.psd) v *= 37.5;
    CHECK(qcnr_frequency_domain(t, e).qcnr_db == approx(base).epsilon(1e-12));
  }

  SUBCASE("LO doubling below onset adds 3.01 dB") {
    for (double dbm : {-3.0, 1.0, 4.4, 6.0}) {
      const PowerWatts a = dbm_to_watts(PowerDbm{dbm});
      const PowerWatts b{2.0 * a.value};
      const double qa = model_frequency_domain_qcnr(a, m.receiver, m.noise).qcnr_db;
      const double qb = model_frequency_domain_qcnr(b, m.receiver, m.noise).qcnr_db;
      CHECK(std::abs(qb - qa - 3.0103) <= 0.05);
    }
  }
}
