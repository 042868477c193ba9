#include <doctest.h>

#include <cmath>

#include "bhd/config.hpp"
#include "bhd/error.hpp"
#include "bhd/linearity.hpp"

#include "oracles.hpp"

using namespace bhd;

TEST_CASE("beat current") {
  const ReceiverParams p;
  const PowerWatts lo{100e-6};
  CHECK(beat_current_rms({lo, PowerWatts{0.0}, 120e6}, p) == 0.0);

  const double h = std::abs(tia_response(120e6, p));
  const double sig = std::pow(10.0, -3.8) * 1e-3;
  const double expected = std::sqrt(2.0) * 0.84 * std::sqrt(1e-4 * sig) * h;
  CHECK(beat_current_rms({lo, dbm_to_watts(PowerDbm{-38.0}), 120e6}, p) ==
        approx(expected).epsilon(1e-12));
  CHECK(expected == approx(4.73e-6 * h).epsilon(2e-3));

  const double a = beat_current_rms({lo, PowerWatts{1e-8}, 120e6}, p);
  CHECK(beat_current_rms({PowerWatts{4e-4}, PowerWatts{1e-8}, 120e6}, p) == approx(2.0 * a));
  CHECK(beat_current_rms({PowerWatts{1e-8}, lo, 120e6}, p) == approx(a).epsilon(1e-14));

  CHECK_THROWS_AS(beat_current_rms({lo, PowerWatts{1e-8}, 0.0}, p), InvalidArgument);
  CHECK_THROWS_AS(beat_current_rms({lo, PowerWatts{1e-8}, 1e9}, p), InvalidArgument);
}

TEST_CASE("limiter fundamental") {
  // small-signal limit is transparent
  CHECK(limited_tone_power(1e-9, 1e-5) == approx(1e-18).epsilon(1e-6));
  CHECK(limited_tone_power(0.0, 1e-5) == 0.0);
  // hard limiting: fundamental of a square wave of height I_c, 4 I_c / pi
  const double ic = 1e-5;
  const double sq = 4.0 * ic / kPi;
  CHECK(limited_tone_power(1e-2, ic) == approx(0.5 * sq * sq).epsilon(1e-3));
  // 1 dB compression point of tanh, from its series expansion to 3rd order as a coarse check
  CHECK(compression_point_ratio() > 0.5);
  CHECK(compression_point_ratio() < 1.2);
  const double r = compression_point_ratio();
  const double amp = r * ic;
  const double out = std::sqrt(2.0 * limited_tone_power(amp / std::sqrt(2.0), ic));
  CHECK(20.0 * std::log10(out / amp) == approx(-1.0).epsilon(1e-6));
}

TEST_CASE("maximum signal power scaling") {
  const LinearityCalibration cal;
  CHECK(max_signal_power(PowerWatts{100e-6}, cal).value == approx(-38.0));
  CHECK(max_signal_power(PowerWatts{1e-3}, cal).value == approx(-48.0));
  CHECK(max_signal_power(PowerWatts{10e-6}, cal).value == approx(-28.0));
  CHECK_THROWS_AS(max_signal_power(PowerWatts{0.0}, cal), InvalidArgument);
}

TEST_CASE("calibrated dynamic range") {
  const Profile prof = calibrated_profile();
  const auto& m = prof.model;
  const PowerWatts lo{100e-6};
  const auto dr = dynamic_range(lo, m.receiver, m.noise, m.linearity, 42);
  CHECK(std::abs(dr.floor.value + 71.0) <= 1.0);
  CHECK(std::abs(dr.ceiling.value + 38.0) <= 1.0);
  CHECK(std::abs(dr.range_db - 33.0) <= 1.0);
  CHECK(dr.range_db == approx(dr.ceiling.value - dr.floor.value));

  const double measured = measured_tone_band_noise(lo, m.receiver, m.noise, m.linearity, 120e6, 42);
  const double expected = expected_tone_band_noise(lo, m.receiver, m.noise, m.linearity);
  CHECK(measured == approx(expected).epsilon(0.03));

  CHECK(std::abs(compression_ceiling(PowerWatts{1e-3}, m.receiver, m.linearity).value + 48.0) <= 0.5);
  const auto moved = scale_dynamic_range(dr, lo, PowerWatts{1e-3});
  CHECK(moved.range_db == dr.range_db);
  CHECK(moved.ceiling.value == approx(dr.ceiling.value - 10.0));
  CHECK(moved.floor.value == approx(dr.floor.value - 10.0));
}

TEST_CASE("single-tone sweep") {
  const Profile prof = calibrated_profile();
  const auto& m = prof.model;
  const PowerWatts lo{100e-6};
  std::vector<double> grid{-std::numeric_limits<double>::infinity()};
  for (double d = -90.0; d <= -20.0; d += 0.5) grid.push_back(d);
  const auto sweep = single_tone_sweep(lo, grid, m.receiver, m.noise, m.linearity, 42);
  REQUIRE(sweep.size() == grid.size());
  CHECK_FALSE(sweep[0].detectable);

  const auto dr = dynamic_range(lo, m.receiver, m.noise, m.linearity, 42);
  double prev_out = -1e9;
  double prev_slope = 1e9;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].output_db >= prev_out);
    if (i > 1) {
      const double slope = (sweep[i].output_db - sweep[i - 1].output_db) / 0.5;
      CHECK(slope <= prev_slope + 1e-9);
      prev_slope = slope;
      if (sweep[i].input_dbm < dr.ceiling.value - 10.0) CHECK(std::abs(slope - 1.0) <= 0.05);
    }
    prev_out = sweep[i].output_db;
    CHECK(sweep[i].detectable == (sweep[i].input_dbm >= dr.floor.value));
  }
  CHECK_THROWS_AS(single_tone_sweep(lo, std::vector<double>{-50.0, -60.0}, m.receiver, m.noise,
                                    m.linearity, 1),
                  InvalidArgument);
}
