// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "bhd/calibration.hpp"
#include "bhd/config.hpp"

namespace bhd {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  Profile profile = calibrated_profile();
  std::uint64_t seed = 42;
  std::filesystem::path out;
};

struct CmrrOptions {
  double f_lo = 1e6;
  double f_hi = 2e9;
  std::size_t points = 201;
};

struct QcnrOptions {
  /// LO powers in dBm; -inf gives a dark row.
  std::vector<double> lo_dbm;
  double band_lo = 1e6;
  double band_hi = 1e9;
  std::size_t points = 201;

  static std::vector<double> default_lo_grid();
};

struct LinearityOptions {
  PowerWatts p_lo{100e-6};
  /// Signal powers in dBm, ascending; -inf gives a zero-signal row.
  std::vector<double> sig_dbm;
  double offset_freq = 120e6;

  static std::vector<double> default_sig_grid();
};

struct QpskOptions {
  std::vector<double> sig_dbm{-64, -62, -60, -58, -56, -54, -52, -50};
  double target_ber = 1e-3;
  PowerDbm launch{-6.0};
  PowerDbm constellation_dbm{-50.0};
  std::size_t constellation_symbols = 4096;
};

struct SkrOptions {
  std::vector<double> zetas{0.0, 0.01, 0.02, 0.03, 0.04};
  std::vector<double> distances_km;
  double skr_floor = 1e6;

  static std::vector<double> default_distances();
};

struct CalibrateOptions {
  std::optional<std::filesystem::path> anchor_file;
};

/// Each command writes its CSV (and companions) atomically to run.out,
/// prints a short summary to `log` and returns the process exit status.
int cmd_cmrr(const RunConfig& run, const CmrrOptions& opt, std::ostream& log);
int cmd_qcnr(const RunConfig& run, const QcnrOptions& opt, std::ostream& log);
int cmd_linearity(const RunConfig& run, const LinearityOptions& opt, std::ostream& log);
int cmd_qpsk(const RunConfig& run, const QpskOptions& opt, std::ostream& log);
int cmd_skr(const RunConfig& run, const SkrOptions& opt, std::ostream& log);
int cmd_calibrate(const RunConfig& run, const CalibrateOptions& opt, std::ostream& log);

/// Exit status of a calibration whose residuals exceed their tolerances.
inline constexpr int kCalibrationFailure = 3;

}  // namespace bhd
