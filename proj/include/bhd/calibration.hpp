// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bhd/config.hpp"

namespace bhd {

/// Measured operating points the model is fitted to.
enum class AnchorId {
  Cmrr,             // CMRR at 1 GHz, dB
  Clearance,        // clearance at 10.9 dBm LO and 1 GHz, dB
  QcnrFrequency,    // integrated 1 MHz..1 GHz QCNR at 12.3 mW LO, dB
  QcnrTime,         // time-trace QCNR at 10.9 dBm LO, dB
  LinearCeiling,    // 1 dB compression input at 100 uW LO, dBm
  LinearFloor,      // noise-limited input at 100 uW LO, dBm
  QpskSensitivity,  // input power at BER 1e-3, dBm
};

std::string_view anchor_name(AnchorId id);
std::optional<AnchorId> anchor_from_name(std::string_view name);

struct Anchor {
  AnchorId id;
  double target;
  double tolerance;
};

std::vector<Anchor> default_anchors();

/// Lines of `name = target [tolerance]`; a missing tolerance takes the
/// default for that anchor.
std::vector<Anchor> read_anchor_file(const std::filesystem::path& path);

/// Model value of an anchor under a profile.
double evaluate_anchor(AnchorId id, const Profile& profile, std::uint64_t seed);

struct AnchorResidual {
  Anchor anchor;
  double model;
  double residual;  // model - target
  bool within() const { return std::abs(residual) <= anchor.tolerance; }
};

struct CalibrationResult {
  Profile profile;
  std::vector<AnchorResidual> residuals;
  bool ok = true;
  /// Anchor whose removal best restores the fit, set when !ok.
  std::optional<AnchorId> worst;
};

/// Bounded Levenberg-Marquardt fit of the noise, CMRR and linearity
/// constants to the anchors, then the QPSK implementation penalty.
CalibrationResult calibrate(const Profile& start, std::span<const Anchor> anchors,
                            std::uint64_t seed);

}  // namespace bhd
