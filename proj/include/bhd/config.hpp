// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bhd/keyrate.hpp"
#include "bhd/model.hpp"
#include "bhd/qpsk.hpp"

namespace bhd {

/// Every tunable of every module.
struct Profile {
  DeviceModel model;
  ModemConfig qpsk;
  LinkParams link;

  void validate() const;
};

/// Uncalibrated physical defaults.
Profile default_profile();
/// The fitted parameter set shipped with the tool (config/calibrated.conf).
Profile calibrated_profile();

enum class Dimension { None, Power, Frequency, Time, Capacitance, Current, Count, Text, Flag };

/// Parses "12.3mW", "9.4dBm", "10ps", "1e9", ... into SI units. Throws
/// ConfigError on a malformed number or a suffix of the wrong dimension.
double parse_quantity(std::string_view text, Dimension dim);

/// Sets one `module.field` key from its textual value.
void set_key(Profile& profile, std::string_view key, std::string_view value);

/// Flat key = value view of a profile, in a fixed order.
std::vector<std::pair<std::string, std::string>> profile_entries(const Profile& profile);
std::vector<std::string> known_keys();

/// Reads key = value lines with # comments.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);
void apply_config_file(Profile& profile, const std::filesystem::path& path);

std::string format_double(double value);

}  // namespace bhd
