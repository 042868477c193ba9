// SPDX-License-Identifier: Apache-2.0
#include "bhd/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>

#include "bhd/error.hpp"

namespace bhd {

namespace {

struct Suffix {
  std::string_view text;
  Dimension dim;
  double factor;
};

constexpr std::array<Suffix, 22> kSuffixes{{
    {"W", Dimension::Power, 1.0},
    {"mW", Dimension::Power, 1e-3},
    {"uW", Dimension::Power, 1e-6},
    {"nW", Dimension::Power, 1e-9},
    {"Hz", Dimension::Frequency, 1.0},
    {"kHz", Dimension::Frequency, 1e3},
    {"MHz", Dimension::Frequency, 1e6},
    {"GHz", Dimension::Frequency, 1e9},
    {"s", Dimension::Time, 1.0},
    {"ms", Dimension::Time, 1e-3},
    {"us", Dimension::Time, 1e-6},
    {"ns", Dimension::Time, 1e-9},
    {"ps", Dimension::Time, 1e-12},
    {"fs", Dimension::Time, 1e-15},
    {"F", Dimension::Capacitance, 1.0},
    {"pF", Dimension::Capacitance, 1e-12},
    {"fF", Dimension::Capacitance, 1e-15},
    {"A", Dimension::Current, 1.0},
    {"mA", Dimension::Current, 1e-3},
    {"uA", Dimension::Current, 1e-6},
    {"nA", Dimension::Current, 1e-9},
    {"pA", Dimension::Current, 1e-12},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

using Setter = std::function<void(Profile&, std::string_view)>;
using Getter = std::function<std::string(const Profile&)>;

struct Field {
  std::string key;
  Setter set;
  Getter get;
};

template <typename Access>
Field real_field(std::string key, Dimension dim, Access access) {
  return {std::move(key),
          [access, dim](Profile& p, std::string_view v) { access(p) = parse_quantity(v, dim); },
          [access](const Profile& p) { return format_double(access(const_cast<Profile&>(p))); }};
}

template <typename Access>
Field power_field(std::string key, Access access) {
  return {std::move(key),
          [access](Profile& p, std::string_view v) {
            access(p) = PowerWatts{parse_quantity(v, Dimension::Power)};
          },
          [access](const Profile& p) {
            return format_double(access(const_cast<Profile&>(p)).value);
          }};
}

template <typename Access>
Field count_field(std::string key, Access access) {
  return {std::move(key),
          [access](Profile& p, std::string_view v) {
            const double x = parse_quantity(v, Dimension::Count);
            if (x < 0.0 || x != std::floor(x) || x > 9.0e18) {
              throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'");
            }
            using T = std::remove_reference_t<decltype(access(p))>;
            access(p) = static_cast<T>(x);
          },
          [access](const Profile& p) { return std::to_string(access(const_cast<Profile&>(p))); }};
}

bool parse_flag(std::string_view v) {
  const std::string s(trim(v));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    using D = Dimension;
    // receiver
    f.push_back(real_field("receiver.responsivity", D::None,
                           [](Profile& p) -> double& { return p.model.receiver.responsivity; }));
    f.push_back(real_field("receiver.coupling_efficiency", D::None, [](Profile& p) -> double& {
      return p.model.receiver.coupling_efficiency;
    }));
    f.push_back(real_field("receiver.c_pd", D::Capacitance,
                           [](Profile& p) -> double& { return p.model.receiver.c_pd; }));
    f.push_back(real_field("receiver.input_noise_current_rms", D::Current, [](Profile& p) -> double& {
      return p.model.receiver.input_noise_current_rms;
    }));
    f.push_back(real_field("receiver.reference_bandwidth", D::Frequency, [](Profile& p) -> double& {
      return p.model.receiver.reference_bandwidth;
    }));
    f.push_back(real_field("receiver.tia_bandwidth", D::Frequency,
                           [](Profile& p) -> double& { return p.model.receiver.tia_bandwidth; }));
    f.push_back(real_field("receiver.saturation_lo_power", D::Power, [](Profile& p) -> double& {
      return p.model.receiver.saturation_lo_power;
    }));
    f.push_back(real_field("receiver.arm_split_a", D::None,
                           [](Profile& p) -> double& { return p.model.receiver.arm_split[0]; }));
    f.push_back(real_field("receiver.arm_split_b", D::None,
                           [](Profile& p) -> double& { return p.model.receiver.arm_split[1]; }));
    f.push_back(real_field("receiver.mismatch", D::None, [](Profile& p) -> double& {
      return p.model.receiver.arm_responsivity_mismatch;
    }));
    f.push_back(real_field("receiver.skew", D::Time,
                           [](Profile& p) -> double& { return p.model.receiver.arm_skew; }));
    f.push_back(real_field("receiver.cmrr_ceiling_db", D::None,
                           [](Profile& p) -> double& { return p.model.receiver.cmrr_ceiling_db; }));
    // noise
    f.push_back(real_field("noise.corner_frequency", D::Frequency,
                           [](Profile& p) -> double& { return p.model.noise.corner_frequency; }));
    f.push_back(real_field("noise.compression_exponent", D::None, [](Profile& p) -> double& {
      return p.model.noise.compression_exponent;
    }));
    f.push_back(real_field("noise.time_domain_band", D::Frequency,
                           [](Profile& p) -> double& { return p.model.capture.band; }));
    f.push_back(count_field("noise.time_domain_samples",
                            [](Profile& p) -> std::size_t& { return p.model.capture.n_samples; }));
    // linearity
    f.push_back(real_field("linearity.ceiling_current", D::Current,
                           [](Profile& p) -> double& { return p.model.linearity.ceiling_current; }));
    f.push_back(real_field("linearity.resolution_bandwidth", D::Frequency, [](Profile& p) -> double& {
      return p.model.linearity.resolution_bandwidth;
    }));
    f.push_back(real_field("linearity.reference_lo", D::Power,
                           [](Profile& p) -> double& { return p.model.linearity.reference_lo; }));
    f.push_back(real_field("linearity.reference_ceiling_dbm", D::None, [](Profile& p) -> double& {
      return p.model.linearity.reference_ceiling_dbm;
    }));
    // qpsk
    f.push_back(real_field("qpsk.baud", D::Frequency, [](Profile& p) -> double& { return p.qpsk.baud; }));
    f.push_back(
        real_field("qpsk.if_freq", D::Frequency, [](Profile& p) -> double& { return p.qpsk.if_freq; }));
    f.push_back(real_field("qpsk.rolloff", D::None, [](Profile& p) -> double& { return p.qpsk.rolloff; }));
    f.push_back(real_field("qpsk.sample_rate", D::Frequency,
                           [](Profile& p) -> double& { return p.qpsk.sample_rate; }));
    f.push_back(count_field("qpsk.n_symbols", [](Profile& p) -> std::size_t& { return p.qpsk.n_symbols; }));
    f.push_back(power_field("qpsk.p_lo", [](Profile& p) -> PowerWatts& { return p.qpsk.p_lo; }));
    f.push_back(real_field("qpsk.implementation_penalty_db", D::None, [](Profile& p) -> double& {
      return p.qpsk.implementation_penalty_db;
    }));
    f.push_back({"qpsk.ambiguity",
                 [](Profile& p, std::string_view v) {
                   const auto s = trim(v);
                   if (s == "pilot") {
                     p.qpsk.ambiguity = AmbiguityResolution::Pilot;
                   } else if (s == "differential") {
                     p.qpsk.ambiguity = AmbiguityResolution::Differential;
                   } else {
                     throw ConfigError("expected pilot or differential, got '" + std::string(s) + "'");
                   }
                 },
                 [](const Profile& p) -> std::string {
                   return p.qpsk.ambiguity == AmbiguityResolution::Pilot ? "pilot" : "differential";
                 }});
    f.push_back(count_field("qpsk.n_pilots", [](Profile& p) -> std::size_t& { return p.qpsk.n_pilots; }));
    f.push_back(
        count_field("qpsk.filter_span", [](Profile& p) -> std::size_t& { return p.qpsk.filter_span; }));
    f.push_back(count_field("qpsk.bit_cap", [](Profile& p) -> std::uint64_t& { return p.qpsk.bit_cap; }));
    f.push_back(
        count_field("qpsk.min_errors", [](Profile& p) -> std::uint64_t& { return p.qpsk.min_errors; }));
    f.push_back({"qpsk.noise", [](Profile& p, std::string_view v) { p.qpsk.noise = parse_flag(v); },
                 [](const Profile& p) -> std::string { return p.qpsk.noise ? "true" : "false"; }});
    // qkd
    f.push_back(real_field("qkd.fiber_loss", D::None, [](Profile& p) -> double& { return p.link.fiber_loss; }));
    f.push_back(
        real_field("qkd.detection_loss", D::None, [](Profile& p) -> double& { return p.link.detection_loss; }));
    f.push_back(real_field("qkd.receiver_excess", D::None,
                           [](Profile& p) -> double& { return p.link.receiver_excess; }));
    f.push_back(real_field("qkd.beta", D::None, [](Profile& p) -> double& { return p.link.beta; }));
    f.push_back(
        real_field("qkd.symbol_rate", D::Frequency, [](Profile& p) -> double& { return p.link.symbol_rate; }));
    f.push_back({"qkd.noise_reference",
                 [](Profile& p, std::string_view v) {
                   const auto s = trim(v);
                   if (s == "fiber") {
                     p.link.noise_reference = NoiseReference::Fiber;
                   } else if (s == "total") {
                     p.link.noise_reference = NoiseReference::Total;
                   } else {
                     throw ConfigError("expected fiber or total, got '" + std::string(s) + "'");
                   }
                 },
                 [](const Profile& p) -> std::string {
                   return p.link.noise_reference == NoiseReference::Fiber ? "fiber" : "total";
                 }});
    return f;
  }();
  return table;
}

}  // namespace

void Profile::validate() const {
  model.validate();
  qpsk.validate();
  link.validate();
}

Profile default_profile() { return Profile{}; }

Profile calibrated_profile() {
  Profile p;
  // output of `bhdtwin calibrate`, mirrored in config/calibrated.conf
  p.model.receiver.arm_responsivity_mismatch = 0.00999999999999996;
  p.model.receiver.reference_bandwidth = 749688329.3785559;
  p.model.noise.corner_frequency = 300319727.65679693;
  p.model.capture.band = 2668674801.420315;
  p.model.linearity.ceiling_current = 9.381278080888847e-06;
  p.model.linearity.resolution_bandwidth = 534510908.37628525;
  p.qpsk.implementation_penalty_db = 7.31722964160717;
  return p;
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

double parse_quantity(std::string_view text, Dimension dim) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ConfigError("empty value");
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  double number = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), number);
  if (res.ec != std::errc{}) throw ConfigError("malformed number '" + std::string(s) + "'");
  const std::string_view suffix = trim(std::string_view(res.ptr, s.data() + s.size() - res.ptr));
  if (suffix.empty()) return number;
  if (suffix == "dBm") {
    if (dim != Dimension::Power) throw ConfigError("dBm given for a non-power value '" + std::string(s) + "'");
    return dbm_to_watts(PowerDbm{number}).value;
  }
  for (const auto& sfx : kSuffixes) {
    if (sfx.text == suffix) {
      if (sfx.dim != dim) {
        throw ConfigError("unit '" + std::string(suffix) + "' does not fit '" + std::string(s) + "'");
      }
      return number * sfx.factor;
    }
  }
  throw ConfigError("unknown unit '" + std::string(suffix) + "' in '" + std::string(s) + "'");
}

void set_key(Profile& profile, std::string_view key, std::string_view value) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  try {
    it->set(profile, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> profile_entries(const Profile& profile) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(profile));
  return out;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.key);
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key or value");
    }
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

void apply_config_file(Profile& profile, const std::filesystem::path& path) {
  for (const auto& [key, value] : read_config_file(path)) {
    try {
      set_key(profile, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
}

}  // namespace bhd
