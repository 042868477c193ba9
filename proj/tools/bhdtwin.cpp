// SPDX-License-Identifier: Apache-2.0
// bhdtwin: command-line front end of the balanced-receiver simulator.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bhd/commands.hpp"
#include "bhd/error.hpp"

namespace {

using bhd::Dimension;

struct Common {
  std::optional<std::string> config;
  std::uint64_t seed = 42;
  std::string out;
  std::vector<std::string> sets;
  // flag text -> (profile key, value)
  std::vector<std::pair<std::string, std::optional<std::string>>> overrides;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key = value parameter file (default: $BHDTWIN_CONFIG)");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--out", c.out, "output CSV path")->required();
  sub->add_option("--set", c.sets, "override any parameter as key=value");
}

// Registers a flag that writes one profile key. Values keep their unit
// suffix and are parsed by the profile loader.
void add_override(CLI::App* sub, Common& c, const std::string& flag, const std::string& key,
                  const std::string& help) {
  c.overrides.emplace_back(key, std::nullopt);
  // vector storage is reserved up front, so the reference stays valid
  sub->add_option(flag, c.overrides.back().second, help + " [" + key + "]");
}

std::vector<double> parse_list(const std::vector<std::string>& items, Dimension dim) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(bhd::parse_quantity(s, dim));
  return out;
}

bhd::RunConfig build_run(const Common& c) {
  bhd::RunConfig run;
  run.profile = bhd::calibrated_profile();
  std::optional<std::string> path = c.config;
  if (!path) {
    if (const char* env = std::getenv("BHDTWIN_CONFIG"); env && *env) path = env;
  }
  if (path) bhd::apply_config_file(run.profile, *path);
  for (const auto& [key, value] : c.overrides) {
    if (value) bhd::set_key(run.profile, key, *value);
  }
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw bhd::ConfigError("--set expects key=value, got '" + kv + "'");
    bhd::set_key(run.profile, kv.substr(0, eq), kv.substr(eq + 1));
  }
  run.profile.validate();
  run.seed = c.seed;
  run.out = c.out;
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced homodyne receiver simulator"};
  app.set_version_flag("--version", std::string("bhdtwin ") + bhd::kToolVersion);
  app.require_subcommand(1);

  Common common;
  common.overrides.reserve(32);

  // cmrr
  auto* cmrr = app.add_subcommand("cmrr", "CMRR versus frequency");
  add_common(cmrr, common);
  bhd::CmrrOptions cmrr_opt;
  std::optional<std::string> cmrr_f_lo, cmrr_f_hi;
  add_override(cmrr, common, "--mismatch", "receiver.mismatch", "arm responsivity mismatch");
  add_override(cmrr, common, "--skew", "receiver.skew", "arm skew, e.g. 10ps");
  cmrr->add_option("--f-lo", cmrr_f_lo, "lowest frequency (default 1MHz)");
  cmrr->add_option("--f-hi", cmrr_f_hi, "highest frequency (default 2GHz)");
  cmrr->add_option("--points", cmrr_opt.points, "log-spaced grid points")->capture_default_str();

  // qcnr
  auto* qcnr = app.add_subcommand("qcnr", "clearance spectra and QCNR per LO power");
  add_common(qcnr, common);
  bhd::QcnrOptions qcnr_opt;
  std::vector<std::string> qcnr_lo;
  std::optional<std::string> qcnr_band_lo, qcnr_band_hi;
  qcnr->add_option("--lo-dbm", qcnr_lo, "LO powers in dBm (comma separated, -inf for dark)")
      ->delimiter(',');
  qcnr->add_option("--band-lo", qcnr_band_lo, "integration band start (default 1MHz)");
  qcnr->add_option("--band-hi", qcnr_band_hi, "integration band end (default 1GHz)");
  qcnr->add_option("--points", qcnr_opt.points, "clearance grid points")->capture_default_str();
  add_override(qcnr, common, "--corner", "noise.corner_frequency", "electronic noise corner");
  add_override(qcnr, common, "--compression", "noise.compression_exponent",
               "LO compression exponent");

  // linearity
  auto* lin = app.add_subcommand("linearity", "single-tone sweep and dynamic range");
  add_common(lin, common);
  bhd::LinearityOptions lin_opt;
  std::optional<std::string> lin_p_lo, lin_offset;
  std::vector<std::string> lin_sig;
  lin->add_option("--p-lo", lin_p_lo, "LO power, e.g. 100uW or -10dBm");
  lin->add_option("--sig-dbm", lin_sig, "signal powers in dBm (comma separated)")->delimiter(',');
  lin->add_option("--offset", lin_offset, "tone offset frequency (default 120MHz)");

  // qpsk
  auto* qpsk = app.add_subcommand("qpsk", "QPSK BER sweep, sensitivity and constellation");
  add_common(qpsk, common);
  bhd::QpskOptions qpsk_opt;
  std::vector<std::string> qpsk_sig;
  std::optional<std::string> qpsk_launch, qpsk_cons;
  bool no_noise = false;
  add_override(qpsk, common, "--p-lo", "qpsk.p_lo", "LO power, e.g. 13dBm");
  add_override(qpsk, common, "--bit-cap", "qpsk.bit_cap", "bits per BER point at most");
  add_override(qpsk, common, "--penalty", "qpsk.implementation_penalty_db", "signal penalty in dB");
  add_override(qpsk, common, "--ambiguity", "qpsk.ambiguity", "pilot or differential");
  qpsk->add_option("--sig-dbm", qpsk_sig, "signal powers in dBm (comma separated)")->delimiter(',');
  qpsk->add_option("--target-ber", qpsk_opt.target_ber, "BER defining the sensitivity")
      ->capture_default_str();
  qpsk->add_option("--launch", qpsk_launch, "launch power in dBm (default -6)");
  qpsk->add_option("--constellation-dbm", qpsk_cons, "signal power of the dump (default -50)");
  qpsk->add_flag("--no-noise", no_noise, "disable shot and electronic noise");

  // skr
  auto* skr = app.add_subcommand("skr", "CV-QKD secure-key rate versus distance");
  add_common(skr, common);
  bhd::SkrOptions skr_opt;
  std::vector<std::string> skr_zeta, skr_dist;
  skr->add_option("--zeta", skr_zeta, "channel excess noise values in SNU")->delimiter(',');
  skr->add_option("--distance", skr_dist, "distances in km, ascending")->delimiter(',');
  skr->add_option("--floor", skr_opt.skr_floor, "SKR floor for the reach column in b/s")
      ->capture_default_str();
  add_override(skr, common, "--noise-reference", "qkd.noise_reference", "fiber or total");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "fit the model to the anchor set");
  add_common(cal, common);
  bhd::CalibrateOptions cal_opt;
  std::optional<std::string> anchors;
  cal->add_option("--anchors", anchors, "anchor file: name = target [tolerance]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const bhd::RunConfig run = build_run(common);
    if (*cmrr) {
      if (cmrr_f_lo) cmrr_opt.f_lo = bhd::parse_quantity(*cmrr_f_lo, Dimension::Frequency);
      if (cmrr_f_hi) cmrr_opt.f_hi = bhd::parse_quantity(*cmrr_f_hi, Dimension::Frequency);
      return bhd::cmd_cmrr(run, cmrr_opt, std::cout);
    }
    if (*qcnr) {
      qcnr_opt.lo_dbm = parse_list(qcnr_lo, Dimension::None);
      if (qcnr_band_lo) qcnr_opt.band_lo = bhd::parse_quantity(*qcnr_band_lo, Dimension::Frequency);
      if (qcnr_band_hi) qcnr_opt.band_hi = bhd::parse_quantity(*qcnr_band_hi, Dimension::Frequency);
      return bhd::cmd_qcnr(run, qcnr_opt, std::cout);
    }
    if (*lin) {
      if (lin_p_lo) lin_opt.p_lo = bhd::PowerWatts{bhd::parse_quantity(*lin_p_lo, Dimension::Power)};
      if (lin_offset) lin_opt.offset_freq = bhd::parse_quantity(*lin_offset, Dimension::Frequency);
      lin_opt.sig_dbm = parse_list(lin_sig, Dimension::None);
      return bhd::cmd_linearity(run, lin_opt, std::cout);
    }
    if (*qpsk) {
      bhd::RunConfig qrun = run;
      if (no_noise) qrun.profile.qpsk.noise = false;
      if (!qpsk_sig.empty()) qpsk_opt.sig_dbm = parse_list(qpsk_sig, Dimension::None);
      if (qpsk_launch) qpsk_opt.launch = bhd::PowerDbm{bhd::parse_quantity(*qpsk_launch, Dimension::None)};
      if (qpsk_cons) {
        qpsk_opt.constellation_dbm = bhd::PowerDbm{bhd::parse_quantity(*qpsk_cons, Dimension::None)};
      }
      return bhd::cmd_qpsk(qrun, qpsk_opt, std::cout);
    }
    if (*skr) {
      if (!skr_zeta.empty()) skr_opt.zetas = parse_list(skr_zeta, Dimension::None);
      skr_opt.distances_km = parse_list(skr_dist, Dimension::None);
      return bhd::cmd_skr(run, skr_opt, std::cout);
    }
    if (*cal) {
      if (anchors) cal_opt.anchor_file = *anchors;
      return bhd::cmd_calibrate(run, cal_opt, std::cout);
    }
  } catch (const bhd::ConfigError& e) {
    std::cerr << "bhdtwin: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bhdtwin: invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "bhdtwin: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
