// SPDX-License-Identifier: Apache-2.0
#include "bhd/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "bhd/csv.hpp"
#include "bhd/error.hpp"
#include "bhd/simd/kernels.hpp"

namespace bhd {

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double v) { return format_double(v); }

std::string dbm_text(PowerWatts w) { return fmt(watts_to_dbm(w).value); }

Entries report_header(const RunConfig& run, const char* command) {
  Entries e{{"tool", "bhdtwin"},
            {"version", kToolVersion},
            {"command", command},
            {"seed", std::to_string(run.seed)},
            {"simd", std::string(simd::backend_name(simd::active().backend))}};
  for (auto& kv : profile_entries(run.profile)) e.push_back(std::move(kv));
  return e;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ' ';
    s += fmt(xs[i]);
  }
  return s;
}

void require_out(const RunConfig& run) {
  if (run.out.empty()) throw InvalidArgument("--out: an output path is required");
}

}  // namespace

std::vector<double> QcnrOptions::default_lo_grid() {
  std::vector<double> g{-std::numeric_limits<double>::infinity()};
  for (int d = -5; d <= 12; ++d) g.push_back(d);
  for (double extra : {4.4, 7.4, 10.9}) g.push_back(extra);
  std::sort(g.begin(), g.end());
  return g;
}

std::vector<double> LinearityOptions::default_sig_grid() {
  std::vector<double> g{-std::numeric_limits<double>::infinity()};
  for (int d = -90; d <= -20; ++d) g.push_back(d);
  return g;
}

std::vector<double> SkrOptions::default_distances() {
  std::vector<double> g{0.0, 0.1};
  for (int k = 1; k <= 100; ++k) g.push_back(0.5 * k);
  return g;
}

int cmd_cmrr(const RunConfig& run, const CmrrOptions& opt, std::ostream& log) {
  require_out(run);
  run.profile.validate();
  if (!(opt.f_lo > 0.0 && opt.f_hi > opt.f_lo) || opt.points < 2) {
    throw InvalidArgument("cmrr: need 0 < f_lo < f_hi and at least 2 points");
  }
  const auto grid = log_grid(opt.f_lo, opt.f_hi, opt.points);
  const auto cmrr = cmrr_spectrum(run.profile.model.receiver, grid);
  CsvTable t{{"freq_hz", "cmrr_db"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) t.add_row({fmt(grid[i]), fmt(cmrr[i])});
  write_csv(run.out, t);

  auto rep = report_header(run, "cmrr");
  rep.emplace_back("cmrr.f_lo", fmt(opt.f_lo));
  rep.emplace_back("cmrr.f_hi", fmt(opt.f_hi));
  rep.emplace_back("cmrr.points", std::to_string(opt.points));
  rep.emplace_back("result.cmrr_1ghz_db", fmt(cmrr_db(run.profile.model.receiver, 1e9)));
  write_run_report(run.out, rep);
  log << "cmrr at 1 GHz: " << fmt(cmrr_db(run.profile.model.receiver, 1e9)) << " dB\n";
  return 0;
}

int cmd_qcnr(const RunConfig& run, const QcnrOptions& opt, std::ostream& log) {
  require_out(run);
  run.profile.validate();
  const DeviceModel& m = run.profile.model;
  const auto lo_grid = opt.lo_dbm.empty() ? QcnrOptions::default_lo_grid() : opt.lo_dbm;
  const auto grid = log_grid(1e6, 2e9, opt.points);
  const auto model_grid = default_grid();
  const NoiseSpectrum dark = electronic_noise_psd(m.receiver, m.noise, model_grid);

  CsvTable spectra{{"lo_dbm", "lo_w", "freq_hz", "clearance_db"}, {}};
  CsvTable reports{{"lo_dbm", "lo_w", "method", "band_lo_hz", "band_hi_hz", "electronic_var",
                    "total_var", "quantum_var", "qcnr_db"},
                   {}};
  for (std::size_t k = 0; k < lo_grid.size(); ++k) {
    const PowerWatts lo = dbm_to_watts(PowerDbm{lo_grid[k]});
    const auto clearance = clearance_spectrum(lo, m.receiver, m.noise, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      spectra.add_row({fmt(lo_grid[k]), fmt(lo.value), fmt(grid[i]), fmt(clearance[i])});
    }
    const NoiseSpectrum lit = total_noise_psd(lo, m.receiver, m.noise, model_grid);
    const QcnrReport fd = qcnr_frequency_domain(lit, dark, opt.band_lo, opt.band_hi);
    const QcnrReport td = simulate_time_domain_qcnr(lo, m.receiver, m.noise, m.capture,
                                                    derive_seed(run.seed, k));
    reports.add_row({fmt(lo_grid[k]), fmt(lo.value), std::string(to_string(fd.method)),
                     fmt(opt.band_lo), fmt(opt.band_hi), fmt(fd.electronic_variance),
                     fmt(fd.total_variance), fmt(fd.quantum_variance), fmt(fd.qcnr_db)});
    reports.add_row({fmt(lo_grid[k]), fmt(lo.value), std::string(to_string(td.method)), "0",
                     fmt(m.capture.band), fmt(td.electronic_variance), fmt(td.total_variance),
                     fmt(td.quantum_variance), fmt(td.qcnr_db)});
    log << "LO " << fmt(lo_grid[k]) << " dBm: QCNR " << fmt(fd.qcnr_db) << " dB (spectrum), "
        << fmt(td.qcnr_db) << " dB (trace)\n";
  }
  write_csv(run.out, spectra);
  const auto report_path = companion_path(run.out, "reports");
  write_csv(report_path, reports);

  auto rep = report_header(run, "qcnr");
  rep.emplace_back("qcnr.lo_dbm", join(lo_grid));
  rep.emplace_back("qcnr.band_lo", fmt(opt.band_lo));
  rep.emplace_back("qcnr.band_hi", fmt(opt.band_hi));
  rep.emplace_back("qcnr.points", std::to_string(opt.points));
  rep.emplace_back("output.reports", report_path.filename().string());
  write_run_report(run.out, rep);
  return 0;
}

int cmd_linearity(const RunConfig& run, const LinearityOptions& opt, std::ostream& log) {
  require_out(run);
  run.profile.validate();
  const DeviceModel& m = run.profile.model;
  const auto sig = opt.sig_dbm.empty() ? LinearityOptions::default_sig_grid() : opt.sig_dbm;
  const auto sweep = single_tone_sweep(opt.p_lo, sig, m.receiver, m.noise, m.linearity,
                                       derive_seed(run.seed, 0), opt.offset_freq);
  CsvTable t{{"p_lo_dbm", "p_sig_dbm", "p_sig_w", "output_db", "detectable"}, {}};
  for (const auto& pt : sweep) {
    t.add_row({dbm_text(opt.p_lo), fmt(pt.input_dbm), fmt(dbm_to_watts(PowerDbm{pt.input_dbm}).value),
               fmt(pt.output_db), pt.detectable ? "1" : "0"});
  }
  write_csv(run.out, t);

  const PowerWatts p_ref{m.linearity.reference_lo};
  const auto reference = dynamic_range(p_ref, m.receiver, m.noise, m.linearity,
                                       derive_seed(run.seed, 0), opt.offset_freq);
  const auto range = scale_dynamic_range(reference, p_ref, opt.p_lo);
  const auto direct = dynamic_range(opt.p_lo, m.receiver, m.noise, m.linearity,
                                    derive_seed(run.seed, 0), opt.offset_freq);
  const PowerDbm max_sig = max_signal_power(opt.p_lo, m.linearity);
  CsvTable r{{"p_lo_dbm", "p_lo_w", "floor_dbm", "ceiling_dbm", "range_db", "max_signal_dbm",
              "simulated_floor_dbm", "simulated_range_db"},
             {}};
  r.add_row({dbm_text(opt.p_lo), fmt(opt.p_lo.value), fmt(range.floor.value), fmt(range.ceiling.value),
             fmt(range.range_db), fmt(max_sig.value), fmt(direct.floor.value), fmt(direct.range_db)});
  const auto range_path = companion_path(run.out, "range");
  write_csv(range_path, r);

  auto rep = report_header(run, "linearity");
  rep.emplace_back("linearity.p_lo", fmt(opt.p_lo.value));
  rep.emplace_back("linearity.offset_freq", fmt(opt.offset_freq));
  rep.emplace_back("linearity.sig_dbm", join(sig));
  rep.emplace_back("output.range", range_path.filename().string());
  write_run_report(run.out, rep);
  log << "floor " << fmt(range.floor.value) << " dBm, ceiling " << fmt(range.ceiling.value)
      << " dBm, range " << fmt(range.range_db) << " dB\n";
  return 0;
}

int cmd_qpsk(const RunConfig& run, const QpskOptions& opt, std::ostream& log) {
  require_out(run);
  run.profile.validate();
  const DeviceModel& m = run.profile.model;
  const ModemConfig& cfg = run.profile.qpsk;

  CsvTable ber{{"p_sig_dbm", "p_sig_w", "ber", "errors", "bits"}, {}};
  for (double dbm : opt.sig_dbm) {
    const BerPoint p = measure_ber(cfg, PowerDbm{dbm}, m, run.seed);
    ber.add_row({fmt(dbm), fmt(dbm_to_watts(PowerDbm{dbm}).value), fmt(p.ber),
                 std::to_string(p.errors_counted), std::to_string(p.bits_tested)});
    log << fmt(dbm) << " dBm: BER " << fmt(p.ber) << " (" << p.errors_counted << "/"
        << p.bits_tested << ")\n";
  }
  write_csv(run.out, ber);

  CsvTable sens{{"target_ber", "sensitivity_dbm", "sensitivity_w", "launch_dbm", "budget_db"}, {}};
  std::string status = "ok";
  if (cfg.noise) {
    const SensitivityResult s = sensitivity_search(cfg, m, run.seed, opt.target_ber, opt.launch);
    sens.add_row({fmt(s.target_ber), fmt(s.sensitivity.value), fmt(s.sensitivity.watts().value),
                  fmt(s.launch.value), fmt(s.budget)});
    log << "sensitivity " << fmt(s.sensitivity.value) << " dBm, budget " << fmt(s.budget)
        << " dB\n";
  } else {
    status = "skipped: noise disabled";
  }
  const auto sens_path = companion_path(run.out, "sensitivity");
  write_csv(sens_path, sens);

  const QpskFrame frame = generate_qpsk(cfg, derive_seed(run.seed, 0));
  const NoiseTrace trace = front_end(frame.waveform, opt.constellation_dbm.watts(), cfg, m,
                                     derive_seed(run.seed, 1));
  const Demodulated rx = demodulate(trace, cfg);
  CsvTable cons{{"index", "i", "q"}, {}};
  const std::size_t count = std::min(opt.constellation_symbols, rx.soft.size());
  for (std::size_t k = 0; k < count; ++k) {
    cons.add_row({std::to_string(k), fmt(rx.soft[k].real()), fmt(rx.soft[k].imag())});
  }
  const auto cons_path = companion_path(run.out, "constellation");
  write_csv(cons_path, cons);

  auto rep = report_header(run, "qpsk");
  rep.emplace_back("qpsk.sig_dbm", join(opt.sig_dbm));
  rep.emplace_back("qpsk.target_ber", fmt(opt.target_ber));
  rep.emplace_back("qpsk.launch_dbm", fmt(opt.launch.value));
  rep.emplace_back("qpsk.constellation_dbm", fmt(opt.constellation_dbm.value));
  rep.emplace_back("result.sensitivity_status", status);
  rep.emplace_back("result.constellation_saturation_warning", trace.saturation_warning ? "1" : "0");
  rep.emplace_back("output.sensitivity", sens_path.filename().string());
  rep.emplace_back("output.constellation", cons_path.filename().string());
  write_run_report(run.out, rep);
  return 0;
}

int cmd_skr(const RunConfig& run, const SkrOptions& opt, std::ostream& log) {
  require_out(run);
  run.profile.validate();
  const auto distances = opt.distances_km.empty() ? SkrOptions::default_distances() : opt.distances_km;
  CsvTable t{{"distance_km", "zeta_snu", "v_a_opt", "skr_bps"}, {}};
  CsvTable reach{{"zeta_snu", "skr_floor_bps", "reach_km"}, {}};
  for (double zeta : opt.zetas) {
    LinkParams link = run.profile.link;
    link.channel_excess = zeta;
    for (const auto& [d, r] : skr_vs_distance(link, distances)) {
      t.add_row({fmt(d), fmt(zeta), fmt(r.v_a), fmt(r.skr)});
    }
    std::string reach_text = "none";
    try {
      reach_text = fmt(max_reach(link, opt.skr_floor));
    } catch (const Infeasible&) {
    }
    reach.add_row({fmt(zeta), fmt(opt.skr_floor), reach_text});
    log << "zeta " << fmt(zeta) << ": reach at " << fmt(opt.skr_floor) << " b/s = " << reach_text
        << " km\n";
  }
  write_csv(run.out, t);
  const auto reach_path = companion_path(run.out, "reach");
  write_csv(reach_path, reach);

  auto rep = report_header(run, "skr");
  rep.emplace_back("skr.zetas", join(opt.zetas));
  rep.emplace_back("skr.distances_km", join(distances));
  rep.emplace_back("skr.floor_bps", fmt(opt.skr_floor));
  rep.emplace_back("output.reach", reach_path.filename().string());
  write_run_report(run.out, rep);
  return 0;
}

int cmd_calibrate(const RunConfig& run, const CalibrateOptions& opt, std::ostream& log) {
  require_out(run);
  run.profile.validate();
  const auto anchors = opt.anchor_file ? read_anchor_file(*opt.anchor_file) : default_anchors();
  const CalibrationResult result = calibrate(run.profile, anchors, run.seed);

  CsvTable t{{"anchor", "target", "tolerance", "model", "residual", "within"}, {}};
  for (const auto& r : result.residuals) {
    t.add_row({std::string(anchor_name(r.anchor.id)), fmt(r.anchor.target), fmt(r.anchor.tolerance),
               fmt(r.model), fmt(r.residual), r.within() ? "1" : "0"});
    log << anchor_name(r.anchor.id) << ": model " << fmt(r.model) << ", target "
        << fmt(r.anchor.target) << " +/- " << fmt(r.anchor.tolerance) << "\n";
  }
  const auto residual_path = companion_path(run.out, "residuals").replace_extension(".csv");
  write_csv(residual_path, t);

  if (!result.ok) {
    std::cerr << "bhdtwin: calibration failed; worst anchor: "
        << (result.worst ? anchor_name(*result.worst) : std::string_view("unknown")) << "\n";
    return kCalibrationFailure;
  }
  std::string text = "# bhdtwin calibrate, seed " + std::to_string(run.seed) + "\n";
  for (const auto& [k, v] : profile_entries(result.profile)) text += k + " = " + v + "\n";
  write_file_atomic(run.out, text);
  return 0;
}

}  // namespace bhd
