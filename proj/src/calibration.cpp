// SPDX-License-Identifier: Apache-2.0
#include "bhd/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "bhd/error.hpp"

namespace bhd {

namespace {

const PowerWatts kQcnrLo = dbm_to_watts(PowerDbm{10.9});
constexpr PowerWatts kIntegratedLo{12.3e-3};
constexpr PowerWatts kToneLo{100e-6};
constexpr double kAnchorFreq = 1e9;

struct AnchorInfo {
  AnchorId id;
  std::string_view name;
  double target;
  double tolerance;
};

constexpr std::array<AnchorInfo, 7> kAnchors{{
    {AnchorId::Cmrr, "cmrr_1ghz", 40.0, 1.0},
    {AnchorId::Clearance, "clearance_1ghz", 21.5, 1.5},
    {AnchorId::QcnrFrequency, "qcnr_frequency", 26.8, 1.0},
    {AnchorId::QcnrTime, "qcnr_time", 24.74, 1.5},
    {AnchorId::LinearCeiling, "linear_ceiling", -38.0, 1.0},
    {AnchorId::LinearFloor, "linear_floor", -71.0, 1.0},
    {AnchorId::QpskSensitivity, "qpsk_sensitivity", -55.8, 1.5},
}};

const AnchorInfo& info(AnchorId id) {
  return *std::find_if(kAnchors.begin(), kAnchors.end(),
                       [id](const AnchorInfo& a) { return a.id == id; });
}

// Fitted parameters, moved in log space between bounds.
struct Param {
  double lo;
  double hi;
  std::function<double&(Profile&)> ref;
  std::vector<AnchorId> drivers;
};

const std::array<Param, 6>& params() {
  static const std::array<Param, 6> table{{
      {1e-6, 0.5, [](Profile& p) -> double& { return p.model.receiver.arm_responsivity_mismatch; },
       {AnchorId::Cmrr}},
      {1e7, 1e11, [](Profile& p) -> double& { return p.model.noise.corner_frequency; },
       {AnchorId::Clearance, AnchorId::QcnrFrequency}},
      {1e8, 1e10, [](Profile& p) -> double& { return p.model.receiver.reference_bandwidth; },
       {AnchorId::Clearance, AnchorId::QcnrFrequency}},
      {1e9, 1e10, [](Profile& p) -> double& { return p.model.capture.band; }, {AnchorId::QcnrTime}},
      {1e-8, 1e-2, [](Profile& p) -> double& { return p.model.linearity.ceiling_current; },
       {AnchorId::LinearCeiling}},
      {1e3, 2e9, [](Profile& p) -> double& { return p.model.linearity.resolution_bandwidth; },
       {AnchorId::LinearFloor}},
  }};
  return table;
}

using Matrix = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting; a is consumed.
std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (a[c][c] == 0.0) return std::vector<double>(n, 0.0);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

struct Problem {
  Profile base;
  std::vector<Anchor> anchors;
  std::vector<std::size_t> active;  // indices into params()
  std::uint64_t seed;

  Profile apply(const std::vector<double>& x) const {
    Profile p = base;
    for (std::size_t i = 0; i < active.size(); ++i) params()[active[i]].ref(p) = std::exp(x[i]);
    return p;
  }

  std::vector<double> residuals(const std::vector<double>& x) const {
    const Profile p = apply(x);
    std::vector<double> r;
    r.reserve(anchors.size());
    for (const auto& a : anchors) {
      double model = 0.0;
      try {
        model = evaluate_anchor(a.id, p, seed);
      } catch (const std::exception&) {
        model = a.target + 1e3 * a.tolerance;
      }
      r.push_back((model - a.target) / a.tolerance);
    }
    return r;
  }
};

double cost(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

std::vector<double> levenberg_marquardt(const Problem& prob, std::vector<double> x) {
  const std::size_t n = x.size();
  const std::size_t m = prob.anchors.size();
  if (n == 0 || m == 0) return x;
  std::vector<double> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = std::log(params()[prob.active[i]].lo);
    hi[i] = std::log(params()[prob.active[i]].hi);
    x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
  auto r = prob.residuals(x);
  double c = cost(r);
  double lambda = 1e-3;
  for (int iter = 0; iter < 200 && c > 1e-24; ++iter) {
    Matrix jac(m, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const double h = 1e-6;
      auto xp = x;
      // step inwards at the upper bound
      xp[j] += (x[j] + h > hi[j]) ? -h : h;
      const double dx = xp[j] - x[j];
      const auto rp = prob.residuals(xp);
      for (std::size_t i = 0; i < m; ++i) jac[i][j] = (rp[i] - r[i]) / dx;
    }
    Matrix jtj(n, std::vector<double>(n, 0.0));
    std::vector<double> jtr(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t i = 0; i < m; ++i) jtr[a] -= jac[i][a] * r[i];
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < m; ++i) jtj[a][b] += jac[i][a] * jac[i][b];
      }
    }
    bool improved = false;
    while (lambda < 1e12) {
      Matrix damped = jtj;
      for (std::size_t a = 0; a < n; ++a) damped[a][a] += lambda * (jtj[a][a] + 1e-9);
      const auto step = solve(damped, jtr);
      auto xn = x;
      for (std::size_t a = 0; a < n; ++a) xn[a] = std::clamp(x[a] + step[a], lo[a], hi[a]);
      const auto rn = prob.residuals(xn);
      const double cn = cost(rn);
      if (cn < c) {
        const double gain = c - cn;
        x = xn;
        r = rn;
        c = cn;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = gain > 1e-15 * (1.0 + c);
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  return x;
}

struct StageFit {
  Profile profile;
  std::vector<AnchorResidual> residuals;
};

StageFit fit_stage_one(const Profile& start, const std::vector<Anchor>& anchors,
                       std::uint64_t seed) {
  Problem prob{start, anchors, {}, seed};
  if (!std::isfinite(prob.base.model.noise.corner_frequency)) {
    prob.base.model.noise.corner_frequency = 300e6;
  }
  if (prob.base.model.receiver.arm_responsivity_mismatch <= 0.0) {
    prob.base.model.receiver.arm_responsivity_mismatch = 0.01;
  }
  for (std::size_t i = 0; i < params().size(); ++i) {
    const auto& drivers = params()[i].drivers;
    const bool used = std::any_of(anchors.begin(), anchors.end(), [&](const Anchor& a) {
      return std::find(drivers.begin(), drivers.end(), a.id) != drivers.end();
    });
    if (used) prob.active.push_back(i);
  }
  std::vector<double> x;
  for (std::size_t i : prob.active) x.push_back(std::log(params()[i].ref(prob.base)));
  x = levenberg_marquardt(prob, x);

  StageFit fit{prob.apply(x), {}};
  fit.profile.model.linearity.reference_lo = kToneLo.value;
  fit.profile.model.linearity.reference_ceiling_dbm =
      evaluate_anchor(AnchorId::LinearCeiling, fit.profile, seed);
  for (const auto& a : anchors) {
    const double model = evaluate_anchor(a.id, fit.profile, seed);
    fit.residuals.push_back({a, model, model - a.target});
  }
  return fit;
}

double worst_normalized(const std::vector<AnchorResidual>& rs) {
  double w = 0.0;
  for (const auto& r : rs) w = std::max(w, std::abs(r.residual) / r.anchor.tolerance);
  return w;
}

}  // namespace

std::string_view anchor_name(AnchorId id) { return info(id).name; }

std::optional<AnchorId> anchor_from_name(std::string_view name) {
  for (const auto& a : kAnchors) {
    if (a.name == name) return a.id;
  }
  return std::nullopt;
}

std::vector<Anchor> default_anchors() {
  std::vector<Anchor> out;
  for (const auto& a : kAnchors) out.push_back({a.id, a.target, a.tolerance});
  return out;
}

std::vector<Anchor> read_anchor_file(const std::filesystem::path& path) {
  std::vector<Anchor> out;
  for (const auto& [key, value] : read_config_file(path)) {
    const auto id = anchor_from_name(key);
    if (!id) throw ConfigError(path.string() + ": unknown anchor '" + key + "'");
    const auto space = value.find_first_of(" \t");
    const double target = parse_quantity(value.substr(0, space), Dimension::None);
    double tol = info(*id).tolerance;
    if (space != std::string::npos) tol = parse_quantity(value.substr(space), Dimension::None);
    if (!(tol > 0.0)) throw ConfigError(path.string() + ": tolerance of '" + key + "' must be > 0");
    if (std::any_of(out.begin(), out.end(), [&](const Anchor& a) { return a.id == *id; })) {
      throw ConfigError(path.string() + ": duplicate anchor '" + key + "'");
    }
    out.push_back({*id, target, tol});
  }
  if (out.empty()) throw ConfigError(path.string() + ": no anchors");
  return out;
}

double evaluate_anchor(AnchorId id, const Profile& profile, std::uint64_t seed) {
  const DeviceModel& m = profile.model;
  switch (id) {
    case AnchorId::Cmrr:
      return cmrr_db(m.receiver, kAnchorFreq);
    case AnchorId::Clearance: {
      const std::array<double, 1> f{kAnchorFreq};
      return clearance_spectrum(kQcnrLo, m.receiver, m.noise, f)[0];
    }
    case AnchorId::QcnrFrequency:
      return model_frequency_domain_qcnr(kIntegratedLo, m.receiver, m.noise).qcnr_db;
    case AnchorId::QcnrTime:
      return expected_time_domain_qcnr(kQcnrLo, m.receiver, m.noise, m.capture).qcnr_db;
    case AnchorId::LinearCeiling:
      return compression_ceiling(kToneLo, m.receiver, m.linearity).value;
    case AnchorId::LinearFloor:
      return expected_noise_floor(kToneLo, m.receiver, m.noise, m.linearity).value;
    case AnchorId::QpskSensitivity:
      return sensitivity_search(profile.qpsk, m, seed).sensitivity.value;
  }
  throw InvalidArgument("evaluate_anchor: unknown anchor");
}

CalibrationResult calibrate(const Profile& start, std::span<const Anchor> anchors,
                            std::uint64_t seed) {
  start.validate();
  std::vector<Anchor> stage_one;
  std::optional<Anchor> qpsk;
  for (const auto& a : anchors) {
    if (!(a.tolerance > 0.0)) throw InvalidArgument("calibrate: anchor tolerance must be > 0");
    if (a.id == AnchorId::QpskSensitivity) {
      qpsk = a;
    } else {
      stage_one.push_back(a);
    }
  }

  StageFit fit = fit_stage_one(start, stage_one, seed);
  CalibrationResult result{fit.profile, fit.residuals, true, std::nullopt};

  if (qpsk) {
    // Sensitivity moves dB for dB with the penalty; one correction and one
    // check run suffice.
    Profile p = result.profile;
    p.qpsk.implementation_penalty_db = 0.0;
    const double s0 = evaluate_anchor(AnchorId::QpskSensitivity, p, seed);
    p.qpsk.implementation_penalty_db = std::max(0.0, qpsk->target - s0);
    const double s1 = p.qpsk.implementation_penalty_db > 0.0
                          ? evaluate_anchor(AnchorId::QpskSensitivity, p, seed)
                          : s0;
    result.profile = p;
    result.residuals.push_back({*qpsk, s1, s1 - qpsk->target});
  }

  result.ok = std::all_of(result.residuals.begin(), result.residuals.end(),
                          [](const AnchorResidual& r) { return r.within(); });
  if (result.ok) return result;

  if (qpsk && !result.residuals.back().within()) {
    result.worst = AnchorId::QpskSensitivity;
    return result;
  }
  // leave-one-out: the outlier is the anchor whose removal leaves the best fit
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stage_one.size(); ++i) {
    std::vector<Anchor> rest = stage_one;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    const double w = rest.empty() ? 0.0 : worst_normalized(fit_stage_one(start, rest, seed).residuals);
    const double own = std::abs(fit.residuals[i].residual) / stage_one[i].tolerance;
    const double score = w - 1e-6 * own;
    if (score < best) {
      best = score;
      result.worst = stage_one[i].id;
    }
  }
  return result;
}

}  // namespace bhd
