// SPDX-License-Identifier: Apache-2.0
#include "bhd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bhd/error.hpp"

namespace bhd {

namespace {

constexpr double kNuTolerance = 1e-9;
constexpr double kVaMin = 0.01;
constexpr double kVaMax = 1e3;

double checked_sqrt(double x, const char* what) {
  if (x < 0.0) {
    if (x > -kNuTolerance) return 0.0;
    throw CovarianceError(std::string("key_rate: negative radicand in ") + what);
  }
  return std::sqrt(x);
}

std::pair<double, double> quadratic_pair(double sum, double product, const char* what) {
  const double disc = checked_sqrt(sum * sum - 4.0 * product, what);
  const double big = 0.5 * (sum + disc);
  // smaller root from the product, free of cancellation
  const double small = big > 0.0 ? product / big : 0.0;
  return {checked_sqrt(big, what), checked_sqrt(small, what)};
}

}  // namespace

void LinkParams::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("qkd." + what); };
  if (!(distance >= 0.0)) fail("distance: must be >= 0");
  if (!(fiber_loss >= 0.0)) fail("fiber_loss: must be >= 0");
  if (!(detection_loss >= 0.0)) fail("detection_loss: must be >= 0");
  if (!(channel_excess >= 0.0)) fail("zeta: must be >= 0");
  if (!(receiver_excess >= 0.0)) fail("receiver_excess: must be >= 0");
  if (!(beta > 0.0 && beta <= 1.0)) fail("beta: must be in (0, 1]");
  if (!(symbol_rate > 0.0)) fail("symbol_rate: must be > 0");
}

double effective_transmittance(const LinkParams& link) {
  return std::pow(10.0, -(link.fiber_loss * link.distance + link.detection_loss) / 10.0);
}

double channel_transmittance(const LinkParams& link) {
  return std::pow(10.0, -link.fiber_loss * link.distance / 10.0);
}

double total_excess_noise_at_channel_input(const LinkParams& link) {
  const double t = link.noise_reference == NoiseReference::Fiber ? channel_transmittance(link)
                                                                  : effective_transmittance(link);
  return (link.channel_excess + link.receiver_excess) / t;
}

double holevo_g(double x) {
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

std::array<double, 4> symplectic_eigenvalues(double v_a, double t, double xi) {
  if (!(v_a > 0.0)) throw InvalidArgument("key_rate: v_a must be > 0");
  if (!(t > 0.0 && t <= 1.0)) throw InvalidArgument("key_rate: transmittance must be in (0, 1]");
  if (std::isnan(xi)) throw InvalidArgument("key_rate: excess noise is NaN");
  const double v = v_a + 1.0;
  const double chi = 1.0 / t - 1.0 + xi;
  const double a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi) * (v + chi);
  const double b = t * t * (v * chi + 1.0) * (v * chi + 1.0);
  const double sqrt_b = std::sqrt(b);
  const double c = (v * sqrt_b + t * (v + chi)) / (t * (v + chi));
  const double d = sqrt_b * v / (t * (v + chi));
  const auto [nu1, nu2] = quadratic_pair(a, b, "nu1/nu2");
  const auto [nu3, nu4] = quadratic_pair(c, d, "nu3/nu4");
  std::array<double, 4> nu{nu1, nu2, nu3, nu4};
  for (double n : nu) {
    if (n < 1.0 - kNuTolerance) {
      throw CovarianceError("key_rate: symplectic eigenvalue below 1 (" + std::to_string(n) + ")");
    }
  }
  return nu;
}

KeyRateResult key_rate(double v_a, double t, double xi, double beta, double symbol_rate) {
  const auto nu = symplectic_eigenvalues(v_a, t, xi);
  const double v = v_a + 1.0;
  const double chi = 1.0 / t - 1.0 + xi;
  KeyRateResult r;
  r.v_a = v_a;
  r.i_ab = 0.5 * std::log2((v + chi) / (1.0 + chi));
  auto gn = [](double n) { return holevo_g((n - 1.0) / 2.0); };
  r.chi_be = std::max(0.0, gn(nu[0]) + gn(nu[1]) - gn(nu[2]) - gn(nu[3]));
  r.rate = beta * r.i_ab - r.chi_be;
  r.skr = r.rate * symbol_rate;
  return r;
}

KeyRateResult key_rate(double v_a, const LinkParams& link) {
  link.validate();
  return key_rate(v_a, effective_transmittance(link), total_excess_noise_at_channel_input(link),
                  link.beta, link.symbol_rate);
}

KeyRateResult optimize_modulation_variance(const LinkParams& link) {
  link.validate();
  const double t = effective_transmittance(link);
  const double xi = total_excess_noise_at_channel_input(link);
  auto eval = [&](double log_va) {
    return key_rate(std::exp(log_va), t, xi, link.beta, link.symbol_rate);
  };

  constexpr int kCoarse = 200;
  const double lo = std::log(kVaMin);
  const double hi = std::log(kVaMax);
  const double step = (hi - lo) / (kCoarse - 1);
  int best_i = 0;
  KeyRateResult best = eval(lo);
  for (int i = 1; i < kCoarse; ++i) {
    KeyRateResult r = eval(lo + step * i);
    if (r.rate > best.rate) {
      best = r;
      best_i = i;
    }
  }

  // golden section on log(v_a) inside the neighbouring grid cells
  double a = lo + step * std::max(0, best_i - 1);
  double b = lo + step * std::min(kCoarse - 1, best_i + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  KeyRateResult f1 = eval(x1);
  KeyRateResult f2 = eval(x2);
  // relative width in v_a: exp(b - a) - 1
  while (std::expm1(b - a) > 1e-4) {
    if (f1.rate >= f2.rate) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }
  for (const auto* r : {&f1, &f2}) {
    if (r->rate > best.rate) best = *r;
  }

  if (best.rate <= 0.0) {
    best.rate = 0.0;
    best.skr = 0.0;
    best.feasible = false;
  }
  return best;
}

std::vector<std::pair<double, KeyRateResult>> skr_vs_distance(const LinkParams& link,
                                                              std::span<const double> distances) {
  for (std::size_t i = 1; i < distances.size(); ++i) {
    if (!(distances[i] > distances[i - 1])) {
      throw InvalidArgument("skr_vs_distance: distances must be strictly ascending");
    }
  }
  std::vector<std::pair<double, KeyRateResult>> out;
  out.reserve(distances.size());
  LinkParams at = link;
  for (double d : distances) {
    at.distance = d;
    out.emplace_back(d, optimize_modulation_variance(at));
  }
  return out;
}

double max_reach(const LinkParams& link, double skr_floor) {
  if (!(skr_floor > 0.0)) throw InvalidArgument("max_reach: skr_floor must be > 0");
  LinkParams at = link;
  auto skr_at = [&](double d) {
    at.distance = d;
    return optimize_modulation_variance(at).skr;
  };
  double lo = link.distance;
  if (skr_at(lo) < skr_floor) {
    throw Infeasible("max_reach: SKR floor not reached even at the start distance");
  }
  double hi = std::max(1.0, lo + 1.0);
  while (skr_at(hi) >= skr_floor) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e5) throw Infeasible("max_reach: SKR floor held beyond 100000 km");
  }
  while (hi - lo > 0.05) {
    const double mid = 0.5 * (lo + hi);
    if (skr_at(mid) >= skr_floor) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bhd
