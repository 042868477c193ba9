#include <doctest.h>

#include <cmath>
#include <random>

#include "bhd/error.hpp"
#include "bhd/keyrate.hpp"
#include "oracles.hpp"
#include "symplectic_oracle.hpp"

using namespace bhd;

namespace {

LinkParams at(double km, double zeta) {
  LinkParams l;
  l.distance = km;
  l.channel_excess = zeta;
  return l;
}

}  // namespace

TEST_CASE("transmittance and referred noise") {
  LinkParams lossless;
  lossless.detection_loss = 0.0;
  CHECK(effective_transmittance(lossless) == 1.0);
  CHECK(effective_transmittance(at(10.0, 0.0)) == approx(std::pow(10.0, -0.35)).epsilon(1e-14));
  CHECK(effective_transmittance(at(29.8, 0.0)) == approx(std::pow(10.0, -0.8054)).epsilon(1e-14));
  // published figures are rounded
  CHECK(effective_transmittance(at(10.0, 0.0)) == approx(0.4469).epsilon(0.01));
  CHECK(effective_transmittance(at(29.8, 0.0)) == approx(0.1575).epsilon(0.01));

  LinkParams quiet = at(10.0, 0.0);
  quiet.receiver_excess = 0.0;
  CHECK(total_excess_noise_at_channel_input(quiet) == 0.0);
  CHECK(total_excess_noise_at_channel_input(at(10.0, 0.04)) == approx(0.0736).epsilon(1e-3));
  // 0.23 dB/km over 13.088 km halves the channel transmittance
  const double halving = 10.0 * std::log10(2.0) / 0.23;
  CHECK(total_excess_noise_at_channel_input(at(10.0 + halving, 0.04)) ==
        approx(2.0 * total_excess_noise_at_channel_input(at(10.0, 0.04))).epsilon(1e-12));

  LinkParams total = at(10.0, 0.04);
  total.noise_reference = NoiseReference::Total;
  CHECK(total_excess_noise_at_channel_input(total) == approx(0.04336 / 0.4469).epsilon(1e-3));
}

TEST_CASE("Holevo function") {
  CHECK(holevo_g(0.0) == 0.0);
  CHECK(holevo_g(-1.0) == 0.0);
  CHECK(holevo_g(1.0) == approx(2.0));
  double prev = 0.0;
  for (double x = 1e-6; x < 1e3; x *= 1.7) {
    const double g = holevo_g(x);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("closed-form eigenvalues match the covariance oracle") {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> ut(0.05, 1.0), uxi(0.0, 0.3), ulog(std::log(0.1), std::log(100.0));
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double t = ut(rng);
    const double xi = uxi(rng);
    const double v_a = std::exp(ulog(rng));
    const auto nu = symplectic_eigenvalues(v_a, t, xi);
    const auto ref = oracle::symplectic_eigenvalues(v_a, t, xi);
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(nu[k] - ref[k]) / ref[k]);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("identity channel leaks nothing") {
  for (double v_a : {0.1, 1.0, 10.0, 100.0}) {
    const auto r = key_rate(v_a, 1.0, 0.0, 0.97, 250e6);
    CHECK(std::abs(r.chi_be) < 1e-9);
    CHECK(r.i_ab == approx(0.5 * std::log2(1.0 + v_a)).epsilon(1e-12));
    CHECK(r.rate == approx(0.97 * r.i_ab).epsilon(1e-9));
  }
}

TEST_CASE("rate monotonicity") {
  double prev = 1e9;
  for (double xi = 0.0; xi <= 0.2; xi += 0.02) {
    const double r = key_rate(5.0, 0.4, xi, 0.97, 1.0).rate;
    CHECK(r < prev);
    prev = r;
  }
  prev = -1e9;
  for (double beta = 0.9; beta <= 1.0; beta += 0.02) {
    const double r = key_rate(5.0, 0.4, 0.05, beta, 1.0).rate;
    CHECK(r > prev);
    prev = r;
  }
  const auto r = key_rate(5.0, 0.4, 0.05, 0.97, 250e6);
  CHECK(r.i_ab >= 0.0);
  CHECK(r.chi_be >= 0.0);
  CHECK(r.skr == approx(r.rate * 250e6));
}

TEST_CASE("optimizer") {
  const LinkParams link = at(10.0, 0.04);
  const auto best = optimize_modulation_variance(link);
  CHECK(best.feasible);
  for (int i = 0; i < 200; ++i) {
    const double v_a = std::exp(std::log(0.01) + (std::log(1e3) - std::log(0.01)) * i / 199.0);
    CHECK(best.rate >= key_rate(v_a, link).rate);
  }
  CHECK(best.skr == approx(43e6).epsilon(0.25));
  CHECK(optimize_modulation_variance(at(0.1, 0.04)).skr > 100e6);

  const auto dead = optimize_modulation_variance(at(200.0, 0.04));
  CHECK_FALSE(dead.feasible);
  CHECK(dead.skr == 0.0);
}

TEST_CASE("distance sweeps and reach") {
  const auto km = oracle::linspace(0.0, 40.0, 81);
  std::vector<std::vector<double>> curves;
  for (double zeta : {0.0, 0.01, 0.02, 0.03, 0.04}) {
    const auto rows = skr_vs_distance(at(0.0, zeta), km);
    std::vector<double> skr;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].first == km[i]);
      if (i > 0) CHECK(rows[i].second.skr <= skr.back());
      skr.push_back(rows[i].second.skr);
    }
    curves.push_back(skr);
  }
  for (std::size_t c = 1; c < curves.size(); ++c) {
    for (std::size_t i = 0; i < km.size(); ++i) CHECK(curves[0][i] >= curves[c][i]);
  }

  CHECK(max_reach(at(0.0, 0.02), 1e6) == approx(29.8).epsilon(2.0 / 29.8));
  double prev = 1e9;
  for (double zeta : {0.0, 0.01, 0.02, 0.03, 0.04}) {
    const double reach = max_reach(at(0.0, zeta), 1e6);
    CHECK(reach < prev);
    prev = reach;
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(max_reach(at(0.0, 0.02), 1e12), Infeasible);
  CHECK_THROWS_AS(max_reach(at(0.0, 0.02), 0.0), InvalidArgument);
  const std::vector<double> descending{5.0, 1.0};
  CHECK_THROWS_AS(skr_vs_distance(at(0.0, 0.0), descending), InvalidArgument);
  CHECK_THROWS_AS(symplectic_eigenvalues(1.0, 1.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(symplectic_eigenvalues(0.0, 0.5, 0.0), InvalidArgument);
  // negative excess noise is not a physical covariance
  CHECK_THROWS_AS(symplectic_eigenvalues(10.0, 0.5, -0.5), CovarianceError);
  CHECK_THROWS_AS(key_rate(10.0, 1.0, -0.2, 0.97, 1.0), CovarianceError);
  LinkParams bad = at(1.0, 0.0);
  bad.beta = 1.2;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("qkd.beta"), InvalidArgument);
  bad = at(-1.0, 0.0);
  CHECK_THROWS_AS(key_rate(1.0, bad), InvalidArgument);
}
