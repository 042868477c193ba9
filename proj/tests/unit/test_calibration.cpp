#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "bhd/calibration.hpp"
#include "bhd/error.hpp"

using namespace bhd;

namespace {

std::vector<Anchor> without_qpsk() {
  auto a = default_anchors();
  a.erase(std::remove_if(a.begin(), a.end(), [](const Anchor& x) { return x.id == AnchorId::QpskSensitivity; }),
          a.end());
  return a;
}

}  // namespace

TEST_CASE("anchor names") {
  for (const auto& a : default_anchors()) {
    CHECK(anchor_from_name(anchor_name(a.id)) == a.id);
    CHECK(a.tolerance > 0.0);
  }
  CHECK_FALSE(anchor_from_name("nonsense").has_value());
}

TEST_CASE("anchor files") {
  const auto path = std::filesystem::temp_directory_path() / "bhd_anchors.conf";
  std::ofstream(path) << "# targets\ncmrr_1ghz = 38\nlinear_floor = -70 0.5\n";
  const auto anchors = read_anchor_file(path);
  REQUIRE(anchors.size() == 2);
  CHECK(anchors[0].id == AnchorId::Cmrr);
  CHECK(anchors[0].target == 38.0);
  CHECK(anchors[0].tolerance == 1.0);
  CHECK(anchors[1].tolerance == 0.5);

  std::ofstream(path) << "bogus_anchor = 3\n";
  CHECK_THROWS_WITH_AS(read_anchor_file(path), doctest::Contains("bogus_anchor"), ConfigError);
  std::ofstream(path) << "cmrr_1ghz = 38 -1\n";
  CHECK_THROWS_AS(read_anchor_file(path), ConfigError);
}

TEST_CASE("the shipped profile sits on the anchors") {
  const Profile p = calibrated_profile();
  for (const auto& a : without_qpsk()) {
    CAPTURE(anchor_name(a.id));
    CHECK(std::abs(evaluate_anchor(a.id, p, 42) - a.target) <= a.tolerance);
  }
}

TEST_CASE("fit from the uncalibrated defaults") {
  const auto anchors = without_qpsk();
  const auto r = calibrate(default_profile(), anchors, 42);
  CHECK(r.ok);
  CHECK_FALSE(r.worst.has_value());
  REQUIRE(r.residuals.size() == anchors.size());
  for (const auto& res : r.residuals) {
    CAPTURE(anchor_name(res.anchor.id));
    CHECK(res.within());
    CHECK(std::abs(res.residual) < 1e-3);
    CHECK(evaluate_anchor(res.anchor.id, r.profile, 42) == doctest::Approx(res.model).epsilon(1e-9));
  }
  CHECK_NOTHROW(r.profile.validate());
}

TEST_CASE("a single anchor is met exactly") {
  const std::vector<Anchor> one{{AnchorId::Cmrr, 35.0, 1.0}};
  const auto r = calibrate(default_profile(), one, 42);
  CHECK(r.ok);
  REQUIRE(r.residuals.size() == 1);
  CHECK(std::abs(r.residuals[0].residual) < 1e-6);
  CHECK(cmrr_db(r.profile.model.receiver, 1e9) == doctest::Approx(35.0).epsilon(1e-6));
}

TEST_CASE("an unreachable anchor is named") {
  auto anchors = without_qpsk();
  for (auto& a : anchors) {
    if (a.id == AnchorId::QcnrTime) a.target += 10.0;
  }
  const auto r = calibrate(default_profile(), anchors, 42);
  CHECK_FALSE(r.ok);
  REQUIRE(r.worst.has_value());
  CHECK(*r.worst == AnchorId::QcnrTime);
}

TEST_CASE("bad anchors") {
  const std::vector<Anchor> bad{{AnchorId::Cmrr, 35.0, 0.0}};
  CHECK_THROWS_AS(calibrate(default_profile(), bad, 42), InvalidArgument);
}
