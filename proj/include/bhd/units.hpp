// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace bhd {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPi = 3.14159265358979323846;

struct PowerWatts;

/// Optical power in dBm. Kept distinct from PowerWatts so that the two
/// scales cannot be mixed silently.
struct PowerDbm {
  double value = 0.0;

  constexpr PowerDbm() = default;
  constexpr explicit PowerDbm(double dbm) : value(dbm) {}

  PowerWatts watts() const;
  auto operator<=>(const PowerDbm&) const = default;
};

struct PowerWatts {
  double value = 0.0;

  constexpr PowerWatts() = default;
  constexpr explicit PowerWatts(double w) : value(w) {}

  PowerDbm dbm() const;
  auto operator<=>(const PowerWatts&) const = default;
};

inline PowerWatts dbm_to_watts(PowerDbm p) {
  return PowerWatts{1e-3 * std::pow(10.0, p.value / 10.0)};
}

/// 0 W maps to -inf dBm.
inline PowerDbm watts_to_dbm(PowerWatts p) {
  if (p.value <= 0.0) return PowerDbm{-std::numeric_limits<double>::infinity()};
  return PowerDbm{10.0 * std::log10(p.value / 1e-3)};
}

inline PowerWatts PowerDbm::watts() const { return dbm_to_watts(*this); }
inline PowerDbm PowerWatts::dbm() const { return watts_to_dbm(*this); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace bhd
