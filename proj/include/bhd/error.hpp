// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace bhd {

/// Bad input to an operation (empty grid, non-positive capacitance, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Total noise variance below the electronic variance: the two inputs are
/// not a lit/dark pair of the same receiver.
class NegativeClearance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DemodulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Gaussian state with a symplectic eigenvalue below the vacuum level.
class CovarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bhd
