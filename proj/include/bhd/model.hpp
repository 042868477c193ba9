// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bhd/linearity.hpp"
#include "bhd/noise.hpp"
#include "bhd/receiver.hpp"

namespace bhd {

/// Everything that describes the simulated device: the physical parameter set
/// plus the fitted noise shape, capture settings and limiter constants.
struct DeviceModel {
  ReceiverParams receiver;
  NoiseShape noise;
  TimeDomainCapture capture;
  LinearityCalibration linearity;

  void validate() const {
    receiver.validate();
    noise.validate();
    capture.validate();
    linearity.validate();
  }
};

}  // namespace bhd
