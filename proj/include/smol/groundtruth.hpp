#pragma once

#include <cstdint>

#include "smol/soilchan.hpp"

namespace smol::groundtruth {

/// Emulated handheld TDR probe used as the moisture reference.
///
/// The probe's raw output is the true VWC fraction plus a per-spot error drawn
/// uniformly from [-error_bound, +error_bound]. A two-point calibration maps raw
/// output linearly to percent, with `cal_air` reading 0 % and `cal_water` 100 %.
struct TdrSensor {
  double error_bound = 0.03;  // absolute, VWC fraction
  int spots = 10;
  double cal_air = 0.0;
  double cal_water = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// Raw output mapped through the two-point calibration.
  double to_percent(double raw) const;
};

/// Noise-free raw response of the probe to a soil state.
double probe_response(const soilchan::SoilState& state);

/// Throws ValidationError unless water_raw > air_raw.
TdrSensor calibrate_sensor(TdrSensor sensor, double air_raw, double water_raw);

/// Mean of `spots` noisy readings in percent, clamped to [0, 100].
double read_vwc(const TdrSensor& sensor, const soilchan::SoilState& true_state);

/// A single spot reading (no averaging, no clamping); exposed for bound checks.
double read_spot(const TdrSensor& sensor, const soilchan::SoilState& true_state, int spot);

}  // namespace smol::groundtruth
