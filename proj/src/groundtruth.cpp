#include "smol/groundtruth.hpp"

#include <algorithm>
#include <string>

#include "smol/errors.hpp"
#include "smol/rng.hpp"

namespace smol::groundtruth {

void TdrSensor::validate() const {
  if (!(error_bound >= 0.0)) throw ValidationError("TDR error bound must be >= 0");
  if (spots < 1) throw ValidationError("TDR reading needs at least one spot");
  if (!(cal_water > cal_air)) throw ValidationError("TDR calibration requires water > air");
}

double TdrSensor::to_percent(double raw) const {
  return 100.0 * (raw - cal_air) / (cal_water - cal_air);
}

double probe_response(const soilchan::SoilState& state) { return state.vwc; }

TdrSensor calibrate_sensor(TdrSensor sensor, double air_raw, double water_raw) {
  if (!(water_raw > air_raw)) {
    throw ValidationError("TDR calibration: water reading " + std::to_string(water_raw) +
                          " must exceed air reading " + std::to_string(air_raw));
  }
  sensor.cal_air = air_raw;
  sensor.cal_water = water_raw;
  return sensor;
}

double read_spot(const TdrSensor& sensor, const soilchan::SoilState& true_state, int spot) {
  sensor.validate();
  Rng rng(derive_seed(sensor.seed, static_cast<std::uint64_t>(spot)));
  const double raw =
      probe_response(true_state) + rng.uniform(-sensor.error_bound, sensor.error_bound);
  return sensor.to_percent(raw);
}

double read_vwc(const TdrSensor& sensor, const soilchan::SoilState& true_state) {
  sensor.validate();
  double sum = 0.0;
  for (int i = 0; i < sensor.spots; ++i) {
    sum += read_spot(sensor, true_state, i);
  }
  return std::clamp(sum / sensor.spots, 0.0, 100.0);
}

}  // namespace smol::groundtruth
