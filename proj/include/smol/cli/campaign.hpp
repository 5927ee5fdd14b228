#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smol/groundtruth.hpp"
#include "smol/soilchan.hpp"
#include "smol/sweepproto.hpp"

namespace smol::cli {

inline constexpr int kConfigFormatVersion = 1;

struct ScenarioPreset {
  std::string label;
  double burial_depth_cm = 15.0;
  double receiver_height_cm = 0.0;
};

/// A simulated measurement campaign: every scenario is swept once at every
/// moisture level of the grid.
struct CampaignConfig {
  std::vector<ScenarioPreset> scenarios;
  std::vector<double> vwc_grid;  // fractions
  double porosity = 0.45;
  double solid_permittivity = 5.0;
  double frequency_hz = soilchan::kDefaultFrequencyHz;
  double tx_antenna_gain_db = 0.0;
  double rx_antenna_gain_db = 0.0;
  std::vector<int> power_plan;
  soilchan::NoiseModel noise;  // seed is derived per sweep from `seed`
  groundtruth::TdrSensor tdr;  // likewise
  double drop_probability = 0.0;
  bool wrap_23_to_5 = false;
  std::uint16_t device_id = 1;
  std::uint64_t seed = 42;
  std::int64_t epoch = 1'600'000'000;  // timestamp of the first sweep

  /// Lab setup: transmitter 15 cm deep, receiver at 0, 195 and 265 cm,
  /// 915 MHz, VWC 0.05..0.40 in steps of 0.05 at porosity 0.45.
  static CampaignConfig lab_default();

  /// Throws ValidationError; called before any output is produced.
  void validate() const;
};

CampaignConfig load_config(const std::filesystem::path& path);
void save_config(const CampaignConfig& config, const std::filesystem::path& path);
std::string config_to_json(const CampaignConfig& config);
CampaignConfig config_from_json(const std::string& text);

struct CampaignResult {
  std::vector<sweepproto::Measurement> measurements;
  std::size_t dropped = 0;
  std::size_t rejected = 0;
};

/// Runs one TDR reading and one power sweep per (scenario, vwc) cell. Logged
/// ground truth is the TDR reading, not the true VWC.
CampaignResult simulate_campaign(const CampaignConfig& config);

}  // namespace smol::cli
