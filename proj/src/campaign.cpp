#include "smol/cli/campaign.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "smol/errors.hpp"
#include "smol/rng.hpp"

namespace smol::cli {

using nlohmann::json;

namespace {

// Purposes of per-cell derived seeds.
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kTdrStream = 2;

}  // namespace

CampaignConfig CampaignConfig::lab_default() {
  CampaignConfig c;
  c.scenarios = {{"lab_h0", 15.0, 0.0}, {"lab_h195", 15.0, 195.0}, {"lab_h265", 15.0, 265.0}};
  c.vwc_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40};
  c.power_plan = sweepproto::PowerPlan().levels();
  return c;
}

void CampaignConfig::validate() const {
  if (scenarios.empty()) throw ValidationError("campaign needs at least one scenario");
  if (vwc_grid.empty()) throw ValidationError("campaign vwc grid is empty");
  for (const auto& s : scenarios) {
    if (s.label.empty() || s.label.find_first_of(",\"\r\n") != std::string::npos) {
      throw ValidationError("scenario label '" + s.label + "' is empty or contains a delimiter");
    }
    soilchan::LinkGeometry{s.burial_depth_cm, s.receiver_height_cm, frequency_hz}.validate();
    if (s.burial_depth_cm == 0.0 && s.receiver_height_cm == 0.0) {
      throw ValidationError("scenario '" + s.label + "' has zero link distance");
    }
  }
  for (const double v : vwc_grid) {
    if (!(v >= 0.0 && v <= porosity)) {
      throw ValidationError("vwc grid value " + std::to_string(v) + " exceeds porosity " +
                            std::to_string(porosity));
    }
  }
  soilchan::SoilState{0.0, porosity, solid_permittivity}.validate();
  [[maybe_unused]] const sweepproto::PowerPlan plan(power_plan);
  noise.validate();
  tdr.validate();
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw ValidationError("drop probability must lie in [0, 1]");
  }
}

std::string config_to_json(const CampaignConfig& c) {
  json j;
  j["format_version"] = kConfigFormatVersion;
  j["scenarios"] = json::array();
  for (const auto& s : c.scenarios) {
    j["scenarios"].push_back({{"label", s.label},
                              {"burial_depth_cm", s.burial_depth_cm},
                              {"receiver_height_cm", s.receiver_height_cm}});
  }
  j["vwc_grid"] = c.vwc_grid;
  j["porosity"] = c.porosity;
  j["solid_permittivity"] = c.solid_permittivity;
  j["frequency_hz"] = c.frequency_hz;
  j["tx_antenna_gain_db"] = c.tx_antenna_gain_db;
  j["rx_antenna_gain_db"] = c.rx_antenna_gain_db;
  j["power_plan"] = c.power_plan;
  j["noise"] = {{"rssi_sigma_db", c.noise.rssi_sigma_db}, {"quantize", c.noise.quantize}};
  j["tdr"] = {{"error_bound", c.tdr.error_bound}, {"spots", c.tdr.spots}};
  j["drop_probability"] = c.drop_probability;
  j["wrap_23_to_5"] = c.wrap_23_to_5;
  j["device_id"] = c.device_id;
  j["seed"] = c.seed;
  j["epoch"] = c.epoch;
  return j.dump(2) + "\n";
}

CampaignConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format_version", 0) != kConfigFormatVersion) {
      throw ValidationError("unsupported config format_version (expected " +
                            std::to_string(kConfigFormatVersion) + ")");
    }
    // Missing keys keep the lab defaults.
    CampaignConfig c = CampaignConfig::lab_default();
    if (j.contains("scenarios")) {
      c.scenarios.clear();
      for (const auto& s : j.at("scenarios")) {
        c.scenarios.push_back({s.at("label").get<std::string>(),
                               s.value("burial_depth_cm", 15.0),
                               s.value("receiver_height_cm", 0.0)});
      }
    }
    c.vwc_grid = j.value("vwc_grid", c.vwc_grid);
    c.porosity = j.value("porosity", c.porosity);
    c.solid_permittivity = j.value("solid_permittivity", c.solid_permittivity);
    c.frequency_hz = j.value("frequency_hz", c.frequency_hz);
    c.tx_antenna_gain_db = j.value("tx_antenna_gain_db", c.tx_antenna_gain_db);
    c.rx_antenna_gain_db = j.value("rx_antenna_gain_db", c.rx_antenna_gain_db);
    c.power_plan = j.value("power_plan", c.power_plan);
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      c.noise.rssi_sigma_db = n.value("rssi_sigma_db", c.noise.rssi_sigma_db);
      c.noise.quantize = n.value("quantize", c.noise.quantize);
    }
    if (j.contains("tdr")) {
      const auto& t = j.at("tdr");
      c.tdr.error_bound = t.value("error_bound", c.tdr.error_bound);
      c.tdr.spots = t.value("spots", c.tdr.spots);
    }
    c.drop_probability = j.value("drop_probability", c.drop_probability);
    c.wrap_23_to_5 = j.value("wrap_23_to_5", c.wrap_23_to_5);
    c.device_id = j.value("device_id", c.device_id);
    c.seed = j.value("seed", c.seed);
    c.epoch = j.value("epoch", c.epoch);
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const CampaignConfig& config, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << config_to_json(config);
}

CampaignResult simulate_campaign(const CampaignConfig& config) {
  config.validate();
  const sweepproto::PowerPlan plan(config.power_plan);

  groundtruth::TdrSensor sensor = groundtruth::calibrate_sensor(
      config.tdr, groundtruth::probe_response(soilchan::SoilState::pure_air()),
      groundtruth::probe_response(soilchan::SoilState::pure_water()));

  CampaignResult result;
  std::uint64_t cell = 0;
  for (const auto& scenario : config.scenarios) {
    const soilchan::LinkGeometry geom{scenario.burial_depth_cm, scenario.receiver_height_cm,
                                      config.frequency_hz, config.tx_antenna_gain_db,
                                      config.rx_antenna_gain_db};
    for (const double vwc : config.vwc_grid) {
      const std::uint64_t cell_seed = derive_seed(config.seed, cell);
      const soilchan::SoilState soil{vwc, config.porosity, config.solid_permittivity};

      sensor.seed = derive_seed(cell_seed, kTdrStream);
      const double truth = groundtruth::read_vwc(sensor, soil);

      sweepproto::SimulatedLink link{
          .soil = soil,
          .geometry = geom,
          .noise = config.noise,
          .drop_probability = config.drop_probability,
          .wrap_23_to_5 = config.wrap_23_to_5,
          .tag = {scenario.label, scenario.receiver_height_cm, scenario.burial_depth_cm,
                  config.epoch + static_cast<std::int64_t>(cell), truth},
      };
      link.noise.seed = derive_seed(cell_seed, kNoiseStream);
      auto sweep = sweepproto::run_sweep(config.device_id, plan, link);
      result.dropped += sweep.dropped;
      result.rejected += sweep.rejected;
      for (auto& m : sweep.measurements) result.measurements.push_back(std::move(m));
      ++cell;
    }
  }
  return result;
}

}  // namespace smol::cli
