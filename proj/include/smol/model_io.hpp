#pragma once

#include <filesystem>
#include <string>

#include "smol/calibrate.hpp"

namespace smol::calibrate {

inline constexpr const char* kModelFormat = "smol-model";
inline constexpr int kModelFormatVersion = 1;

/// Self-describing JSON: format tag and version, the model spec, feature
/// mode and names, training metadata, then the fitted parameters.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace smol::calibrate
