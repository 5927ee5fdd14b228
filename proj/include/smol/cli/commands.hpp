#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smol/calibrate.hpp"
#include "smol/cli/campaign.hpp"

namespace smol::cli {

/// Exit codes of the `smol` executable.
enum ExitCode : int { kOk = 0, kValidation = 2, kIo = 3, kNumerical = 4 };

/// Maps the in-flight exception to an exit code; call inside a catch block.
int exit_code_for_current_exception();

CampaignResult cmd_simulate(const CampaignConfig& config, const std::filesystem::path& log_out);

struct TrainOptions {
  calibrate::ModelSpec spec;
  calibrate::FeatureMode mode = calibrate::FeatureMode::AllTx;
  calibrate::SplitConfig split;
};

struct TrainResult {
  calibrate::TrainedModel model;
  calibrate::Evaluation evaluation;
};

TrainResult cmd_train(const std::filesystem::path& log, const TrainOptions& options,
                      const std::filesystem::path& model_out);

/// Writes the input columns plus vwc_pred_pct for every row the model can
/// score. Returns the number of predictions.
std::size_t cmd_predict(const std::filesystem::path& model_path, const std::filesystem::path& log,
                        const std::filesystem::path& predictions_out);

struct CurvePoint {
  std::string scenario;
  double height_cm = 0.0;
  double vwc_truth_pct = 0.0;
  double mean_rssi_dbm = 0.0;
};

/// Mean RSSI at `median_power_dbm` for each (scenario, height, ground-truth
/// reading) group, ordered by scenario appearance then ascending VWC.
std::vector<CurvePoint> median_power_curves(const std::vector<sweepproto::Measurement>& log,
                                            int median_power_dbm);

inline constexpr const char* kCurveHeader = "scenario,height_cm,vwc_truth_pct,mean_rssi_dbm";

struct ReportOptions {
  calibrate::SplitConfig split;
  std::uint64_t model_seed = 0;
  std::filesystem::path table_csv;   // optional
  std::filesystem::path curves_dir;  // optional; one CSV per height
};

struct ReportResult {
  std::vector<calibrate::ComparisonRow> rows;
  std::string table_text;
  std::vector<CurvePoint> curves;
  std::vector<std::filesystem::path> curve_files;
};

ReportResult cmd_report(const std::filesystem::path& log, const ReportOptions& options);

}  // namespace smol::cli
