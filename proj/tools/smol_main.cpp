// smol: simulate soil-moisture LoRa campaigns, train and apply calibration models.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>

#include "smol/cli/campaign.hpp"
#include "smol/cli/commands.hpp"
#include "smol/errors.hpp"

namespace {

using namespace smol;

void print_evaluation(const calibrate::Evaluation& e) {
  std::cout << std::fixed << std::setprecision(4);
  if (e.r_squared) {
    std::cout << "R2  = " << *e.r_squared << "\n";
  } else {
    std::cout << "R2  = undefined (test targets have zero variance)\n";
  }
  std::cout << "MAE = " << e.mae << " VWC points (n=" << e.n << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smol: LoRa RSSI soil-moisture simulation and calibration"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a simulated measurement campaign");
  std::string config_path, log_out, dump_config;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sigma, drop;
  std::optional<std::int64_t> epoch;
  bool no_quantize = false;
  sim->add_option("-c,--config", config_path, "Campaign config (JSON); lab preset if omitted")
      ->check(CLI::ExistingFile);
  sim->add_option("-o,--out", log_out, "Measurement log CSV to write")->required();
  sim->add_option("--seed", sim_seed, "Override campaign seed");
  sim->add_option("--sigma", sigma, "Override RSSI noise sigma (dB)");
  sim->add_option("--drop", drop, "Override per-packet drop probability");
  sim->add_option("--epoch", epoch, "Timestamp of the first sweep (unix seconds)");
  sim->add_flag("--no-quantize", no_quantize, "Keep fractional RSSI");
  sim->add_option("--dump-config", dump_config, "Also write the effective config here");

  // train
  auto* train = app.add_subcommand("train", "Fit a model on a log with ground truth");
  std::string train_log, model_out, kind = "random_forest", mode = "all_tx";
  smol::cli::TrainOptions topt;
  train->add_option("-l,--log", train_log, "Measurement log CSV")->required();
  train->add_option("-o,--out", model_out, "Model file to write")->required();
  train->add_option("-k,--kind", kind, "linear | ridge | polynomial | random_forest");
  train->add_option("-m,--mode", mode, "all_tx | median_tx");
  train->add_option("--split-seed", topt.split.seed, "Seed of the 80/20 split");
  train->add_option("--train-fraction", topt.split.train_fraction, "Training share");
  train->add_flag("--group-split", topt.split.by_group, "Keep whole sweeps on one side");
  train->add_option("--model-seed", topt.spec.seed, "Random forest seed");
  train->add_option("--poly-degree", topt.spec.poly_degree, "Polynomial degree (>= 2)");
  train->add_option("--ridge-lambda", topt.spec.ridge_lambda, "Ridge penalty");
  train->add_option("--n-trees", topt.spec.forest.n_trees, "Random forest size");
  train->add_option("--max-depth", topt.spec.forest.max_depth, "Random forest tree depth");
  train->add_option("--min-leaf", topt.spec.forest.min_leaf, "Random forest minimum leaf size");

  // predict
  auto* predict = app.add_subcommand("predict", "Estimate VWC for a log with a trained model");
  std::string model_path, predict_log, predict_out;
  predict->add_option("-M,--model", model_path, "Model file")->required();
  predict->add_option("-l,--log", predict_log, "Measurement log CSV")->required();
  predict->add_option("-o,--out", predict_out, "Predictions CSV to write")->required();

  // report
  auto* report = app.add_subcommand("report", "Six-way model comparison and RSSI curves");
  std::string report_log;
  smol::cli::ReportOptions ropt;
  std::string table_csv, curves_dir;
  report->add_option("-l,--log", report_log, "Measurement log CSV")->required();
  report->add_option("--split-seed", ropt.split.seed, "Seed of the 80/20 split");
  report->add_option("--model-seed", ropt.model_seed, "Random forest seed");
  report->add_option("--table-csv", table_csv, "Write the comparison table as CSV");
  report->add_option("--curves-dir", curves_dir, "Write per-height curve CSVs here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : smol::cli::kValidation;
  }

  try {
    if (*sim) {
      auto config = config_path.empty() ? smol::cli::CampaignConfig::lab_default()
                                        : smol::cli::load_config(config_path);
      if (sim_seed) config.seed = *sim_seed;
      if (sigma) config.noise.rssi_sigma_db = *sigma;
      if (drop) config.drop_probability = *drop;
      if (epoch) config.epoch = *epoch;
      if (no_quantize) config.noise.quantize = false;
      if (!dump_config.empty()) smol::cli::save_config(config, dump_config);
      const auto result = smol::cli::cmd_simulate(config, log_out);
      std::cout << "wrote " << result.measurements.size() << " measurements to " << log_out
                << " (dropped " << result.dropped << ")\n";
    } else if (*train) {
      topt.spec.kind = calibrate::model_kind_from_string(kind);
      topt.mode = calibrate::feature_mode_from_string(mode);
      const auto result = smol::cli::cmd_train(train_log, topt, model_out);
      std::cout << calibrate::display_name(topt.spec.kind, topt.mode) << " -> " << model_out
                << "\n";
      print_evaluation(result.evaluation);
    } else if (*predict) {
      const auto n = smol::cli::cmd_predict(model_path, predict_log, predict_out);
      std::cout << "wrote " << n << " predictions to " << predict_out << "\n";
    } else if (*report) {
      ropt.table_csv = table_csv;
      ropt.curves_dir = curves_dir;
      const auto result = smol::cli::cmd_report(report_log, ropt);
      std::cout << result.table_text;
      for (const auto& f : result.curve_files) std::cout << "curve: " << f.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "smol: " << e.what() << "\n";
    return smol::cli::exit_code_for_current_exception();
  }
  return smol::cli::kOk;
}
