#include "smol/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "smol/cli/measurement_log.hpp"
#include "smol/errors.hpp"
#include "smol/model_io.hpp"

namespace smol::cli {

using sweepproto::Measurement;

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const IoError&) {
    return kIo;
  } catch (const NumericalError&) {
    return kNumerical;
  } catch (const ValidationError&) {
    return kValidation;
  } catch (const std::filesystem::filesystem_error&) {
    return kIo;
  } catch (...) {
    return kValidation;
  }
}

CampaignResult cmd_simulate(const CampaignConfig& config, const std::filesystem::path& log_out) {
  config.validate();
  CampaignResult result = simulate_campaign(config);
  write_log(log_out, result.measurements);
  return result;
}

TrainResult cmd_train(const std::filesystem::path& log, const TrainOptions& options,
                      const std::filesystem::path& model_out) {
  const auto rows = read_log(log);
  const auto dataset = calibrate::assemble(rows, options.mode);
  const auto [train, test] = calibrate::split(dataset, options.split);
  calibrate::TrainedModel model = calibrate::fit(options.spec, train);
  model.metadata().test_rows = test.size();
  model.metadata().split_seed = options.split.seed;
  const auto evaluation = calibrate::evaluate(model, test);
  calibrate::save_model(model, model_out);
  return {std::move(model), evaluation};
}

std::size_t cmd_predict(const std::filesystem::path& model_path, const std::filesystem::path& log,
                        const std::filesystem::path& predictions_out) {
  const auto model = calibrate::load_model(model_path);
  const auto rows = read_log(log);

  std::vector<std::pair<const Measurement*, double>> scored;
  for (const auto& m : rows) {
    if (model.mode() == calibrate::FeatureMode::MedianTx &&
        m.tx_power_dbm != model.median_power_dbm().value_or(-1)) {
      continue;
    }
    scored.emplace_back(&m, model.predict(calibrate::features_of(m, model.mode())));
  }
  if (scored.empty()) {
    if (model.mode() == calibrate::FeatureMode::MedianTx) {
      throw ValidationError("feature-mode mismatch: log has no packets at the model's median "
                            "power of " +
                            std::to_string(model.median_power_dbm().value_or(-1)) + " dBm");
    }
    throw ValidationError("log contains no measurements to score");
  }

  std::ofstream os(predictions_out, std::ios::binary);
  if (!os) throw IoError("cannot open '" + predictions_out.string() + "' for writing");
  os << kLogHeader << ",vwc_pred_pct\n";
  for (const auto& [m, pred] : scored) {
    os << m->timestamp << ',' << m->device_id << ',' << m->tx_power_dbm << ','
       << format_number(m->rssi_dbm) << ',' << format_number(m->height_cm) << ','
       << format_number(m->depth_cm) << ',' << m->scenario << ',';
    if (m->vwc_truth_pct) os << format_number(*m->vwc_truth_pct);
    os << ',' << format_number(pred) << "\n";
  }
  if (!os) throw IoError("write to '" + predictions_out.string() + "' failed");
  return scored.size();
}

std::vector<CurvePoint> median_power_curves(const std::vector<Measurement>& log,
                                            int median_power_dbm) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::vector<std::string> scenario_order;
  std::map<std::tuple<std::string, double, double>, Acc> groups;
  for (const auto& m : log) {
    if (m.tx_power_dbm != median_power_dbm || !m.vwc_truth_pct) continue;
    if (std::find(scenario_order.begin(), scenario_order.end(), m.scenario) ==
        scenario_order.end()) {
      scenario_order.push_back(m.scenario);
    }
    auto& acc = groups[{m.scenario, m.height_cm, *m.vwc_truth_pct}];
    acc.sum += m.rssi_dbm;
    ++acc.n;
  }
  std::vector<CurvePoint> out;
  for (const auto& scenario : scenario_order) {
    for (const auto& [key, acc] : groups) {
      if (std::get<0>(key) != scenario) continue;
      out.push_back({scenario, std::get<1>(key), std::get<2>(key),
                     acc.sum / static_cast<double>(acc.n)});
    }
  }
  // std::map already orders by (height, vwc) within a scenario.
  return out;
}

ReportResult cmd_report(const std::filesystem::path& log, const ReportOptions& options) {
  const auto rows = read_log(log);
  for (const auto& m : rows) {
    if (!m.vwc_truth_pct) {
      throw ValidationError("report requires ground truth in every row");
    }
  }
  ReportResult r;
  const auto specs = calibrate::headline_specs(options.model_seed);
  const std::vector<calibrate::FeatureMode> modes{calibrate::FeatureMode::AllTx,
                                                  calibrate::FeatureMode::MedianTx};
  r.rows = calibrate::compare(specs, rows, modes, options.split);
  r.table_text = calibrate::render_table(r.rows);

  if (!options.table_csv.empty()) {
    std::ofstream os(options.table_csv, std::ios::binary);
    if (!os) throw IoError("cannot open '" + options.table_csv.string() + "' for writing");
    os << calibrate::render_csv(r.rows);
  }

  r.curves = median_power_curves(rows, calibrate::campaign_median_power(rows));
  if (!options.curves_dir.empty()) {
    std::filesystem::create_directories(options.curves_dir);
    std::map<double, std::vector<const CurvePoint*>> by_height;
    for (const auto& p : r.curves) by_height[p.height_cm].push_back(&p);
    for (const auto& [height, points] : by_height) {
      const auto path = options.curves_dir / ("curve_h" + format_number(height) + "cm.csv");
      std::ofstream os(path, std::ios::binary);
      if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
      os << kCurveHeader << "\n";
      for (const auto* p : points) {
        os << p->scenario << ',' << format_number(p->height_cm) << ','
           << format_number(p->vwc_truth_pct) << ',' << format_number(p->mean_rssi_dbm) << "\n";
      }
      r.curve_files.push_back(path);
    }
  }
  return r;
}

}  // namespace smol::cli
