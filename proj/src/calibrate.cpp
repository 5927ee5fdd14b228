#include "smol/calibrate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "smol/errors.hpp"
#include "smol/rng.hpp"

namespace smol::calibrate {

using sweepproto::Measurement;

std::string to_string(FeatureMode mode) {
  return mode == FeatureMode::AllTx ? "all_tx" : "median_tx";
}

FeatureMode feature_mode_from_string(const std::string& s) {
  if (s == "all_tx" || s == "all") return FeatureMode::AllTx;
  if (s == "median_tx" || s == "median") return FeatureMode::MedianTx;
  throw ValidationError("unknown feature mode '" + s + "' (expected all_tx or median_tx)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Ridge: return "ridge";
    case ModelKind::Polynomial: return "polynomial";
    case ModelKind::RandomForest: return "random_forest";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "linear") return ModelKind::Linear;
  if (s == "ridge") return ModelKind::Ridge;
  if (s == "polynomial" || s == "poly") return ModelKind::Polynomial;
  if (s == "random_forest" || s == "rf" || s == "forest") return ModelKind::RandomForest;
  throw ValidationError("unknown model kind '" + s + "'");
}

void Dataset::validate() const {
  for (const auto& r : rows) {
    if (r.features.size() != dimension()) {
      throw ValidationError("dataset row has " + std::to_string(r.features.size()) +
                            " features, expected " + std::to_string(dimension()));
    }
  }
}

std::string sweep_key(const Measurement& m) {
  return std::to_string(m.timestamp) + "/" + std::to_string(m.device_id) + "/" + m.scenario;
}

int campaign_median_power(std::span<const Measurement> measurements) {
  std::set<int> powers;
  for (const auto& m : measurements) powers.insert(m.tx_power_dbm);
  const std::vector<int> levels(powers.begin(), powers.end());
  return sweepproto::median_power(levels);
}

std::vector<double> features_of(const Measurement& m, FeatureMode mode) {
  if (mode == FeatureMode::AllTx) {
    return {m.rssi_dbm, static_cast<double>(m.tx_power_dbm)};
  }
  return {m.rssi_dbm};
}

Dataset assemble(std::span<const Measurement> measurements, FeatureMode mode,
                 std::optional<int> median_power_dbm) {
  for (const auto& m : measurements) {
    if (!m.vwc_truth_pct) {
      throw ValidationError("training requires ground truth: measurement without vwc_truth");
    }
  }
  Dataset d;
  d.mode = mode;
  if (mode == FeatureMode::AllTx) {
    d.feature_names = {"rssi_dbm", "tx_power_dbm"};
  } else {
    d.feature_names = {"rssi_dbm"};
    if (!median_power_dbm && !measurements.empty()) {
      median_power_dbm = campaign_median_power(measurements);
    }
    d.median_power_dbm = median_power_dbm;
  }
  for (const auto& m : measurements) {
    if (mode == FeatureMode::MedianTx && m.tx_power_dbm != *median_power_dbm) continue;
    d.rows.push_back({features_of(m, mode), *m.vwc_truth_pct, sweep_key(m)});
  }
  if (d.rows.empty()) {
    throw ValidationError("assembled dataset is empty");
  }
  return d;
}

std::pair<Dataset, Dataset> split(const Dataset& d, const SplitConfig& config) {
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  Dataset train{d.mode, d.feature_names, {}, d.median_power_dbm};
  Dataset test = train;
  Rng rng(config.seed);

  auto shuffle = [&rng](auto& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng.below(i)]);
    }
  };

  if (!config.by_group) {
    const std::size_t n = d.size();
    const auto n_train =
        static_cast<std::size_t>(std::ceil(static_cast<double>(n) * config.train_fraction));
    if (n < 2 || n_train >= n) {
      throw ValidationError("dataset of " + std::to_string(n) +
                            " rows is too small to leave a test set");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order);
    for (std::size_t k = 0; k < n; ++k) {
      (k < n_train ? train : test).rows.push_back(d.rows[order[k]]);
    }
    return {std::move(train), std::move(test)};
  }

  std::vector<std::string> groups;
  std::set<std::string> seen;
  for (const auto& r : d.rows) {
    if (seen.insert(r.group).second) groups.push_back(r.group);
  }
  const auto g_train = static_cast<std::size_t>(
      std::ceil(static_cast<double>(groups.size()) * config.train_fraction));
  if (groups.size() < 2 || g_train >= groups.size()) {
    throw ValidationError("too few sweeps for a group split");
  }
  shuffle(groups);
  const std::set<std::string> train_groups(groups.begin(), groups.begin() + g_train);
  for (const auto& r : d.rows) {
    (train_groups.contains(r.group) ? train : test).rows.push_back(r);
  }
  return {std::move(train), std::move(test)};
}

void ModelSpec::validate() const {
  switch (kind) {
    case ModelKind::Polynomial:
      if (poly_degree < 2) throw ValidationError("polynomial degree must be >= 2");
      break;
    case ModelKind::Ridge:
      if (!(ridge_lambda >= 0.0)) throw ValidationError("ridge lambda must be >= 0");
      break;
    case ModelKind::RandomForest:
      forest.validate();
      break;
    case ModelKind::Linear:
      break;
  }
}

std::vector<std::vector<int>> monomial_exponents(int inputs, int degree) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= degree; ++total) {
    // Exponent vectors with the given total, first variable's power descending.
    std::vector<int> e(inputs, 0);
    auto rec = [&](auto&& self, int var, int remaining) -> void {
      if (var == inputs - 1) {
        e[var] = remaining;
        out.push_back(e);
        return;
      }
      for (int p = remaining; p >= 0; --p) {
        e[var] = p;
        self(self, var + 1, remaining - p);
      }
    };
    if (inputs == 0) {
      if (total == 0) out.emplace_back();
      continue;
    }
    rec(rec, 0, total);
  }
  return out;
}

std::vector<double> polynomial_features(std::span<const double> x,
                                        const std::vector<std::vector<int>>& exponents) {
  std::vector<double> out;
  out.reserve(exponents.size());
  for (const auto& e : exponents) {
    double v = 1.0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      for (int k = 0; k < e[j]; ++k) v *= x[j];
    }
    out.push_back(v);
  }
  return out;
}

namespace {

// Least squares on design matrix `a` with an optional L2 penalty on every
// column except the first. Throws SingularSystem when rank-deficient.
std::vector<double> solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                        double penalty) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = a.cols();
  Eigen::MatrixXd design = a;
  Eigen::VectorXd rhs = y;
  if (penalty > 0.0) {
    design.conservativeResize(n + p - 1, Eigen::NoChange);
    design.bottomRows(p - 1).setZero();
    rhs.conservativeResize(n + p - 1);
    rhs.tail(p - 1).setZero();
    const double s = std::sqrt(penalty);
    for (Eigen::Index j = 1; j < p; ++j) design(n + j - 1, j) = s;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) {
    throw SingularSystem("least-squares system is rank deficient (rank " +
                         std::to_string(qr.rank()) + " of " + std::to_string(p) + ")");
  }
  const Eigen::VectorXd beta = qr.solve(rhs);
  return {beta.data(), beta.data() + beta.size()};
}

Eigen::VectorXd targets_of(const Dataset& d) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) y(static_cast<Eigen::Index>(i)) = d.rows[i].target_pct;
  return y;
}

double dot(std::span<const double> w, std::span<const double> x) {
  return std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
}

struct Predictor {
  std::span<const double> x;
  double operator()(const LinearParams& p) const {
    return p.coefficients[0] + dot(std::span(p.coefficients).subspan(1), x);
  }
  double operator()(const PolynomialParams& p) const {
    return dot(p.coefficients, polynomial_features(x, p.exponents));
  }
  double operator()(const forest::RandomForest& f) const { return f.predict(x); }
};

}  // namespace

TrainedModel::TrainedModel(ModelSpec spec, FeatureMode mode,
                           std::vector<std::string> feature_names,
                           std::optional<int> median_power_dbm, Parameters params,
                           TrainingMetadata meta)
    : spec_(spec),
      mode_(mode),
      feature_names_(std::move(feature_names)),
      median_power_dbm_(median_power_dbm),
      params_(std::move(params)),
      meta_(meta) {}

double TrainedModel::predict(std::span<const double> features) const {
  if (features.size() != dimension()) {
    throw ValidationError("model expects " + std::to_string(dimension()) + " features, got " +
                          std::to_string(features.size()));
  }
  return std::visit(Predictor{features}, params_);
}

TrainedModel fit(const ModelSpec& spec, const Dataset& train) {
  spec.validate();
  train.validate();
  if (train.rows.empty()) {
    throw ValidationError("cannot fit on an empty training set");
  }
  const auto n = static_cast<Eigen::Index>(train.size());
  const auto dims = static_cast<Eigen::Index>(train.dimension());
  TrainingMetadata meta;
  meta.train_rows = train.size();

  auto make = [&](TrainedModel::Parameters params) {
    return TrainedModel(spec, train.mode, train.feature_names, train.median_power_dbm,
                        std::move(params), meta);
  };

  switch (spec.kind) {
    case ModelKind::Linear:
    case ModelKind::Ridge: {
      Eigen::MatrixXd a(n, dims + 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < dims; ++j) a(i, j + 1) = train.rows[i].features[j];
      }
      const double penalty = spec.kind == ModelKind::Ridge ? spec.ridge_lambda : 0.0;
      return make(LinearParams{solve_least_squares(a, targets_of(train), penalty)});
    }
    case ModelKind::Polynomial: {
      auto exponents = monomial_exponents(static_cast<int>(dims), spec.poly_degree);
      Eigen::MatrixXd a(n, static_cast<Eigen::Index>(exponents.size()));
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = polynomial_features(train.rows[i].features, exponents);
        for (std::size_t j = 0; j < row.size(); ++j) a(i, static_cast<Eigen::Index>(j)) = row[j];
      }
      auto coef = solve_least_squares(a, targets_of(train), 0.0);
      return make(PolynomialParams{std::move(exponents), std::move(coef)});
    }
    case ModelKind::RandomForest: {
      std::vector<std::vector<double>> x;
      std::vector<double> y;
      x.reserve(train.size());
      y.reserve(train.size());
      for (const auto& r : train.rows) {
        x.push_back(r.features);
        y.push_back(r.target_pct);
      }
      return make(forest::RandomForest::fit(x, y, spec.forest, spec.seed));
    }
  }
  throw ValidationError("unknown model kind");
}

std::optional<double> r_squared(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.empty() || truth.size() != predicted.size()) {
    throw ValidationError("R^2 needs equal-length, non-empty inputs");
  }
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / truth.size();
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

double mean_absolute_error(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.empty() || truth.size() != predicted.size()) {
    throw ValidationError("MAE needs equal-length, non-empty inputs");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += std::abs(truth[i] - predicted[i]);
  return s / truth.size();
}

Evaluation evaluate(const TrainedModel& model, const Dataset& test) {
  if (test.rows.empty()) throw ValidationError("cannot evaluate on an empty test set");
  std::vector<double> truth;
  std::vector<double> pred;
  for (const auto& r : test.rows) {
    truth.push_back(r.target_pct);
    pred.push_back(model.predict(r.features));
  }
  return {r_squared(truth, pred), mean_absolute_error(truth, pred), test.size()};
}

std::string display_name(ModelKind kind, FeatureMode mode) {
  std::string base;
  switch (kind) {
    case ModelKind::Linear: base = "Linear Regression"; break;
    case ModelKind::Ridge: base = "Ridge Regression"; break;
    case ModelKind::Polynomial: base = "Polynomial"; break;
    case ModelKind::RandomForest: base = "Random Forest"; break;
  }
  return base + (mode == FeatureMode::AllTx ? " w/ all TX powers" : " w/ median TX power");
}

void rank_rows(std::vector<ComparisonRow>& rows) {
  auto key = [](const ComparisonRow& r) -> std::optional<double> {
    if (!r.error.empty() || !r.evaluation) return std::nullopt;
    return r.evaluation->r_squared;
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ComparisonRow& a, const ComparisonRow& b) {
    const auto ka = key(a);
    const auto kb = key(b);
    if (ka && kb) return *ka > *kb;
    return ka.has_value() && !kb.has_value();
  });
  for (auto& r : rows) r.best = false;
  if (!rows.empty() && key(rows.front())) rows.front().best = true;
}

std::vector<ComparisonRow> compare(std::span<const ModelSpec> specs,
                                   std::span<const Measurement> measurements,
                                   std::span<const FeatureMode> modes, const SplitConfig& split_cfg) {
  std::vector<std::future<ComparisonRow>> jobs;
  for (const auto& spec : specs) {
    for (const auto mode : modes) {
      jobs.push_back(std::async(std::launch::async, [spec, mode, measurements, split_cfg] {
        ComparisonRow row{display_name(spec.kind, mode), spec, mode, std::nullopt, {}, false};
        try {
          const Dataset d = assemble(measurements, mode);
          const auto [train, test] = split(d, split_cfg);
          const TrainedModel m = fit(spec, train);
          row.evaluation = evaluate(m, test);
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        return row;
      }));
    }
  }
  std::vector<ComparisonRow> rows;
  rows.reserve(jobs.size());
  for (auto& j : jobs) rows.push_back(j.get());
  rank_rows(rows);
  return rows;
}

std::string render_table(std::span<const ComparisonRow> rows) {
  std::size_t width = std::string("Model").size();
  for (const auto& r : rows) width = std::max(width, r.model_name.size());
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "  " << std::left << std::setw(static_cast<int>(width)) << "Model"
     << " | R^2   | Mean Absolute Error (MAE)\n";
  os << "  " << std::string(width, '-') << "-+-------+--------------------------\n";
  for (const auto& r : rows) {
    os << (r.best ? "* " : "  ") << std::left << std::setw(static_cast<int>(width))
       << r.model_name << " | ";
    if (!r.error.empty()) {
      os << "error: " << r.error << "\n";
      continue;
    }
    if (r.evaluation && r.evaluation->r_squared) {
      os << std::right << std::setw(5) << *r.evaluation->r_squared;
    } else {
      os << "  n/a";
    }
    os << " | " << (r.evaluation ? r.evaluation->mae : 0.0) << "\n";
  }
  return os.str();
}

std::string render_csv(std::span<const ComparisonRow> rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "model,mode,r_squared,mae,best,error\n";
  for (const auto& r : rows) {
    os << r.model_name << "," << to_string(r.mode) << ",";
    if (r.evaluation && r.evaluation->r_squared) os << *r.evaluation->r_squared;
    os << ",";
    if (r.evaluation) os << r.evaluation->mae;
    os << "," << (r.best ? 1 : 0) << ",";
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << err << "\n";
  }
  return os.str();
}

std::vector<ModelSpec> headline_specs(std::uint64_t seed) {
  return {ModelSpec::random_forest(seed), ModelSpec::polynomial(2), ModelSpec::linear()};
}

}  // namespace smol::calibrate
