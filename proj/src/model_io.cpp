#include "smol/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "smol/errors.hpp"

namespace smol::calibrate {

using nlohmann::json;

namespace {

json spec_to_json(const ModelSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"poly_degree", s.poly_degree},
          {"ridge_lambda", s.ridge_lambda},
          {"n_trees", s.forest.n_trees},
          {"max_depth", s.forest.max_depth},
          {"min_leaf", s.forest.min_leaf},
          {"bootstrap", s.forest.bootstrap},
          {"seed", s.seed}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.kind = model_kind_from_string(j.at("kind").get<std::string>());
  s.poly_degree = j.at("poly_degree").get<int>();
  s.ridge_lambda = j.at("ridge_lambda").get<double>();
  s.forest.n_trees = j.at("n_trees").get<int>();
  s.forest.max_depth = j.at("max_depth").get<int>();
  s.forest.min_leaf = j.at("min_leaf").get<int>();
  s.forest.bootstrap = j.at("bootstrap").get<bool>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

// Trees are stored column-wise to keep files compact.
json tree_to_json(const forest::RegressionTree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), value = json::array();
  for (const auto& n : t.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"value", value}};
}

forest::RegressionTree tree_from_json(const json& j) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
      value.size() != n) {
    throw IoError("model file: inconsistent tree arrays");
  }
  std::vector<forest::RegressionTree::Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
    if (feature[i] >= 0) {
      const auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
      if (!in_range(left[i]) || !in_range(right[i])) {
        throw IoError("model file: tree child index out of range");
      }
    }
  }
  return forest::RegressionTree(std::move(nodes));
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelFormatVersion;
  j["spec"] = spec_to_json(model.spec());
  j["feature_mode"] = to_string(model.mode());
  j["feature_names"] = model.feature_names();
  j["median_power_dbm"] =
      model.median_power_dbm() ? json(*model.median_power_dbm()) : json(nullptr);
  const auto& meta = model.metadata();
  j["training"] = {{"train_rows", meta.train_rows},
                   {"test_rows", meta.test_rows},
                   {"split_seed", meta.split_seed ? json(*meta.split_seed) : json(nullptr)}};

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          j["parameters"] = {{"coefficients", p.coefficients}};
        } else if constexpr (std::is_same_v<T, PolynomialParams>) {
          j["parameters"] = {{"exponents", p.exponents}, {"coefficients", p.coefficients}};
        } else {
          json trees = json::array();
          for (const auto& t : p.trees()) trees.push_back(tree_to_json(t));
          j["parameters"] = {{"trees", trees}};
        }
      },
      model.parameters());
  return j.dump() + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != kModelFormat) throw IoError("not a smol model file");
    if (j.value("version", 0) != kModelFormatVersion) {
      throw IoError("unsupported model file version");
    }
    const ModelSpec spec = spec_from_json(j.at("spec"));
    const FeatureMode mode = feature_mode_from_string(j.at("feature_mode").get<std::string>());
    auto names = j.at("feature_names").get<std::vector<std::string>>();
    std::optional<int> median;
    if (!j.at("median_power_dbm").is_null()) median = j.at("median_power_dbm").get<int>();
    TrainingMetadata meta;
    const auto& t = j.at("training");
    meta.train_rows = t.at("train_rows").get<std::size_t>();
    meta.test_rows = t.at("test_rows").get<std::size_t>();
    if (!t.at("split_seed").is_null()) meta.split_seed = t.at("split_seed").get<std::uint64_t>();

    const auto& p = j.at("parameters");
    const std::size_t dims = names.size();
    TrainedModel::Parameters params;
    switch (spec.kind) {
      case ModelKind::Linear:
      case ModelKind::Ridge: {
        auto coef = p.at("coefficients").get<std::vector<double>>();
        if (coef.size() != dims + 1) throw IoError("model file: coefficient count mismatch");
        params = LinearParams{std::move(coef)};
        break;
      }
      case ModelKind::Polynomial: {
        PolynomialParams pp{p.at("exponents").get<std::vector<std::vector<int>>>(),
                            p.at("coefficients").get<std::vector<double>>()};
        if (pp.exponents.size() != pp.coefficients.size()) {
          throw IoError("model file: polynomial term count mismatch");
        }
        for (const auto& e : pp.exponents) {
          if (e.size() != dims) throw IoError("model file: exponent dimension mismatch");
        }
        params = std::move(pp);
        break;
      }
      case ModelKind::RandomForest: {
        std::vector<forest::RegressionTree> trees;
        for (const auto& tj : p.at("trees")) trees.push_back(tree_from_json(tj));
        if (trees.empty()) throw IoError("model file: forest has no trees");
        params = forest::RandomForest(std::move(trees));
        break;
      }
    }
    return TrainedModel(spec, mode, std::move(names), median, std::move(params), meta);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  } catch (const ValidationError& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << model_to_json(model);
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open model file '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace smol::calibrate
