#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smol/forest.hpp"
#include "smol/sweepproto.hpp"

namespace smol::calibrate {

/// AllTx: features [rssi, tx_power]. MedianTx: [rssi] from median-power packets only.
enum class FeatureMode { AllTx, MedianTx };

std::string to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(const std::string& s);

struct Row {
  std::vector<double> features;
  double target_pct = 0.0;
  std::string group;  // sweep identity, used by the group-aware split
};

struct Dataset {
  FeatureMode mode = FeatureMode::AllTx;
  std::vector<std::string> feature_names;
  std::vector<Row> rows;
  std::optional<int> median_power_dbm;  // set for MedianTx

  std::size_t size() const { return rows.size(); }
  std::size_t dimension() const { return feature_names.size(); }
  /// Throws ValidationError if any row's feature count differs from dimension().
  void validate() const;
};

/// Identifies the sweep a measurement came from.
std::string sweep_key(const sweepproto::Measurement& m);

/// Lower median of the distinct tx powers present in `measurements`.
int campaign_median_power(std::span<const sweepproto::Measurement> measurements);

/// Feature vector for one measurement. Does not read ground truth.
std::vector<double> features_of(const sweepproto::Measurement& m, FeatureMode mode);

/// Builds a labelled dataset. Throws ValidationError when a measurement has no
/// ground truth or the result is empty. For MedianTx the median power defaults
/// to campaign_median_power(measurements).
Dataset assemble(std::span<const sweepproto::Measurement> measurements, FeatureMode mode,
                 std::optional<int> median_power_dbm = std::nullopt);

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  /// Keep whole sweeps on one side of the split.
  bool by_group = false;
};

/// Seeded shuffle, first ceil(n * train_fraction) rows train, the rest test.
std::pair<Dataset, Dataset> split(const Dataset& d, const SplitConfig& config);

enum class ModelKind { Linear, Ridge, Polynomial, RandomForest };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  int poly_degree = 2;
  double ridge_lambda = 1.0;
  forest::ForestParams forest;
  std::uint64_t seed = 0;

  void validate() const;

  static ModelSpec linear() { return {}; }
  static ModelSpec ridge(double lambda = 1.0) {
    ModelSpec s;
    s.kind = ModelKind::Ridge;
    s.ridge_lambda = lambda;
    return s;
  }
  static ModelSpec polynomial(int degree = 2) {
    ModelSpec s;
    s.kind = ModelKind::Polynomial;
    s.poly_degree = degree;
    return s;
  }
  static ModelSpec random_forest(std::uint64_t seed = 0) {
    ModelSpec s;
    s.kind = ModelKind::RandomForest;
    s.seed = seed;
    return s;
  }
};

/// Exponent vectors of all monomials of total degree <= degree over `inputs`
/// variables, ordered by degree then lexicographically (x before y).
std::vector<std::vector<int>> monomial_exponents(int inputs, int degree);

/// Evaluates the monomials listed by monomial_exponents at x.
std::vector<double> polynomial_features(std::span<const double> x,
                                        const std::vector<std::vector<int>>& exponents);

/// Intercept first, then one weight per input feature (or per monomial).
struct LinearParams {
  std::vector<double> coefficients;
};

struct PolynomialParams {
  std::vector<std::vector<int>> exponents;
  std::vector<double> coefficients;  // one per monomial, constant included
};

struct TrainingMetadata {
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::optional<std::uint64_t> split_seed;
};

class TrainedModel {
 public:
  using Parameters = std::variant<LinearParams, PolynomialParams, forest::RandomForest>;

  TrainedModel(ModelSpec spec, FeatureMode mode, std::vector<std::string> feature_names,
               std::optional<int> median_power_dbm, Parameters params, TrainingMetadata meta);

  /// Throws ValidationError on dimension mismatch.
  double predict(std::span<const double> features) const;

  const ModelSpec& spec() const { return spec_; }
  FeatureMode mode() const { return mode_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t dimension() const { return feature_names_.size(); }
  std::optional<int> median_power_dbm() const { return median_power_dbm_; }
  const Parameters& parameters() const { return params_; }
  const TrainingMetadata& metadata() const { return meta_; }
  TrainingMetadata& metadata() { return meta_; }

 private:
  ModelSpec spec_;
  FeatureMode mode_;
  std::vector<std::string> feature_names_;
  std::optional<int> median_power_dbm_;
  Parameters params_;
  TrainingMetadata meta_;
};

/// Throws SingularSystem for rank-deficient least-squares fits and
/// ValidationError for an empty or malformed training set.
TrainedModel fit(const ModelSpec& spec, const Dataset& train);

struct Evaluation {
  std::optional<double> r_squared;  // nullopt when test targets have zero variance
  double mae = 0.0;
  std::size_t n = 0;
};

/// R^2 against the mean of `truth`; nullopt for zero-variance truth.
std::optional<double> r_squared(std::span<const double> truth, std::span<const double> predicted);
double mean_absolute_error(std::span<const double> truth, std::span<const double> predicted);

Evaluation evaluate(const TrainedModel& model, const Dataset& test);

struct ComparisonRow {
  std::string model_name;  // e.g. "Random Forest w/ all TX powers"
  ModelSpec spec;
  FeatureMode mode = FeatureMode::AllTx;
  std::optional<Evaluation> evaluation;
  std::string error;  // non-empty when this combination failed
  bool best = false;
};

std::string display_name(ModelKind kind, FeatureMode mode);

/// Runs assemble -> split -> fit -> evaluate for every (spec, mode) pair.
/// Rows are sorted by R^2 descending; failures and undefined R^2 sort last.
std::vector<ComparisonRow> compare(std::span<const ModelSpec> specs,
                                   std::span<const sweepproto::Measurement> measurements,
                                   std::span<const FeatureMode> modes, const SplitConfig& split);

/// Sorts by R^2 and flags the best row.
void rank_rows(std::vector<ComparisonRow>& rows);

/// Fixed-width text table; the best row is marked with '*'.
std::string render_table(std::span<const ComparisonRow> rows);
std::string render_csv(std::span<const ComparisonRow> rows);

/// Linear, Polynomial(2) and RandomForest specs used for the headline comparison.
std::vector<ModelSpec> headline_specs(std::uint64_t seed);

}  // namespace smol::calibrate
