#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace smol::forest {

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

struct ForestParams {
  int n_trees = 100;
  int max_depth = 10;
  int min_leaf = 2;
  bool bootstrap = true;  // resample n rows with replacement per tree

  void validate() const;
};

/// Regression tree in a flat node array; node 0 is the root.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;  // mean target of the node's samples
  };

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  /// Greedy variance-reduction growth over rows[sample_indices]. Ties go to the
  /// lowest feature index, then the lowest threshold.
  static RegressionTree grow(std::span<const std::vector<double>> features,
                             std::span<const double> targets,
                             std::vector<std::size_t> sample_indices, int max_depth,
                             int min_leaf);

  double predict(std::span<const double> x) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<Node> nodes_;
};

class RandomForest {
 public:
  RandomForest() = default;
  explicit RandomForest(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {}

  static RandomForest fit(std::span<const std::vector<double>> features,
                          std::span<const double> targets, const ForestParams& params,
                          std::uint64_t seed);

  /// Arithmetic mean of tree_predictions(x).
  double predict(std::span<const double> x) const;
  std::vector<double> tree_predictions(std::span<const double> x) const;
  const std::vector<RegressionTree>& trees() const { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

}  // namespace smol::forest
