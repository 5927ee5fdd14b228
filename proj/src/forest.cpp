#include "smol/forest.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "smol/errors.hpp"
#include "smol/rng.hpp"

namespace smol::forest {

void ForestParams::validate() const {
  if (n_trees < 1) throw ValidationError("random forest needs n_trees >= 1");
  if (max_depth < 1) throw ValidationError("random forest needs max_depth >= 1");
  if (min_leaf < 1) throw ValidationError("random forest needs min_leaf >= 1");
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
  std::size_t left_count = 0;
};

// Best split of `idx` by sum-of-squares reduction. Maximizing
// sL^2/nL + sR^2/nR is equivalent to minimizing the children's SSE.
Split best_split(std::span<const std::vector<double>> x, std::span<const double> y,
                 std::vector<std::size_t>& idx, int min_leaf) {
  Split best;
  bool found = false;
  const std::size_t n = idx.size();
  const std::size_t dims = x[idx.front()].size();
  const double total = std::accumulate(idx.begin(), idx.end(), 0.0,
                                       [&](double s, std::size_t i) { return s + y[i]; });
  for (std::size_t f = 0; f < dims; ++f) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_sum += y[idx[k]];
      const std::size_t nl = k + 1;
      const std::size_t nr = n - nl;
      if (nl < static_cast<std::size_t>(min_leaf)) continue;
      if (nr < static_cast<std::size_t>(min_leaf)) break;
      const double lo = x[idx[k]][f];
      const double hi = x[idx[k + 1]][f];
      if (!(lo < hi)) continue;
      const double right_sum = total - left_sum;
      const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
      if (!found || score > best.score) {
        found = true;
        double mid = lo + (hi - lo) / 2.0;
        if (!(mid < hi)) mid = lo;
        best = {static_cast<int>(f), mid, score, nl};
      }
    }
  }
  return best;
}

double mean_of(std::span<const double> y, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (const auto i : idx) s += y[i];
  return s / static_cast<double>(idx.size());
}

bool constant_targets(std::span<const double> y, const std::vector<std::size_t>& idx) {
  return std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return y[i] == y[idx[0]]; });
}

}  // namespace

RegressionTree RegressionTree::grow(std::span<const std::vector<double>> features,
                                    std::span<const double> targets,
                                    std::vector<std::size_t> sample_indices, int max_depth,
                                    int min_leaf) {
  if (sample_indices.empty()) {
    throw ValidationError("cannot grow a tree on zero samples");
  }
  struct Pending {
    int node;
    int depth;
    std::vector<std::size_t> idx;
  };
  std::vector<Node> nodes(1);
  std::vector<Pending> stack;
  stack.push_back({0, 0, std::move(sample_indices)});

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    nodes[job.node].value = mean_of(targets, job.idx);

    const bool can_split = job.depth < max_depth &&
                           job.idx.size() >= 2 * static_cast<std::size_t>(min_leaf) &&
                           !constant_targets(targets, job.idx);
    if (!can_split) continue;

    const Split s = best_split(features, targets, job.idx, min_leaf);
    if (s.feature < 0) continue;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (const auto i : job.idx) {
      (features[i][s.feature] <= s.threshold ? left : right).push_back(i);
    }
    const int l = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes.emplace_back();
    nodes[job.node].feature = s.feature;
    nodes[job.node].threshold = s.threshold;
    nodes[job.node].left = l;
    nodes[job.node].right = l + 1;
    stack.push_back({l + 1, job.depth + 1, std::move(right)});
    stack.push_back({l, job.depth + 1, std::move(left)});
  }
  return RegressionTree(std::move(nodes));
}

double RegressionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes_[i].feature >= 0) {
    const Node& n = nodes_[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature >= 0) {
      d[nodes_[i].left] = d[nodes_[i].right] = d[i] + 1;
    }
    deepest = std::max(deepest, d[i]);
  }
  return deepest;
}

RandomForest RandomForest::fit(std::span<const std::vector<double>> features,
                               std::span<const double> targets, const ForestParams& params,
                               std::uint64_t seed) {
  params.validate();
  if (features.empty() || features.size() != targets.size()) {
    throw ValidationError("random forest needs a non-empty, aligned training set");
  }
  const std::size_t n = features.size();
  std::vector<RegressionTree> trees;
  trees.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    std::vector<std::size_t> idx(n);
    if (params.bootstrap) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
      for (auto& i : idx) i = rng.below(n);
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    trees.push_back(
        RegressionTree::grow(features, targets, std::move(idx), params.max_depth, params.min_leaf));
  }
  return RandomForest(std::move(trees));
}

std::vector<double> RandomForest::tree_predictions(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(trees_.size());
  for (const auto& t : trees_) out.push_back(t.predict(x));
  return out;
}

double RandomForest::predict(std::span<const double> x) const {
  const auto p = tree_predictions(x);
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

}  // namespace smol::forest
