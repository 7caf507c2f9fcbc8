#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "lpg/dataset.hpp"
#include "lpg/errors.hpp"
#include "lpg/rng.hpp"

namespace lpg {

struct ForestConfig {
  std::size_t n_trees = 50;
  std::size_t max_depth = 12;
  std::size_t min_samples_leaf = 1;
  std::size_t features_per_split = 0;  // 0 -> round(sqrt(d)), clamped to [1, d]
  bool bootstrap = true;
  std::uint64_t seed = 42;
};

// Axis-aligned decision tree stored as a flat node array. Leaves hold a
// class histogram over training samples (class index -> count).
struct TreeNode {
  bool is_leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<std::size_t> histogram;  // per class index
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestModel {
  std::vector<std::string> classes;
  std::vector<DecisionTree> trees;
  ForestConfig config;
  std::size_t dimension = 0;
};

namespace detail {

inline double gini(const std::vector<std::size_t>& histogram,
                   std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (std::size_t count : histogram) {
    const double p = static_cast<double>(count) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct TreeBuilder {
  const LabeledDataset& data;
  const std::vector<std::size_t>& y;  // class index per example
  std::size_t n_classes;
  const ForestConfig& config;
  std::size_t features_per_split;
  Rng rng;
  DecisionTree tree;

  std::vector<std::size_t> make_histogram(
      const std::vector<std::size_t>& samples) const {
    std::vector<std::size_t> hist(n_classes, 0);
    for (std::size_t i : samples) hist[y[i]]++;
    return hist;
  }

  // Random feature subset of the requested size, sampled without
  // replacement via a partial Fisher-Yates.
  std::vector<std::size_t> sample_features() {
    const std::size_t d = data.dimension();
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < features_per_split; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
      std::swap(all[i], all[j]);
    }
    all.resize(features_per_split);
    return all;
  }

  std::size_t build(std::vector<std::size_t> samples, std::size_t depth) {
    auto histogram = make_histogram(samples);
    const std::size_t total = samples.size();
    const bool pure =
        std::count_if(histogram.begin(), histogram.end(),
                      [](std::size_t c) { return c > 0; }) <= 1;

    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    double best_impurity = std::numeric_limits<double>::infinity();
    bool found = false;

    if (!pure && depth < config.max_depth &&
        total >= 2 * config.min_samples_leaf) {
      for (std::size_t feature : sample_features()) {
        // Sort samples by this feature; candidate thresholds are midpoints
        // between distinct consecutive values.
        std::vector<std::size_t> sorted = samples;
        std::sort(sorted.begin(), sorted.end(),
                  [&](std::size_t a, std::size_t b) {
                    const double va = data.features[a].values[feature];
                    const double vb = data.features[b].values[feature];
                    if (va != vb) return va < vb;
                    return a < b;
                  });
        std::vector<std::size_t> left_hist(n_classes, 0);
        auto right_hist = histogram;
        for (std::size_t pos = 0; pos + 1 < total; ++pos) {
          left_hist[y[sorted[pos]]]++;
          right_hist[y[sorted[pos]]]--;
          const double v = data.features[sorted[pos]].values[feature];
          const double v_next = data.features[sorted[pos + 1]].values[feature];
          if (v == v_next) continue;
          const std::size_t n_left = pos + 1;
          const std::size_t n_right = total - n_left;
          if (n_left < config.min_samples_leaf ||
              n_right < config.min_samples_leaf)
            continue;
          const double impurity =
              (static_cast<double>(n_left) * gini(left_hist, n_left) +
               static_cast<double>(n_right) * gini(right_hist, n_right)) /
              static_cast<double>(total);
          if (impurity < best_impurity) {
            best_impurity = impurity;
            best_feature = feature;
            best_threshold = v + (v_next - v) / 2.0;
            found = true;
          }
        }
      }
    }

    const std::size_t index = tree.nodes.size();
    tree.nodes.emplace_back();
    if (!found) {
      tree.nodes[index].is_leaf = true;
      tree.nodes[index].histogram = std::move(histogram);
      return index;
    }

    std::vector<std::size_t> left_samples;
    std::vector<std::size_t> right_samples;
    for (std::size_t i : samples) {
      if (data.features[i].values[best_feature] <= best_threshold)
        left_samples.push_back(i);
      else
        right_samples.push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[index].is_leaf = false;
    tree.nodes[index].feature = best_feature;
    tree.nodes[index].threshold = best_threshold;
    const std::size_t left = build(std::move(left_samples), depth + 1);
    const std::size_t right = build(std::move(right_samples), depth + 1);
    tree.nodes[index].left = left;
    tree.nodes[index].right = right;
    return index;
  }
};

inline std::size_t tree_vote(const DecisionTree& tree,
                             const std::vector<double>& x) {
  std::size_t index = 0;
  while (!tree.nodes[index].is_leaf) {
    const TreeNode& node = tree.nodes[index];
    index = (x[node.feature] <= node.threshold) ? node.left : node.right;
  }
  const auto& histogram = tree.nodes[index].histogram;
  std::size_t best = 0;
  for (std::size_t c = 1; c < histogram.size(); ++c)
    if (histogram[c] > histogram[best]) best = c;  // tie -> smaller index
  return best;
}

}  // namespace detail

// Random forest: per tree, a bootstrap sample (when enabled) and recursive
// best-Gini splits over a random feature subset. Deterministic given the
// seed; tree t uses derived seed seed + t.
inline ForestModel train_random_forest(const LabeledDataset& dataset,
                                       const ForestConfig& config) {
  validate(dataset);
  ForestModel model;
  model.classes = sorted_classes(dataset);
  model.config = config;
  model.dimension = dataset.dimension();

  const std::size_t d = dataset.dimension();
  std::size_t features_per_split = config.features_per_split;
  if (features_per_split == 0)
    features_per_split = static_cast<std::size_t>(
        std::llround(std::sqrt(static_cast<double>(d))));
  features_per_split = std::clamp<std::size_t>(features_per_split, 1, d);
  model.config.features_per_split = features_per_split;

  const auto y = detail::label_indices(dataset, model.classes);

  model.trees.reserve(config.n_trees);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    detail::TreeBuilder builder{dataset,
                                y,
                                model.classes.size(),
                                config,
                                features_per_split,
                                Rng(config.seed + t),
                                {}};
    std::vector<std::size_t> samples;
    samples.reserve(dataset.size());
    if (config.bootstrap) {
      for (std::size_t i = 0; i < dataset.size(); ++i)
        samples.push_back(
            static_cast<std::size_t>(builder.rng.below(dataset.size())));
    } else {
      samples.resize(dataset.size());
      std::iota(samples.begin(), samples.end(), 0);
    }
    builder.build(std::move(samples), 0);
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

struct ForestPrediction {
  std::string label;
  double vote_fraction = 0.0;  // trees voting for the winner / n_trees
};

// Majority vote over per-tree leaf-majority classes; ties resolve to the
// lexicographically smallest class.
inline ForestPrediction forest_predict_detailed(const ForestModel& model,
                                                const EmbeddingVector& vector) {
  if (vector.dimension() != model.dimension)
    fail(ErrorKind::dimension_mismatch,
         "forest_predict: vector dimension " +
             std::to_string(vector.dimension()) + " vs model " +
             std::to_string(model.dimension));
  std::vector<std::size_t> votes(model.classes.size(), 0);
  for (const DecisionTree& tree : model.trees)
    votes[detail::tree_vote(tree, vector.values)]++;
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[best]) best = c;
  return {model.classes[best],
          model.trees.empty()
              ? 0.0
              : static_cast<double>(votes[best]) /
                    static_cast<double>(model.trees.size())};
}

inline std::string forest_predict(const ForestModel& model,
                                  const EmbeddingVector& vector) {
  return forest_predict_detailed(model, vector).label;
}

}  // namespace lpg
