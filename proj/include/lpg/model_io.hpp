#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpg/dataset.hpp"
#include "lpg/errors.hpp"
#include "lpg/forest.hpp"
#include "lpg/knn.hpp"
#include "lpg/linear.hpp"

namespace lpg {

// k-NN "model": the retained training dataset plus k.
struct KnnModel {
  LabeledDataset train;
  std::size_t k = 5;
};

using TrainedModel = std::variant<LinearModel, ForestModel, KnnModel>;

inline std::size_t model_dimension(const TrainedModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) return m.dimension();
        if constexpr (std::is_same_v<T, ForestModel>) return m.dimension;
        if constexpr (std::is_same_v<T, KnnModel>) return m.train.dimension();
      },
      model);
}

inline std::vector<std::string> model_classes(const TrainedModel& model) {
  return std::visit(
      [](const auto& m) -> std::vector<std::string> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KnnModel>)
          return sorted_classes(m.train);
        else
          return m.classes;
      },
      model);
}

struct ScoredPrediction {
  std::string label;
  double raw_score = 0.0;  // probability (logistic) or margin/vote fraction
  bool is_probability = false;
};

inline ScoredPrediction predict_scored(const TrainedModel& model,
                                       const EmbeddingVector& vector) {
  if (const auto* linear = std::get_if<LinearModel>(&model)) {
    const std::string label = predict_linear(*linear, vector);
    if (linear->loss_kind == LossKind::logistic) {
      const auto probs = predict_linear_proba(*linear, vector);
      double best = 0.0;
      for (double p : probs) best = std::max(best, p);
      return {label, best, true};
    }
    return {label, linear_decision_value(*linear, vector), false};
  }
  if (const auto* forest = std::get_if<ForestModel>(&model)) {
    const auto prediction = forest_predict_detailed(*forest, vector);
    return {prediction.label, prediction.vote_fraction, false};
  }
  const auto& knn = std::get<KnnModel>(model);
  const auto prediction = knn_predict_detailed(knn.train, vector, knn.k);
  return {prediction.label, prediction.vote_fraction, false};
}

inline std::string predict_label(const TrainedModel& model,
                                 const EmbeddingVector& vector) {
  return predict_scored(model, vector).label;
}

namespace detail {

inline nlohmann::ordered_json tree_to_json(const DecisionTree& tree,
                                           const std::vector<std::string>& classes,
                                           std::size_t index) {
  const TreeNode& node = tree.nodes[index];
  nlohmann::ordered_json out;
  if (node.is_leaf) {
    nlohmann::ordered_json histogram = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < node.histogram.size(); ++c)
      if (node.histogram[c] > 0) histogram[classes[c]] = node.histogram[c];
    out["leaf"] = std::move(histogram);
  } else {
    out["feature"] = node.feature;
    out["threshold"] = node.threshold;
    out["left"] = tree_to_json(tree, classes, node.left);
    out["right"] = tree_to_json(tree, classes, node.right);
  }
  return out;
}

inline std::size_t tree_from_json(const nlohmann::json& value,
                                  const std::vector<std::string>& classes,
                                  DecisionTree& tree) {
  const std::size_t index = tree.nodes.size();
  tree.nodes.emplace_back();
  if (value.contains("leaf")) {
    tree.nodes[index].is_leaf = true;
    std::vector<std::size_t> histogram(classes.size(), 0);
    for (const auto& [label, count] : value.at("leaf").items()) {
      const auto it = std::lower_bound(classes.begin(), classes.end(), label);
      if (it == classes.end() || *it != label)
        fail(ErrorKind::malformed_record,
             "model file: leaf histogram names unknown class '" + label + "'");
      histogram[static_cast<std::size_t>(it - classes.begin())] =
          count.get<std::size_t>();
    }
    tree.nodes[index].histogram = std::move(histogram);
  } else {
    tree.nodes[index].is_leaf = false;
    tree.nodes[index].feature = value.at("feature").get<std::size_t>();
    tree.nodes[index].threshold = value.at("threshold").get<double>();
    const std::size_t left = tree_from_json(value.at("left"), classes, tree);
    const std::size_t right = tree_from_json(value.at("right"), classes, tree);
    tree.nodes[index].left = left;
    tree.nodes[index].right = right;
  }
  return index;
}

}  // namespace detail

// Versioned JSON model document:
// {"format":1,"kind":"linear|forest|knn","classes":[...],"dimension":d,...}
inline nlohmann::ordered_json model_to_json(const TrainedModel& model) {
  nlohmann::ordered_json out;
  out["format"] = 1;
  out["classes"] = model_classes(model);
  out["dimension"] = model_dimension(model);
  if (const auto* linear = std::get_if<LinearModel>(&model)) {
    out["kind"] = "linear";
    out["loss"] = linear->loss_kind == LossKind::logistic ? "logistic" : "hinge";
    out["weights"] = linear->weights;
  } else if (const auto* forest = std::get_if<ForestModel>(&model)) {
    out["kind"] = "forest";
    nlohmann::ordered_json config;
    config["n_trees"] = forest->config.n_trees;
    config["max_depth"] = forest->config.max_depth;
    config["min_samples_leaf"] = forest->config.min_samples_leaf;
    config["features_per_split"] = forest->config.features_per_split;
    config["bootstrap"] = forest->config.bootstrap;
    config["seed"] = forest->config.seed;
    out["config"] = std::move(config);
    nlohmann::ordered_json trees = nlohmann::ordered_json::array();
    for (const DecisionTree& tree : forest->trees)
      trees.push_back(detail::tree_to_json(tree, forest->classes, 0));
    out["trees"] = std::move(trees);
  } else {
    const auto& knn = std::get<KnnModel>(model);
    out["kind"] = "knn";
    out["k"] = knn.k;
    nlohmann::ordered_json dataset;
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (const EmbeddingVector& v : knn.train.features)
      features.push_back(v.values);
    dataset["features"] = std::move(features);
    dataset["labels"] = knn.train.labels;
    dataset["example_ids"] = knn.train.example_ids;
    out["dataset"] = std::move(dataset);
  }
  return out;
}

inline TrainedModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", 0) != 1)
    fail(ErrorKind::malformed_record, "model file: unsupported format");
  const std::string kind = doc.value("kind", "");
  const auto classes = doc.at("classes").get<std::vector<std::string>>();
  const auto dimension = doc.at("dimension").get<std::size_t>();

  if (kind == "linear") {
    LinearModel model;
    model.classes = classes;
    const std::string loss = doc.value("loss", "");
    if (loss == "logistic")
      model.loss_kind = LossKind::logistic;
    else if (loss == "hinge")
      model.loss_kind = LossKind::hinge;
    else
      fail(ErrorKind::malformed_record, "model file: unknown loss kind");
    model.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
    if (model.weights.size() != classes.size())
      fail(ErrorKind::malformed_record, "model file: weights/classes mismatch");
    for (const auto& row : model.weights)
      if (row.size() != dimension + 1)
        fail(ErrorKind::malformed_record, "model file: weight row length");
    return model;
  }
  if (kind == "forest") {
    ForestModel model;
    model.classes = classes;
    model.dimension = dimension;
    const auto& config = doc.at("config");
    model.config.n_trees = config.at("n_trees").get<std::size_t>();
    model.config.max_depth = config.at("max_depth").get<std::size_t>();
    model.config.min_samples_leaf =
        config.at("min_samples_leaf").get<std::size_t>();
    model.config.features_per_split =
        config.at("features_per_split").get<std::size_t>();
    model.config.bootstrap = config.at("bootstrap").get<bool>();
    model.config.seed = config.at("seed").get<std::uint64_t>();
    for (const auto& tree_doc : doc.at("trees")) {
      DecisionTree tree;
      detail::tree_from_json(tree_doc, model.classes, tree);
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.size() != model.config.n_trees)
      fail(ErrorKind::malformed_record, "model file: tree count mismatch");
    return model;
  }
  if (kind == "knn") {
    KnnModel model;
    model.k = doc.at("k").get<std::size_t>();
    const auto& dataset = doc.at("dataset");
    for (const auto& row : dataset.at("features")) {
      EmbeddingVector v;
      v.values = row.get<std::vector<double>>();
      model.train.features.push_back(std::move(v));
    }
    model.train.labels =
        dataset.at("labels").get<std::vector<std::string>>();
    model.train.example_ids =
        dataset.at("example_ids").get<std::vector<std::string>>();
    validate(model.train);
    return model;
  }
  fail(ErrorKind::malformed_record, "model file: unknown kind '" + kind + "'");
}

inline void save_model(const TrainedModel& model,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write model file: " + path.string());
  out << model_to_json(model).dump(2) << '\n';
  if (!out) fail(ErrorKind::io, "failed writing model file: " + path.string());
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot read model file: " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded())
    fail(ErrorKind::malformed_record, "model file is not valid JSON");
  return model_from_json(doc);
}

}  // namespace lpg
