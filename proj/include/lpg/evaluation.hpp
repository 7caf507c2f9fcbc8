#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpg/dataset.hpp"
#include "lpg/errors.hpp"
#include "lpg/model_io.hpp"
#include "lpg/rng.hpp"

namespace lpg {

// Per-class stratified holdout: round(class_size * test_fraction) examples
// to test (at least 1 test and 1 train per class), chosen by seeded shuffle
// within the class. Classes are processed in sorted order.
inline std::pair<LabeledDataset, LabeledDataset> stratified_split(
    const LabeledDataset& dataset, double test_fraction, std::uint64_t seed) {
  validate(dataset);
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorKind::usage, "test_fraction must be in (0, 1)");

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    by_class[dataset.labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<std::size_t> test_indices;
  std::vector<std::size_t> train_indices;
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2)
      fail(ErrorKind::class_too_small,
           "class '" + label + "' has fewer than 2 examples");
    const auto size = static_cast<double>(indices.size());
    auto n_test = static_cast<std::size_t>(std::llround(size * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, indices.size() - 1);
    rng.shuffle(indices);
    for (std::size_t i = 0; i < indices.size(); ++i)
      (i < n_test ? test_indices : train_indices).push_back(indices[i]);
  }
  std::sort(test_indices.begin(), test_indices.end());
  std::sort(train_indices.begin(), train_indices.end());
  return {subset(dataset, train_indices), subset(dataset, test_indices)};
}

struct ConfusionMatrix {
  std::vector<std::string> classes;  // union of observed, sorted
  std::vector<std::vector<std::size_t>> counts;  // counts[true][predicted]
};

inline ConfusionMatrix confusion_matrix(
    const std::vector<std::string>& y_true,
    const std::vector<std::string>& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    fail(ErrorKind::length_mismatch,
         "y_true and y_pred must have equal nonzero lengths");
  std::set<std::string> observed(y_true.begin(), y_true.end());
  observed.insert(y_pred.begin(), y_pred.end());
  ConfusionMatrix matrix;
  matrix.classes.assign(observed.begin(), observed.end());
  matrix.counts.assign(matrix.classes.size(),
                       std::vector<std::size_t>(matrix.classes.size(), 0));
  auto index_of = [&](const std::string& label) {
    return static_cast<std::size_t>(
        std::lower_bound(matrix.classes.begin(), matrix.classes.end(), label) -
        matrix.classes.begin());
  };
  for (std::size_t i = 0; i < y_true.size(); ++i)
    matrix.counts[index_of(y_true[i])][index_of(y_pred[i])]++;
  return matrix;
}

struct Metrics {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
};

// Accuracy plus support-weighted precision/recall/F1. Weighted recall is
// computed as total true positives over N — algebraically identical to
// accuracy, and bitwise equal here by construction.
inline Metrics metrics(const std::vector<std::string>& y_true,
                       const std::vector<std::string>& y_pred) {
  const ConfusionMatrix matrix = confusion_matrix(y_true, y_pred);
  const std::size_t n_classes = matrix.classes.size();
  const auto total = static_cast<double>(y_true.size());

  std::size_t total_tp = 0;
  double weighted_precision = 0.0;
  double weighted_f1 = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::size_t tp = matrix.counts[c][c];
    std::size_t support = 0;
    std::size_t predicted = 0;
    for (std::size_t j = 0; j < n_classes; ++j) {
      support += matrix.counts[c][j];
      predicted += matrix.counts[j][c];
    }
    total_tp += tp;
    const double precision =
        predicted == 0 ? 0.0
                       : static_cast<double>(tp) / static_cast<double>(predicted);
    const double recall =
        support == 0 ? 0.0
                     : static_cast<double>(tp) / static_cast<double>(support);
    const double f1 = (precision + recall) == 0.0
                          ? 0.0
                          : 2.0 * precision * recall / (precision + recall);
    weighted_precision += static_cast<double>(support) * precision;
    weighted_f1 += static_cast<double>(support) * f1;
  }

  Metrics out;
  out.accuracy = static_cast<double>(total_tp) / total;
  out.weighted_precision = weighted_precision / total;
  out.weighted_recall = static_cast<double>(total_tp) / total;
  out.weighted_f1 = weighted_f1 / total;
  return out;
}

// The classifier set the report knows how to name, in the fixed row order.
enum class ClassifierKind { forest, logistic, hinge, knn };

struct ClassifierSpec {
  std::string name;  // one of the canonical display names
  ClassifierKind kind = ClassifierKind::logistic;
  TrainConfig train;          // linear kinds
  ForestConfig forest;        // forest kind
  std::size_t k = 5;          // knn kind
};

// Canonical display names in report row order.
inline const std::vector<std::pair<std::string, ClassifierKind>>&
classifier_registry() {
  static const std::vector<std::pair<std::string, ClassifierKind>> registry = {
      {"Random Forest", ClassifierKind::forest},
      {"Logistic Regression", ClassifierKind::logistic},
      {"SGDClassifier", ClassifierKind::hinge},
      {"Support Vector Machine", ClassifierKind::hinge},
      {"k-Nearest Neighbors", ClassifierKind::knn},
  };
  return registry;
}

inline std::optional<ClassifierKind> classifier_kind_for_name(
    const std::string& name) {
  for (const auto& [known, kind] : classifier_registry())
    if (known == name) return kind;
  return std::nullopt;
}

inline TrainedModel train_classifier(const ClassifierSpec& spec,
                                     const LabeledDataset& train) {
  switch (spec.kind) {
    case ClassifierKind::forest:
      return train_random_forest(train, spec.forest);
    case ClassifierKind::logistic:
      return train_linear_sgd(train, spec.train, LossKind::logistic);
    case ClassifierKind::hinge:
      return train_linear_sgd(train, spec.train, LossKind::hinge);
    case ClassifierKind::knn:
      return KnnModel{train, spec.k};
  }
  fail(ErrorKind::usage, "unknown classifier kind");
}

struct EvaluationReport {
  struct Row {
    std::string name;
    Metrics metrics;
  };
  std::vector<Row> rows;  // fixed registry order
  std::string dataset_descriptor;
  std::string split_descriptor;
  std::uint64_t seed = 0;
};

// Trains and scores every spec on one shared stratified split. Per-spec
// seeds are derived from (seed, name) so the results are independent of the
// order specs are listed in.
inline EvaluationReport run_evaluation(const LabeledDataset& dataset,
                                       std::vector<ClassifierSpec> specs,
                                       double test_fraction,
                                       std::uint64_t seed,
                                       const std::string& dataset_descriptor =
                                           "") {
  validate(dataset);
  if (specs.empty())
    fail(ErrorKind::usage, "at least one classifier spec is required");
  auto [train, test] = stratified_split(dataset, test_fraction, seed);

  auto registry_rank = [](const std::string& name) {
    const auto& registry = classifier_registry();
    for (std::size_t i = 0; i < registry.size(); ++i)
      if (registry[i].first == name) return i;
    return registry.size();
  };
  std::stable_sort(specs.begin(), specs.end(),
                   [&](const ClassifierSpec& a, const ClassifierSpec& b) {
                     return registry_rank(a.name) < registry_rank(b.name);
                   });

  EvaluationReport report;
  report.seed = seed;
  report.dataset_descriptor =
      dataset_descriptor.empty()
          ? "n=" + std::to_string(dataset.size()) +
                " d=" + std::to_string(dataset.dimension()) +
                " classes=" + std::to_string(sorted_classes(dataset).size())
          : dataset_descriptor;
  {
    char fraction[32];
    auto [ptr, ec] =
        std::to_chars(fraction, fraction + sizeof(fraction), test_fraction);
    report.split_descriptor = "stratified holdout test_fraction=" +
                              std::string(fraction, ptr);
  }

  for (ClassifierSpec spec : specs) {
    spec.train.seed = mix_seed(seed, spec.name);
    spec.forest.seed = mix_seed(seed, spec.name);
    const TrainedModel model = train_classifier(spec, train);
    std::vector<std::string> predictions;
    predictions.reserve(test.size());
    for (const EmbeddingVector& v : test.features)
      predictions.push_back(predict_label(model, v));
    report.rows.push_back({spec.name, metrics(test.labels, predictions)});
  }
  return report;
}

// Rounds to 3 decimals, half-up, operating on the shortest decimal
// representation: 0.99750 -> "0.998" even though the nearest double sits
// just below the decimal midpoint.
inline std::string round3_half_up(double value) {
  const bool negative = value < 0.0;
  if (negative) value = -value;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::fixed);
  std::string digits(buf, ptr);
  auto dot = digits.find('.');
  if (dot == std::string::npos) {
    dot = digits.size();
    digits += ".";
  }
  digits += "0000";  // ensure at least 4 decimals for the carry check
  std::string integral = digits.substr(0, dot);
  std::string decimals = digits.substr(dot + 1);
  bool carry = decimals[3] >= '5';
  decimals = decimals.substr(0, 3);
  for (std::size_t i = 3; carry && i-- > 0;) {
    if (decimals[i] == '9') {
      decimals[i] = '0';
    } else {
      decimals[i] += 1;
      carry = false;
    }
  }
  if (carry) {
    for (std::size_t i = integral.size(); carry && i-- > 0;) {
      if (integral[i] == '9') {
        integral[i] = '0';
      } else {
        integral[i] += 1;
        carry = false;
      }
    }
    if (carry) integral.insert(integral.begin(), '1');
  }
  return (negative ? "-" : "") + integral + "." + decimals;
}

// Pipe-delimited results table.
inline std::string render_report(const EvaluationReport& report) {
  if (report.rows.empty())
    fail(ErrorKind::usage, "cannot render an empty report");
  std::string out;
  out += "| Classifier | Accuracy | Precision | Recall | F1 Score |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& row : report.rows) {
    out += "| " + row.name + " | " + round3_half_up(row.metrics.accuracy) +
           " | " + round3_half_up(row.metrics.weighted_precision) + " | " +
           round3_half_up(row.metrics.weighted_recall) + " | " +
           round3_half_up(row.metrics.weighted_f1) + " |\n";
  }
  return out;
}

// Machine-readable report with full-precision floats.
inline nlohmann::ordered_json report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json out;
  out["dataset"] = report.dataset_descriptor;
  out["split"] = report.split_descriptor;
  out["seed"] = report.seed;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json entry;
    entry["classifier"] = row.name;
    entry["accuracy"] = row.metrics.accuracy;
    entry["weighted_precision"] = row.metrics.weighted_precision;
    entry["weighted_recall"] = row.metrics.weighted_recall;
    entry["weighted_f1"] = row.metrics.weighted_f1;
    rows.push_back(std::move(entry));
  }
  out["classifiers"] = std::move(rows);
  return out;
}

}  // namespace lpg
