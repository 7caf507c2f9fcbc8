#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lpg/dataset.hpp"
#include "lpg/errors.hpp"
#include "lpg/rng.hpp"

namespace lpg {

enum class LossKind { logistic, hinge };

// Linear classifier trained by SGD: multinomial softmax cross-entropy or
// one-vs-rest hinge. Per class, weights hold d+1 components with the bias
// last; classes are sorted lexicographically.
struct LinearModel {
  std::vector<std::string> classes;
  std::vector<std::vector<double>> weights;
  LossKind loss_kind = LossKind::logistic;

  std::size_t dimension() const {
    return weights.empty() ? 0 : weights.front().size() - 1;
  }
};

struct TrainConfig {
  std::size_t epochs = 50;
  double eta0 = 0.1;       // learning-rate schedule eta_t = eta0 / (1 + lambda*t)
  double lambda = 1e-4;    // L2 strength (bias not regularized)
  std::uint64_t seed = 42;
  bool shuffle = true;
};

inline void validate(const TrainConfig& config) {
  if (config.epochs < 1) fail(ErrorKind::usage, "epochs must be >= 1");
  if (!(config.eta0 > 0.0)) fail(ErrorKind::usage, "eta0 must be > 0");
  if (config.lambda < 0.0) fail(ErrorKind::usage, "lambda must be >= 0");
}

namespace detail {

inline double dot_with_bias(const std::vector<double>& weights,
                            const std::vector<double>& x) {
  double sum = weights.back();  // bias, feature value 1
  for (std::size_t j = 0; j < x.size(); ++j) sum += weights[j] * x[j];
  return sum;
}

inline std::vector<double> class_scores(const LinearModel& model,
                                        const std::vector<double>& x) {
  std::vector<double> scores(model.classes.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c)
    scores[c] = dot_with_bias(model.weights[c], x);
  return scores;
}

inline std::vector<double> softmax(std::vector<double> scores) {
  const double max_score = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - max_score);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

}  // namespace detail

// Mean softmax cross-entropy of the model on the dataset (no L2 term);
// the quantity the finite-difference gradient check differentiates.
inline double softmax_cross_entropy(const LinearModel& model,
                                    const LabeledDataset& dataset) {
  const auto y = detail::label_indices(dataset, model.classes);
  double loss = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto probs = detail::softmax(
        detail::class_scores(model, dataset.features[i].values));
    loss += -std::log(std::max(probs[y[i]], 1e-300));
  }
  return loss / static_cast<double>(dataset.size());
}

// Analytic gradient of softmax_cross_entropy w.r.t. every weight component,
// laid out like LinearModel::weights.
inline std::vector<std::vector<double>> softmax_cross_entropy_gradient(
    const LinearModel& model, const LabeledDataset& dataset) {
  const auto y = detail::label_indices(dataset, model.classes);
  const std::size_t d = dataset.dimension();
  std::vector<std::vector<double>> grad(model.classes.size(),
                                        std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& x = dataset.features[i].values;
    auto probs = detail::softmax(detail::class_scores(model, x));
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
      const double delta = probs[c] - (y[i] == c ? 1.0 : 0.0);
      for (std::size_t j = 0; j < d; ++j) grad[c][j] += delta * x[j];
      grad[c][d] += delta;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(dataset.size());
  for (auto& row : grad)
    for (double& g : row) g *= inv_n;
  return grad;
}

// SGD training. Deterministic given the seed; two runs on identical inputs
// produce bitwise-identical weights. loss_history, when given, receives the
// mean per-example training loss of each epoch (data term only).
inline LinearModel train_linear_sgd(const LabeledDataset& dataset,
                                    const TrainConfig& config,
                                    LossKind loss_kind,
                                    std::vector<double>* loss_history = nullptr) {
  validate(dataset);
  validate(config);

  LinearModel model;
  model.loss_kind = loss_kind;
  model.classes = sorted_classes(dataset);
  if (loss_kind == LossKind::hinge && model.classes.size() < 2)
    fail(ErrorKind::usage, "hinge one-vs-rest requires at least 2 classes");

  const std::size_t d = dataset.dimension();
  const std::size_t n_classes = model.classes.size();
  model.weights.assign(n_classes, std::vector<double>(d + 1, 0.0));
  const auto y = detail::label_indices(dataset, model.classes);

  Rng rng(config.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t i : order) {
      const auto& x = dataset.features[i].values;
      const double eta =
          config.eta0 / (1.0 + config.lambda * static_cast<double>(step));
      ++step;
      if (loss_kind == LossKind::logistic) {
        auto probs = detail::softmax(detail::class_scores(model, x));
        epoch_loss += -std::log(std::max(probs[y[i]], 1e-300));
        for (std::size_t c = 0; c < n_classes; ++c) {
          const double delta = probs[c] - (y[i] == c ? 1.0 : 0.0);
          auto& w = model.weights[c];
          for (std::size_t j = 0; j < d; ++j)
            w[j] -= eta * (delta * x[j] + config.lambda * w[j]);
          w[d] -= eta * delta;  // bias: no regularization
        }
      } else {
        for (std::size_t c = 0; c < n_classes; ++c) {
          const double target = (y[i] == c) ? 1.0 : -1.0;
          auto& w = model.weights[c];
          const double margin = target * detail::dot_with_bias(w, x);
          epoch_loss += std::max(0.0, 1.0 - margin);
          const bool violated = margin < 1.0;
          for (std::size_t j = 0; j < d; ++j) {
            const double grad =
                (violated ? -target * x[j] : 0.0) + config.lambda * w[j];
            w[j] -= eta * grad;
          }
          if (violated) w[d] -= eta * (-target);
        }
      }
    }
    if (loss_history)
      loss_history->push_back(epoch_loss / static_cast<double>(dataset.size()));
  }
  return model;
}

// Argmax over class scores; ties resolve to the lexicographically smallest
// class (classes are sorted, so the first strict maximum wins).
inline std::string predict_linear(const LinearModel& model,
                                  const EmbeddingVector& vector) {
  if (vector.dimension() != model.dimension())
    fail(ErrorKind::dimension_mismatch,
         "predict_linear: vector dimension " +
             std::to_string(vector.dimension()) + " vs model " +
             std::to_string(model.dimension()));
  const auto scores = detail::class_scores(model, vector.values);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return model.classes[best];
}

// Class probabilities (softmax over scores); meaningful for logistic models.
inline std::vector<double> predict_linear_proba(const LinearModel& model,
                                                const EmbeddingVector& vector) {
  if (vector.dimension() != model.dimension())
    fail(ErrorKind::dimension_mismatch,
         "predict_linear_proba: dimension mismatch");
  return detail::softmax(detail::class_scores(model, vector.values));
}

// Raw decision value for ranking: the top class score.
inline double linear_decision_value(const LinearModel& model,
                                    const EmbeddingVector& vector) {
  const auto scores = detail::class_scores(model, vector.values);
  return *std::max_element(scores.begin(), scores.end());
}

}  // namespace lpg
