#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "lpg/linear.hpp"
#include "lpg/rng.hpp"

using namespace lpg;

namespace {

LabeledDataset make_dataset(std::vector<std::vector<double>> features,
                            std::vector<std::string> labels) {
  LabeledDataset dataset;
  for (auto& f : features)
    dataset.features.push_back(EmbeddingVector{std::move(f)});
  dataset.labels = std::move(labels);
  dataset.example_ids.resize(dataset.labels.size());
  for (std::size_t i = 0; i < dataset.example_ids.size(); ++i)
    dataset.example_ids[i] = "x" + std::to_string(i);
  return dataset;
}

// The 1-D two-class fixture is separable by a threshold; verified by
// exhaustive threshold search, which is the oracle for the accuracy claim.
bool separable_by_threshold(const LabeledDataset& dataset) {
  for (double t : {-1.5, -0.5, 0.0, 0.5, 1.5}) {
    bool ok = true;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const bool is_p = dataset.labels[i] == "P";
      if ((dataset.features[i].values[0] > t) != is_p) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

double training_accuracy(const LinearModel& model,
                         const LabeledDataset& dataset) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (predict_linear(model, dataset.features[i]) == dataset.labels[i])
      ++correct;
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

LabeledDataset random_dataset(Rng& rng, std::size_t n, std::size_t d,
                              std::size_t n_classes) {
  LabeledDataset dataset;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(d);
    for (double& v : x) v = rng.gaussian();
    dataset.features.push_back(EmbeddingVector{std::move(x)});
    dataset.labels.push_back("c" + std::to_string(rng.below(n_classes)));
    dataset.example_ids.push_back("x" + std::to_string(i));
  }
  return dataset;
}

}  // namespace

TEST_CASE("separable 1-D data reaches training accuracy 1.0") {
  const auto dataset =
      make_dataset({{-2.0}, {-1.0}, {1.0}, {2.0}}, {"N", "N", "P", "P"});
  REQUIRE(separable_by_threshold(dataset));

  TrainConfig config;
  config.seed = 42;
  for (LossKind loss : {LossKind::logistic, LossKind::hinge}) {
    const auto model = train_linear_sgd(dataset, config, loss);
    REQUIRE(training_accuracy(model, dataset) == 1.0);
    // the learned weight must be positive toward P, so [-3] classifies N
    REQUIRE(predict_linear(model, EmbeddingVector{{-3.0}}) == "N");
    REQUIRE(predict_linear(model, EmbeddingVector{{3.0}}) == "P");
  }
}

TEST_CASE("single-class logistic degenerates to a constant predictor") {
  const auto dataset = make_dataset({{1.0}, {-5.0}}, {"only", "only"});
  TrainConfig config;
  const auto model = train_linear_sgd(dataset, config, LossKind::logistic);
  REQUIRE(predict_linear(model, EmbeddingVector{{100.0}}) == "only");
  REQUIRE(predict_linear(model, EmbeddingVector{{-100.0}}) == "only");
  const auto probs = predict_linear_proba(model, EmbeddingVector{{3.0}});
  REQUIRE(probs.size() == 1);
  REQUIRE(probs[0] == 1.0);
}

TEST_CASE("hinge requires at least two classes") {
  const auto dataset = make_dataset({{1.0}, {2.0}}, {"only", "only"});
  TrainConfig config;
  REQUIRE_THROWS_AS(train_linear_sgd(dataset, config, LossKind::hinge), Error);
}

TEST_CASE("training is bitwise deterministic under a fixed seed") {
  Rng rng(5);
  const auto dataset = random_dataset(rng, 30, 6, 3);
  TrainConfig config;
  config.seed = 77;
  for (LossKind loss : {LossKind::logistic, LossKind::hinge}) {
    const auto a = train_linear_sgd(dataset, config, loss);
    const auto b = train_linear_sgd(dataset, config, loss);
    REQUIRE(a.weights == b.weights);
  }
}

TEST_CASE("zero-weight ties resolve to the lexicographically smallest class") {
  LinearModel model;
  model.classes = {"A", "B"};
  model.weights = {{0.0, 0.0}, {0.0, 0.0}};  // 1-D + bias
  model.loss_kind = LossKind::logistic;
  REQUIRE(predict_linear(model, EmbeddingVector{{1.0}}) == "A");
}

TEST_CASE("logistic probabilities sum to one") {
  Rng rng(11);
  const auto dataset = random_dataset(rng, 40, 5, 4);
  TrainConfig config;
  const auto model = train_linear_sgd(dataset, config, LossKind::logistic);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> x(5);
    for (double& v : x) v = rng.gaussian();
    const auto probs = predict_linear_proba(model, EmbeddingVector{x});
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    REQUIRE(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("scaling all scores by c > 0 leaves the argmax unchanged") {
  Rng rng(13);
  const auto dataset = random_dataset(rng, 25, 4, 3);
  TrainConfig config;
  const auto model = train_linear_sgd(dataset, config, LossKind::hinge);
  for (double c : {0.5, 2.0, 17.0}) {
    LinearModel scaled = model;
    for (auto& row : scaled.weights)
      for (double& w : row) w *= c;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> x(4);
      for (double& v : x) v = rng.gaussian();
      const EmbeddingVector q{x};
      REQUIRE(predict_linear(model, q) == predict_linear(scaled, q));
    }
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const auto dataset = make_dataset({{1.0, 0.0}, {0.0, 1.0}}, {"A", "B"});
  TrainConfig config;
  const auto model = train_linear_sgd(dataset, config, LossKind::logistic);
  REQUIRE_THROWS_MATCHES(
      predict_linear(model, EmbeddingVector{{1.0, 2.0, 3.0}}), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::dimension_mismatch;
      }));
}

TEST_CASE("empty dataset is rejected") {
  LabeledDataset empty;
  TrainConfig config;
  REQUIRE_THROWS_MATCHES(
      train_linear_sgd(empty, config, LossKind::logistic), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::empty_dataset;
      }));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(42);
  const auto dataset = random_dataset(rng, 5, 4, 3);

  LinearModel model;
  model.classes = sorted_classes(dataset);
  model.loss_kind = LossKind::logistic;
  model.weights.assign(model.classes.size(), std::vector<double>(5, 0.0));
  for (auto& row : model.weights)
    for (double& w : row) w = rng.gaussian() * 0.5;

  const auto analytic = softmax_cross_entropy_gradient(model, dataset);
  const double h = 1e-5;
  for (std::size_t c = 0; c < model.weights.size(); ++c) {
    for (std::size_t j = 0; j < model.weights[c].size(); ++j) {
      LinearModel plus = model;
      LinearModel minus = model;
      plus.weights[c][j] += h;
      minus.weights[c][j] -= h;
      const double fd = (softmax_cross_entropy(plus, dataset) -
                         softmax_cross_entropy(minus, dataset)) /
                        (2.0 * h);
      const double a = analytic[c][j];
      const double rel =
          std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-8});
      REQUIRE(rel <= 1e-4);
    }
  }
}

TEST_CASE("mean epoch loss is non-increasing on separable data") {
  // Two well-separated 4-D clusters.
  Rng rng(21);
  LabeledDataset dataset;
  for (int i = 0; i < 40; ++i) {
    const bool positive = i % 2 == 0;
    std::vector<double> x(4);
    for (double& v : x) v = rng.gaussian() * 0.3 + (positive ? 2.0 : -2.0);
    dataset.features.push_back(EmbeddingVector{std::move(x)});
    dataset.labels.push_back(positive ? "P" : "N");
    dataset.example_ids.push_back("x" + std::to_string(i));
  }

  TrainConfig config;
  config.epochs = 10;
  config.seed = 42;
  std::vector<double> losses;
  train_linear_sgd(dataset, config, LossKind::logistic, &losses);
  REQUIRE(losses.size() == 10);
  for (std::size_t e = 1; e < losses.size(); ++e)
    REQUIRE(losses[e] <= losses[e - 1] + 1e-12);
}
