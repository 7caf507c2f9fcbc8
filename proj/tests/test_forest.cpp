#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "lpg/evaluation.hpp"
#include "lpg/forest.hpp"
#include "lpg/linear.hpp"

using namespace lpg;

namespace {

LabeledDataset make_dataset(std::vector<std::vector<double>> features,
                            std::vector<std::string> labels) {
  LabeledDataset dataset;
  for (auto& f : features)
    dataset.features.push_back(EmbeddingVector{std::move(f)});
  dataset.labels = std::move(labels);
  for (std::size_t i = 0; i < dataset.labels.size(); ++i)
    dataset.example_ids.push_back("x" + std::to_string(i));
  return dataset;
}

double accuracy(const ForestModel& model, const LabeledDataset& data) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (forest_predict(model, data.features[i]) == data.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("single-class data always predicts that class") {
  const auto dataset =
      make_dataset({{1.0, 2.0}, {3.0, 4.0}, {-1.0, 0.5}}, {"X", "X", "X"});
  ForestConfig config;
  config.n_trees = 5;
  const auto model = train_random_forest(dataset, config);
  REQUIRE(model.trees.size() == 5);
  REQUIRE(forest_predict(model, EmbeddingVector{{100.0, -100.0}}) == "X");
}

TEST_CASE("one fully-grown tree memorizes consistent data") {
  Rng rng(31);
  LabeledDataset dataset;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(6);
    for (double& v : x) v = rng.gaussian();
    dataset.features.push_back(EmbeddingVector{std::move(x)});
    dataset.labels.push_back("c" + std::to_string(rng.below(3)));
    dataset.example_ids.push_back("x" + std::to_string(i));
  }
  ForestConfig config;
  config.n_trees = 1;
  config.bootstrap = false;
  config.max_depth = 10'000;
  config.features_per_split = 6;  // all features
  const auto model = train_random_forest(dataset, config);
  REQUIRE(accuracy(model, dataset) == 1.0);
}

TEST_CASE("blob benchmark: forest and linear both exceed 0.95 holdout") {
  const auto blobs = fixtures::make_blobs(3, 100, 16, 42);
  const auto [train, test] = stratified_split(blobs, 0.2, 42);

  ForestConfig forest_config;
  forest_config.n_trees = 50;
  forest_config.seed = 42;
  const auto forest = train_random_forest(train, forest_config);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (forest_predict(forest, test.features[i]) == test.labels[i]) ++correct;
  const double forest_accuracy =
      static_cast<double>(correct) / static_cast<double>(test.size());
  REQUIRE(forest_accuracy >= 0.95);

  // cross-check with the independent linear route
  TrainConfig linear_config;
  linear_config.seed = 42;
  const auto linear = train_linear_sgd(train, linear_config, LossKind::logistic);
  correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (predict_linear(linear, test.features[i]) == test.labels[i]) ++correct;
  REQUIRE(static_cast<double>(correct) / static_cast<double>(test.size()) >=
          0.95);
}

TEST_CASE("forest classifies most training points correctly on blobs") {
  const auto blobs = fixtures::make_blobs(3, 50, 16, 42);
  ForestConfig config;
  config.n_trees = 50;
  config.seed = 42;
  const auto model = train_random_forest(blobs, config);
  REQUIRE(accuracy(model, blobs) >= 0.95);
}

TEST_CASE("training is deterministic given the seed") {
  const auto blobs = fixtures::make_blobs(2, 30, 8, 7);
  ForestConfig config;
  config.n_trees = 10;
  config.seed = 99;
  const auto a = train_random_forest(blobs, config);
  const auto b = train_random_forest(blobs, config);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
      REQUIRE(a.trees[t].nodes[n].is_leaf == b.trees[t].nodes[n].is_leaf);
      REQUIRE(a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature);
      REQUIRE(a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold);
      REQUIRE(a.trees[t].nodes[n].histogram == b.trees[t].nodes[n].histogram);
    }
  }
}

TEST_CASE("tie votes resolve to the lexicographically smallest class") {
  // Build a model by hand: two trees vote A, two vote B.
  ForestModel model;
  model.classes = {"A", "B"};
  model.dimension = 1;
  model.config.n_trees = 4;
  auto leaf_tree = [](std::size_t winner) {
    DecisionTree tree;
    TreeNode leaf;
    leaf.is_leaf = true;
    leaf.histogram = {winner == 0 ? std::size_t{3} : std::size_t{0},
                      winner == 1 ? std::size_t{3} : std::size_t{0}};
    tree.nodes.push_back(std::move(leaf));
    return tree;
  };
  model.trees = {leaf_tree(0), leaf_tree(0), leaf_tree(1), leaf_tree(1)};
  REQUIRE(forest_predict(model, EmbeddingVector{{0.0}}) == "A");
}

TEST_CASE("empty dataset and dimension mismatch are rejected") {
  ForestConfig config;
  REQUIRE_THROWS_MATCHES(
      train_random_forest(LabeledDataset{}, config), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::empty_dataset;
      }));

  const auto dataset = make_dataset({{1.0, 0.0}, {0.0, 1.0}}, {"A", "B"});
  config.n_trees = 2;
  const auto model = train_random_forest(dataset, config);
  REQUIRE_THROWS_MATCHES(
      forest_predict(model, EmbeddingVector{{1.0}}), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::dimension_mismatch;
      }));
}

TEST_CASE("features_per_split defaults to round(sqrt(d)) clamped") {
  const auto blobs = fixtures::make_blobs(2, 10, 16, 3);
  ForestConfig config;
  config.n_trees = 1;
  const auto model = train_random_forest(blobs, config);
  REQUIRE(model.config.features_per_split == 4);  // sqrt(16)

  const auto narrow = fixtures::make_blobs(2, 10, 2, 3);
  const auto narrow_model = train_random_forest(narrow, config);
  REQUIRE(narrow_model.config.features_per_split == 1);  // round(sqrt(2))=1
}
