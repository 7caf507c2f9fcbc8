#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lpg/knn.hpp"
#include "lpg/rng.hpp"

using namespace lpg;

namespace {

LabeledDataset make_dataset(std::vector<std::vector<double>> features,
                            std::vector<std::string> labels,
                            std::vector<std::string> ids = {}) {
  LabeledDataset dataset;
  for (auto& f : features)
    dataset.features.push_back(EmbeddingVector{std::move(f)});
  dataset.labels = std::move(labels);
  if (ids.empty()) {
    for (std::size_t i = 0; i < dataset.labels.size(); ++i)
      dataset.example_ids.push_back("x" + std::to_string(i));
  } else {
    dataset.example_ids = std::move(ids);
  }
  return dataset;
}

}  // namespace

TEST_CASE("k=1 returns the label of an exactly matching vector") {
  const auto train =
      make_dataset({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}}, {"A", "B", "C"});
  REQUIRE(knn_predict(train, EmbeddingVector{{0.0, 1.0}}, 1) == "B");
}

TEST_CASE("three-candidate oracle: nearest by direct cosine computation") {
  const auto train = make_dataset({{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}},
                                  {"A", "A", "B"});
  const EmbeddingVector query{{1.0, 0.05}};
  // oracle: compute the three cosine distances directly
  double best = 2.0;
  std::string best_label;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const double d = 1.0 - cosine_similarity(query, train.features[i]);
    if (d < best) {
      best = d;
      best_label = train.labels[i];
    }
  }
  REQUIRE(best_label == "A");
  REQUIRE(knn_predict(train, query, 1) == "A");
}

TEST_CASE("k equal to train size reduces to global majority") {
  const auto train = make_dataset({{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}},
                                  {"A", "A", "B"});
  REQUIRE(knn_predict(train, EmbeddingVector{{0.0, 1.0}}, 3) == "A");
}

TEST_CASE("distance ties break by example_id ascending") {
  // two identical vectors with different labels; ids decide which is first
  const auto train = make_dataset({{1.0, 0.0}, {1.0, 0.0}}, {"B", "A"},
                                  {"id2", "id1"});
  // k=1: both at distance 0; id1 sorts first and carries label A
  REQUIRE(knn_predict(train, EmbeddingVector{{1.0, 0.0}}, 1) == "A");
}

TEST_CASE("vote ties break by smaller summed distance then class name") {
  SECTION("summed distance decides") {
    // k=2: one A very close, one B farther; 1 vote each
    const auto train = make_dataset({{1.0, 0.0}, {0.0, 1.0}}, {"A", "B"});
    const EmbeddingVector query{{1.0, 0.1}};
    REQUIRE(knn_predict(train, query, 2) == "A");
  }
  SECTION("equal distances fall back to lexicographic class") {
    const auto train = make_dataset({{1.0, 0.0}, {0.0, 1.0}}, {"Z", "B"});
    const EmbeddingVector query{{1.0, 1.0}};  // equidistant
    REQUIRE(knn_predict(train, query, 2) == "B");
  }
}

TEST_CASE("k out of range and dimension mismatches are rejected") {
  const auto train = make_dataset({{1.0, 0.0}, {0.0, 1.0}}, {"A", "B"});
  REQUIRE_THROWS_MATCHES(
      knn_predict(train, EmbeddingVector{{1.0, 0.0}}, 0), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::k_out_of_range;
      }));
  REQUIRE_THROWS_AS(knn_predict(train, EmbeddingVector{{1.0, 0.0}}, 3), Error);
  REQUIRE_THROWS_MATCHES(
      knn_predict(train, EmbeddingVector{{1.0, 0.0, 0.0}}, 1), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::dimension_mismatch;
      }));
}

TEST_CASE("k=1 training accuracy is 1.0 without contradictory duplicates") {
  Rng rng(23);
  LabeledDataset train;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> x(8);
    for (double& v : x) v = rng.gaussian();
    train.features.push_back(EmbeddingVector{std::move(x)});
    train.labels.push_back("c" + std::to_string(rng.below(4)));
    train.example_ids.push_back("x" + std::to_string(i));
  }
  for (std::size_t i = 0; i < train.size(); ++i)
    REQUIRE(knn_predict(train, train.features[i], 1) == train.labels[i]);
}
