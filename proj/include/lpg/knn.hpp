#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "lpg/dataset.hpp"
#include "lpg/embedding.hpp"
#include "lpg/errors.hpp"

namespace lpg {

struct KnnPrediction {
  std::string label;
  double vote_fraction = 0.0;  // votes for the winner / k
};

// k-nearest-neighbors by cosine distance (1 - cosine similarity). Distance
// ties break by example_id ascending; vote ties by smaller summed distance,
// then by lexicographic class name.
inline KnnPrediction knn_predict_detailed(const LabeledDataset& train,
                                          const EmbeddingVector& query,
                                          std::size_t k) {
  validate(train);
  if (k < 1 || k > train.size())
    fail(ErrorKind::k_out_of_range,
         "k=" + std::to_string(k) + " outside [1, " +
             std::to_string(train.size()) + "]");
  if (query.dimension() != train.dimension())
    fail(ErrorKind::dimension_mismatch,
         "knn_predict: query dimension " + std::to_string(query.dimension()) +
             " vs train " + std::to_string(train.dimension()));

  struct Candidate {
    double distance;
    const std::string* example_id;
    std::size_t index;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    candidates.push_back(
        {1.0 - cosine_similarity(query, train.features[i]),
         &train.example_ids[i], i});
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(a.distance, *a.example_id) <
                     std::tie(b.distance, *b.example_id);
            });

  std::map<std::string, std::pair<std::size_t, double>> votes;  // count, dist sum
  for (std::size_t i = 0; i < k; ++i) {
    auto& entry = votes[train.labels[candidates[i].index]];
    entry.first += 1;
    entry.second += candidates[i].distance;
  }

  const std::string* best = nullptr;
  std::size_t best_count = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& [label, entry] : votes) {  // map: lexicographic order
    const auto [count, distance_sum] = entry;
    if (best == nullptr || count > best_count ||
        (count == best_count && distance_sum < best_distance)) {
      best = &label;
      best_count = count;
      best_distance = distance_sum;
    }
  }
  return {*best, static_cast<double>(best_count) / static_cast<double>(k)};
}

inline std::string knn_predict(const LabeledDataset& train,
                               const EmbeddingVector& query, std::size_t k) {
  return knn_predict_detailed(train, query, k).label;
}

}  // namespace lpg
