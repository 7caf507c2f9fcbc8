#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lpg/embedding.hpp"
#include "lpg/errors.hpp"

namespace lpg {

// Aligned feature vectors, class labels and provenance ids (node ids or
// "src→dst" pair ids).
struct LabeledDataset {
  std::vector<EmbeddingVector> features;
  std::vector<std::string> labels;
  std::vector<std::string> example_ids;

  std::size_t size() const { return features.size(); }
  std::size_t dimension() const {
    return features.empty() ? 0 : features.front().dimension();
  }
};

inline void validate(const LabeledDataset& dataset) {
  if (dataset.features.empty())
    fail(ErrorKind::empty_dataset, "dataset has no examples");
  if (dataset.labels.size() != dataset.features.size() ||
      dataset.example_ids.size() != dataset.features.size())
    fail(ErrorKind::length_mismatch,
         "features, labels and example_ids must have equal lengths");
  const std::size_t dim = dataset.features.front().dimension();
  for (const EmbeddingVector& v : dataset.features)
    if (v.dimension() != dim)
      fail(ErrorKind::dimension_mismatch,
           "dataset features have mixed dimensions");
}

// Distinct labels sorted lexicographically; the canonical class indexing.
inline std::vector<std::string> sorted_classes(const LabeledDataset& dataset) {
  std::set<std::string> classes(dataset.labels.begin(), dataset.labels.end());
  return {classes.begin(), classes.end()};
}

inline std::map<std::string, std::size_t> class_counts(
    const LabeledDataset& dataset) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& label : dataset.labels) counts[label]++;
  return counts;
}

namespace detail {

// Label of each example as an index into the sorted class list.
inline std::vector<std::size_t> label_indices(
    const LabeledDataset& dataset, const std::vector<std::string>& classes) {
  std::vector<std::size_t> out;
  out.reserve(dataset.labels.size());
  for (const std::string& label : dataset.labels) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    out.push_back(static_cast<std::size_t>(it - classes.begin()));
  }
  return out;
}

}  // namespace detail

inline LabeledDataset subset(const LabeledDataset& dataset,
                             const std::vector<std::size_t>& indices) {
  LabeledDataset out;
  out.features.reserve(indices.size());
  out.labels.reserve(indices.size());
  out.example_ids.reserve(indices.size());
  for (std::size_t i : indices) {
    out.features.push_back(dataset.features[i]);
    out.labels.push_back(dataset.labels[i]);
    out.example_ids.push_back(dataset.example_ids[i]);
  }
  return out;
}

}  // namespace lpg
