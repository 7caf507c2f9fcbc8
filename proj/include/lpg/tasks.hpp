#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "lpg/cache.hpp"
#include "lpg/dataset.hpp"
#include "lpg/errors.hpp"
#include "lpg/graph.hpp"
#include "lpg/model_io.hpp"
#include "lpg/rng.hpp"
#include "lpg/textualize.hpp"

namespace lpg {

// Classification target: the node's primary label (lexicographically-first
// label), or a named property rendered as text.
struct PrimaryLabelTarget {};
struct PropertyTarget {
  std::string key;
};
using NodeClassTarget = std::variant<PrimaryLabelTarget, PropertyTarget>;

struct NodeClassTaskConfig {
  NodeClassTarget target = PrimaryLabelTarget{};
  std::size_t min_class_size = 2;
  TextTemplateConfig text;
};

struct RelScope {
  bool all = true;
  std::set<std::string> types;

  bool contains(const std::string& rel_type) const {
    return all || types.contains(rel_type);
  }
};

enum class EndpointConstraint { any, label_compatible };

struct RelationTaskConfig {
  RelScope rel_scope;
  double negative_ratio = 1.0;
  std::string negative_label = "NO_RELATION";
  EndpointConstraint endpoint_constraint = EndpointConstraint::label_compatible;
  std::uint64_t seed = 42;
  TextTemplateConfig text;
};

namespace detail {

inline std::string render_target_property(const Node& node,
                                          const std::string& key) {
  auto it = node.properties.find(key);
  if (it == node.properties.end()) return "";
  return property_to_text(it->second);
}

inline std::string primary_label(const Node& node) {
  if (node.labels.empty()) return "";
  return *std::min_element(node.labels.begin(), node.labels.end());
}

}  // namespace detail

// Texts, labels and ids of a task's examples before embedding; the unit the
// cache-warming command and the leakage checks operate on.
struct TaskExamples {
  std::vector<std::string> texts;
  std::vector<std::string> labels;
  std::vector<std::string> example_ids;
};

// One example per retained node (node-id order): text = node template with
// the target excluded, label = primary label or the target property's text.
// Nodes lacking the target are dropped; classes smaller than min_class_size
// are dropped with a warning. For a primary-label target the Labels clause
// is suppressed entirely — it would spell out the target verbatim.
inline TaskExamples collect_node_classification_examples(
    const PropertyGraph& graph, const NodeClassTaskConfig& config,
    std::vector<std::string>* warnings = nullptr) {
  TextTemplateConfig text_config = config.text;
  const bool label_target =
      std::holds_alternative<PrimaryLabelTarget>(config.target);
  if (label_target) {
    text_config.include_labels = false;
  } else {
    text_config.excluded_keys.insert(
        std::get<PropertyTarget>(config.target).key);
  }

  std::vector<std::string> ids;
  std::vector<std::string> labels;
  for (const std::string& id : graph.node_ids_sorted()) {
    const Node& node = graph.node(id);
    const std::string label =
        label_target
            ? detail::primary_label(node)
            : detail::render_target_property(
                  node, std::get<PropertyTarget>(config.target).key);
    if (label.empty()) continue;  // lacks the target
    ids.push_back(id);
    labels.push_back(label);
  }

  std::map<std::string, std::size_t> counts;
  for (const std::string& label : labels) counts[label]++;
  std::set<std::string> retained;
  for (const auto& [label, count] : counts) {
    if (count >= config.min_class_size) {
      retained.insert(label);
    } else if (warnings) {
      warnings->push_back("dropping class '" + label + "' with " +
                          std::to_string(count) + " example(s), below " +
                          std::to_string(config.min_class_size));
    }
  }
  if (retained.empty())
    fail(ErrorKind::no_usable_examples,
         "no class reaches min_class_size=" +
             std::to_string(config.min_class_size));

  TaskExamples examples;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!retained.contains(labels[i])) continue;
    examples.texts.push_back(textualize_node(graph.node(ids[i]), text_config));
    examples.labels.push_back(labels[i]);
    examples.example_ids.push_back(ids[i]);
  }
  return examples;
}

inline LabeledDataset build_node_classification_dataset(
    const PropertyGraph& graph, const NodeClassTaskConfig& config,
    EmbeddingProvider& provider, EmbeddingCache& cache,
    std::vector<std::string>* warnings = nullptr) {
  TaskExamples examples =
      collect_node_classification_examples(graph, config, warnings);
  LabeledDataset dataset;
  dataset.features = embed_all_cached(examples.texts, provider, cache).vectors;
  dataset.labels = std::move(examples.labels);
  dataset.example_ids = std::move(examples.example_ids);
  validate(dataset);
  return dataset;
}

namespace detail {

inline std::vector<std::string> sorted_label_signature(const Node& node) {
  std::vector<std::string> labels = node.labels;
  std::sort(labels.begin(), labels.end());
  return labels;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::size_t, std::size_t>& p) const {
    return p.first * 0x9e3779b97f4a7c15ULL + p.second;
  }
};

}  // namespace detail

// Ordered pairs (u, v), u != v, with no in-scope edge u->v. Under
// label_compatible, (labels(u), labels(v)) must match the sorted label
// signature of some in-scope edge's endpoints. Small graphs are enumerated
// exhaustively; large ones use rejection sampling with an attempt cap of
// 100 x count. Deterministic given the seed.
inline std::vector<std::pair<std::string, std::string>> sample_negative_pairs(
    const PropertyGraph& graph, const RelScope& rel_scope, std::size_t count,
    EndpointConstraint constraint, std::uint64_t seed) {
  if (count == 0) return {};

  const std::vector<std::string> node_ids = graph.node_ids_sorted();
  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    index_of.emplace(node_ids[i], i);

  // In-scope edge set and, for label_compatible, the observed signatures.
  std::unordered_set<std::pair<std::size_t, std::size_t>, detail::PairHash>
      connected;
  std::set<std::pair<std::vector<std::string>, std::vector<std::string>>>
      signatures;
  for (const auto& [id, edge] : graph.edges()) {
    if (!rel_scope.contains(edge.rel_type)) continue;
    connected.insert({index_of.at(edge.src), index_of.at(edge.dst)});
    if (constraint == EndpointConstraint::label_compatible)
      signatures.insert({detail::sorted_label_signature(graph.node(edge.src)),
                         detail::sorted_label_signature(graph.node(edge.dst))});
  }

  auto is_valid = [&](std::size_t u, std::size_t v) {
    if (u == v) return false;
    if (connected.contains({u, v})) return false;
    if (constraint == EndpointConstraint::label_compatible) {
      const auto signature = std::make_pair(
          detail::sorted_label_signature(graph.node(node_ids[u])),
          detail::sorted_label_signature(graph.node(node_ids[v])));
      if (!signatures.contains(signature)) return false;
    }
    return true;
  };

  Rng rng(seed);
  std::vector<std::pair<std::string, std::string>> out;

  // Enumeration bound: all ordered pairs of a small graph.
  const std::size_t n = node_ids.size();
  const bool enumerate = n <= 512;
  if (enumerate) {
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (is_valid(u, v)) candidates.push_back({u, v});
    if (candidates.size() < count)
      fail(ErrorKind::insufficient_negatives,
           "requested " + std::to_string(count) + " negative pairs but only " +
               std::to_string(candidates.size()) + " exist");
    rng.shuffle(candidates);
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      out.emplace_back(node_ids[candidates[i].first],
                       node_ids[candidates[i].second]);
    return out;
  }

  std::unordered_set<std::pair<std::size_t, std::size_t>, detail::PairHash>
      chosen;
  const std::size_t max_attempts = 100 * count;
  std::size_t attempts = 0;
  out.reserve(count);
  while (out.size() < count) {
    if (attempts >= max_attempts)
      fail(ErrorKind::insufficient_negatives,
           "rejection sampling exhausted " + std::to_string(max_attempts) +
               " attempts with " + std::to_string(out.size()) + "/" +
               std::to_string(count) + " pairs found");
    ++attempts;
    const auto u = static_cast<std::size_t>(rng.below(n));
    const auto v = static_cast<std::size_t>(rng.below(n));
    if (!is_valid(u, v)) continue;
    if (!chosen.insert({u, v}).second) continue;
    out.emplace_back(node_ids[u], node_ids[v]);
  }
  return out;
}

inline std::string pair_id(const std::string& src, const std::string& dst) {
  return src + "\xe2\x86\x92" + dst;  // "src→dst"
}

// Positives: one example per in-scope edge (edge-id order), label =
// rel_type, context built with that edge excluded from the neighbor listing.
// Negatives: sampled pairs labeled negative_label, contexts built with no
// exclusions.
inline TaskExamples collect_relation_examples(const PropertyGraph& graph,
                                              const RelationTaskConfig& config) {
  if (!(config.negative_ratio > 0.0))
    fail(ErrorKind::usage, "negative_ratio must be > 0");

  std::vector<const Edge*> positives;
  for (const std::string& id : graph.edge_ids_sorted()) {
    const Edge& edge = graph.edge(id);
    if (!config.rel_scope.contains(edge.rel_type)) continue;
    if (edge.rel_type == config.negative_label)
      fail(ErrorKind::usage,
           "negative_label '" + config.negative_label +
               "' collides with an in-scope relation type");
    positives.push_back(&edge);
  }
  if (positives.empty())
    fail(ErrorKind::no_usable_examples, "no in-scope edges");

  const auto negative_count = static_cast<std::size_t>(
      std::llround(config.negative_ratio * static_cast<double>(positives.size())));
  const auto negative_pairs =
      sample_negative_pairs(graph, config.rel_scope, negative_count,
                            config.endpoint_constraint, config.seed);

  TaskExamples examples;
  for (const Edge* edge : positives) {
    examples.texts.push_back(textualize_relation_context(
        graph, edge->src, edge->dst, config.text, {edge->id}));
    examples.labels.push_back(edge->rel_type);
    examples.example_ids.push_back(pair_id(edge->src, edge->dst));
  }
  for (const auto& [src, dst] : negative_pairs) {
    examples.texts.push_back(
        textualize_relation_context(graph, src, dst, config.text));
    examples.labels.push_back(config.negative_label);
    examples.example_ids.push_back(pair_id(src, dst));
  }
  return examples;
}

inline LabeledDataset build_relation_prediction_dataset(
    const PropertyGraph& graph, const RelationTaskConfig& config,
    EmbeddingProvider& provider, EmbeddingCache& cache) {
  TaskExamples examples = collect_relation_examples(graph, config);
  LabeledDataset dataset;
  dataset.features = embed_all_cached(examples.texts, provider, cache).vectors;
  dataset.labels = std::move(examples.labels);
  dataset.example_ids = std::move(examples.example_ids);
  validate(dataset);
  return dataset;
}

struct RelationPrediction {
  std::pair<std::string, std::string> pair;
  std::string label;
  double score = 0.0;  // probability, or per-batch min-max normalized margin
};

// Scores candidate pairs with a trained relation model. Contexts are built
// with no exclusions (already-connected pairs are still scored; callers
// filter). Output sorts by score descending, then pair id.
inline std::vector<RelationPrediction> predict_missing_relations(
    const PropertyGraph& graph, const TrainedModel& model,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const TextTemplateConfig& text_config, EmbeddingProvider& provider,
    EmbeddingCache& cache) {
  if (model_dimension(model) != provider.descriptor().dimension)
    fail(ErrorKind::dimension_mismatch,
         "model dimension " + std::to_string(model_dimension(model)) +
             " does not match provider dimension " +
             std::to_string(provider.descriptor().dimension));

  std::vector<std::string> texts;
  texts.reserve(candidates.size());
  for (const auto& [src, dst] : candidates)
    texts.push_back(
        textualize_relation_context(graph, src, dst, text_config));
  const auto vectors = embed_all_cached(texts, provider, cache).vectors;

  std::vector<RelationPrediction> out;
  out.reserve(candidates.size());
  std::vector<double> raw_scores;
  raw_scores.reserve(candidates.size());
  bool all_probabilities = true;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const ScoredPrediction scored = predict_scored(model, vectors[i]);
    out.push_back({candidates[i], scored.label, scored.raw_score});
    raw_scores.push_back(scored.raw_score);
    all_probabilities = all_probabilities && scored.is_probability;
  }

  if (!all_probabilities && !raw_scores.empty()) {
    const auto [lo_it, hi_it] =
        std::minmax_element(raw_scores.begin(), raw_scores.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    for (auto& prediction : out)
      prediction.score =
          (hi > lo) ? (prediction.score - lo) / (hi - lo) : 0.5;
  }

  std::sort(out.begin(), out.end(),
            [](const RelationPrediction& a, const RelationPrediction& b) {
              if (a.score != b.score) return a.score > b.score;
              return pair_id(a.pair.first, a.pair.second) <
                     pair_id(b.pair.first, b.pair.second);
            });
  return out;
}

}  // namespace lpg
