#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpg/embedding.hpp"
#include "lpg/errors.hpp"
#include "lpg/evaluation.hpp"
#include "lpg/remote.hpp"
#include "lpg/tasks.hpp"
#include "lpg/textualize.hpp"

namespace lpg {

struct ProviderConfig {
  enum class Kind { hash, remote };
  Kind kind = Kind::hash;
  std::size_t dimension = 256;
  std::uint64_t seed = 42;     // hash provider
  std::string model;           // remote provider
  TransportConfig transport;   // remote provider
};

struct GraphSource {
  std::optional<std::filesystem::path> jsonl;
  std::optional<std::filesystem::path> nodes_csv;
  std::optional<std::filesystem::path> edges_csv;
};

struct OutputPaths {
  std::optional<std::filesystem::path> report_text;
  std::optional<std::filesystem::path> report_json;
  std::optional<std::filesystem::path> model;
};

enum class TaskType { node_class, relation };

// One config file drives every command; flags override individual fields.
struct RunConfig {
  GraphSource graph;
  ProviderConfig provider;
  std::filesystem::path cache_path = "embeddings.cache";
  TaskType task_type = TaskType::node_class;
  NodeClassTaskConfig node_task;
  RelationTaskConfig relation_task;
  std::vector<ClassifierSpec> classifiers;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  OutputPaths output;
};

namespace detail {

inline TextTemplateConfig parse_text_config(const nlohmann::json& doc) {
  TextTemplateConfig config;
  config.include_labels = doc.value("include_labels", config.include_labels);
  config.neighbor_cap = doc.value("neighbor_cap", config.neighbor_cap);
  config.char_budget = doc.value("char_budget", config.char_budget);
  config.include_target = doc.value("include_target", config.include_target);
  if (doc.contains("excluded_keys"))
    for (const auto& key : doc.at("excluded_keys"))
      config.excluded_keys.insert(key.get<std::string>());
  validate(config);
  return config;
}

inline ClassifierSpec parse_classifier_spec(const nlohmann::json& doc) {
  ClassifierSpec spec;
  nlohmann::json body;
  if (doc.is_string()) {
    spec.name = doc.get<std::string>();
    body = nlohmann::json::object();
  } else if (doc.is_object()) {
    if (!doc.contains("name") || !doc.at("name").is_string())
      fail(ErrorKind::usage, "classifier entries need a string 'name'");
    spec.name = doc.at("name").get<std::string>();
    body = doc;
  } else {
    fail(ErrorKind::usage, "classifier entries must be strings or objects");
  }
  const auto kind = classifier_kind_for_name(spec.name);
  if (!kind)
    fail(ErrorKind::usage, "unknown classifier name '" + spec.name + "'");
  spec.kind = *kind;
  spec.train.epochs = body.value("epochs", spec.train.epochs);
  spec.train.eta0 = body.value("eta0", spec.train.eta0);
  spec.train.lambda = body.value("lambda", spec.train.lambda);
  spec.forest.n_trees = body.value("n_trees", spec.forest.n_trees);
  spec.forest.max_depth = body.value("max_depth", spec.forest.max_depth);
  spec.forest.min_samples_leaf =
      body.value("min_samples_leaf", spec.forest.min_samples_leaf);
  spec.forest.features_per_split =
      body.value("features_per_split", spec.forest.features_per_split);
  spec.forest.bootstrap = body.value("bootstrap", spec.forest.bootstrap);
  spec.k = body.value("k", spec.k);
  return spec;
}

}  // namespace detail

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot read config file: " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    fail(ErrorKind::usage, "config file is not a JSON object");

  RunConfig config;

  if (doc.contains("graph")) {
    const auto& graph = doc.at("graph");
    if (graph.contains("jsonl"))
      config.graph.jsonl = graph.at("jsonl").get<std::string>();
    if (graph.contains("nodes_csv"))
      config.graph.nodes_csv = graph.at("nodes_csv").get<std::string>();
    if (graph.contains("edges_csv"))
      config.graph.edges_csv = graph.at("edges_csv").get<std::string>();
  }

  if (doc.contains("provider")) {
    const auto& provider = doc.at("provider");
    const std::string kind = provider.value("kind", "hash");
    if (kind == "hash") {
      config.provider.kind = ProviderConfig::Kind::hash;
      config.provider.dimension = provider.value("dimension", std::size_t{256});
      config.provider.seed = provider.value("seed", std::uint64_t{42});
    } else if (kind == "remote") {
      config.provider.kind = ProviderConfig::Kind::remote;
      config.provider.dimension =
          provider.value("dimension", std::size_t{1024});
      if (!provider.contains("model") || !provider.contains("base_url"))
        fail(ErrorKind::usage,
             "remote provider requires 'model' and 'base_url'");
      config.provider.model = provider.at("model").get<std::string>();
      config.provider.transport.base_url =
          provider.at("base_url").get<std::string>();
      config.provider.transport.timeout_s =
          provider.value("timeout_s", config.provider.transport.timeout_s);
      config.provider.transport.max_batch =
          provider.value("max_batch", config.provider.transport.max_batch);
      config.provider.transport.max_inflight =
          provider.value("max_inflight", config.provider.transport.max_inflight);
    } else {
      fail(ErrorKind::usage, "unknown provider kind '" + kind + "'");
    }
  }

  if (doc.contains("cache"))
    config.cache_path = doc.at("cache").get<std::string>();

  TextTemplateConfig text_config;
  if (doc.contains("textualizer"))
    text_config = detail::parse_text_config(doc.at("textualizer"));

  if (!doc.contains("task") || !doc.at("task").is_object())
    fail(ErrorKind::usage, "config requires exactly one 'task' object");
  {
    const auto& task = doc.at("task");
    const std::string type = task.value("type", "");
    if (type == "node_class") {
      config.task_type = TaskType::node_class;
      config.node_task.text = text_config;
      if (task.contains("target")) {
        const auto& target = task.at("target");
        if (target.is_string() &&
            target.get<std::string>() == "primary_label") {
          config.node_task.target = PrimaryLabelTarget{};
        } else if (target.is_object() && target.contains("property")) {
          config.node_task.target =
              PropertyTarget{target.at("property").get<std::string>()};
        } else {
          fail(ErrorKind::usage,
               "task.target must be \"primary_label\" or {\"property\": key}");
        }
      }
      config.node_task.min_class_size =
          task.value("min_class_size", config.node_task.min_class_size);
    } else if (type == "relation") {
      config.task_type = TaskType::relation;
      config.relation_task.text = text_config;
      if (task.contains("rel_types")) {
        const auto& scope = task.at("rel_types");
        if (scope.is_string() && scope.get<std::string>() == "all") {
          config.relation_task.rel_scope.all = true;
        } else if (scope.is_array()) {
          config.relation_task.rel_scope.all = false;
          for (const auto& rel_type : scope)
            config.relation_task.rel_scope.types.insert(
                rel_type.get<std::string>());
        } else {
          fail(ErrorKind::usage,
               "task.rel_types must be \"all\" or an array of types");
        }
      }
      config.relation_task.negative_ratio =
          task.value("negative_ratio", config.relation_task.negative_ratio);
      if (!(config.relation_task.negative_ratio > 0.0))
        fail(ErrorKind::usage, "negative_ratio must be > 0");
      config.relation_task.negative_label =
          task.value("negative_label", config.relation_task.negative_label);
      const std::string constraint =
          task.value("endpoint_constraint", "label_compatible");
      if (constraint == "any")
        config.relation_task.endpoint_constraint = EndpointConstraint::any;
      else if (constraint == "label_compatible")
        config.relation_task.endpoint_constraint =
            EndpointConstraint::label_compatible;
      else
        fail(ErrorKind::usage,
             "endpoint_constraint must be 'any' or 'label_compatible'");
    } else {
      fail(ErrorKind::usage,
           "task.type must be 'node_class' or 'relation'");
    }
  }

  if (doc.contains("classifiers")) {
    for (const auto& entry : doc.at("classifiers"))
      config.classifiers.push_back(detail::parse_classifier_spec(entry));
  }
  if (config.classifiers.empty()) {
    for (const auto& [name, kind] : classifier_registry()) {
      ClassifierSpec spec;
      spec.name = name;
      spec.kind = kind;
      config.classifiers.push_back(spec);
    }
  }

  if (doc.contains("split"))
    config.test_fraction =
        doc.at("split").value("test_fraction", config.test_fraction);
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0))
    fail(ErrorKind::usage, "split.test_fraction must be in (0, 1)");

  config.seed = doc.value("seed", config.seed);
  config.relation_task.seed = config.seed;

  if (doc.contains("output")) {
    const auto& output = doc.at("output");
    if (output.contains("report_text"))
      config.output.report_text = output.at("report_text").get<std::string>();
    if (output.contains("report_json"))
      config.output.report_json = output.at("report_json").get<std::string>();
    if (output.contains("model"))
      config.output.model = output.at("model").get<std::string>();
  }

  return config;
}

inline std::unique_ptr<EmbeddingProvider> make_provider(
    const ProviderConfig& config) {
  if (config.kind == ProviderConfig::Kind::hash)
    return std::make_unique<HashEmbedder>(config.dimension, config.seed);
  return std::make_unique<RemoteEmbedder>(config.model, config.dimension,
                                          config.transport);
}

}  // namespace lpg
