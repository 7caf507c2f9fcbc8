// lpg: text-embedding analysis for labeled property graphs.
//
// Subcommands: ingest, embed, evaluate, predict. Exit codes: 0 ok,
// 1 usage/config, 2 data, 3 provider/transport, 4 task assembly.

#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpg/lpg.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool lenient = false;
  bool verbose = false;
};

lpg::PropertyGraph load_graph_from_source(const lpg::GraphSource& source,
                                          lpg::IngestMode mode,
                                          lpg::IngestReport* report_out,
                                          bool verbose) {
  if (source.jsonl) {
    std::ifstream in(*source.jsonl);
    if (!in)
      lpg::fail(lpg::ErrorKind::io,
                "cannot read graph file: " + source.jsonl->string());
    auto [graph, report] = lpg::load_jsonl(in, mode);
    if (verbose)
      for (const auto& [line, message] : report.warnings)
        std::cerr << "warning: line " << line << ": " << message << "\n";
    if (report_out) *report_out = report;
    return std::move(graph);
  }
  if (source.nodes_csv && source.edges_csv) {
    std::ifstream nodes(*source.nodes_csv);
    if (!nodes)
      lpg::fail(lpg::ErrorKind::io,
                "cannot read nodes CSV: " + source.nodes_csv->string());
    std::ifstream edges(*source.edges_csv);
    if (!edges)
      lpg::fail(lpg::ErrorKind::io,
                "cannot read edges CSV: " + source.edges_csv->string());
    auto [graph, report] = lpg::load_csv(nodes, edges, mode);
    if (verbose)
      for (const auto& [line, message] : report.warnings)
        std::cerr << "warning: line " << line << ": " << message << "\n";
    if (report_out) *report_out = report;
    return std::move(graph);
  }
  lpg::fail(lpg::ErrorKind::usage,
            "config.graph must name a 'jsonl' file or a 'nodes_csv' + "
            "'edges_csv' pair");
}

lpg::RunConfig load_config_with_overrides(const GlobalFlags& flags) {
  if (flags.config_path.empty())
    lpg::fail(lpg::ErrorKind::usage, "--config is required");
  lpg::RunConfig config = lpg::load_run_config(flags.config_path);
  if (flags.seed) {
    config.seed = *flags.seed;
    config.relation_task.seed = *flags.seed;
  }
  return config;
}

void check_cache_dimension(const lpg::EmbeddingCache& cache,
                           std::size_t provider_dimension) {
  for (std::size_t dim : cache.dimensions())
    if (dim != provider_dimension)
      lpg::fail(lpg::ErrorKind::usage,
                "cache file holds " + std::to_string(dim) +
                    "-dimensional entries but the provider produces " +
                    std::to_string(provider_dimension));
}

// Counts texts forwarded to the wrapped provider; backs the
// `computed=<n> cached=<m>` summary.
class CountingProvider final : public lpg::EmbeddingProvider {
 public:
  explicit CountingProvider(lpg::EmbeddingProvider& inner) : inner_(inner) {}

  const lpg::ProviderDescriptor& descriptor() const override {
    return inner_.descriptor();
  }
  std::size_t max_batch() const override { return inner_.max_batch(); }
  std::vector<lpg::EmbeddingVector> embed_batch(
      std::span<const std::string> texts) override {
    sent_ += texts.size();
    return inner_.embed_batch(texts);
  }
  std::size_t sent() const { return sent_; }

 private:
  lpg::EmbeddingProvider& inner_;
  std::size_t sent_ = 0;
};

int cmd_ingest(const GlobalFlags& flags, const std::string& jsonl,
               const std::string& nodes_csv, const std::string& edges_csv,
               const std::string& out_path) {
  lpg::GraphSource source;
  if (!jsonl.empty()) source.jsonl = jsonl;
  if (!nodes_csv.empty()) source.nodes_csv = nodes_csv;
  if (!edges_csv.empty()) source.edges_csv = edges_csv;
  const auto mode =
      flags.lenient ? lpg::IngestMode::lenient : lpg::IngestMode::strict;

  lpg::IngestReport report;
  lpg::PropertyGraph graph =
      load_graph_from_source(source, mode, &report, flags.verbose);
  std::cout << "nodes=" << report.nodes_loaded
            << " edges=" << report.edges_loaded
            << " skipped=" << report.records_skipped << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out)
      lpg::fail(lpg::ErrorKind::io, "cannot write output file: " + out_path);
    const std::size_t records = lpg::export_jsonl(graph, out);
    if (flags.verbose)
      std::cerr << "wrote " << records << " records to " << out_path << "\n";
  }
  return 0;
}

int cmd_embed(const GlobalFlags& flags, const std::string& target) {
  lpg::RunConfig config = load_config_with_overrides(flags);
  if ((target == "nodes") != (config.task_type == lpg::TaskType::node_class))
    lpg::fail(lpg::ErrorKind::usage,
              "--target " + target + " does not match the config's task type");

  const auto mode =
      flags.lenient ? lpg::IngestMode::lenient : lpg::IngestMode::strict;
  lpg::PropertyGraph graph =
      load_graph_from_source(config.graph, mode, nullptr, flags.verbose);

  lpg::TaskExamples examples;
  std::vector<std::string> warnings;
  if (config.task_type == lpg::TaskType::node_class)
    examples = lpg::collect_node_classification_examples(graph,
                                                         config.node_task,
                                                         &warnings);
  else
    examples = lpg::collect_relation_examples(graph, config.relation_task);
  if (flags.verbose)
    for (const std::string& warning : warnings)
      std::cerr << "warning: " << warning << "\n";

  auto provider = lpg::make_provider(config.provider);
  lpg::EmbeddingCache cache(config.cache_path);
  if (flags.verbose && cache.dropped_truncated_tail())
    std::cerr << "warning: dropped a truncated final cache record\n";
  check_cache_dimension(cache, provider->descriptor().dimension);

  std::set<std::string> unique(examples.texts.begin(), examples.texts.end());
  const auto result = lpg::embed_all_cached(examples.texts, *provider, cache);
  std::cout << "computed=" << result.provider_calls
            << " cached=" << (unique.size() - result.provider_calls) << "\n";
  return 0;
}

int cmd_evaluate(const GlobalFlags& flags) {
  lpg::RunConfig config = load_config_with_overrides(flags);
  const auto mode =
      flags.lenient ? lpg::IngestMode::lenient : lpg::IngestMode::strict;
  lpg::PropertyGraph graph =
      load_graph_from_source(config.graph, mode, nullptr, flags.verbose);

  auto provider = lpg::make_provider(config.provider);
  lpg::EmbeddingCache cache(config.cache_path);
  if (flags.verbose && cache.dropped_truncated_tail())
    std::cerr << "warning: dropped a truncated final cache record\n";
  check_cache_dimension(cache, provider->descriptor().dimension);

  std::vector<std::string> warnings;
  lpg::LabeledDataset dataset;
  std::string descriptor;
  if (config.task_type == lpg::TaskType::node_class) {
    dataset = lpg::build_node_classification_dataset(
        graph, config.node_task, *provider, cache, &warnings);
    descriptor = "node-classification n=" + std::to_string(dataset.size()) +
                 " d=" + std::to_string(dataset.dimension());
  } else {
    dataset = lpg::build_relation_prediction_dataset(graph,
                                                     config.relation_task,
                                                     *provider, cache);
    descriptor = "relation-prediction n=" + std::to_string(dataset.size()) +
                 " d=" + std::to_string(dataset.dimension());
  }
  if (flags.verbose)
    for (const std::string& warning : warnings)
      std::cerr << "warning: " << warning << "\n";

  const lpg::EvaluationReport report = lpg::run_evaluation(
      dataset, config.classifiers, config.test_fraction, config.seed,
      descriptor);
  const std::string table = lpg::render_report(report);
  std::cout << table;

  if (config.output.report_text) {
    std::ofstream out(*config.output.report_text);
    out << table;
    if (!out)
      lpg::fail(lpg::ErrorKind::io, "cannot write report: " +
                                        config.output.report_text->string());
  }
  if (config.output.report_json) {
    std::ofstream out(*config.output.report_json);
    out << lpg::report_to_json(report).dump(2) << "\n";
    if (!out)
      lpg::fail(lpg::ErrorKind::io, "cannot write report: " +
                                        config.output.report_json->string());
  }
  if (config.output.model) {
    // Persist the first configured classifier retrained on the full dataset.
    lpg::ClassifierSpec spec = config.classifiers.front();
    spec.train.seed = lpg::mix_seed(config.seed, spec.name);
    spec.forest.seed = lpg::mix_seed(config.seed, spec.name);
    lpg::save_model(lpg::train_classifier(spec, dataset),
                    *config.output.model);
    if (flags.verbose)
      std::cerr << "saved model (" << spec.name << ") to "
                << config.output.model->string() << "\n";
  }
  return 0;
}

std::vector<std::pair<std::string, std::string>> read_pairs_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) lpg::fail(lpg::ErrorKind::io, "cannot read pairs file: " + path);
  lpg::detail::CsvReader reader(in);
  auto header = reader.next();
  if (!header || header->fields.size() < 2 || header->fields[0] != "src" ||
      header->fields[1] != "dst")
    lpg::fail(lpg::ErrorKind::missing_required_column,
              "pairs file requires header 'src,dst'");
  std::vector<std::pair<std::string, std::string>> pairs;
  while (auto rec = reader.next()) {
    if (rec->fields.size() < 2)
      lpg::fail(lpg::ErrorKind::malformed_record,
                "line " + std::to_string(rec->line) + ": expected src,dst");
    pairs.emplace_back(rec->fields[0], rec->fields[1]);
  }
  return pairs;
}

int cmd_predict(const GlobalFlags& flags, const std::string& model_path,
                const std::string& pairs_path, const std::string& out_path) {
  lpg::RunConfig config = load_config_with_overrides(flags);
  const auto mode =
      flags.lenient ? lpg::IngestMode::lenient : lpg::IngestMode::strict;
  lpg::PropertyGraph graph =
      load_graph_from_source(config.graph, mode, nullptr, flags.verbose);

  const lpg::TrainedModel model = lpg::load_model(model_path);
  const auto pairs = read_pairs_csv(pairs_path);
  for (const auto& [src, dst] : pairs) {
    if (!graph.has_node(src))
      lpg::fail(lpg::ErrorKind::unknown_node, "unknown node '" + src + "'");
    if (!graph.has_node(dst))
      lpg::fail(lpg::ErrorKind::unknown_node, "unknown node '" + dst + "'");
  }

  auto provider = lpg::make_provider(config.provider);
  lpg::EmbeddingCache cache(config.cache_path);
  check_cache_dimension(cache, provider->descriptor().dimension);

  const lpg::TextTemplateConfig& text_config =
      config.task_type == lpg::TaskType::relation ? config.relation_task.text
                                                  : config.node_task.text;
  const auto predictions = lpg::predict_missing_relations(
      graph, model, pairs, text_config, *provider, cache);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file)
      lpg::fail(lpg::ErrorKind::io, "cannot write output file: " + out_path);
    out = &file;
  }
  *out << "src,dst,predicted,score\n";
  for (const auto& prediction : predictions) {
    char score[64];
    auto [ptr, ec] = std::to_chars(score, score + sizeof(score),
                                   prediction.score,
                                   std::chars_format::general);
    *out << lpg::detail::csv_escape(prediction.pair.first) << ","
         << lpg::detail::csv_escape(prediction.pair.second) << ","
         << lpg::detail::csv_escape(prediction.label) << ","
         << std::string(score, ptr) << "\n";
  }
  if (!*out) lpg::fail(lpg::ErrorKind::io, "failed writing predictions");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-embedding analysis for labeled property graphs"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration")
      ->envname("LPG_CONFIG");
  std::uint64_t seed_value = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_value, "override the config seed");
  app.add_flag("--lenient", flags.lenient,
               "skip bad ingest records instead of aborting");
  app.add_flag("--verbose", flags.verbose, "log warnings and progress");
  app.fallthrough();

  auto* ingest = app.add_subcommand("ingest", "load and validate a graph");
  std::string jsonl, nodes_csv, edges_csv, out_path;
  ingest->add_option("--jsonl", jsonl, "JSONL interchange file");
  ingest->add_option("--nodes", nodes_csv, "nodes CSV file");
  ingest->add_option("--edges", edges_csv, "edges CSV file");
  ingest->add_option("--out", out_path, "write normalized JSONL here");

  auto* embed = app.add_subcommand("embed", "precompute the embedding cache");
  std::string target;
  embed->add_option("--target", target, "nodes or relations")
      ->check(CLI::IsMember({"nodes", "relations"}))
      ->required();

  auto* evaluate =
      app.add_subcommand("evaluate", "train and score the configured task");

  auto* predict =
      app.add_subcommand("predict", "score candidate pairs with a model");
  std::string model_path, pairs_path, predict_out;
  predict->add_option("--model", model_path, "trained model JSON")->required();
  predict->add_option("--pairs", pairs_path, "CSV with header src,dst")
      ->required();
  predict->add_option("--out", predict_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) flags.seed = seed_value;

  try {
    if (ingest->parsed()) {
      if (jsonl.empty() == (nodes_csv.empty() && edges_csv.empty()))
        lpg::fail(lpg::ErrorKind::usage,
                  "ingest needs --jsonl or --nodes/--edges");
      if (jsonl.empty() && (nodes_csv.empty() || edges_csv.empty()))
        lpg::fail(lpg::ErrorKind::usage,
                  "CSV ingest needs both --nodes and --edges");
      return cmd_ingest(flags, jsonl, nodes_csv, edges_csv, out_path);
    }
    if (embed->parsed()) return cmd_embed(flags, target);
    if (evaluate->parsed()) return cmd_evaluate(flags);
    if (predict->parsed())
      return cmd_predict(flags, model_path, pairs_path, predict_out);
  } catch (const lpg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
