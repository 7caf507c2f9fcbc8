#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpg/detail/csv.hpp"
#include "lpg/errors.hpp"
#include "lpg/graph.hpp"

namespace lpg {

enum class IngestMode { strict, lenient };

struct IngestReport {
  std::size_t nodes_loaded = 0;
  std::size_t edges_loaded = 0;
  std::size_t records_skipped = 0;
  std::vector<std::pair<std::size_t, std::string>> warnings;  // (line, message)
};

namespace detail {

inline PropertyValue json_to_property(const nlohmann::json& value,
                                      const std::string& key) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_number_integer()) {
    if (value.is_number_unsigned() &&
        value.get<std::uint64_t>() >
            static_cast<std::uint64_t>(
                std::numeric_limits<std::int64_t>::max()))
      fail(ErrorKind::malformed_record,
           "property '" + key + "' exceeds the signed 64-bit range");
    return value.get<std::int64_t>();
  }
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (!std::isfinite(d))
      fail(ErrorKind::malformed_record,
           "property '" + key + "' is not finite");
    return d;
  }
  if (value.is_array()) {
    std::vector<std::string> items;
    items.reserve(value.size());
    for (const auto& item : value) {
      if (!item.is_string())
        fail(ErrorKind::malformed_record,
             "property '" + key + "' list elements must be strings");
      items.push_back(item.get<std::string>());
    }
    return items;
  }
  fail(ErrorKind::malformed_record,
       "property '" + key + "' has an unsupported value type");
}

inline PropertyMap json_to_properties(const nlohmann::json& record) {
  PropertyMap props;
  auto it = record.find("properties");
  if (it == record.end()) return props;
  if (!it->is_object())
    fail(ErrorKind::malformed_record, "'properties' must be an object");
  for (const auto& [key, value] : it->items()) {
    if (key.empty())
      fail(ErrorKind::malformed_record, "empty property key");
    props.emplace(key, json_to_property(value, key));
  }
  return props;
}

inline std::string require_string(const nlohmann::json& record,
                                  const char* field) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string())
    fail(ErrorKind::malformed_record,
         std::string("missing or non-string field '") + field + "'");
  return it->get<std::string>();
}

// Parsed-but-not-yet-inserted record; loading is two-pass so edges may
// appear before the nodes they reference.
struct PendingRecord {
  bool is_node = false;
  Node node;
  Edge edge;
  std::size_t line = 0;
};

inline PendingRecord parse_jsonl_record(const std::string& text,
                                        std::size_t line) {
  nlohmann::json record = nlohmann::json::parse(text, nullptr, false);
  if (record.is_discarded() || !record.is_object())
    fail(ErrorKind::malformed_record, "invalid JSON object");
  const std::string type = require_string(record, "type");
  PendingRecord pending;
  pending.line = line;
  if (type == "node") {
    pending.is_node = true;
    pending.node.id = require_string(record, "id");
    if (pending.node.id.empty())
      fail(ErrorKind::malformed_record, "node id must be non-empty");
    auto labels_it = record.find("labels");
    if (labels_it != record.end()) {
      if (!labels_it->is_array())
        fail(ErrorKind::malformed_record, "'labels' must be an array");
      for (const auto& label : *labels_it) {
        if (!label.is_string())
          fail(ErrorKind::malformed_record, "labels must be strings");
        pending.node.labels.push_back(label.get<std::string>());
      }
      for (std::size_t i = 0; i < pending.node.labels.size(); ++i)
        for (std::size_t j = i + 1; j < pending.node.labels.size(); ++j)
          if (pending.node.labels[i] == pending.node.labels[j])
            fail(ErrorKind::malformed_record,
                 "duplicate label '" + pending.node.labels[i] + "'");
    }
    pending.node.properties = json_to_properties(record);
  } else if (type == "edge") {
    pending.edge.id = require_string(record, "id");
    pending.edge.src = require_string(record, "src");
    pending.edge.dst = require_string(record, "dst");
    pending.edge.rel_type = require_string(record, "rel_type");
    if (pending.edge.id.empty() || pending.edge.rel_type.empty())
      fail(ErrorKind::malformed_record, "edge id and rel_type must be non-empty");
    pending.edge.properties = json_to_properties(record);
  } else {
    fail(ErrorKind::malformed_record, "unknown record type '" + type + "'");
  }
  return pending;
}

inline bool whitespace_only(const std::string& s) {
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\r') return false;
  return true;
}

}  // namespace detail

// Loads the JSONL interchange format (one object per line). Two passes:
// all node records are inserted before any edge record is resolved, so file
// ordering does not matter. In strict mode the first error aborts with its
// 1-based line number; in lenient mode bad records are skipped with a warning.
inline std::pair<PropertyGraph, IngestReport> load_jsonl(
    std::istream& in, IngestMode mode = IngestMode::strict) {
  PropertyGraph graph;
  IngestReport report;
  std::vector<detail::PendingRecord> records;

  auto handle = [&](std::size_t line, const std::string& what) {
    if (mode == IngestMode::strict)
      throw Error(ErrorKind::malformed_record,
                  "line " + std::to_string(line) + ": " + what);
    report.records_skipped++;
    report.warnings.emplace_back(line, what);
  };

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (detail::whitespace_only(text)) continue;
    try {
      records.push_back(detail::parse_jsonl_record(text, line));
    } catch (const Error& e) {
      handle(line, e.what());
    }
  }

  for (const auto& record : records) {
    if (!record.is_node) continue;
    try {
      graph.add_node(record.node);
      report.nodes_loaded++;
    } catch (const Error& e) {
      if (mode == IngestMode::strict)
        throw Error(ErrorKind::duplicate_id, "line " +
                                                 std::to_string(record.line) +
                                                 ": " + e.what());
      report.records_skipped++;
      report.warnings.emplace_back(record.line, e.what());
    }
  }
  for (const auto& record : records) {
    if (record.is_node) continue;
    try {
      graph.add_edge(record.edge);
      report.edges_loaded++;
    } catch (const Error& e) {
      if (mode == IngestMode::strict) {
        const ErrorKind kind = e.kind() == ErrorKind::dangling_endpoint
                                   ? ErrorKind::dangling_endpoint
                                   : ErrorKind::duplicate_id;
        throw Error(kind,
                    "line " + std::to_string(record.line) + ": " + e.what());
      }
      report.records_skipped++;
      report.warnings.emplace_back(record.line, e.what());
    }
  }
  return {std::move(graph), std::move(report)};
}

// Loads the paired-CSV export shape. Nodes file requires `id,labels`
// (labels ';'-separated); edges file requires `id,src,dst,rel_type`. Every
// other column becomes a text property named by its header; empty cells
// produce no property.
inline std::pair<PropertyGraph, IngestReport> load_csv(
    std::istream& nodes_in, std::istream& edges_in,
    IngestMode mode = IngestMode::strict) {
  PropertyGraph graph;
  IngestReport report;

  auto handle = [&](ErrorKind kind, std::size_t line, const std::string& what) {
    if (mode == IngestMode::strict)
      throw Error(kind, "line " + std::to_string(line) + ": " + what);
    report.records_skipped++;
    report.warnings.emplace_back(line, what);
  };

  auto header_index = [](const std::vector<std::string>& header,
                         const std::string& column) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == column) return static_cast<std::ptrdiff_t>(i);
    return static_cast<std::ptrdiff_t>(-1);
  };

  auto split_labels = [](const std::string& cell) {
    std::vector<std::string> labels;
    std::string current;
    for (char c : cell) {
      if (c == ';') {
        if (!current.empty()) labels.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    if (!current.empty()) labels.push_back(std::move(current));
    return labels;
  };

  {
    detail::CsvReader reader(nodes_in);
    auto header = reader.next();
    if (header) {
      const auto id_col = header_index(header->fields, "id");
      const auto labels_col = header_index(header->fields, "labels");
      if (id_col < 0 || labels_col < 0)
        fail(ErrorKind::missing_required_column,
             "nodes CSV requires columns 'id' and 'labels'");
      while (auto rec = reader.next()) {
        if (rec->fields.size() != header->fields.size()) {
          handle(ErrorKind::malformed_record, rec->line,
                 "column count mismatch");
          continue;
        }
        Node node;
        node.id = rec->fields[static_cast<std::size_t>(id_col)];
        if (node.id.empty()) {
          handle(ErrorKind::malformed_record, rec->line, "empty node id");
          continue;
        }
        node.labels =
            split_labels(rec->fields[static_cast<std::size_t>(labels_col)]);
        for (std::size_t i = 0; i < header->fields.size(); ++i) {
          if (static_cast<std::ptrdiff_t>(i) == id_col ||
              static_cast<std::ptrdiff_t>(i) == labels_col)
            continue;
          if (rec->fields[i].empty()) continue;
          node.properties.emplace(header->fields[i], rec->fields[i]);
        }
        try {
          graph.add_node(std::move(node));
          report.nodes_loaded++;
        } catch (const Error& e) {
          handle(ErrorKind::duplicate_id, rec->line, e.what());
        }
      }
    }
  }

  {
    detail::CsvReader reader(edges_in);
    auto header = reader.next();
    if (header) {
      const auto id_col = header_index(header->fields, "id");
      const auto src_col = header_index(header->fields, "src");
      const auto dst_col = header_index(header->fields, "dst");
      const auto rel_col = header_index(header->fields, "rel_type");
      if (id_col < 0 || src_col < 0 || dst_col < 0 || rel_col < 0)
        fail(ErrorKind::missing_required_column,
             "edges CSV requires columns 'id', 'src', 'dst' and 'rel_type'");
      while (auto rec = reader.next()) {
        if (rec->fields.size() != header->fields.size()) {
          handle(ErrorKind::malformed_record, rec->line,
                 "column count mismatch");
          continue;
        }
        Edge edge;
        edge.id = rec->fields[static_cast<std::size_t>(id_col)];
        edge.src = rec->fields[static_cast<std::size_t>(src_col)];
        edge.dst = rec->fields[static_cast<std::size_t>(dst_col)];
        edge.rel_type = rec->fields[static_cast<std::size_t>(rel_col)];
        if (edge.id.empty() || edge.rel_type.empty()) {
          handle(ErrorKind::malformed_record, rec->line,
                 "empty edge id or rel_type");
          continue;
        }
        for (std::size_t i = 0; i < header->fields.size(); ++i) {
          if (static_cast<std::ptrdiff_t>(i) == id_col ||
              static_cast<std::ptrdiff_t>(i) == src_col ||
              static_cast<std::ptrdiff_t>(i) == dst_col ||
              static_cast<std::ptrdiff_t>(i) == rel_col)
            continue;
          if (rec->fields[i].empty()) continue;
          edge.properties.emplace(header->fields[i], rec->fields[i]);
        }
        try {
          graph.add_edge(std::move(edge));
          report.edges_loaded++;
        } catch (const Error& e) {
          const ErrorKind kind = e.kind() == ErrorKind::dangling_endpoint
                                     ? ErrorKind::dangling_endpoint
                                     : ErrorKind::duplicate_id;
          handle(kind, rec->line, e.what());
        }
      }
    }
  }

  return {std::move(graph), std::move(report)};
}

namespace detail {

inline nlohmann::ordered_json property_to_json(const PropertyValue& value) {
  return std::visit(
      [](const auto& v) { return nlohmann::ordered_json(v); }, value);
}

}  // namespace detail

// Writes the JSONL interchange format: nodes before edges, each sorted by
// id. load_jsonl(export_jsonl(g)) reconstructs a graph equal to g.
inline std::size_t export_jsonl(const PropertyGraph& graph, std::ostream& out) {
  std::size_t count = 0;
  for (const std::string& id : graph.node_ids_sorted()) {
    const Node& node = graph.node(id);
    nlohmann::ordered_json record;
    record["type"] = "node";
    record["id"] = node.id;
    record["labels"] = node.labels;
    nlohmann::ordered_json props = nlohmann::ordered_json::object();
    for (const auto& [key, value] : node.properties)
      props[key] = detail::property_to_json(value);
    record["properties"] = std::move(props);
    out << record.dump() << '\n';
    ++count;
  }
  for (const std::string& id : graph.edge_ids_sorted()) {
    const Edge& edge = graph.edge(id);
    nlohmann::ordered_json record;
    record["type"] = "edge";
    record["id"] = edge.id;
    record["src"] = edge.src;
    record["dst"] = edge.dst;
    record["rel_type"] = edge.rel_type;
    nlohmann::ordered_json props = nlohmann::ordered_json::object();
    for (const auto& [key, value] : edge.properties)
      props[key] = detail::property_to_json(value);
    record["properties"] = std::move(props);
    out << record.dump() << '\n';
    ++count;
  }
  if (!out)
    fail(ErrorKind::io, "failed writing JSONL output");
  return count;
}

}  // namespace lpg
