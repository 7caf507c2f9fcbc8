#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lpg/errors.hpp"

namespace lpg {

// A property value is one of: text, 64-bit integer, 64-bit float, boolean,
// or an ordered list of strings. Reals must be finite.
using PropertyValue =
    std::variant<std::string, std::int64_t, double, bool,
                 std::vector<std::string>>;

inline bool property_value_valid(const PropertyValue& value) {
  if (const auto* d = std::get_if<double>(&value)) return std::isfinite(*d);
  return true;
}

using PropertyMap = std::map<std::string, PropertyValue>;

struct Node {
  std::string id;
  std::vector<std::string> labels;  // ordered, no duplicates
  PropertyMap properties;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string id;
  std::string src;
  std::string dst;
  std::string rel_type;
  PropertyMap properties;

  bool operator==(const Edge&) const = default;
};

inline void validate_node(const Node& node) {
  if (node.id.empty()) fail(ErrorKind::usage, "node id must be non-empty");
  for (std::size_t i = 0; i < node.labels.size(); ++i)
    for (std::size_t j = i + 1; j < node.labels.size(); ++j)
      if (node.labels[i] == node.labels[j])
        fail(ErrorKind::usage,
             "node '" + node.id + "' has duplicate label '" + node.labels[i] +
                 "'");
  for (const auto& [key, value] : node.properties) {
    if (key.empty())
      fail(ErrorKind::usage, "node '" + node.id + "' has an empty property key");
    if (!property_value_valid(value))
      fail(ErrorKind::usage,
           "node '" + node.id + "' property '" + key + "' is not finite");
  }
}

inline void validate_edge_fields(const Edge& edge) {
  if (edge.id.empty()) fail(ErrorKind::usage, "edge id must be non-empty");
  if (edge.rel_type.empty())
    fail(ErrorKind::usage, "edge '" + edge.id + "' has an empty rel_type");
  for (const auto& [key, value] : edge.properties) {
    if (key.empty())
      fail(ErrorKind::usage, "edge '" + edge.id + "' has an empty property key");
    if (!property_value_valid(value))
      fail(ErrorKind::usage,
           "edge '" + edge.id + "' property '" + key + "' is not finite");
  }
}

enum class Direction { out, in, both };

// In-memory labeled property graph. Construction is single-writer; once
// built the graph is immutable and safe for concurrent readers.
class PropertyGraph {
 public:
  struct Adjacency {
    std::vector<std::string> out;  // edge ids, insertion order
    std::vector<std::string> in;
  };

  struct NeighborEntry {
    const Edge* edge;
    const Node* node;
  };

  void add_node(Node node) {
    validate_node(node);
    if (nodes_.contains(node.id))
      fail(ErrorKind::duplicate_node_id, "duplicate node id '" + node.id + "'");
    adjacency_.try_emplace(node.id);
    node_order_.push_back(node.id);
    nodes_.emplace(node.id, std::move(node));
  }

  void add_edge(Edge edge) {
    validate_edge_fields(edge);
    if (edges_.contains(edge.id))
      fail(ErrorKind::duplicate_edge_id, "duplicate edge id '" + edge.id + "'");
    if (!nodes_.contains(edge.src))
      fail(ErrorKind::dangling_endpoint,
           "edge '" + edge.id + "' references unknown src '" + edge.src + "'");
    if (!nodes_.contains(edge.dst))
      fail(ErrorKind::dangling_endpoint,
           "edge '" + edge.id + "' references unknown dst '" + edge.dst + "'");
    adjacency_[edge.src].out.push_back(edge.id);
    adjacency_[edge.dst].in.push_back(edge.id);
    edge_order_.push_back(edge.id);
    edges_.emplace(edge.id, std::move(edge));
  }

  bool has_node(const std::string& id) const { return nodes_.contains(id); }
  bool has_edge(const std::string& id) const { return edges_.contains(id); }

  const Node& node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
      fail(ErrorKind::unknown_node, "unknown node '" + id + "'");
    return it->second;
  }

  const Edge& edge(const std::string& id) const {
    auto it = edges_.find(id);
    if (it == edges_.end())
      fail(ErrorKind::io, "unknown edge '" + id + "'");
    return it->second;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Node/edge ids sorted ascending; the canonical iteration order.
  std::vector<std::string> node_ids_sorted() const {
    std::vector<std::string> ids = node_order_;
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  std::vector<std::string> edge_ids_sorted() const {
    std::vector<std::string> ids = edge_order_;
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  const Adjacency& adjacency(const std::string& node_id) const {
    auto it = adjacency_.find(node_id);
    if (it == adjacency_.end())
      fail(ErrorKind::unknown_node, "unknown node '" + node_id + "'");
    return it->second;
  }

  // Edges incident to node_id, ordered by (rel_type, neighbor id, edge id).
  // Direction::both concatenates out then in; a self-loop edge appears once.
  std::vector<NeighborEntry> neighbors(const std::string& node_id,
                                       Direction direction) const {
    const Adjacency& adj = adjacency(node_id);
    std::vector<NeighborEntry> result;
    if (direction == Direction::out || direction == Direction::both)
      append_sorted(adj.out, /*outgoing=*/true, result);
    if (direction == Direction::in || direction == Direction::both) {
      if (direction == Direction::both) {
        std::vector<NeighborEntry> incoming;
        append_sorted(adj.in, /*outgoing=*/false, incoming);
        for (const NeighborEntry& entry : incoming)
          if (entry.edge->src != entry.edge->dst) result.push_back(entry);
      } else {
        append_sorted(adj.in, /*outgoing=*/false, result);
      }
    }
    return result;
  }

  // Rebuilds adjacency from the edge map and compares with the stored lists
  // (as multisets; stored order is insertion order).
  bool adjacency_consistent() const {
    std::unordered_map<std::string, Adjacency> rebuilt;
    for (const auto& [id, node] : nodes_) rebuilt.try_emplace(id);
    for (const auto& [id, edge] : edges_) {
      auto src_it = rebuilt.find(edge.src);
      auto dst_it = rebuilt.find(edge.dst);
      if (src_it == rebuilt.end() || dst_it == rebuilt.end()) return false;
      src_it->second.out.push_back(id);
      dst_it->second.in.push_back(id);
    }
    if (rebuilt.size() != adjacency_.size()) return false;
    auto sorted = [](std::vector<std::string> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    for (const auto& [id, adj] : adjacency_) {
      auto it = rebuilt.find(id);
      if (it == rebuilt.end()) return false;
      if (sorted(adj.out) != sorted(it->second.out)) return false;
      if (sorted(adj.in) != sorted(it->second.in)) return false;
    }
    return true;
  }

  const std::unordered_map<std::string, Node>& nodes() const { return nodes_; }
  const std::unordered_map<std::string, Edge>& edges() const { return edges_; }

 private:
  void append_sorted(const std::vector<std::string>& edge_ids, bool outgoing,
                     std::vector<NeighborEntry>& result) const {
    struct Row {
      const Edge* edge;
      const Node* node;
    };
    std::vector<Row> rows;
    rows.reserve(edge_ids.size());
    for (const std::string& eid : edge_ids) {
      const Edge& e = edges_.at(eid);
      const Node& n = nodes_.at(outgoing ? e.dst : e.src);
      rows.push_back({&e, &n});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return std::tie(a.edge->rel_type, a.node->id, a.edge->id) <
             std::tie(b.edge->rel_type, b.node->id, b.edge->id);
    });
    for (const Row& row : rows) result.push_back({row.edge, row.node});
  }

  std::unordered_map<std::string, Node> nodes_;
  std::unordered_map<std::string, Edge> edges_;
  std::unordered_map<std::string, Adjacency> adjacency_;
  std::vector<std::string> node_order_;
  std::vector<std::string> edge_order_;
};

// Deep equality on content (nodes, labels, rel_types, properties); adjacency
// is derived state and not compared directly.
inline bool graphs_equal(const PropertyGraph& a, const PropertyGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
    return false;
  for (const auto& [id, node] : a.nodes()) {
    if (!b.has_node(id) || !(b.node(id) == node)) return false;
  }
  for (const auto& [id, edge] : a.edges()) {
    if (!b.has_edge(id) || !(b.edge(id) == edge)) return false;
  }
  return true;
}

}  // namespace lpg
