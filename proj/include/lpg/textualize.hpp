#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "lpg/errors.hpp"
#include "lpg/graph.hpp"

namespace lpg {

// Controls node/relation-context serialization. char_budget is a character
// (code point) budget standing in for the embedding model's token limit.
struct TextTemplateConfig {
  bool include_labels = true;
  std::set<std::string> excluded_keys;
  std::size_t neighbor_cap = 10;
  std::size_t char_budget = 8000;
  bool include_target = true;
};

inline void validate(const TextTemplateConfig& config) {
  if (config.char_budget < 16)
    fail(ErrorKind::usage, "char_budget must be at least 16");
}

namespace detail {

inline bool is_ascii_space(UChar32 cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\v' || cp == '\f' ||
         cp == '\r';
}

inline bool is_control(UChar32 cp) {
  return (cp < 0x20) || cp == 0x7f || (cp >= 0x80 && cp <= 0x9f);
}

inline void append_utf8(std::string& out, UChar32 cp) {
  char buf[U8_MAX_LENGTH];
  int32_t offset = 0;
  UBool error = false;
  U8_APPEND(buf, offset, U8_MAX_LENGTH, cp, error);
  if (!error) out.append(buf, static_cast<std::size_t>(offset));
}

inline std::string nfc(const std::string& text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status))
    fail(ErrorKind::io, "ICU NFC normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(text);
  icu::UnicodeString normalized = normalizer->normalize(source, status);
  if (U_FAILURE(status))
    fail(ErrorKind::io, "NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

}  // namespace detail

// Total function: strips control characters, collapses whitespace runs to a
// single space, trims, and applies Unicode NFC. Idempotent; the collapse
// happens before NFC so removing a control character cannot leave a
// decomposed pair behind.
inline std::string normalize_text(const std::string& raw) {
  std::string collapsed;
  collapsed.reserve(raw.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(raw.data());
  const auto length = static_cast<std::int32_t>(raw.size());
  std::int32_t i = 0;
  bool pending_space = false;
  while (i < length) {
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    if (cp < 0) continue;  // invalid byte sequence: skip
    if (detail::is_ascii_space(cp)) {
      pending_space = true;
      continue;
    }
    if (detail::is_control(cp)) continue;
    if (pending_space && !collapsed.empty()) collapsed.push_back(' ');
    pending_space = false;
    detail::append_utf8(collapsed, cp);
  }
  return detail::nfc(collapsed);
}

// Renders a property value as text: numbers use the shortest decimal
// round-trip form, booleans render "true"/"false", lists join with ", ".
inline std::string property_to_text(const PropertyValue& value) {
  struct Renderer {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      return std::string(buf, ptr);
    }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::vector<std::string>& items) const {
      std::string out;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += items[i];
      }
      return out;
    }
  };
  return std::visit(Renderer{}, value);
}

// Cuts text to at most char_budget code points. Prefers the last space at or
// before budget-2 and appends " …"; hard-cuts when no space exists.
inline std::string truncate(const std::string& text, std::size_t char_budget) {
  if (char_budget < 16)
    fail(ErrorKind::usage, "char_budget must be at least 16");
  static const char* kEllipsis = " \xe2\x80\xa6";  // " …"

  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());

  // Byte offsets of each code point boundary, plus the end.
  std::vector<std::int32_t> boundaries;
  std::int32_t i = 0;
  while (i < length) {
    boundaries.push_back(i);
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    (void)cp;
  }
  boundaries.push_back(length);
  const std::size_t total_cps = boundaries.size() - 1;
  if (total_cps <= char_budget) return text;

  const std::size_t limit = char_budget - 2;
  std::size_t cut_cp = limit;  // hard-cut fallback
  for (std::size_t cp_index = limit + 1; cp_index-- > 0;) {
    if (cp_index == total_cps) continue;
    if (text[static_cast<std::size_t>(boundaries[cp_index])] == ' ') {
      cut_cp = cp_index;
      break;
    }
  }
  std::string out =
      text.substr(0, static_cast<std::size_t>(boundaries[cut_cp]));
  // Avoid doubling the separator when the cut landed on a space.
  while (!out.empty() && out.back() == ' ') out.pop_back();
  out += kEllipsis;
  return out;
}

namespace detail {

// Node text without the final normalize/truncate pass; shared between the
// node template and the relation-context template.
inline std::string node_clauses(const Node& node,
                                const TextTemplateConfig& config) {
  std::vector<std::string> clauses;
  if (config.include_labels && !node.labels.empty()) {
    std::string labels = "Labels: ";
    for (std::size_t i = 0; i < node.labels.size(); ++i) {
      if (i > 0) labels += ", ";
      labels += normalize_text(node.labels[i]);
    }
    labels += ".";
    clauses.push_back(std::move(labels));
  }
  for (const auto& [key, value] : node.properties) {  // std::map: sorted keys
    if (config.excluded_keys.contains(key)) continue;
    // values are normalized per clause so stray whitespace cannot detach
    // the clause period
    std::string rendered = normalize_text(property_to_text(value));
    if (rendered.empty()) continue;
    clauses.push_back(key + ": " + rendered + ".");
  }
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) out += " ";
    out += clauses[i];
  }
  return out;
}

// One-line summary of a neighbor: labels plus the value of its
// lexicographically-first text property; falls back to the node id when
// both are empty.
inline std::string neighbor_summary(const Node& node,
                                    const TextTemplateConfig& config) {
  std::string labels;
  if (config.include_labels) {
    for (std::size_t i = 0; i < node.labels.size(); ++i) {
      if (i > 0) labels += ", ";
      labels += node.labels[i];
    }
  }
  std::string text_value;
  for (const auto& [key, value] : node.properties) {
    if (config.excluded_keys.contains(key)) continue;
    if (const auto* s = std::get_if<std::string>(&value)) {
      text_value = normalize_text(*s);
      break;
    }
  }
  if (labels.empty() && text_value.empty()) return node.id;
  if (labels.empty()) return text_value;
  if (text_value.empty()) return labels;
  return labels + " " + text_value;
}

}  // namespace detail

// Deterministic node template: `Labels: <l1, l2>. <key>: <value>. ...` with
// keys in byte order, excluded keys and empty-rendering properties omitted,
// then normalized and truncated.
inline std::string textualize_node(const Node& node,
                                   const TextTemplateConfig& config) {
  validate(config);
  return truncate(normalize_text(detail::node_clauses(node, config)),
                  config.char_budget);
}

// Relation-context template: source clause, up to neighbor_cap outgoing
// `Connected via <REL_TYPE> to <summary>.` clauses, and optionally a target
// clause. Edges in excluded_edges are dropped from the neighbor listing
// before the cap applies; dataset assembly uses this to remove the edge
// being predicted from its own context.
inline std::string textualize_relation_context(
    const PropertyGraph& graph, const std::string& src_id,
    const std::optional<std::string>& dst_id, const TextTemplateConfig& config,
    const std::set<std::string>& excluded_edges = {}) {
  validate(config);
  const Node& src = graph.node(src_id);
  const Node* dst = nullptr;
  if (dst_id) dst = &graph.node(*dst_id);

  std::vector<std::string> parts;
  std::string src_text = detail::node_clauses(src, config);
  if (!src_text.empty()) parts.push_back("Source: " + src_text);

  std::size_t emitted = 0;
  for (const auto& entry : graph.neighbors(src_id, Direction::out)) {
    if (emitted >= config.neighbor_cap) break;
    if (excluded_edges.contains(entry.edge->id)) continue;
    parts.push_back("Connected via " + entry.edge->rel_type + " to " +
                    detail::neighbor_summary(*entry.node, config) + ".");
    ++emitted;
  }

  if (dst && config.include_target) {
    std::string dst_text = detail::node_clauses(*dst, config);
    if (!dst_text.empty()) parts.push_back("Target: " + dst_text);
  }

  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += " ";
    out += parts[i];
  }
  return truncate(normalize_text(out), config.char_budget);
}

}  // namespace lpg
