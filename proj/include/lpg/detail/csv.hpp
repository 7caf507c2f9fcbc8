#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "lpg/errors.hpp"

namespace lpg::detail {

// RFC 4180 reader: quoted fields, doubled quotes, CRLF, embedded newlines
// inside quoted fields. Tracks the 1-based line number where each record
// starts so ingest errors can point at the offending row.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
  };

  std::optional<Record> next() {
    int c = in_.get();
    while (c == '\n') {  // skip fully empty lines
      ++line_;
      c = in_.get();
    }
    if (c == std::istream::traits_type::eof()) return std::nullopt;

    Record rec;
    rec.line = line_;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    for (;;) {
      if (c == std::istream::traits_type::eof()) {
        if (in_quotes)
          fail(ErrorKind::malformed_record,
               "unterminated quoted field starting at line " +
                   std::to_string(rec.line));
        rec.fields.push_back(std::move(field));
        return rec;
      }
      const char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty() && !quoted_field) {
        in_quotes = true;
        quoted_field = true;
      } else if (ch == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        quoted_field = false;
      } else if (ch == '\r') {
        // swallow; the \n that follows ends the record
      } else if (ch == '\n') {
        ++line_;
        rec.fields.push_back(std::move(field));
        return rec;
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

inline std::string csv_escape(const std::string& field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace lpg::detail
