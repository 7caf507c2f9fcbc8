#pragma once

#include <stdexcept>
#include <string>

namespace lpg {

// Error taxonomy. The class of an error decides the CLI exit code:
// usage/config -> 1, data -> 2, provider/transport -> 3, task assembly -> 4.
enum class ErrorKind {
  // graph / ingest (data)
  duplicate_node_id,
  duplicate_edge_id,
  dangling_endpoint,
  unknown_node,
  malformed_record,
  duplicate_id,
  missing_required_column,
  cache_io,
  io,
  // embedding provider (provider)
  transport,
  protocol,
  auth,
  // classifiers / evaluation (data)
  dimension_mismatch,
  empty_dataset,
  k_out_of_range,
  length_mismatch,
  class_too_small,
  // task assembly (task)
  insufficient_negatives,
  no_usable_examples,
  // configuration / API misuse (usage)
  usage,
};

enum class ErrorClass { usage = 1, data = 2, provider = 3, task = 4 };

constexpr ErrorClass classify(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::transport:
    case ErrorKind::protocol:
    case ErrorKind::auth:
      return ErrorClass::provider;
    case ErrorKind::insufficient_negatives:
    case ErrorKind::no_usable_examples:
      return ErrorClass::task;
    case ErrorKind::usage:
      return ErrorClass::usage;
    default:
      return ErrorClass::data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorClass error_class() const noexcept { return classify(kind_); }
  int exit_code() const noexcept { return static_cast<int>(error_class()); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace lpg
