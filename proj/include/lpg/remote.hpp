#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "lpg/embedding.hpp"
#include "lpg/errors.hpp"

namespace lpg {

struct TransportConfig {
  std::string base_url;  // e.g. "http://localhost:8080"
  double timeout_s = 30.0;
  std::size_t max_batch = 64;
  std::size_t max_retries = 3;  // retries after the initial attempt
  std::size_t backoff_base_ms = 250;
  std::size_t backoff_factor = 2;
  std::size_t max_inflight = 4;
  std::string api_key_env = "LPG_EMBED_API_KEY";
};

// Client for an embeddings endpoint: POST <base_url>/v1/embeddings with
// {"model": id, "input": [...]}; the response carries {"data":[{"index":i,
// "embedding":[...]}]}. Vectors are reassembled by index, validated against
// the descriptor dimension, and L2-normalized locally. Transport failures
// and retryable statuses back off exponentially; 401/403 never retry.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::string model, std::size_t dimension,
                 TransportConfig transport)
      : model_(std::move(model)),
        transport_(std::move(transport)),
        descriptor_{model_ + ":" + std::to_string(dimension), dimension},
        inflight_(static_cast<std::ptrdiff_t>(
            transport_.max_inflight > 0 ? transport_.max_inflight : 1)) {
    validate(descriptor_);
    if (transport_.base_url.empty())
      fail(ErrorKind::usage, "remote provider requires a base_url");
  }

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  std::size_t max_batch() const override { return transport_.max_batch; }
  std::size_t requests_sent() const { return requests_sent_; }

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) override {
    if (texts.empty()) return {};
    if (texts.size() > transport_.max_batch)
      fail(ErrorKind::usage,
           "batch of " + std::to_string(texts.size()) + " exceeds max_batch " +
               std::to_string(transport_.max_batch));
    for (const std::string& text : texts)
      if (text.empty())
        fail(ErrorKind::usage, "remote provider rejects empty texts");

    nlohmann::json body;
    body["model"] = model_;
    body["input"] = std::vector<std::string>(texts.begin(), texts.end());
    const std::string payload = body.dump();

    std::string response = post_with_retries(payload);
    return parse_response(response, texts.size());
  }

 private:
  std::string post_with_retries(const std::string& payload) {
    httplib::Client client(transport_.base_url);
    const auto timeout =
        std::chrono::milliseconds(static_cast<long>(transport_.timeout_s * 1000));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (const char* key = std::getenv(transport_.api_key_env.c_str());
        key != nullptr && key[0] != '\0')
      headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (std::size_t attempt = 0; attempt <= transport_.max_retries;
         ++attempt) {
      if (attempt > 0) {
        std::size_t delay = transport_.backoff_base_ms;
        for (std::size_t i = 1; i < attempt; ++i)
          delay *= transport_.backoff_factor;
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      }
      inflight_.acquire();
      ++requests_sent_;
      httplib::Result res = client.Post("/v1/embeddings", headers, payload,
                                        "application/json");
      inflight_.release();
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) return res->body;
      if (res->status == 401 || res->status == 403)
        fail(ErrorKind::auth,
             "authentication rejected (HTTP " + std::to_string(res->status) +
                 ")");
      if (res->status >= 500 || res->status == 408 || res->status == 429) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      fail(ErrorKind::protocol,
           "unexpected HTTP status " + std::to_string(res->status));
    }
    fail(ErrorKind::transport,
         "embedding request failed after " +
             std::to_string(transport_.max_retries + 1) + " attempts (" +
             last_error + ")");
  }

  std::vector<EmbeddingVector> parse_response(const std::string& body,
                                              std::size_t expected) {
    nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() ||
        !parsed.contains("data") || !parsed["data"].is_array())
      fail(ErrorKind::protocol, "malformed embeddings response body");

    std::vector<EmbeddingVector> out(expected);
    std::vector<bool> filled(expected, false);
    for (const auto& item : parsed["data"]) {
      if (!item.is_object() || !item.contains("index") ||
          !item.contains("embedding") || !item["index"].is_number_integer() ||
          !item["embedding"].is_array())
        fail(ErrorKind::protocol, "malformed embeddings response entry");
      const auto index = item["index"].get<std::int64_t>();
      if (index < 0 || static_cast<std::size_t>(index) >= expected)
        fail(ErrorKind::protocol,
             "response index " + std::to_string(index) + " out of range");
      const auto i = static_cast<std::size_t>(index);
      if (filled[i])
        fail(ErrorKind::protocol,
             "duplicate response index " + std::to_string(index));
      EmbeddingVector vector;
      vector.values.reserve(item["embedding"].size());
      for (const auto& component : item["embedding"]) {
        if (!component.is_number())
          fail(ErrorKind::protocol, "non-numeric embedding component");
        vector.values.push_back(component.get<double>());
      }
      if (vector.dimension() != descriptor_.dimension)
        fail(ErrorKind::protocol,
             "embedding dimension " + std::to_string(vector.dimension()) +
                 " does not match provider dimension " +
                 std::to_string(descriptor_.dimension));
      for (double v : vector.values)
        if (!std::isfinite(v))
          fail(ErrorKind::protocol, "non-finite embedding component");
      l2_normalize(vector);
      out[i] = std::move(vector);
      filled[i] = true;
    }
    for (std::size_t i = 0; i < expected; ++i)
      if (!filled[i])
        fail(ErrorKind::protocol,
             "response missing index " + std::to_string(i));
    return out;
  }

  std::string model_;
  TransportConfig transport_;
  ProviderDescriptor descriptor_;
  std::counting_semaphore<256> inflight_;
  std::atomic<std::size_t> requests_sent_ = 0;
};

}  // namespace lpg
