#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lpg/detail/sha256.hpp"
#include "lpg/embedding.hpp"
#include "lpg/errors.hpp"

namespace lpg {

using CacheKey = std::array<unsigned char, 32>;

inline CacheKey cache_key(const std::string& provider_id,
                          const std::string& normalized_text) {
  detail::Sha256 h;
  h.update(provider_id);
  const char sep = '\x1f';
  h.update(&sep, 1);
  h.update(normalized_text);
  return h.finish();
}

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& key) const {
    std::size_t out;
    std::memcpy(&out, key.data(), sizeof(out));
    return out;
  }
};

// Content-addressed persistent embedding store. On disk: repeated records
// [32-byte key][u32 LE dimension][dimension x f32 LE]. Writes append and
// flush; the loader scans sequentially and drops a truncated final record
// with a warning. Duplicate keys resolve last-write-wins.
//
// Vectors pass through the 32-bit on-disk representation on insert, so a
// vector served right after computation is bitwise identical to the one
// served after reopening the file.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(const std::filesystem::path& path) : path_(path) {
    load();
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_)
      fail(ErrorKind::cache_io,
           "cannot open cache file for append: " + path_.string());
  }

  static std::vector<float> quantize(const EmbeddingVector& vector) {
    std::vector<float> out;
    out.reserve(vector.values.size());
    for (double v : vector.values) out.push_back(static_cast<float>(v));
    return out;
  }

  static EmbeddingVector widen(const std::vector<float>& stored) {
    EmbeddingVector out;
    out.values.reserve(stored.size());
    for (float v : stored) out.values.push_back(static_cast<double>(v));
    return out;
  }

  bool contains(const CacheKey& key) const {
    std::lock_guard lock(mutex_);
    return entries_.contains(key);
  }

  std::optional<EmbeddingVector> get(const CacheKey& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return widen(it->second);
  }

  // Quantizes, appends to the file, and stores the quantized form.
  void put(const CacheKey& key, const EmbeddingVector& vector) {
    std::vector<float> stored = quantize(vector);
    std::lock_guard lock(mutex_);
    write_record(key, stored);
    entries_[key] = std::move(stored);
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

  // Dimensions present in the store (normally zero or one).
  std::vector<std::size_t> dimensions() const {
    std::lock_guard lock(mutex_);
    std::unordered_set<std::size_t> seen;
    for (const auto& [key, values] : entries_) seen.insert(values.size());
    return {seen.begin(), seen.end()};
  }

  bool dropped_truncated_tail() const { return dropped_tail_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  static constexpr std::uint32_t kMaxDimension = 1u << 24;

  void load() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // no file yet
    for (;;) {
      CacheKey key;
      if (!in.read(reinterpret_cast<char*>(key.data()),
                   static_cast<std::streamsize>(key.size()))) {
        dropped_tail_ = in.gcount() > 0;
        break;
      }
      unsigned char dim_bytes[4];
      if (!in.read(reinterpret_cast<char*>(dim_bytes), 4)) {
        dropped_tail_ = true;
        break;
      }
      const std::uint32_t dimension =
          static_cast<std::uint32_t>(dim_bytes[0]) |
          (static_cast<std::uint32_t>(dim_bytes[1]) << 8) |
          (static_cast<std::uint32_t>(dim_bytes[2]) << 16) |
          (static_cast<std::uint32_t>(dim_bytes[3]) << 24);
      if (dimension > kMaxDimension) {  // corrupt length field
        dropped_tail_ = true;
        break;
      }
      std::vector<float> values(dimension);
      if (dimension > 0 &&
          !in.read(reinterpret_cast<char*>(values.data()),
                   static_cast<std::streamsize>(dimension * sizeof(float)))) {
        dropped_tail_ = true;
        break;
      }
      entries_[key] = std::move(values);
    }
  }

  void write_record(const CacheKey& key, const std::vector<float>& values) {
    out_.write(reinterpret_cast<const char*>(key.data()),
               static_cast<std::streamsize>(key.size()));
    const auto dimension = static_cast<std::uint32_t>(values.size());
    unsigned char dim_bytes[4] = {
        static_cast<unsigned char>(dimension & 0xff),
        static_cast<unsigned char>((dimension >> 8) & 0xff),
        static_cast<unsigned char>((dimension >> 16) & 0xff),
        static_cast<unsigned char>((dimension >> 24) & 0xff)};
    out_.write(reinterpret_cast<const char*>(dim_bytes), 4);
    out_.write(reinterpret_cast<const char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(float)));
    out_.flush();
    if (!out_)
      fail(ErrorKind::cache_io, "cache append failed: " + path_.string());
  }

  std::filesystem::path path_;
  std::ofstream out_;
  mutable std::mutex mutex_;
  std::unordered_map<CacheKey, std::vector<float>, CacheKeyHash> entries_;
  bool dropped_tail_ = false;
};

struct EmbedResult {
  std::vector<EmbeddingVector> vectors;
  std::size_t provider_calls = 0;  // texts actually sent to the provider
};

namespace detail {

// Per-key in-flight registry: under concurrent requests for the same text,
// exactly one thread computes while the others wait for the cache entry.
class InflightKeys {
 public:
  // Returns true if the caller must compute this key; false once the cache
  // holds it (possibly filled by another thread while waiting). A waiter
  // that wakes after an error-path release re-acquires and computes itself.
  bool acquire(const CacheKey& key, const EmbeddingCache& cache) {
    std::unique_lock lock(mutex_);
    for (;;) {
      if (cache.contains(key)) return false;
      if (!inflight_.contains(key)) {
        inflight_.insert(key);
        return true;
      }
      cv_.wait(lock);
    }
  }

  void release(const CacheKey& key) {
    {
      std::lock_guard lock(mutex_);
      inflight_.erase(key);
    }
    cv_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::unordered_set<CacheKey, CacheKeyHash> inflight_;
};

inline InflightKeys& inflight_registry() {
  static InflightKeys registry;
  return registry;
}

}  // namespace detail

// Cache-through embedding: hits are served from the cache, misses are
// deduplicated within the request, batched up to provider.max_batch(),
// computed, appended to the cache, and then served from it. provider_calls
// counts texts sent, not batches. Results are independent of the batch
// partitioning, and a key is computed at most once per process even under
// concurrent requests.
inline EmbedResult embed_all_cached(std::span<const std::string> texts,
                                    EmbeddingProvider& provider,
                                    EmbeddingCache& cache) {
  const std::string& provider_id = provider.descriptor().provider_id;
  EmbedResult result;
  result.vectors.resize(texts.size());

  std::vector<CacheKey> keys;
  keys.reserve(texts.size());
  for (const std::string& text : texts)
    keys.push_back(cache_key(provider_id, text));

  // Unique missing texts in first-occurrence order.
  std::vector<std::size_t> miss_indices;
  std::unordered_set<std::string> seen_missing;
  std::vector<std::size_t> owned;  // indices this call must compute
  auto& inflight = detail::inflight_registry();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (seen_missing.contains(texts[i])) continue;
    if (cache.contains(keys[i])) continue;
    seen_missing.insert(texts[i]);
    miss_indices.push_back(i);
  }

  for (std::size_t idx : miss_indices) {
    if (inflight.acquire(keys[idx], cache)) owned.push_back(idx);
    // else: the cache already holds it (filled by another thread)
  }

  try {
    const std::size_t batch_cap = provider.max_batch() > 0
                                      ? provider.max_batch()
                                      : std::size_t{1};
    for (std::size_t start = 0; start < owned.size(); start += batch_cap) {
      const std::size_t end = std::min(owned.size(), start + batch_cap);
      std::vector<std::string> batch;
      batch.reserve(end - start);
      for (std::size_t j = start; j < end; ++j)
        batch.push_back(texts[owned[j]]);
      std::vector<EmbeddingVector> computed = provider.embed_batch(batch);
      if (computed.size() != batch.size())
        fail(ErrorKind::protocol, "provider returned a short batch");
      for (std::size_t j = start; j < end; ++j) {
        cache.put(keys[owned[j]], computed[j - start]);
        inflight.release(keys[owned[j]]);
      }
      result.provider_calls += batch.size();
    }
  } catch (...) {
    for (std::size_t idx : owned)
      if (!cache.contains(keys[idx])) inflight.release(keys[idx]);
    throw;
  }

  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto vector = cache.get(keys[i]);
    if (!vector)
      fail(ErrorKind::cache_io, "cache entry missing after compute");
    result.vectors[i] = std::move(*vector);
  }
  return result;
}

}  // namespace lpg
