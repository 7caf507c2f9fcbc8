#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "lpg/errors.hpp"
#include "lpg/rng.hpp"

namespace lpg {

// Fixed-dimension semantic vector. Provider outputs are L2-normalized to
// 1.0 +/- 1e-9, or exactly all-zero for empty text.
struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

inline double l2_norm(const EmbeddingVector& v) {
  double sum = 0.0;
  for (double x : v.values) sum += x * x;
  return std::sqrt(sum);
}

inline bool is_zero(const EmbeddingVector& v) {
  for (double x : v.values)
    if (x != 0.0) return false;
  return true;
}

inline void l2_normalize(EmbeddingVector& v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) return;
  for (double& x : v.values) x /= norm;
}

// Identifies an embedding provider; the id keys the cache and must fully
// determine the vectors the provider produces.
struct ProviderDescriptor {
  std::string provider_id;
  std::size_t dimension = 0;
};

inline void validate(const ProviderDescriptor& descriptor) {
  if (descriptor.provider_id.empty())
    fail(ErrorKind::usage, "provider_id must be non-empty");
  if (descriptor.dimension < 1)
    fail(ErrorKind::usage, "provider dimension must be >= 1");
}

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual const ProviderDescriptor& descriptor() const = 0;
  virtual std::size_t max_batch() const { return 64; }
  virtual std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) = 0;
};

// dot(a,b) / (|a||b|), clamped to [-1, 1]; 0.0 when either norm is zero.
inline double cosine_similarity(const EmbeddingVector& a,
                                const EmbeddingVector& b) {
  if (a.dimension() != b.dimension())
    fail(ErrorKind::dimension_mismatch,
         "cosine_similarity: dimensions " + std::to_string(a.dimension()) +
             " vs " + std::to_string(b.dimension()));
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    dot += a.values[i] * b.values[i];
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double cos = dot / (na * nb);
  if (cos > 1.0) cos = 1.0;
  if (cos < -1.0) cos = -1.0;
  return cos;
}

namespace detail {

// Lowercased alphanumeric tokens (Unicode-aware; a token is a maximal run
// of alphanumeric code points).
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    if (cp >= 0 && u_isalnum(cp)) {
      char buf[U8_MAX_LENGTH];
      std::int32_t offset = 0;
      UBool error = false;
      U8_APPEND(buf, offset, U8_MAX_LENGTH, u_tolower(cp), error);
      if (!error) current.append(buf, static_cast<std::size_t>(offset));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace detail

// Deterministic offline embedder: the hashing trick over unigrams and
// adjacent bigrams. Each feature maps to index = hash mod dimension with
// sign from bit 63 (+1 when clear, -1 when set); counts are accumulated and
// the result L2-normalized. Empty token set yields the all-zero vector.
inline EmbeddingVector hash_embed(const std::string& text,
                                  std::size_t dimension, std::uint64_t seed) {
  if (dimension < 1) fail(ErrorKind::usage, "dimension must be >= 1");
  EmbeddingVector out;
  out.values.assign(dimension, 0.0);
  const std::vector<std::string> tokens = detail::tokenize(text);
  if (tokens.empty()) return out;

  auto accumulate = [&](const std::string& feature) {
    const std::uint64_t h = hash64(feature, seed);
    const std::size_t index = static_cast<std::size_t>(h % dimension);
    out.values[index] += (h >> 63) ? -1.0 : 1.0;
  };

  for (const std::string& token : tokens) accumulate(token);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
    accumulate(tokens[i] + " " + tokens[i + 1]);

  l2_normalize(out);
  return out;
}

// Provider wrapper around hash_embed. The seed is part of the provider id so
// the id fully determines the vectors.
class HashEmbedder final : public EmbeddingProvider {
 public:
  HashEmbedder(std::size_t dimension, std::uint64_t seed)
      : seed_(seed),
        descriptor_{"hash:" + std::to_string(dimension) + ":" +
                        std::to_string(seed),
                    dimension} {
    validate(descriptor_);
  }

  const ProviderDescriptor& descriptor() const override { return descriptor_; }

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts)
      out.push_back(hash_embed(text, descriptor_.dimension, seed_));
    return out;
  }

 private:
  std::uint64_t seed_;
  ProviderDescriptor descriptor_;
};

}  // namespace lpg
