// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace lau {

// Deterministic text embedding from character trigrams: the text's code
// points are wrapped in begin/end sentinels, every window of three is
// hashed with the seed, and each hash flips coordinate (hash % dim) by
// +/-1 (top bit picks the sign). The sum is L2-normalized, so similar
// character sequences land near each other regardless of model state.
// Empty text is an error.
std::vector<double> hash_embed(const std::string& text, size_t dim,
                               uint64_t seed);

struct ReferenceEmbedding {
  std::string text;  // normalized form used as the key
  std::vector<double> embedding;
};

// Precomputed embeddings from a JSON-lines file: one object per line with
// "text" and "vector" fields. Keys are stored in composed (NFC) form and
// vectors are L2-normalized on ingestion. All rows must share one
// dimension. An empty file is a valid empty cache (every lookup misses).
class EmbeddingCache {
 public:
  static EmbeddingCache load(const std::string& path);

  size_t dim() const { return dim_; }  // 0 while the cache is empty
  size_t size() const { return entries_.size(); }
  // nullptr when the text (after normalization) is absent.
  const std::vector<double>* find(const std::string& text) const;
  uint64_t content_hash() const { return content_hash_; }

 private:
  std::map<std::string, std::vector<double>> entries_;
  size_t dim_ = 0;
  uint64_t content_hash_ = 0;
};

// A frozen source of reference embeddings: no gradients flow into it and
// its outputs for a given text never change during a run. state_hash()
// must change whenever embed() would, so training can assert frozenness.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const std::string& text) const = 0;
  virtual size_t dim() const = 0;
  virtual uint64_t state_hash() const = 0;
  virtual std::string describe() const = 0;
};

class HashEmbedder : public EmbeddingProvider {
 public:
  HashEmbedder(size_t dim, uint64_t seed);
  std::vector<double> embed(const std::string& text) const override;
  size_t dim() const override { return dim_; }
  uint64_t state_hash() const override;
  std::string describe() const override;

 private:
  size_t dim_;
  uint64_t seed_;
};

// What a CachedEmbedder does when a text is not in its cache.
enum class CacheFallback { kError, kHash };

// Serves embeddings from a cache file, optionally backing misses with the
// hash embedder (seeded identically for every miss, so still frozen).
// `dim` may be 0 to adopt the cache's dimension; it must be given when the
// cache is empty and the fallback is the hash embedder.
class CachedEmbedder : public EmbeddingProvider {
 public:
  CachedEmbedder(EmbeddingCache cache, CacheFallback fallback,
                 uint64_t hash_seed = 0, size_t dim = 0);
  std::vector<double> embed(const std::string& text) const override;
  size_t dim() const override { return dim_; }
  uint64_t state_hash() const override;
  std::string describe() const override;

 private:
  EmbeddingCache cache_;
  CacheFallback fallback_;
  uint64_t hash_seed_;
  size_t dim_;
};

// Factory used by the CLI: "hash" -> HashEmbedder, otherwise a path to a
// JSON-lines cache (fallback "error" or "hash").
std::unique_ptr<EmbeddingProvider> make_provider(const std::string& kind,
                                                 size_t dim, uint64_t seed,
                                                 const std::string& fallback);

}  // namespace lau
