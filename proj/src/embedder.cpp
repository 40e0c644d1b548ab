// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/embedder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lau/error.hpp"
#include "lau/rng.hpp"
#include "lau/utf8.hpp"

namespace lau {

namespace {

// Sentinels just past the Unicode range, so they cannot collide with real
// code points.
constexpr uint32_t kTextBegin = 0x110000;
constexpr uint32_t kTextEnd = 0x110001;

uint64_t trigram_hash(uint64_t seed, uint32_t a, uint32_t b, uint32_t c) {
  uint64_t h = mix_seed(seed, a);
  h = mix_seed(h, b);
  h = mix_seed(h, c);
  return h;
}

void l2_normalize(std::vector<double>& v, const char* what) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  double norm = std::sqrt(sq);
  if (norm < 1e-12) {
    throw Error(std::string(what) + " has zero norm");
  }
  for (double& x : v) x /= norm;
}

uint64_t string_hash(uint64_t h, const std::string& s) {
  for (unsigned char c : s) h = mix_seed(h, c);
  return h;
}

}  // namespace

std::vector<double> hash_embed(const std::string& text, size_t dim,
                               uint64_t seed) {
  if (dim < 2) throw Error("hash_embed dimension must be at least 2");
  if (text.empty()) throw Error("hash_embed requires non-empty text");

  std::vector<uint32_t> cps = utf8_decode(nfc_latin(text));
  std::vector<uint32_t> seq;
  seq.reserve(cps.size() + 2);
  seq.push_back(kTextBegin);
  seq.insert(seq.end(), cps.begin(), cps.end());
  seq.push_back(kTextEnd);

  std::vector<double> out(dim, 0.0);
  for (size_t i = 0; i + 2 < seq.size(); ++i) {
    uint64_t h = trigram_hash(seed, seq[i], seq[i + 1], seq[i + 2]);
    double sign = (h >> 63) ? -1.0 : 1.0;
    out[h % dim] += sign;
  }
  l2_normalize(out, "hash_embed result (all trigram signs cancelled)");
  return out;
}

EmbeddingCache EmbeddingCache::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding cache: " + path);

  EmbeddingCache cache;
  uint64_t hash = 0x1au;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("embedding cache " + path + " line " +
                  std::to_string(line_no) + ": " + e.what());
    }
    if (!row.is_object() || !row.contains("text") ||
        !row.contains("vector")) {
      throw Error("embedding cache " + path + " line " +
                  std::to_string(line_no) +
                  ": expected object with text and vector");
    }
    std::string text = nfc_latin(row.at("text").get<std::string>());
    if (text.empty()) {
      throw Error("embedding cache " + path + " line " +
                  std::to_string(line_no) + ": empty text key");
    }
    std::vector<double> vec = row.at("vector").get<std::vector<double>>();
    if (vec.empty()) {
      throw Error("embedding cache " + path + " line " +
                  std::to_string(line_no) + ": empty vector for text \"" +
                  text + "\"");
    }
    if (cache.dim_ == 0) {
      cache.dim_ = vec.size();
    } else if (vec.size() != cache.dim_) {
      throw Error("embedding cache " + path + " line " +
                  std::to_string(line_no) + ": text \"" + text +
                  "\" has dimension " + std::to_string(vec.size()) +
                  ", earlier entries have " + std::to_string(cache.dim_));
    }
    l2_normalize(vec, "cached embedding");
    auto existing = cache.entries_.find(text);
    if (existing != cache.entries_.end()) {
      if (existing->second != vec) {
        throw Error("embedding cache " + path + " line " +
                    std::to_string(line_no) + ": duplicate text \"" + text +
                    "\" with a different vector");
      }
      continue;  // identical repeat, harmless
    }
    hash = string_hash(hash, text);
    for (double x : vec) {
      hash = mix_seed(hash, static_cast<uint64_t>(std::llround(x * 1e9)));
    }
    cache.entries_.emplace(std::move(text), std::move(vec));
  }
  cache.content_hash_ = hash;
  return cache;
}

const std::vector<double>* EmbeddingCache::find(const std::string& text) const {
  auto it = entries_.find(nfc_latin(text));
  if (it == entries_.end()) return nullptr;
  return &it->second;
}

HashEmbedder::HashEmbedder(size_t dim, uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim < 2) throw Error("embedding dimension must be at least 2");
}

std::vector<double> HashEmbedder::embed(const std::string& text) const {
  return hash_embed(text, dim_, seed_);
}

uint64_t HashEmbedder::state_hash() const {
  return mix_seed(mix_seed(seed_, dim_), 0x4a5);
}

std::string HashEmbedder::describe() const {
  std::ostringstream os;
  os << "hash-trigram(dim=" << dim_ << ", seed=" << seed_ << ")";
  return os.str();
}

CachedEmbedder::CachedEmbedder(EmbeddingCache cache, CacheFallback fallback,
                               uint64_t hash_seed, size_t dim)
    : cache_(std::move(cache)), fallback_(fallback), hash_seed_(hash_seed),
      dim_(dim) {
  if (cache_.dim() != 0) {
    if (dim_ != 0 && dim_ != cache_.dim()) {
      throw Error("embedding cache dimension " + std::to_string(cache_.dim()) +
                  " does not match requested " + std::to_string(dim_));
    }
    dim_ = cache_.dim();
  } else if (dim_ == 0 && fallback_ == CacheFallback::kHash) {
    throw Error("empty embedding cache with hash fallback needs an explicit "
                "dimension");
  }
}

std::vector<double> CachedEmbedder::embed(const std::string& text) const {
  const std::vector<double>* hit = cache_.find(text);
  if (hit != nullptr) return *hit;
  if (fallback_ == CacheFallback::kHash) {
    return hash_embed(text, dim_, hash_seed_);
  }
  throw CacheMiss(text);
}

uint64_t CachedEmbedder::state_hash() const {
  uint64_t h = mix_seed(cache_.content_hash(),
                        fallback_ == CacheFallback::kHash ? 1u : 0u);
  return mix_seed(h, hash_seed_);
}

std::string CachedEmbedder::describe() const {
  std::ostringstream os;
  os << "cache(" << cache_.size() << " entries, dim=" << cache_.dim()
     << ", fallback="
     << (fallback_ == CacheFallback::kHash ? "hash" : "error") << ")";
  return os.str();
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& kind,
                                                 size_t dim, uint64_t seed,
                                                 const std::string& fallback) {
  if (kind == "hash") {
    return std::make_unique<HashEmbedder>(dim, seed);
  }
  CacheFallback fb;
  if (fallback == "error") {
    fb = CacheFallback::kError;
  } else if (fallback == "hash") {
    fb = CacheFallback::kHash;
  } else {
    throw Error("unknown cache fallback '" + fallback +
                "' (expected error or hash)");
  }
  EmbeddingCache cache = EmbeddingCache::load(kind);
  return std::make_unique<CachedEmbedder>(std::move(cache), fb, seed, dim);
}

}  // namespace lau
