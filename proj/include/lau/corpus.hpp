// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lau/tensor.hpp"

namespace lau {

// One sample of the <speech, transcription, translation> triplet. Features
// are T x F, already normalized; transcription and topic are optional.
struct Utterance {
  std::string id;
  Tensor features;  // T x F
  std::optional<std::string> transcription;
  std::string translation;
  std::optional<std::string> topic;

  size_t frames() const { return features.dim(0); }
  size_t feature_dim() const { return features.dim(1); }
};

// Immutable once built. All utterances share feature_dim, ids are unique.
struct Corpus {
  std::vector<Utterance> utterances;
  size_t feature_dim = 0;

  size_t size() const { return utterances.size(); }
  bool empty() const { return utterances.empty(); }
};

// Token alphabet for the CTC targets. Index 0 is always the blank.
struct Vocabulary {
  std::vector<std::string> tokens;
  size_t blank_index = 0;

  size_t size() const { return tokens.size(); }
};

inline constexpr const char* kBlankToken = "<blank>";

struct ToyCorpusSpec {
  size_t n_utterances = 0;
  size_t n_topics = 2;
  size_t feature_dim = 8;
  uint64_t seed = 0;
  size_t frames_per_token = 3;
  double noise_scale = 0.0;
  // Probability of replacing a translation with another sentence drawn from
  // the same topic inventory, modelling label noise. 0 disables the hook.
  double paraphrase_prob = 0.0;
};

// Manifest IO. One JSON object per line: id, features (relative path),
// transcription (string|null), translation, topic (string|null).
Corpus load_manifest(const std::string& path);
void save_manifest(const Corpus& corpus, const std::string& manifest_path,
                   const std::string& feature_dir);

// Feature file IO: "LAUF" magic, u32 T, u32 F, then T*F little-endian f32,
// row-major.
Tensor load_features(const std::string& path);
void save_features(const Tensor& features, const std::string& path);

// Blank plus every distinct character of any translation, characters sorted
// by code point. Deterministic for a fixed corpus.
Vocabulary build_vocab(const Corpus& corpus);

// Character -> token index. Never emits the blank. Out-of-vocabulary
// characters raise an error naming the character and its position.
std::vector<int> encode_text(const Vocabulary& vocab, const std::string& text);

// Token indices back to text. Inverse of encode_text on in-vocab strings.
std::string decode_indices(const Vocabulary& vocab,
                           const std::vector<int>& indices);

// Deterministic synthetic corpus: round-robin topics, per-topic word
// inventories over disjoint letter sets, features from per-character
// prototype frames plus Gaussian noise.
Corpus generate_toy_corpus(const ToyCorpusSpec& spec);

// The prototype frame for a character under a given seed, as used by
// generate_toy_corpus. Exposed so tests can reconstruct exact features.
std::vector<double> toy_prototype_frame(uint32_t codepoint, size_t feature_dim,
                                        uint64_t seed);

// Deterministic stratified split: every k-th utterance (1-based) goes to the
// validation side. k == 0 keeps everything in train.
struct CorpusSplit {
  Corpus train;
  Corpus val;
};
CorpusSplit split_corpus(const Corpus& corpus, size_t val_every_k);

}  // namespace lau
