// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lau/corpus.hpp"
#include "lau/tensor.hpp"

namespace lau {

// Which branch of the training graph a parameter tensor belongs to.
// Encoder-tagged tensors are exactly the ones entering parameter drift.
enum class Component : uint8_t {
  kEncoder = 0,
  kCtcHead = 1,
  kSemanticHead = 2,
};

const char* component_name(Component c);

struct ModelConfig {
  size_t feature_dim = 0;     // F
  size_t encoder_layers = 1;  // strided conv + (layers-1) feedforward blocks
  size_t encoder_hidden = 32; // H
  size_t subsample = 1;       // temporal stride of the conv
  size_t vocab_size = 0;      // V, includes blank
  size_t embed_dim = 64;      // D, dimension of the reference embedding space
  uint64_t seed = 0;

  void validate() const;
};

struct NamedTensor {
  std::string name;
  Component component;
  Tensor value;
};

// All trainable parameters, each tensor tagged with its component. Tensor
// order is fixed by construction and preserved by checkpoint round trips.
struct ModelParams {
  ModelConfig config;
  std::vector<NamedTensor> tensors;

  const NamedTensor* find(const std::string& name) const;
  NamedTensor* find(const std::string& name);
  const Tensor& get(const std::string& name) const;
  Tensor& get_mut(const std::string& name);
  bool has(const std::string& name) const;
  bool has_component(Component c) const;
};

// Gradient buffers aligned index-for-index with ModelParams::tensors.
struct Gradients {
  std::vector<Tensor> by_tensor;

  static Gradients zeros_like(const ModelParams& params);
  double max_abs_for(const ModelParams& params, Component c) const;
};

// Zero-padded feature batch. Padding content beyond each utterance's true
// length never reaches the model: encode masks it out.
struct Batch {
  size_t size = 0;
  size_t max_frames = 0;
  size_t feature_dim = 0;
  Tensor features;              // B x T x F
  std::vector<size_t> lengths;  // true frame counts
};

Batch make_batch(const Corpus& corpus, const std::vector<size_t>& indices);

struct EncoderStates {
  Tensor states;                    // B x T' x H, masked frames are zero
  std::vector<size_t> out_lengths;  // T'_b = ceil(T_b / subsample)
  size_t max_out_frames = 0;
};

// Activations kept for the backward pass.
struct EncodeCache {
  Tensor input;                 // masked copy of the batch features
  Tensor conv_out;              // post-tanh conv output, B x T' x H
  std::vector<Tensor> ff_out;   // post-tanh feedforward outputs
};

struct SemanticCache {
  Tensor pooled;  // B x H
  Tensor hidden;  // B x H, post-tanh
};

// Kernel width of the strided input convolution.
inline constexpr size_t kConvKernel = 3;

// Deterministic init: weights uniform in +-1/sqrt(fan_in), biases zero.
// The semantic head is exactly two affine layers H -> H -> D with a tanh
// between them.
ModelParams init_model(const ModelConfig& config);

// Strided conv + feedforward stack. Output lengths are ceil(T/subsample);
// outputs are independent of padding content and of other batch members.
EncoderStates encode(const ModelParams& params, const Batch& batch,
                     EncodeCache* cache = nullptr);

// Per-frame log-probabilities over the vocabulary (log-softmax applied).
// Masked frames are filled with the uniform distribution.
Tensor ctc_logits(const ModelParams& params, const EncoderStates& states);

// Masked mean-pool over valid frames, then the two-layer head. B x D.
Tensor semantic_project(const ModelParams& params, const EncoderStates& states,
                        SemanticCache* cache = nullptr);

// Backward passes. Each accumulates parameter gradients into `grads`;
// head backwards return the gradient w.r.t. the encoder states.
void encode_backward(const ModelParams& params, const Batch& batch,
                     const EncodeCache& cache, const EncoderStates& states,
                     const Tensor& d_states, Gradients& grads);
Tensor ctc_head_backward(const ModelParams& params, const EncoderStates& states,
                         const Tensor& logprobs, const Tensor& d_logprobs,
                         Gradients& grads);
Tensor semantic_head_backward(const ModelParams& params,
                              const EncoderStates& states,
                              const SemanticCache& cache, const Tensor& d_pred,
                              Gradients& grads);

struct StripResult {
  ModelParams params;
  bool head_was_present = false;  // false means the strip was a no-op
};

// Removes all semantic_head tensors; encoder and ctc_head tensors are
// bit-identical to the input. Idempotent.
StripResult strip_semantic_head(const ModelParams& params);

// Per-frame argmax over valid frames, collapse consecutive repeats, drop
// blanks, map token indices to text. `logprobs` is T' x V for one utterance.
std::string greedy_ctc_decode(const Tensor& logprobs, const Vocabulary& vocab);

// Convenience: encode + ctc_logits + greedy decode for a whole corpus, in
// corpus order.
std::vector<std::string> greedy_decode_corpus(const ModelParams& params,
                                              const Vocabulary& vocab,
                                              const Corpus& corpus,
                                              size_t batch_size = 32);

// Checkpoint IO. Binary container: "LAUC" magic, format version, a JSON
// header (ModelConfig plus caller metadata such as the vocabulary), then one
// record per tensor: name, component tag, shape, little-endian f32 data.
// See docs/formats.md. Round-trips bit-exactly.
void save_checkpoint(const ModelParams& params, const std::string& path,
                     const nlohmann::json& extra_header = {});

struct Checkpoint {
  ModelParams params;
  nlohmann::json header;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lau
