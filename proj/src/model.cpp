// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lau/binio.hpp"
#include "lau/error.hpp"
#include "lau/rng.hpp"

namespace lau {

const char* component_name(Component c) {
  switch (c) {
    case Component::kEncoder:
      return "encoder";
    case Component::kCtcHead:
      return "ctc_head";
    case Component::kSemanticHead:
      return "semantic_head";
  }
  return "?";
}

void ModelConfig::validate() const {
  if (feature_dim < 1) throw Error("model config: feature_dim must be >= 1");
  if (encoder_layers < 1) throw Error("model config: encoder_layers must be >= 1");
  if (encoder_hidden < 1) throw Error("model config: encoder_hidden must be >= 1");
  if (subsample < 1) throw Error("model config: subsample must be >= 1");
  if (vocab_size < 2) throw Error("model config: vocab_size must be >= 2");
  if (embed_dim < 2) throw Error("model config: embed_dim must be >= 2");
}

const NamedTensor* ModelParams::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

NamedTensor* ModelParams::find(const std::string& name) {
  for (auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Tensor& ModelParams::get(const std::string& name) const {
  const NamedTensor* t = find(name);
  if (!t) throw Error("no parameter tensor named " + name);
  return t->value;
}

Tensor& ModelParams::get_mut(const std::string& name) {
  NamedTensor* t = find(name);
  if (!t) throw Error("no parameter tensor named " + name);
  return t->value;
}

bool ModelParams::has(const std::string& name) const {
  return find(name) != nullptr;
}

bool ModelParams::has_component(Component c) const {
  for (const auto& t : tensors) {
    if (t.component == c) return true;
  }
  return false;
}

Gradients Gradients::zeros_like(const ModelParams& params) {
  Gradients g;
  g.by_tensor.reserve(params.tensors.size());
  for (const auto& t : params.tensors) {
    g.by_tensor.emplace_back(t.value.shape());
  }
  return g;
}

double Gradients::max_abs_for(const ModelParams& params, Component c) const {
  double m = 0.0;
  for (size_t i = 0; i < params.tensors.size(); ++i) {
    if (params.tensors[i].component != c) continue;
    const Tensor& g = by_tensor[i];
    for (size_t j = 0; j < g.numel(); ++j) m = std::max(m, std::fabs(g[j]));
  }
  return m;
}

namespace {

void init_tensor(Tensor& t, size_t fan_in, Rng& rng) {
  double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-scale, scale);
}

size_t out_len(size_t t, size_t subsample) {
  return (t + subsample - 1) / subsample;  // ceil
}

}  // namespace

ModelParams init_model(const ModelConfig& config) {
  config.validate();
  const size_t f = config.feature_dim;
  const size_t h = config.encoder_hidden;
  const size_t v = config.vocab_size;
  const size_t d = config.embed_dim;

  Rng rng(config.seed);
  ModelParams params;
  params.config = config;

  auto add = [&](const std::string& name, Component c,
                 std::vector<size_t> shape, size_t fan_in) {
    NamedTensor t{name, c, Tensor(std::move(shape))};
    if (fan_in > 0) init_tensor(t.value, fan_in, rng);  // fan_in 0 -> bias, zero
    params.tensors.push_back(std::move(t));
  };

  add("encoder.conv.weight", Component::kEncoder, {h, f, kConvKernel},
      f * kConvKernel);
  add("encoder.conv.bias", Component::kEncoder, {h}, 0);
  for (size_t i = 1; i < config.encoder_layers; ++i) {
    std::string base = "encoder.ff" + std::to_string(i);
    add(base + ".weight", Component::kEncoder, {h, h}, h);
    add(base + ".bias", Component::kEncoder, {h}, 0);
  }
  add("ctc_head.weight", Component::kCtcHead, {v, h}, h);
  add("ctc_head.bias", Component::kCtcHead, {v}, 0);
  add("semantic_head.fc1.weight", Component::kSemanticHead, {h, h}, h);
  add("semantic_head.fc1.bias", Component::kSemanticHead, {h}, 0);
  add("semantic_head.fc2.weight", Component::kSemanticHead, {d, h}, h);
  add("semantic_head.fc2.bias", Component::kSemanticHead, {d}, 0);
  return params;
}

Batch make_batch(const Corpus& corpus, const std::vector<size_t>& indices) {
  if (indices.empty()) throw Error("cannot build an empty batch");
  Batch batch;
  batch.size = indices.size();
  batch.feature_dim = corpus.feature_dim;
  for (size_t idx : indices) {
    if (idx >= corpus.size()) {
      throw Error("batch index " + std::to_string(idx) +
                  " out of range for corpus of size " +
                  std::to_string(corpus.size()));
    }
    batch.lengths.push_back(corpus.utterances[idx].frames());
  }
  batch.max_frames = *std::max_element(batch.lengths.begin(), batch.lengths.end());
  batch.features = Tensor({batch.size, batch.max_frames, batch.feature_dim});
  for (size_t b = 0; b < batch.size; ++b) {
    const Tensor& feats = corpus.utterances[indices[b]].features;
    for (size_t t = 0; t < batch.lengths[b]; ++t) {
      for (size_t fdim = 0; fdim < batch.feature_dim; ++fdim) {
        batch.features.at3(b, t, fdim) = feats.at2(t, fdim);
      }
    }
  }
  return batch;
}

EncoderStates encode(const ModelParams& params, const Batch& batch,
                     EncodeCache* cache) {
  const ModelConfig& cfg = params.config;
  if (batch.feature_dim != cfg.feature_dim) {
    throw Error("encode: batch feature dim " + std::to_string(batch.feature_dim) +
                " does not match model feature dim " +
                std::to_string(cfg.feature_dim));
  }
  const size_t h = cfg.encoder_hidden;
  const size_t s = cfg.subsample;
  const Tensor& cw = params.get("encoder.conv.weight");
  const Tensor& cb = params.get("encoder.conv.bias");

  EncoderStates out;
  out.out_lengths.reserve(batch.size);
  for (size_t len : batch.lengths) out.out_lengths.push_back(out_len(len, s));
  out.max_out_frames =
      *std::max_element(out.out_lengths.begin(), out.out_lengths.end());

  // Masked input copy: padding content is discarded here.
  Tensor input({batch.size, batch.max_frames, batch.feature_dim});
  for (size_t b = 0; b < batch.size; ++b) {
    for (size_t t = 0; t < batch.lengths[b]; ++t) {
      for (size_t fdim = 0; fdim < batch.feature_dim; ++fdim) {
        input.at3(b, t, fdim) = batch.features.at3(b, t, fdim);
      }
    }
  }

  Tensor conv_out({batch.size, out.max_out_frames, h});
  for (size_t b = 0; b < batch.size; ++b) {
    const size_t t_in = batch.lengths[b];
    for (size_t tp = 0; tp < out.out_lengths[b]; ++tp) {
      for (size_t j = 0; j < h; ++j) {
        double acc = cb[j];
        for (size_t k = 0; k < kConvKernel; ++k) {
          size_t t = tp * s + k;
          if (t >= t_in) continue;  // zero beyond the true length
          for (size_t fdim = 0; fdim < batch.feature_dim; ++fdim) {
            acc += cw.at3(j, fdim, k) * input.at3(b, t, fdim);
          }
        }
        conv_out.at3(b, tp, j) = std::tanh(acc);
      }
    }
  }

  std::vector<Tensor> ff_out;
  const Tensor* prev = &conv_out;
  for (size_t layer = 1; layer < cfg.encoder_layers; ++layer) {
    std::string base = "encoder.ff" + std::to_string(layer);
    const Tensor& w = params.get(base + ".weight");
    const Tensor& bias = params.get(base + ".bias");
    Tensor cur({batch.size, out.max_out_frames, h});
    for (size_t b = 0; b < batch.size; ++b) {
      for (size_t tp = 0; tp < out.out_lengths[b]; ++tp) {
        for (size_t j = 0; j < h; ++j) {
          double acc = bias[j];
          for (size_t i = 0; i < h; ++i) {
            acc += w.at2(j, i) * prev->at3(b, tp, i);
          }
          cur.at3(b, tp, j) = std::tanh(acc);
        }
      }
    }
    ff_out.push_back(std::move(cur));
    prev = &ff_out.back();
  }

  out.states = *prev;
  if (cache) {
    cache->input = std::move(input);
    cache->conv_out = std::move(conv_out);
    cache->ff_out = std::move(ff_out);
  }
  return out;
}

void encode_backward(const ModelParams& params, const Batch& batch,
                     const EncodeCache& cache, const EncoderStates& states,
                     const Tensor& d_states, Gradients& grads) {
  const ModelConfig& cfg = params.config;
  const size_t h = cfg.encoder_hidden;
  const size_t s = cfg.subsample;

  auto grad_of = [&](const std::string& name) -> Tensor& {
    for (size_t i = 0; i < params.tensors.size(); ++i) {
      if (params.tensors[i].name == name) return grads.by_tensor[i];
    }
    throw Error("no gradient slot for " + name);
  };

  // Backprop through the feedforward stack.
  Tensor d_cur = d_states;  // gradient w.r.t. current layer's post-tanh output
  for (size_t layer = cfg.encoder_layers; layer-- > 1;) {
    std::string base = "encoder.ff" + std::to_string(layer);
    const Tensor& w = params.get(base + ".weight");
    Tensor& dw = grad_of(base + ".weight");
    Tensor& db = grad_of(base + ".bias");
    // y is this layer's own post-tanh output; x the previous layer's output.
    const Tensor& y = cache.ff_out[layer - 1];
    const Tensor& x = layer >= 2 ? cache.ff_out[layer - 2] : cache.conv_out;

    Tensor d_prev({batch.size, states.max_out_frames, h});
    for (size_t b = 0; b < batch.size; ++b) {
      for (size_t tp = 0; tp < states.out_lengths[b]; ++tp) {
        for (size_t j = 0; j < h; ++j) {
          double yj = y.at3(b, tp, j);
          double dpre = d_cur.at3(b, tp, j) * (1.0 - yj * yj);
          db[j] += dpre;
          for (size_t i = 0; i < h; ++i) {
            dw.at2(j, i) += dpre * x.at3(b, tp, i);
            d_prev.at3(b, tp, i) += w.at2(j, i) * dpre;
          }
        }
      }
    }
    d_cur = std::move(d_prev);
  }

  // Conv layer. Input gradients are never needed: features are data.
  Tensor& dcw = grad_of("encoder.conv.weight");
  Tensor& dcb = grad_of("encoder.conv.bias");
  for (size_t b = 0; b < batch.size; ++b) {
    const size_t t_in = batch.lengths[b];
    for (size_t tp = 0; tp < states.out_lengths[b]; ++tp) {
      for (size_t j = 0; j < h; ++j) {
        double yj = cache.conv_out.at3(b, tp, j);
        double dpre = d_cur.at3(b, tp, j) * (1.0 - yj * yj);
        dcb[j] += dpre;
        for (size_t k = 0; k < kConvKernel; ++k) {
          size_t t = tp * s + k;
          if (t >= t_in) continue;
          for (size_t fdim = 0; fdim < batch.feature_dim; ++fdim) {
            dcw.at3(j, fdim, k) += dpre * cache.input.at3(b, t, fdim);
          }
        }
      }
    }
  }
}

Tensor ctc_logits(const ModelParams& params, const EncoderStates& states) {
  const size_t v = params.config.vocab_size;
  const size_t h = params.config.encoder_hidden;
  const Tensor& w = params.get("ctc_head.weight");
  const Tensor& bias = params.get("ctc_head.bias");

  const size_t bsz = states.out_lengths.size();
  Tensor logprobs({bsz, states.max_out_frames, v});
  const double uniform = -std::log(static_cast<double>(v));
  logprobs.fill(uniform);  // masked frames stay at the uniform distribution

  std::vector<double> u(v);
  for (size_t b = 0; b < bsz; ++b) {
    for (size_t tp = 0; tp < states.out_lengths[b]; ++tp) {
      double maxu = -1e300;
      for (size_t j = 0; j < v; ++j) {
        double acc = bias[j];
        for (size_t i = 0; i < h; ++i) {
          acc += w.at2(j, i) * states.states.at3(b, tp, i);
        }
        u[j] = acc;
        maxu = std::max(maxu, acc);
      }
      double sum = 0.0;
      for (size_t j = 0; j < v; ++j) sum += std::exp(u[j] - maxu);
      double lse = maxu + std::log(sum);
      for (size_t j = 0; j < v; ++j) {
        logprobs.at3(b, tp, j) = u[j] - lse;
      }
    }
  }
  return logprobs;
}

Tensor ctc_head_backward(const ModelParams& params, const EncoderStates& states,
                         const Tensor& logprobs, const Tensor& d_logprobs,
                         Gradients& grads) {
  const size_t v = params.config.vocab_size;
  const size_t h = params.config.encoder_hidden;
  const Tensor& w = params.get("ctc_head.weight");

  Tensor* dw = nullptr;
  Tensor* db = nullptr;
  for (size_t i = 0; i < params.tensors.size(); ++i) {
    if (params.tensors[i].name == "ctc_head.weight") dw = &grads.by_tensor[i];
    if (params.tensors[i].name == "ctc_head.bias") db = &grads.by_tensor[i];
  }
  if (!dw || !db) throw Error("ctc head gradient slots missing");

  const size_t bsz = states.out_lengths.size();
  Tensor d_states({bsz, states.max_out_frames, h});
  for (size_t b = 0; b < bsz; ++b) {
    for (size_t tp = 0; tp < states.out_lengths[b]; ++tp) {
      // log-softmax backward: du_j = dl_j - exp(l_j) * sum_k dl_k
      double dsum = 0.0;
      for (size_t j = 0; j < v; ++j) dsum += d_logprobs.at3(b, tp, j);
      for (size_t j = 0; j < v; ++j) {
        double du = d_logprobs.at3(b, tp, j) -
                    std::exp(logprobs.at3(b, tp, j)) * dsum;
        (*db)[j] += du;
        for (size_t i = 0; i < h; ++i) {
          dw->at2(j, i) += du * states.states.at3(b, tp, i);
          d_states.at3(b, tp, i) += w.at2(j, i) * du;
        }
      }
    }
  }
  return d_states;
}

Tensor semantic_project(const ModelParams& params, const EncoderStates& states,
                        SemanticCache* cache) {
  const size_t h = params.config.encoder_hidden;
  const size_t d = params.config.embed_dim;
  const Tensor& w1 = params.get("semantic_head.fc1.weight");
  const Tensor& b1 = params.get("semantic_head.fc1.bias");
  const Tensor& w2 = params.get("semantic_head.fc2.weight");
  const Tensor& b2 = params.get("semantic_head.fc2.bias");

  const size_t bsz = states.out_lengths.size();
  Tensor pooled({bsz, h});
  for (size_t b = 0; b < bsz; ++b) {
    const double inv = 1.0 / static_cast<double>(states.out_lengths[b]);
    for (size_t tp = 0; tp < states.out_lengths[b]; ++tp) {
      for (size_t i = 0; i < h; ++i) {
        pooled.at2(b, i) += states.states.at3(b, tp, i) * inv;
      }
    }
  }

  Tensor hidden({bsz, h});
  for (size_t b = 0; b < bsz; ++b) {
    for (size_t j = 0; j < h; ++j) {
      double acc = b1[j];
      for (size_t i = 0; i < h; ++i) acc += w1.at2(j, i) * pooled.at2(b, i);
      hidden.at2(b, j) = std::tanh(acc);
    }
  }

  Tensor out({bsz, d});
  for (size_t b = 0; b < bsz; ++b) {
    for (size_t j = 0; j < d; ++j) {
      double acc = b2[j];
      for (size_t i = 0; i < h; ++i) acc += w2.at2(j, i) * hidden.at2(b, i);
      out.at2(b, j) = acc;
    }
  }

  if (cache) {
    cache->pooled = std::move(pooled);
    cache->hidden = std::move(hidden);
  }
  return out;
}

Tensor semantic_head_backward(const ModelParams& params,
                              const EncoderStates& states,
                              const SemanticCache& cache, const Tensor& d_pred,
                              Gradients& grads) {
  const size_t h = params.config.encoder_hidden;
  const size_t d = params.config.embed_dim;
  const Tensor& w1 = params.get("semantic_head.fc1.weight");
  const Tensor& w2 = params.get("semantic_head.fc2.weight");

  Tensor *dw1 = nullptr, *db1 = nullptr, *dw2 = nullptr, *db2 = nullptr;
  for (size_t i = 0; i < params.tensors.size(); ++i) {
    const std::string& n = params.tensors[i].name;
    if (n == "semantic_head.fc1.weight") dw1 = &grads.by_tensor[i];
    if (n == "semantic_head.fc1.bias") db1 = &grads.by_tensor[i];
    if (n == "semantic_head.fc2.weight") dw2 = &grads.by_tensor[i];
    if (n == "semantic_head.fc2.bias") db2 = &grads.by_tensor[i];
  }
  if (!dw1 || !db1 || !dw2 || !db2) {
    throw Error("semantic head gradient slots missing");
  }

  const size_t bsz = states.out_lengths.size();
  Tensor d_states({bsz, states.max_out_frames, h});
  std::vector<double> d_hidden(h), d_pooled(h);
  for (size_t b = 0; b < bsz; ++b) {
    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (size_t j = 0; j < d; ++j) {
      double dj = d_pred.at2(b, j);
      (*db2)[j] += dj;
      for (size_t i = 0; i < h; ++i) {
        dw2->at2(j, i) += dj * cache.hidden.at2(b, i);
        d_hidden[i] += w2.at2(j, i) * dj;
      }
    }
    std::fill(d_pooled.begin(), d_pooled.end(), 0.0);
    for (size_t j = 0; j < h; ++j) {
      double yj = cache.hidden.at2(b, j);
      double dpre = d_hidden[j] * (1.0 - yj * yj);
      (*db1)[j] += dpre;
      for (size_t i = 0; i < h; ++i) {
        dw1->at2(j, i) += dpre * cache.pooled.at2(b, i);
        d_pooled[i] += w1.at2(j, i) * dpre;
      }
    }
    const double inv = 1.0 / static_cast<double>(states.out_lengths[b]);
    for (size_t tp = 0; tp < states.out_lengths[b]; ++tp) {
      for (size_t i = 0; i < h; ++i) {
        d_states.at3(b, tp, i) += d_pooled[i] * inv;
      }
    }
  }
  return d_states;
}

StripResult strip_semantic_head(const ModelParams& params) {
  StripResult result;
  result.params.config = params.config;
  for (const auto& t : params.tensors) {
    if (t.component == Component::kSemanticHead) {
      result.head_was_present = true;
      continue;
    }
    result.params.tensors.push_back(t);
  }
  return result;
}

std::string greedy_ctc_decode(const Tensor& logprobs, const Vocabulary& vocab) {
  if (logprobs.rank() != 2) throw Error("greedy decode expects a T' x V matrix");
  const size_t frames = logprobs.dim(0);
  const size_t v = logprobs.dim(1);
  if (v != vocab.size()) {
    throw Error("greedy decode: logit width does not match vocabulary size");
  }
  std::vector<int> collapsed;
  int prev = -1;
  for (size_t t = 0; t < frames; ++t) {
    size_t best = 0;
    double best_val = logprobs.at2(t, 0);
    for (size_t j = 1; j < v; ++j) {
      if (logprobs.at2(t, j) > best_val) {
        best_val = logprobs.at2(t, j);
        best = j;
      }
    }
    if (static_cast<int>(best) != prev && best != vocab.blank_index) {
      collapsed.push_back(static_cast<int>(best));
    }
    prev = static_cast<int>(best);
  }
  return decode_indices(vocab, collapsed);
}

std::vector<std::string> greedy_decode_corpus(const ModelParams& params,
                                              const Vocabulary& vocab,
                                              const Corpus& corpus,
                                              size_t batch_size) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (size_t start = 0; start < corpus.size(); start += batch_size) {
    std::vector<size_t> indices;
    for (size_t i = start; i < std::min(start + batch_size, corpus.size()); ++i) {
      indices.push_back(i);
    }
    Batch batch = make_batch(corpus, indices);
    EncoderStates states = encode(params, batch);
    Tensor logprobs = ctc_logits(params, states);
    for (size_t b = 0; b < batch.size; ++b) {
      Tensor single({states.out_lengths[b], params.config.vocab_size});
      for (size_t tp = 0; tp < states.out_lengths[b]; ++tp) {
        for (size_t j = 0; j < params.config.vocab_size; ++j) {
          single.at2(tp, j) = logprobs.at3(b, tp, j);
        }
      }
      out.push_back(greedy_ctc_decode(single, vocab));
    }
  }
  return out;
}

namespace {
constexpr uint32_t kCheckpointVersion = 1;
}

void save_checkpoint(const ModelParams& params, const std::string& path,
                     const nlohmann::json& extra_header) {
  nlohmann::json header = extra_header.is_null() ? nlohmann::json::object()
                                                 : extra_header;
  header["config"] = {
      {"feature_dim", params.config.feature_dim},
      {"encoder_layers", params.config.encoder_layers},
      {"encoder_hidden", params.config.encoder_hidden},
      {"subsample", params.config.subsample},
      {"vocab_size", params.config.vocab_size},
      {"embed_dim", params.config.embed_dim},
      {"seed", params.config.seed},
  };
  std::string header_text = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write checkpoint: " + path);
  write_bytes(os, "LAUC");
  write_u32(os, kCheckpointVersion);
  write_u32(os, static_cast<uint32_t>(header_text.size()));
  write_bytes(os, header_text);
  write_u32(os, static_cast<uint32_t>(params.tensors.size()));
  for (const auto& t : params.tensors) {
    write_u16(os, static_cast<uint16_t>(t.name.size()));
    write_bytes(os, t.name);
    write_u8(os, static_cast<uint8_t>(t.component));
    write_u8(os, static_cast<uint8_t>(t.value.rank()));
    for (size_t d : t.value.shape()) write_u32(os, static_cast<uint32_t>(d));
    for (size_t i = 0; i < t.value.numel(); ++i) {
      write_f32(os, static_cast<float>(t.value[i]));
    }
  }
  if (!os) throw Error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint: " + path);
  if (read_bytes(is, 4) != "LAUC") throw Error("bad checkpoint magic in " + path);
  uint32_t version = read_u32(is);
  if (version != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }
  uint32_t header_len = read_u32(is);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_bytes(is, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.header = header;
  try {
    const auto& cfg = header.at("config");
    ckpt.params.config.feature_dim = cfg.at("feature_dim").get<size_t>();
    ckpt.params.config.encoder_layers = cfg.at("encoder_layers").get<size_t>();
    ckpt.params.config.encoder_hidden = cfg.at("encoder_hidden").get<size_t>();
    ckpt.params.config.subsample = cfg.at("subsample").get<size_t>();
    ckpt.params.config.vocab_size = cfg.at("vocab_size").get<size_t>();
    ckpt.params.config.embed_dim = cfg.at("embed_dim").get<size_t>();
    ckpt.params.config.seed = cfg.at("seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad checkpoint config: ") + e.what());
  }

  uint32_t n_tensors = read_u32(is);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    NamedTensor t;
    uint16_t name_len = read_u16(is);
    t.name = read_bytes(is, name_len);
    uint8_t comp = read_u8(is);
    if (comp > 2) throw Error("bad component tag in checkpoint");
    t.component = static_cast<Component>(comp);
    uint8_t ndim = read_u8(is);
    std::vector<size_t> shape(ndim);
    for (auto& d : shape) d = read_u32(is);
    t.value = Tensor(shape);
    for (size_t j = 0; j < t.value.numel(); ++j) {
      t.value[j] = static_cast<double>(read_f32(is));
    }
    ckpt.params.tensors.push_back(std::move(t));
  }
  return ckpt;
}

}  // namespace lau
