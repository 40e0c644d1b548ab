// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lau/corpus.hpp"
#include "lau/embedder.hpp"
#include "lau/losses.hpp"
#include "lau/model.hpp"

namespace lau {

struct TrainConfig {
  size_t steps = 1;
  size_t batch_size = 8;
  size_t warmup_steps = 1000;
  double lr_scale = 2.0;
  LossWeights weights;
  SemanticKind semantic_kind = SemanticKind::kCosine;
  uint64_t seed = 0;
  size_t eval_every = 0;  // 0: evaluate only after the final step
  size_t d_model = 0;     // scheduler constant; 0 adopts encoder_hidden
  bool snapshot_each_eval = false;

  // Optimizer constants (decoupled weight decay, adaptive moments). The
  // exact values are pinned here so runs are reproducible bit-for-bit.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;

  void validate() const;
};

// Flattened encoder-tagged parameters in construction order, the quantity
// whose end-to-start L2 distance is the total parameter drift.
struct EncoderSnapshot {
  size_t step = 0;
  std::vector<size_t> layout;  // numel per encoder tensor, canonical order
  std::vector<double> values;
};

struct StepRecord {
  size_t step = 0;
  double lr = 0.0;
  double seq_loss = 0.0;
  double semantic_loss = 0.0;
  double total = 0.0;
  size_t infeasible_count = 0;
};

struct EvalRecord {
  size_t step = 0;
  double seq_loss = 0.0;
  double semantic_loss = 0.0;
  double total = 0.0;
  size_t infeasible_count = 0;
};

struct TrainingLog {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
  std::optional<size_t> abort_step;
  std::string abort_message;
};

// scale * d_model^(-0.5) * min(step^(-0.5), step * warmup^(-1.5)):
// linear warmup to the crossover at step == warmup, then inverse-sqrt decay.
double noam_lr(size_t step, size_t d_model, size_t warmup, double scale);

EncoderSnapshot snapshot_encoder(const ModelParams& params, size_t step);

// L2 norm of the difference between two snapshots with identical layouts.
double parameter_drift(const EncoderSnapshot& initial,
                       const EncoderSnapshot& final_snapshot);

// Which gradient buffers a batch_loss call should fill.
enum class GradMode { kNone, kSeqOnly, kBoth };

// One batch through both branches. Losses are reported as sums so callers
// can aggregate exact means across batches; gradients are of the batch
// means (sequence mean over feasible utterances, semantic mean over all).
// The semantic gradients are unweighted: the training update applies
// lambda on top.
struct BatchLoss {
  double seq_sum = 0.0;       // over feasible utterances
  double semantic_sum = 0.0;  // over all utterances
  size_t count = 0;
  size_t feasible = 0;
  size_t infeasible = 0;
  Gradients seq_grads;
  Gradients semantic_grads;

  double seq_mean() const {
    return feasible > 0 ? seq_sum / static_cast<double>(feasible) : 0.0;
  }
  double semantic_mean() const {
    return count > 0 ? semantic_sum / static_cast<double>(count) : 0.0;
  }
};

BatchLoss batch_loss(const ModelParams& params, const Corpus& corpus,
                     const std::vector<size_t>& indices,
                     const Vocabulary& vocab, SemanticKind kind,
                     const EmbeddingProvider& provider, GradMode mode);

// Structural separation of the two branches: the semantic term must not
// touch the ctc_head, the sequence term must not touch the semantic head,
// and the provider must be bit-identical before and after.
struct RoutingReport {
  double semantic_grad_max_on_ctc_head = 0.0;      // exactly 0 expected
  double sequence_grad_max_on_semantic_head = 0.0; // exactly 0 expected
  double semantic_grad_max_on_encoder = 0.0;       // > 0 on live models
  double sequence_grad_max_on_encoder = 0.0;
  bool provider_unchanged = true;
};

RoutingReport gradient_routing_check(const ModelParams& params,
                                     const Corpus& batch_corpus,
                                     const Vocabulary& vocab,
                                     SemanticKind kind,
                                     const EmbeddingProvider& provider);

struct TrainResult {
  ModelParams params;
  EncoderSnapshot initial;
  EncoderSnapshot final_snapshot;
  std::vector<EncoderSnapshot> eval_snapshots;
  double drift = 0.0;  // parameter_drift(initial, final_snapshot)
};

// Deterministic training loop: length-sorted batches visited in seeded
// shuffled order, both branches forward each step, decoupled-weight-decay
// adaptive updates at noam_lr(step). A tensor is updated only when its
// branch produced a gradient this step, so lambda = 0 leaves the semantic
// head bit-identical and an all-infeasible batch leaves the ctc_head
// untouched. Validation records land in `log` every eval_every steps and
// after the final step (on val_corpus when given, else on train_corpus).
// A non-finite loss aborts with the step recorded in `log`.
TrainResult train(const TrainConfig& config, const Corpus& train_corpus,
                  const Vocabulary& vocab, ModelParams params,
                  const EmbeddingProvider& provider, TrainingLog& log,
                  const Corpus* val_corpus = nullptr);

// CSV writers. The only timestamp lives in the leading '#' comment line;
// every numeric field is written with round-trip precision.
void write_train_csv(const TrainingLog& log, const std::string& path);
void write_eval_csv(const TrainingLog& log, const std::string& path);

}  // namespace lau
