// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lau/tensor.hpp"

namespace lau {

enum class SemanticKind { kCosine, kMse };

const char* semantic_kind_name(SemanticKind k);
SemanticKind semantic_kind_from_name(const std::string& name);

struct LossWeights {
  double lambda = 1.0;  // semantic weight, >= 0
  double alpha = 1.0;   // CTC share of the sequence loss, in [0,1]

  void validate() const;
};

// The scalar terms of the composite objective, kept separate for logging.
// total is always seq_loss + lambda * semantic_loss, exactly as computed.
struct LossBreakdown {
  double seq_loss = 0.0;
  double semantic_loss = 0.0;
  double total = 0.0;
  double lambda = 1.0;
  double alpha = 1.0;
  SemanticKind semantic_kind = SemanticKind::kCosine;
  bool ctc_only = true;  // false when a second sequence term was mixed in
};

struct CtcResult {
  double loss = 0.0;    // +infinity when infeasible
  bool feasible = true; // false: no frame path can produce the target
};

// Negative log-probability of the target under the collapse rule (drop
// repeats, then blanks), summed over all frame paths by the forward DP in
// log space. `logprobs` is T' x V post-log-softmax; `target` contains no
// blanks. If `grad` is given it receives dLoss/dlogprobs (zero when
// infeasible). Infeasible targets (T' too short) yield a flagged +infinity,
// never a crash.
CtcResult ctc_loss(const Tensor& logprobs, const std::vector<int>& target,
                   size_t blank, Tensor* grad = nullptr);

// Exact reference: enumerates every frame path (V^T' of them), keeps those
// collapsing to the target, and sums their probabilities. `probs` is T' x V
// of plain probabilities. Refuses instances with more than 10^6 paths.
double ctc_loss_bruteforce(const Tensor& probs, const std::vector<int>& target,
                           size_t blank);

// (1 - alpha) * other + alpha * ctc. With the default alpha = 1 the other
// slot is ignored; alpha < 1 without a second loss is an error.
double sequence_loss(const LossWeights& weights, double ctc,
                     std::optional<double> other = std::nullopt);

// 1 - cosine similarity for one vector pair. In [0, 2]. The reference must
// be non-zero; a prediction with norm < 1e-12 is an error (a silent clamp
// would hide a dead head). d_pred, if given, receives the gradient.
double cosine_loss(const std::vector<double>& pred,
                   const std::vector<double>& ref,
                   std::vector<double>* d_pred = nullptr);

// Mean squared coordinate difference over the vector dimension.
double mse_loss(const std::vector<double>& pred, const std::vector<double>& ref,
                std::vector<double>* d_pred = nullptr);

// Batch forms: arithmetic mean over utterances. pred is B x D; refs has one
// D-vector per utterance; d_pred (B x D) receives the mean's gradient.
double semantic_loss_batch(SemanticKind kind, const Tensor& pred,
                           const std::vector<std::vector<double>>& refs,
                           Tensor* d_pred = nullptr);

// total = seq + lambda * semantic. Inputs must be finite.
LossBreakdown lau_loss(double seq, double semantic, const LossWeights& weights,
                       SemanticKind kind = SemanticKind::kCosine,
                       bool ctc_only = true);

}  // namespace lau
