// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lau/error.hpp"
#include "lau/rng.hpp"

namespace lau {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Length-sorted contiguous buckets; batch composition is fixed, only the
// visiting order is reshuffled each epoch.
std::vector<std::vector<size_t>> make_buckets(const Corpus& corpus,
                                              size_t batch_size) {
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return corpus.utterances[a].frames() < corpus.utterances[b].frames();
  });
  std::vector<std::vector<size_t>> buckets;
  for (size_t i = 0; i < order.size(); i += batch_size) {
    size_t end = std::min(order.size(), i + batch_size);
    buckets.emplace_back(order.begin() + i, order.begin() + end);
  }
  return buckets;
}

// Adaptive-moment state, one slot per parameter tensor. Step counts are
// per tensor: a tensor skipped on some steps (structurally untouched)
// keeps its own bias-correction clock.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::vector<size_t> step_count;

  explicit AdamState(const ModelParams& params) {
    m.reserve(params.tensors.size());
    v.reserve(params.tensors.size());
    step_count.assign(params.tensors.size(), 0);
    for (const NamedTensor& nt : params.tensors) {
      m.emplace_back(nt.value.shape());
      v.emplace_back(nt.value.shape());
    }
  }
};

bool component_touched(Component c, bool any_feasible, bool semantic_active) {
  switch (c) {
    case Component::kEncoder:
      return any_feasible || semantic_active;
    case Component::kCtcHead:
      return any_feasible;
    case Component::kSemanticHead:
      return semantic_active;
  }
  return false;
}

void adamw_update(ModelParams& params, const BatchLoss& fb, double lambda,
                  double lr, const TrainConfig& cfg, AdamState& state) {
  const bool any_feasible = fb.feasible > 0;
  const bool semantic_active = lambda > 0.0;
  for (size_t i = 0; i < params.tensors.size(); ++i) {
    NamedTensor& nt = params.tensors[i];
    if (!component_touched(nt.component, any_feasible, semantic_active)) {
      continue;
    }
    size_t t = ++state.step_count[i];
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    const Tensor& gs = fb.seq_grads.by_tensor[i];
    const Tensor& gm = fb.semantic_grads.by_tensor[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (size_t j = 0; j < nt.value.numel(); ++j) {
      double g = gs[j] + lambda * gm[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      double mhat = m[j] / bc1;
      double vhat = v[j] / bc2;
      nt.value[j] -= lr * (mhat / (std::sqrt(vhat) + cfg.adam_eps) +
                           cfg.weight_decay * nt.value[j]);
    }
  }
}

// Forward (and optional eval aggregation) over a whole corpus in fixed
// corpus order; no gradients.
BatchLoss evaluate_corpus(const ModelParams& params, const Corpus& corpus,
                          const Vocabulary& vocab, SemanticKind kind,
                          const EmbeddingProvider& provider,
                          size_t batch_size) {
  BatchLoss total;
  for (size_t i = 0; i < corpus.size(); i += batch_size) {
    std::vector<size_t> indices;
    for (size_t j = i; j < std::min(corpus.size(), i + batch_size); ++j) {
      indices.push_back(j);
    }
    BatchLoss part = batch_loss(params, corpus, indices, vocab, kind,
                                provider, GradMode::kNone);
    total.seq_sum += part.seq_sum;
    total.semantic_sum += part.semantic_sum;
    total.count += part.count;
    total.feasible += part.feasible;
    total.infeasible += part.infeasible;
  }
  return total;
}

}  // namespace

void TrainConfig::validate() const {
  if (steps < 1) throw Error("steps must be at least 1");
  if (batch_size < 1) throw Error("batch_size must be at least 1");
  if (warmup_steps < 1) throw Error("warmup_steps must be at least 1");
  if (!(lr_scale > 0.0)) throw Error("lr_scale must be positive");
  weights.validate();
  if (weights.alpha < 1.0) {
    throw Error("alpha < 1 requires a second sequence loss; only the "
                "alignment-free loss is configured");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error("optimizer moment constants must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw Error("optimizer epsilon must be positive");
  if (!(weight_decay >= 0.0)) throw Error("weight decay must be >= 0");
}

double noam_lr(size_t step, size_t d_model, size_t warmup, double scale) {
  if (step == 0) throw Error("scheduler step must be at least 1");
  if (d_model == 0) throw Error("scheduler d_model must be positive");
  if (warmup == 0) throw Error("scheduler warmup must be at least 1");
  if (!(scale > 0.0)) throw Error("scheduler scale must be positive");
  double s = static_cast<double>(step);
  double w = static_cast<double>(warmup);
  return scale * std::pow(static_cast<double>(d_model), -0.5) *
         std::min(std::pow(s, -0.5), s * std::pow(w, -1.5));
}

EncoderSnapshot snapshot_encoder(const ModelParams& params, size_t step) {
  EncoderSnapshot snap;
  snap.step = step;
  for (const NamedTensor& nt : params.tensors) {
    if (nt.component != Component::kEncoder) continue;
    snap.layout.push_back(nt.value.numel());
    snap.values.insert(snap.values.end(), nt.value.data(),
                       nt.value.data() + nt.value.numel());
  }
  return snap;
}

double parameter_drift(const EncoderSnapshot& initial,
                       const EncoderSnapshot& final_snapshot) {
  if (initial.layout != final_snapshot.layout) {
    throw Error("encoder snapshots have different layouts");
  }
  double sq = 0.0;
  for (size_t i = 0; i < initial.values.size(); ++i) {
    double d = final_snapshot.values[i] - initial.values[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

BatchLoss batch_loss(const ModelParams& params, const Corpus& corpus,
                     const std::vector<size_t>& indices,
                     const Vocabulary& vocab, SemanticKind kind,
                     const EmbeddingProvider& provider, GradMode mode) {
  if (indices.empty()) throw Error("batch_loss needs at least one utterance");
  if (provider.dim() != params.config.embed_dim) {
    throw Error("embedding provider dimension " +
                std::to_string(provider.dim()) +
                " does not match the model's " +
                std::to_string(params.config.embed_dim));
  }

  BatchLoss out;
  out.count = indices.size();
  const bool want_seq = mode != GradMode::kNone;
  const bool want_semantic = mode == GradMode::kBoth;
  if (mode != GradMode::kNone) {
    out.seq_grads = Gradients::zeros_like(params);
    out.semantic_grads = Gradients::zeros_like(params);
  }

  Batch batch = make_batch(corpus, indices);
  EncodeCache cache;
  EncoderStates states = encode(params, batch, &cache);

  // Sequence branch: per-utterance alignment-free loss over the valid
  // frames, averaged over the feasible utterances.
  Tensor logprobs = ctc_logits(params, states);
  const size_t vocab_size = params.config.vocab_size;
  Tensor d_logprobs({batch.size, states.max_out_frames, vocab_size});
  std::vector<Tensor> per_grad(batch.size);
  std::vector<bool> ok(batch.size, false);
  for (size_t b = 0; b < batch.size; ++b) {
    const Utterance& utt = corpus.utterances[indices[b]];
    std::vector<int> target = encode_text(vocab, utt.translation);
    size_t frames = states.out_lengths[b];
    Tensor lp({frames, vocab_size});
    for (size_t t = 0; t < frames; ++t) {
      for (size_t v = 0; v < vocab_size; ++v) {
        lp.at2(t, v) = logprobs.at3(b, t, v);
      }
    }
    CtcResult res = ctc_loss(lp, target, vocab.blank_index,
                             want_seq ? &per_grad[b] : nullptr);
    if (!res.feasible) {
      ++out.infeasible;
      continue;
    }
    ok[b] = true;
    ++out.feasible;
    out.seq_sum += res.loss;
  }
  if (want_seq && out.feasible > 0) {
    double inv = 1.0 / static_cast<double>(out.feasible);
    for (size_t b = 0; b < batch.size; ++b) {
      if (!ok[b]) continue;
      size_t frames = states.out_lengths[b];
      for (size_t t = 0; t < frames; ++t) {
        for (size_t v = 0; v < vocab_size; ++v) {
          d_logprobs.at3(b, t, v) = per_grad[b].at2(t, v) * inv;
        }
      }
    }
    Tensor d_states = ctc_head_backward(params, states, logprobs, d_logprobs,
                                        out.seq_grads);
    encode_backward(params, batch, cache, states, d_states, out.seq_grads);
  }

  // Semantic branch: pooled projection against the frozen reference
  // embeddings, averaged over the whole batch.
  SemanticCache sem_cache;
  Tensor pred = semantic_project(params, states, &sem_cache);
  std::vector<std::vector<double>> refs;
  refs.reserve(batch.size);
  for (size_t b = 0; b < batch.size; ++b) {
    refs.push_back(provider.embed(corpus.utterances[indices[b]].translation));
  }
  Tensor d_pred;
  out.semantic_sum =
      semantic_loss_batch(kind, pred, refs, want_semantic ? &d_pred : nullptr) *
      static_cast<double>(batch.size);
  if (want_semantic) {
    Tensor d_states = semantic_head_backward(params, states, sem_cache, d_pred,
                                             out.semantic_grads);
    encode_backward(params, batch, cache, states, d_states,
                    out.semantic_grads);
  }

  return out;
}

RoutingReport gradient_routing_check(const ModelParams& params,
                                     const Corpus& batch_corpus,
                                     const Vocabulary& vocab,
                                     SemanticKind kind,
                                     const EmbeddingProvider& provider) {
  if (batch_corpus.empty()) {
    throw Error("gradient_routing_check needs a non-empty corpus");
  }
  uint64_t before = provider.state_hash();
  std::vector<size_t> indices(batch_corpus.size());
  std::iota(indices.begin(), indices.end(), 0);
  BatchLoss fb = batch_loss(params, batch_corpus, indices, vocab, kind,
                            provider, GradMode::kBoth);
  RoutingReport report;
  report.semantic_grad_max_on_ctc_head =
      fb.semantic_grads.max_abs_for(params, Component::kCtcHead);
  report.sequence_grad_max_on_semantic_head =
      fb.seq_grads.max_abs_for(params, Component::kSemanticHead);
  report.semantic_grad_max_on_encoder =
      fb.semantic_grads.max_abs_for(params, Component::kEncoder);
  report.sequence_grad_max_on_encoder =
      fb.seq_grads.max_abs_for(params, Component::kEncoder);
  report.provider_unchanged = provider.state_hash() == before;
  return report;
}

TrainResult train(const TrainConfig& config, const Corpus& train_corpus,
                  const Vocabulary& vocab, ModelParams params,
                  const EmbeddingProvider& provider, TrainingLog& log,
                  const Corpus* val_corpus) {
  config.validate();
  params.config.validate();
  if (train_corpus.empty()) throw Error("training corpus is empty");
  const Corpus& eval_set =
      (val_corpus != nullptr && !val_corpus->empty()) ? *val_corpus
                                                      : train_corpus;

  const uint64_t provider_before = provider.state_hash();
  const size_t d_model =
      config.d_model != 0 ? config.d_model : params.config.encoder_hidden;
  const double lambda = config.weights.lambda;
  const GradMode mode = lambda > 0.0 ? GradMode::kBoth : GradMode::kSeqOnly;

  TrainResult result;
  result.initial = snapshot_encoder(params, 0);

  AdamState opt(params);
  std::vector<std::vector<size_t>> buckets =
      make_buckets(train_corpus, config.batch_size);
  std::vector<size_t> visit(buckets.size());
  std::iota(visit.begin(), visit.end(), 0);
  size_t cursor = visit.size();  // forces a shuffle before the first step
  size_t epoch = 0;

  auto run_eval = [&](size_t step) {
    BatchLoss agg = evaluate_corpus(params, eval_set, vocab,
                                    config.semantic_kind, provider,
                                    config.batch_size);
    EvalRecord rec;
    rec.step = step;
    rec.seq_loss = sequence_loss(config.weights, agg.seq_mean());
    rec.semantic_loss = agg.semantic_mean();
    rec.total = rec.seq_loss + lambda * rec.semantic_loss;
    rec.infeasible_count = agg.infeasible;
    log.evals.push_back(rec);
    if (config.snapshot_each_eval) {
      result.eval_snapshots.push_back(snapshot_encoder(params, step));
    }
  };

  for (size_t step = 1; step <= config.steps; ++step) {
    if (cursor == visit.size()) {
      Rng shuffler(mix_seed(config.seed, 0xB0B0 + epoch));
      shuffler.shuffle(visit);
      cursor = 0;
      ++epoch;
    }
    const std::vector<size_t>& indices = buckets[visit[cursor++]];

    BatchLoss fb = batch_loss(params, train_corpus, indices, vocab,
                              config.semantic_kind, provider, mode);
    double seq = sequence_loss(config.weights, fb.seq_mean());
    double semantic = fb.semantic_mean();
    double total = seq + lambda * semantic;
    double lr = noam_lr(step, d_model, config.warmup_steps, config.lr_scale);

    StepRecord rec{step, lr, seq, semantic, total, fb.infeasible};
    log.steps.push_back(rec);

    if (!std::isfinite(total)) {
      log.abort_step = step;
      std::ostringstream os;
      os << "non-finite loss at step " << step << ": seq=" << seq
         << " semantic=" << semantic << " total=" << total;
      log.abort_message = os.str();
      throw Error(log.abort_message);
    }

    adamw_update(params, fb, lambda, lr, config, opt);

    if (config.eval_every != 0 && step % config.eval_every == 0 &&
        step != config.steps) {
      run_eval(step);
    }
  }

  run_eval(config.steps);

  if (provider.state_hash() != provider_before) {
    throw Error("embedding provider state changed during training; the "
                "reference embedder must stay frozen");
  }

  result.final_snapshot = snapshot_encoder(params, config.steps);
  result.drift = parameter_drift(result.initial, result.final_snapshot);
  result.params = std::move(params);
  return result;
}

void write_train_csv(const TrainingLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write training log: " + path);
  out << "# written " << utc_timestamp() << "\n";
  out << "step,lr,seq_loss,semantic_loss,total,infeasible_count\n";
  for (const StepRecord& r : log.steps) {
    out << r.step << ',' << format_double(r.lr) << ','
        << format_double(r.seq_loss) << ',' << format_double(r.semantic_loss)
        << ',' << format_double(r.total) << ',' << r.infeasible_count << "\n";
  }
  if (log.abort_step.has_value()) {
    out << "# aborted at step " << *log.abort_step << ": " << log.abort_message
        << "\n";
  }
}

void write_eval_csv(const TrainingLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write validation log: " + path);
  out << "# written " << utc_timestamp() << "\n";
  out << "step,seq_loss,semantic_loss,total,infeasible_count\n";
  for (const EvalRecord& r : log.evals) {
    out << r.step << ',' << format_double(r.seq_loss) << ','
        << format_double(r.semantic_loss) << ',' << format_double(r.total)
        << ',' << r.infeasible_count << "\n";
  }
}

}  // namespace lau
