// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/losses.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "lau/error.hpp"

namespace lau {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

const char* semantic_kind_name(SemanticKind k) {
  switch (k) {
    case SemanticKind::kCosine:
      return "cosine";
    case SemanticKind::kMse:
      return "mse";
  }
  throw Error("unknown semantic loss kind");
}

SemanticKind semantic_kind_from_name(const std::string& name) {
  if (name == "cosine") return SemanticKind::kCosine;
  if (name == "mse") return SemanticKind::kMse;
  throw Error("unknown semantic loss kind '" + name +
              "' (expected cosine or mse)");
}

void LossWeights::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error("lambda must be finite and >= 0");
  }
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw Error("alpha must lie in [0, 1]");
  }
}

CtcResult ctc_loss(const Tensor& logprobs, const std::vector<int>& target,
                   size_t blank, Tensor* grad) {
  if (logprobs.rank() != 2) {
    throw Error("ctc_loss expects a T x V log-probability matrix");
  }
  const size_t frames = logprobs.dim(0);
  const size_t vocab = logprobs.dim(1);
  if (blank >= vocab) throw Error("blank index outside the vocabulary");
  if (frames == 0) throw Error("ctc_loss needs at least one frame");
  for (int t : target) {
    if (t < 0 || static_cast<size_t>(t) >= vocab) {
      throw Error("target symbol outside the vocabulary");
    }
    if (static_cast<size_t>(t) == blank) {
      throw Error("target must not contain the blank symbol");
    }
  }

  if (grad != nullptr) {
    *grad = Tensor({frames, vocab});
  }

  // Extended sequence: blank, y1, blank, y2, ..., yL, blank.
  const size_t len = target.size();
  const size_t ext = 2 * len + 1;
  auto label_at = [&](size_t s) -> size_t {
    return (s % 2 == 0) ? blank : static_cast<size_t>(target[s / 2]);
  };

  // Feasibility: each symbol needs a frame, plus one separating blank
  // between each adjacent equal pair.
  size_t min_frames = len;
  for (size_t i = 1; i < len; ++i) {
    if (target[i] == target[i - 1]) ++min_frames;
  }
  if (frames < min_frames) {
    return CtcResult{std::numeric_limits<double>::infinity(), false};
  }

  // Forward (alpha) and backward (beta), both including the emission at
  // their own frame, in log space.
  std::vector<double> alpha(frames * ext, kNegInf);
  std::vector<double> beta(frames * ext, kNegInf);
  auto a = [&](size_t t, size_t s) -> double& { return alpha[t * ext + s]; };
  auto b = [&](size_t t, size_t s) -> double& { return beta[t * ext + s]; };
  auto lp = [&](size_t t, size_t s) -> double {
    return logprobs.data()[t * vocab + label_at(s)];
  };

  a(0, 0) = lp(0, 0);
  if (ext > 1) a(0, 1) = lp(0, 1);
  for (size_t t = 1; t < frames; ++t) {
    for (size_t s = 0; s < ext; ++s) {
      double best = a(t - 1, s);
      if (s >= 1) best = log_sum_exp(best, a(t - 1, s - 1));
      // The skip transition hops over a blank, allowed only between
      // distinct non-blank labels.
      if (s >= 2 && s % 2 == 1 && label_at(s) != label_at(s - 2)) {
        best = log_sum_exp(best, a(t - 1, s - 2));
      }
      if (best == kNegInf) continue;
      a(t, s) = best + lp(t, s);
    }
  }

  double logp = a(frames - 1, ext - 1);
  if (ext > 1) logp = log_sum_exp(logp, a(frames - 1, ext - 2));
  if (logp == kNegInf) {
    // Unreachable after the length check above, but kept as a guard: an
    // impossible alignment is a flagged result, never a crash.
    return CtcResult{std::numeric_limits<double>::infinity(), false};
  }

  if (grad != nullptr) {
    b(frames - 1, ext - 1) = lp(frames - 1, ext - 1);
    if (ext > 1) b(frames - 1, ext - 2) = lp(frames - 1, ext - 2);
    for (size_t ti = frames - 1; ti-- > 0;) {
      for (size_t s = 0; s < ext; ++s) {
        double best = b(ti + 1, s);
        if (s + 1 < ext) best = log_sum_exp(best, b(ti + 1, s + 1));
        if (s + 2 < ext && s % 2 == 1 && label_at(s) != label_at(s + 2)) {
          best = log_sum_exp(best, b(ti + 1, s + 2));
        }
        if (best == kNegInf) continue;
        b(ti, s) = best + lp(ti, s);
      }
    }

    // dLoss/dlogprob(t,v) = -exp(LSE_{s: label(s)=v}(alpha + beta)
    //                             - logprob(t,v) - logp).
    // Both alpha and beta include the frame-t emission, hence the single
    // subtraction of logprob(t,v).
    for (size_t t = 0; t < frames; ++t) {
      std::vector<double> acc(vocab, kNegInf);
      for (size_t s = 0; s < ext; ++s) {
        double ab = a(t, s);
        if (ab == kNegInf) continue;
        double bb = b(t, s);
        if (bb == kNegInf) continue;
        size_t v = label_at(s);
        acc[v] = log_sum_exp(acc[v], ab + bb);
      }
      for (size_t v = 0; v < vocab; ++v) {
        if (acc[v] == kNegInf) continue;
        grad->data()[t * vocab + v] =
            -std::exp(acc[v] - logprobs.data()[t * vocab + v] - logp);
      }
    }
  }

  return CtcResult{-logp, true};
}

double ctc_loss_bruteforce(const Tensor& probs, const std::vector<int>& target,
                           size_t blank) {
  if (probs.rank() != 2) {
    throw Error("ctc_loss_bruteforce expects a T x V probability matrix");
  }
  const size_t frames = probs.dim(0);
  const size_t vocab = probs.dim(1);
  if (blank >= vocab) throw Error("blank index outside the vocabulary");

  double paths = std::pow(static_cast<double>(vocab),
                          static_cast<double>(frames));
  if (!(paths <= 1e6)) {
    throw Error("instance too large for exhaustive path enumeration");
  }

  std::vector<size_t> path(frames, 0);
  double total = 0.0;
  uint64_t count = static_cast<uint64_t>(paths + 0.5);
  for (uint64_t n = 0; n < count; ++n) {
    uint64_t rem = n;
    for (size_t t = 0; t < frames; ++t) {
      path[t] = static_cast<size_t>(rem % vocab);
      rem /= vocab;
    }
    // Collapse: merge repeats, then drop blanks.
    std::vector<int> collapsed;
    size_t prev = vocab;  // sentinel unequal to everything
    for (size_t t = 0; t < frames; ++t) {
      if (path[t] != prev && path[t] != blank) {
        collapsed.push_back(static_cast<int>(path[t]));
      }
      prev = path[t];
    }
    if (collapsed != target) continue;
    double p = 1.0;
    for (size_t t = 0; t < frames; ++t) {
      p *= probs.data()[t * vocab + path[t]];
    }
    total += p;
  }
  if (total <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(total);
}

double sequence_loss(const LossWeights& weights, double ctc,
                     std::optional<double> other) {
  weights.validate();
  if (weights.alpha < 1.0 && !other.has_value()) {
    throw Error("alpha < 1 requires a second sequence loss to mix in");
  }
  if (weights.alpha >= 1.0) return ctc;
  return (1.0 - weights.alpha) * other.value() + weights.alpha * ctc;
}

double cosine_loss(const std::vector<double>& pred,
                   const std::vector<double>& ref,
                   std::vector<double>* d_pred) {
  if (pred.size() != ref.size() || pred.empty()) {
    throw Error("cosine_loss needs two equal-length non-empty vectors");
  }
  double dot = 0.0, pp = 0.0, rr = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    dot += pred[i] * ref[i];
    pp += pred[i] * pred[i];
    rr += ref[i] * ref[i];
  }
  double pn = std::sqrt(pp);
  double rn = std::sqrt(rr);
  if (rn < 1e-12) throw Error("cosine_loss reference vector has zero norm");
  if (pn < 1e-12) {
    throw Error("cosine_loss prediction has near-zero norm (head emitting "
                "all zeros)");
  }
  double cos = dot / (pn * rn);
  if (d_pred != nullptr) {
    d_pred->assign(pred.size(), 0.0);
    // d(1 - cos)/dpred_i = -(ref_i / (pn*rn) - cos * pred_i / pn^2)
    for (size_t i = 0; i < pred.size(); ++i) {
      (*d_pred)[i] = -(ref[i] / (pn * rn) - cos * pred[i] / (pn * pn));
    }
  }
  return 1.0 - cos;
}

double mse_loss(const std::vector<double>& pred, const std::vector<double>& ref,
                std::vector<double>* d_pred) {
  if (pred.size() != ref.size() || pred.empty()) {
    throw Error("mse_loss needs two equal-length non-empty vectors");
  }
  const double n = static_cast<double>(pred.size());
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    double d = pred[i] - ref[i];
    sum += d * d;
  }
  if (d_pred != nullptr) {
    d_pred->assign(pred.size(), 0.0);
    for (size_t i = 0; i < pred.size(); ++i) {
      (*d_pred)[i] = 2.0 * (pred[i] - ref[i]) / n;
    }
  }
  return sum / n;
}

double semantic_loss_batch(SemanticKind kind, const Tensor& pred,
                           const std::vector<std::vector<double>>& refs,
                           Tensor* d_pred) {
  if (pred.rank() != 2) {
    throw Error("semantic_loss_batch expects a B x D prediction matrix");
  }
  const size_t batch = pred.dim(0);
  const size_t dim = pred.dim(1);
  if (refs.size() != batch) {
    throw Error("one reference embedding per utterance required");
  }
  if (batch == 0) throw Error("semantic_loss_batch needs a non-empty batch");
  if (d_pred != nullptr) *d_pred = Tensor({batch, dim});

  double total = 0.0;
  std::vector<double> p(dim), g;
  for (size_t i = 0; i < batch; ++i) {
    if (refs[i].size() != dim) {
      throw Error("reference embedding dimension mismatch");
    }
    for (size_t j = 0; j < dim; ++j) p[j] = pred.data()[i * dim + j];
    double loss = kind == SemanticKind::kCosine
                      ? cosine_loss(p, refs[i], d_pred ? &g : nullptr)
                      : mse_loss(p, refs[i], d_pred ? &g : nullptr);
    total += loss;
    if (d_pred != nullptr) {
      for (size_t j = 0; j < dim; ++j) {
        d_pred->data()[i * dim + j] = g[j] / static_cast<double>(batch);
      }
    }
  }
  return total / static_cast<double>(batch);
}

LossBreakdown lau_loss(double seq, double semantic, const LossWeights& weights,
                       SemanticKind kind, bool ctc_only) {
  weights.validate();
  if (!std::isfinite(seq) || !std::isfinite(semantic)) {
    throw Error("lau_loss requires finite component losses");
  }
  LossBreakdown out;
  out.seq_loss = seq;
  out.semantic_loss = semantic;
  out.lambda = weights.lambda;
  out.alpha = weights.alpha;
  out.semantic_kind = kind;
  out.ctc_only = ctc_only;
  out.total = seq + weights.lambda * semantic;
  return out;
}

}  // namespace lau
