// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lau/corpus.hpp"
#include "lau/embedder.hpp"
#include "lau/model.hpp"

namespace lau {

// Edit distance over arbitrary token sequences (insert/delete/substitute,
// unit costs).
size_t levenshtein(const std::vector<std::string>& a,
                   const std::vector<std::string>& b);
size_t levenshtein_codepoints(const std::string& a, const std::string& b);

std::vector<std::string> split_words(const std::string& text);

// Word-level edit distance divided by reference word count. May exceed 1.
// The reference must contain at least one word.
double wer(const std::string& reference, const std::string& hypothesis);

// Character-level counterpart over code points; spaces count as characters.
double cer(const std::string& reference, const std::string& hypothesis);

// Geometric mean of clipped n-gram precisions (n = 1..4) times the brevity
// penalty. Unigram precision 0 gives 0; a zero higher-order precision is
// smoothed add-one. Empty hypothesis scores 0.
double bleu4(const std::vector<std::string>& references,
             const std::string& hypothesis);

// Corpus-level accumulation: clipped counts and lengths are summed over
// pairs, then combined once.
class BleuAccumulator {
 public:
  void add(const std::vector<std::string>& references,
           const std::string& hypothesis);
  double value() const;

 private:
  size_t clipped_[4] = {0, 0, 0, 0};
  size_t total_[4] = {0, 0, 0, 0};
  size_t ref_len_ = 0;
  size_t hyp_len_ = 0;
};

// k-means on the unit sphere: inputs are L2-normalized, centroids are
// renormalized means, distance is cosine. Seeded farthest-biased (D^2)
// initialization, at most 100 Lloyd iterations, deterministic tie rules
// (lowest index). An emptied cluster is re-seeded from the point farthest
// from its assigned centroid.
std::vector<size_t> kmeans_cluster(
    const std::vector<std::vector<double>>& embeddings, size_t k,
    uint64_t seed);

// Sum over points of (1 - cosine(point, centroid of its cluster)), with
// centroids recomputed from the assignment. Used to sanity-check kmeans
// against random partitions.
double kmeans_objective(const std::vector<std::vector<double>>& embeddings,
                        const std::vector<size_t>& assignments, size_t k);

// Cluster-vs-class agreement, all derivable from the contingency table.
struct ClusterReport {
  std::vector<size_t> assignments;
  std::vector<std::string> labels;
  size_t k = 0;
  std::vector<std::string> classes;            // distinct labels, sorted
  std::vector<std::vector<size_t>> contingency;  // k x classes
  double purity = 0.0;
  double nmi = 0.0;
};

ClusterReport make_cluster_report(const std::vector<size_t>& assignments,
                                  const std::vector<std::string>& labels);

// Mean dominant-class fraction per cluster: (1/N) sum_k max_j |w_k ∩ c_j|.
double purity(const std::vector<size_t>& assignments,
              const std::vector<std::string>& labels);

// 2 I(W;C) / (H(W) + H(C)) with natural logs. Both entropies zero -> 1.0;
// exactly one zero -> 0.0.
double nmi(const std::vector<size_t>& assignments,
           const std::vector<std::string>& labels);

struct EvalRow {
  std::string id;
  std::string reference;
  std::string hypothesis;
  double wer = 0.0;
  double cer = 0.0;
  int cluster = -1;  // -1: not clustered
  std::string topic;
};

struct EvalReport {
  double wer = 0.0;    // corpus-level: summed distances / summed ref words
  double cer = 0.0;
  double bleu4 = 0.0;
  std::optional<double> purity;
  std::optional<double> nmi;
  std::optional<double> qa_accuracy;
  bool clustering_omitted = false;
  std::string clustering_note;
  size_t clusters_k = 0;
  std::vector<EvalRow> rows;
};

// Scores prepared hypotheses against the testset: text metrics against the
// reference translations, then clustering of the hypothesis embeddings
// against topic labels (k = distinct topics). Utterances lacking a topic,
// or with an empty hypothesis, stay out of the clustering; if clustering
// is impossible it is omitted with a note and the text metrics stand.
EvalReport evaluate_outputs(const std::vector<std::string>& hypotheses,
                            const Corpus& testset,
                            const EmbeddingProvider& provider,
                            uint64_t cluster_seed = 0);

// Greedy-decodes the testset with the model (semantic head stripped first;
// stripping an already-stripped model is a no-op) and scores the outputs.
EvalReport evaluate_run(const ModelParams& params, const Vocabulary& vocab,
                        const Corpus& testset,
                        const EmbeddingProvider& provider,
                        uint64_t cluster_seed = 0);

// Question answering judged against the hypothesis text.
enum class JudgeVerdict { kCorrect, kIncorrect, kAbstain };

const char* judge_verdict_name(JudgeVerdict v);

class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual JudgeVerdict judge(const std::string& context,
                             const std::string& question,
                             const std::string& expected) = 0;
};

// Offline stand-in: correct iff every content word of the expected answer
// (words of at least 4 code points) appears as a word of the context.
class MockJudge : public JudgeClient {
 public:
  JudgeVerdict judge(const std::string& context, const std::string& question,
                     const std::string& expected) override;
};

// Delegates to the client; a client failure becomes an abstention with the
// cause logged to stderr.
JudgeVerdict qa_judge(JudgeClient& client, const std::string& context,
                      const std::string& question, const std::string& expected);

struct Question {
  std::string id;  // utterance id supplying the context
  std::string question;
  std::string expected;
};

// JSON-lines: {"id", "question", "expected"} per line.
std::vector<Question> load_questions(const std::string& path);

// Fraction of questions judged correct; contexts are the hypotheses of the
// report rows, matched by id (unknown id is an error).
double qa_accuracy(JudgeClient& client, const std::vector<Question>& questions,
                   const EvalReport& report);

// Report rendering: JSON file with top-level metrics plus per-utterance
// rows, and a fixed-width six-column metrics table (WER, CER, BLEU, Acc,
// Purity, NMI) for the terminal.
void write_eval_report(const EvalReport& report, const std::string& path);
std::string format_metrics_table(const std::string& system_name,
                                 const EvalReport& report);

}  // namespace lau
