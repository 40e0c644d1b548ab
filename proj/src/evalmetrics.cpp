// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lau/error.hpp"
#include "lau/rng.hpp"
#include "lau/utf8.hpp"

namespace lau {

namespace {

template <class Seq>
size_t edit_distance(const Seq& a, const Seq& b) {
  const size_t n = a.size();
  const size_t m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// n-gram counts keyed by the joined tokens; '\x1f' never occurs in words.
std::map<std::string, size_t> ngram_counts(const std::vector<std::string>& w,
                                           size_t n) {
  std::map<std::string, size_t> counts;
  if (w.size() < n) return counts;
  for (size_t i = 0; i + n <= w.size(); ++i) {
    std::string key = w[i];
    for (size_t j = 1; j < n; ++j) {
      key += '\x1f';
      key += w[i + j];
    }
    ++counts[key];
  }
  return counts;
}

struct BleuCounts {
  size_t clipped[4] = {0, 0, 0, 0};
  size_t total[4] = {0, 0, 0, 0};
  size_t ref_len = 0;
  size_t hyp_len = 0;
};

BleuCounts bleu_counts(const std::vector<std::string>& references,
                       const std::string& hypothesis) {
  if (references.empty()) throw Error("bleu4 needs at least one reference");
  BleuCounts out;
  std::vector<std::string> hyp = split_words(hypothesis);
  out.hyp_len = hyp.size();

  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const std::string& r : references) refs.push_back(split_words(r));

  // Effective reference length: closest to the hypothesis, ties to the
  // shorter reference.
  size_t best = refs[0].size();
  for (const auto& r : refs) {
    auto dist = [&](size_t len) {
      return len > out.hyp_len ? len - out.hyp_len : out.hyp_len - len;
    };
    if (dist(r.size()) < dist(best) ||
        (dist(r.size()) == dist(best) && r.size() < best)) {
      best = r.size();
    }
  }
  out.ref_len = best;

  for (size_t n = 1; n <= 4; ++n) {
    std::map<std::string, size_t> hyp_counts = ngram_counts(hyp, n);
    std::map<std::string, size_t> max_ref;
    for (const auto& r : refs) {
      for (const auto& [key, count] : ngram_counts(r, n)) {
        size_t& slot = max_ref[key];
        slot = std::max(slot, count);
      }
    }
    for (const auto& [key, count] : hyp_counts) {
      out.total[n - 1] += count;
      auto it = max_ref.find(key);
      if (it != max_ref.end()) {
        out.clipped[n - 1] += std::min(count, it->second);
      }
    }
  }
  return out;
}

double bleu_combine(const size_t clipped[4], const size_t total[4],
                    size_t ref_len, size_t hyp_len) {
  if (hyp_len == 0) return 0.0;
  if (clipped[0] == 0) return 0.0;  // no unigram overlap: score is 0
  double log_sum = 0.0;
  for (size_t n = 0; n < 4; ++n) {
    double p;
    if (clipped[n] == 0) {
      // Zero higher-order precision: add-one smoothing keeps the geometric
      // mean alive (an empty n-gram pool smooths to 1/1).
      p = (static_cast<double>(clipped[n]) + 1.0) /
          (static_cast<double>(total[n]) + 1.0);
    } else {
      p = static_cast<double>(clipped[n]) / static_cast<double>(total[n]);
    }
    log_sum += std::log(p);
  }
  double geo = std::exp(log_sum / 4.0);
  double bp = 1.0;
  if (hyp_len < ref_len) {
    bp = std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
  }
  return bp * geo;
}

void normalize_rows(std::vector<std::vector<double>>& rows) {
  for (size_t i = 0; i < rows.size(); ++i) {
    double sq = 0.0;
    for (double x : rows[i]) sq += x * x;
    double norm = std::sqrt(sq);
    if (norm < 1e-12) {
      throw Error("clustering input " + std::to_string(i) + " has zero norm");
    }
    for (double& x : rows[i]) x /= norm;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

size_t levenshtein(const std::vector<std::string>& a,
                   const std::vector<std::string>& b) {
  return edit_distance(a, b);
}

size_t levenshtein_codepoints(const std::string& a, const std::string& b) {
  return edit_distance(utf8_decode(a), utf8_decode(b));
}

double wer(const std::string& reference, const std::string& hypothesis) {
  std::vector<std::string> ref = split_words(reference);
  if (ref.empty()) throw Error("wer reference has no words");
  std::vector<std::string> hyp = split_words(hypothesis);
  return static_cast<double>(edit_distance(ref, hyp)) /
         static_cast<double>(ref.size());
}

double cer(const std::string& reference, const std::string& hypothesis) {
  std::vector<uint32_t> ref = utf8_decode(reference);
  if (ref.empty()) throw Error("cer reference is empty");
  std::vector<uint32_t> hyp = utf8_decode(hypothesis);
  return static_cast<double>(edit_distance(ref, hyp)) /
         static_cast<double>(ref.size());
}

double bleu4(const std::vector<std::string>& references,
             const std::string& hypothesis) {
  BleuCounts c = bleu_counts(references, hypothesis);
  return bleu_combine(c.clipped, c.total, c.ref_len, c.hyp_len);
}

void BleuAccumulator::add(const std::vector<std::string>& references,
                          const std::string& hypothesis) {
  BleuCounts c = bleu_counts(references, hypothesis);
  for (size_t n = 0; n < 4; ++n) {
    clipped_[n] += c.clipped[n];
    total_[n] += c.total[n];
  }
  ref_len_ += c.ref_len;
  hyp_len_ += c.hyp_len;
}

double BleuAccumulator::value() const {
  return bleu_combine(clipped_, total_, ref_len_, hyp_len_);
}

std::vector<size_t> kmeans_cluster(
    const std::vector<std::vector<double>>& embeddings, size_t k,
    uint64_t seed) {
  const size_t n = embeddings.size();
  if (k == 0) throw Error("cluster count must be at least 1");
  if (k > n) throw Error("cluster count exceeds the number of points");
  std::vector<std::vector<double>> points = embeddings;
  for (size_t i = 1; i < n; ++i) {
    if (points[i].size() != points[0].size()) {
      throw Error("clustering inputs must share one dimension");
    }
  }
  normalize_rows(points);

  Rng rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  std::vector<char> chosen(n, 0);
  size_t first = static_cast<size_t>(rng.next_below(n));
  centroids.push_back(points[first]);
  chosen[first] = 1;
  while (centroids.size() < k) {
    // D^2 weighting; on the unit sphere |x - c|^2 = 2 - 2 x.c.
    std::vector<double> weight(n, 0.0);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) {
        best = std::min(best, 2.0 - 2.0 * dot(points[i], c));
      }
      weight[i] = std::max(0.0, best);
      sum += weight[i];
    }
    size_t pick = n;
    if (sum <= 1e-15) {
      // Every point coincides with a centroid; take the lowest unchosen
      // index to stay deterministic.
      for (size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = 0;
    } else {
      double r = rng.uniform01() * sum;
      double acc = 0.0;
      for (size_t i = 0; i < n; ++i) {
        acc += weight[i];
        if (r < acc) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = n - 1;  // guard against rounding at the edge
    }
    centroids.push_back(points[pick]);
    chosen[pick] = 1;
  }

  std::vector<size_t> assign(n, 0);
  for (size_t iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    for (size_t i = 0; i < n; ++i) {
      size_t best = 0;
      double best_dot = dot(points[i], centroids[0]);
      for (size_t c = 1; c < k; ++c) {
        double d = dot(points[i], centroids[c]);
        if (d > best_dot) {
          best_dot = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    for (size_t c = 0; c < k; ++c) {
      std::vector<double> mean(points[0].size(), 0.0);
      size_t members = 0;
      for (size_t i = 0; i < n; ++i) {
        if (assign[i] != c) continue;
        ++members;
        for (size_t j = 0; j < mean.size(); ++j) mean[j] += points[i][j];
      }
      bool degenerate = members == 0;
      if (!degenerate) {
        double sq = 0.0;
        for (double x : mean) sq += x * x;
        double norm = std::sqrt(sq);
        if (norm < 1e-12) {
          degenerate = true;  // members cancelled out exactly
        } else {
          for (double& x : mean) x /= norm;
          centroids[c] = mean;
        }
      }
      if (degenerate) {
        // Re-seed from the point farthest from its own centroid.
        size_t far_i = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
          double d = 1.0 - dot(points[i], centroids[assign[i]]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        centroids[c] = points[far_i];
        assign[far_i] = c;
      }
    }
  }
  return assign;
}

double kmeans_objective(const std::vector<std::vector<double>>& embeddings,
                        const std::vector<size_t>& assignments, size_t k) {
  if (embeddings.size() != assignments.size()) {
    throw Error("kmeans_objective length mismatch");
  }
  std::vector<std::vector<double>> points = embeddings;
  normalize_rows(points);
  const size_t dim = points.empty() ? 0 : points[0].size();
  std::vector<std::vector<double>> centroids(k, std::vector<double>(dim, 0.0));
  std::vector<size_t> counts(k, 0);
  for (size_t i = 0; i < points.size(); ++i) {
    if (assignments[i] >= k) throw Error("assignment index out of range");
    ++counts[assignments[i]];
    for (size_t j = 0; j < dim; ++j) centroids[assignments[i]][j] += points[i][j];
  }
  for (size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    double sq = 0.0;
    for (double x : centroids[c]) sq += x * x;
    double norm = std::sqrt(sq);
    if (norm < 1e-12) continue;  // fully cancelled cluster scores distance 1
    for (double& x : centroids[c]) x /= norm;
  }
  double obj = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    obj += 1.0 - dot(points[i], centroids[assignments[i]]);
  }
  return obj;
}

ClusterReport make_cluster_report(const std::vector<size_t>& assignments,
                                  const std::vector<std::string>& labels) {
  if (assignments.size() != labels.size()) {
    throw Error("assignments and labels must have equal length");
  }
  if (assignments.empty()) {
    throw Error("cluster report needs at least one item");
  }
  ClusterReport report;
  report.assignments = assignments;
  report.labels = labels;

  std::set<std::string> class_set(labels.begin(), labels.end());
  report.classes.assign(class_set.begin(), class_set.end());
  size_t max_cluster = 0;
  for (size_t a : assignments) max_cluster = std::max(max_cluster, a);
  report.k = max_cluster + 1;

  std::map<std::string, size_t> class_index;
  for (size_t j = 0; j < report.classes.size(); ++j) {
    class_index[report.classes[j]] = j;
  }
  report.contingency.assign(report.k,
                            std::vector<size_t>(report.classes.size(), 0));
  for (size_t i = 0; i < assignments.size(); ++i) {
    ++report.contingency[assignments[i]][class_index[labels[i]]];
  }

  const double n = static_cast<double>(assignments.size());

  double dominant = 0.0;
  for (const auto& row : report.contingency) {
    dominant += static_cast<double>(*std::max_element(row.begin(), row.end()));
  }
  report.purity = dominant / n;

  // Entropies and mutual information from the table, natural logs.
  double h_omega = 0.0, h_class = 0.0, mi = 0.0;
  std::vector<size_t> cluster_sz(report.k, 0);
  std::vector<size_t> class_sz(report.classes.size(), 0);
  for (size_t a = 0; a < report.k; ++a) {
    for (size_t c = 0; c < report.classes.size(); ++c) {
      cluster_sz[a] += report.contingency[a][c];
      class_sz[c] += report.contingency[a][c];
    }
  }
  for (size_t a = 0; a < report.k; ++a) {
    if (cluster_sz[a] == 0) continue;
    double p = cluster_sz[a] / n;
    h_omega -= p * std::log(p);
  }
  for (size_t c = 0; c < class_sz.size(); ++c) {
    if (class_sz[c] == 0) continue;
    double p = class_sz[c] / n;
    h_class -= p * std::log(p);
  }
  for (size_t a = 0; a < report.k; ++a) {
    for (size_t c = 0; c < class_sz.size(); ++c) {
      size_t joint = report.contingency[a][c];
      if (joint == 0) continue;
      double pj = joint / n;
      mi += pj * std::log(n * static_cast<double>(joint) /
                          (static_cast<double>(cluster_sz[a]) *
                           static_cast<double>(class_sz[c])));
    }
  }
  if (h_omega == 0.0 && h_class == 0.0) {
    report.nmi = 1.0;
  } else if (h_omega == 0.0 || h_class == 0.0) {
    report.nmi = 0.0;
  } else {
    report.nmi = 2.0 * mi / (h_omega + h_class);
  }
  return report;
}

double purity(const std::vector<size_t>& assignments,
              const std::vector<std::string>& labels) {
  return make_cluster_report(assignments, labels).purity;
}

double nmi(const std::vector<size_t>& assignments,
           const std::vector<std::string>& labels) {
  return make_cluster_report(assignments, labels).nmi;
}

EvalReport evaluate_outputs(const std::vector<std::string>& hypotheses,
                            const Corpus& testset,
                            const EmbeddingProvider& provider,
                            uint64_t cluster_seed) {
  if (hypotheses.size() != testset.size()) {
    throw Error("one hypothesis per test utterance required");
  }
  if (testset.empty()) throw Error("test set is empty");

  EvalReport report;
  size_t word_dist = 0, word_ref = 0;
  size_t char_dist = 0, char_ref = 0;
  BleuAccumulator bleu;
  report.rows.reserve(testset.size());
  for (size_t i = 0; i < testset.size(); ++i) {
    const Utterance& utt = testset.utterances[i];
    const std::string& hyp = hypotheses[i];
    EvalRow row;
    row.id = utt.id;
    row.reference = utt.translation;
    row.hypothesis = hyp;
    row.topic = utt.topic.value_or("");

    std::vector<std::string> ref_words = split_words(utt.translation);
    if (ref_words.empty()) {
      throw Error("utterance " + utt.id + " has an empty reference");
    }
    size_t wd = edit_distance(ref_words, split_words(hyp));
    row.wer = static_cast<double>(wd) / static_cast<double>(ref_words.size());
    word_dist += wd;
    word_ref += ref_words.size();

    std::vector<uint32_t> ref_cps = utf8_decode(utt.translation);
    size_t cd = edit_distance(ref_cps, utf8_decode(hyp));
    row.cer = static_cast<double>(cd) / static_cast<double>(ref_cps.size());
    char_dist += cd;
    char_ref += ref_cps.size();

    bleu.add({utt.translation}, hyp);
    report.rows.push_back(std::move(row));
  }
  report.wer = static_cast<double>(word_dist) / static_cast<double>(word_ref);
  report.cer = static_cast<double>(char_dist) / static_cast<double>(char_ref);
  report.bleu4 = bleu.value();

  // Clustering over utterances that have both a topic label and a
  // non-empty hypothesis (an empty string has no embedding).
  std::vector<size_t> eligible;
  for (size_t i = 0; i < testset.size(); ++i) {
    if (testset.utterances[i].topic.has_value() && !hypotheses[i].empty()) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) {
    report.clustering_omitted = true;
    report.clustering_note =
        "clustering omitted: no utterance has both a topic label and a "
        "non-empty hypothesis";
    return report;
  }
  std::set<std::string> topic_set;
  for (size_t i : eligible) topic_set.insert(*testset.utterances[i].topic);
  size_t k = topic_set.size();
  if (k > eligible.size()) k = eligible.size();

  std::vector<std::vector<double>> embeddings;
  std::vector<std::string> topics;
  embeddings.reserve(eligible.size());
  for (size_t i : eligible) {
    embeddings.push_back(provider.embed(hypotheses[i]));
    topics.push_back(*testset.utterances[i].topic);
  }
  std::vector<size_t> assign = kmeans_cluster(embeddings, k, cluster_seed);
  ClusterReport cluster = make_cluster_report(assign, topics);
  report.purity = cluster.purity;
  report.nmi = cluster.nmi;
  report.clusters_k = k;
  for (size_t j = 0; j < eligible.size(); ++j) {
    report.rows[eligible[j]].cluster = static_cast<int>(assign[j]);
  }
  if (eligible.size() != testset.size()) {
    std::ostringstream os;
    os << (testset.size() - eligible.size()) << " of " << testset.size()
       << " utterances left out of clustering (missing topic or empty "
          "hypothesis)";
    report.clustering_note = os.str();
  }
  return report;
}

EvalReport evaluate_run(const ModelParams& params, const Vocabulary& vocab,
                        const Corpus& testset,
                        const EmbeddingProvider& provider,
                        uint64_t cluster_seed) {
  ModelParams inference = strip_semantic_head(params).params;
  std::vector<std::string> hypotheses =
      greedy_decode_corpus(inference, vocab, testset);
  return evaluate_outputs(hypotheses, testset, provider, cluster_seed);
}

const char* judge_verdict_name(JudgeVerdict v) {
  switch (v) {
    case JudgeVerdict::kCorrect:
      return "correct";
    case JudgeVerdict::kIncorrect:
      return "incorrect";
    case JudgeVerdict::kAbstain:
      return "abstain";
  }
  return "abstain";
}

JudgeVerdict MockJudge::judge(const std::string& context,
                              const std::string& question,
                              const std::string& expected) {
  (void)question;  // the lexical rule only inspects the expected answer
  std::vector<std::string> context_words = split_words(context);
  std::set<std::string> present(context_words.begin(), context_words.end());
  for (const std::string& word : split_words(expected)) {
    if (utf8_decode(word).size() < 4) continue;  // not a content word
    if (present.count(word) == 0) return JudgeVerdict::kIncorrect;
  }
  return JudgeVerdict::kCorrect;
}

JudgeVerdict qa_judge(JudgeClient& client, const std::string& context,
                      const std::string& question,
                      const std::string& expected) {
  try {
    return client.judge(context, question, expected);
  } catch (const std::exception& e) {
    std::cerr << "judge client failed (" << e.what() << "); abstaining\n";
    return JudgeVerdict::kAbstain;
  }
}

std::vector<Question> load_questions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open question set: " + path);
  std::vector<Question> questions;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("question set " + path + " line " + std::to_string(line_no) +
                  ": " + e.what());
    }
    if (!row.is_object() || !row.contains("id") || !row.contains("question") ||
        !row.contains("expected")) {
      throw Error("question set " + path + " line " + std::to_string(line_no) +
                  ": expected object with id, question, expected");
    }
    Question q;
    q.id = row.at("id").get<std::string>();
    q.question = row.at("question").get<std::string>();
    q.expected = row.at("expected").get<std::string>();
    questions.push_back(std::move(q));
  }
  return questions;
}

double qa_accuracy(JudgeClient& client, const std::vector<Question>& questions,
                   const EvalReport& report) {
  if (questions.empty()) throw Error("question set is empty");
  std::map<std::string, const EvalRow*> by_id;
  for (const EvalRow& row : report.rows) by_id[row.id] = &row;
  size_t correct = 0;
  for (const Question& q : questions) {
    auto it = by_id.find(q.id);
    if (it == by_id.end()) {
      throw Error("question references unknown utterance id: " + q.id);
    }
    JudgeVerdict v =
        qa_judge(client, it->second->hypothesis, q.question, q.expected);
    if (v == JudgeVerdict::kCorrect) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(questions.size());
}

void write_eval_report(const EvalReport& report, const std::string& path) {
  nlohmann::json j;
  j["wer"] = report.wer;
  j["cer"] = report.cer;
  j["bleu4"] = report.bleu4;
  j["purity"] = report.purity.has_value() ? nlohmann::json(*report.purity)
                                          : nlohmann::json(nullptr);
  j["nmi"] = report.nmi.has_value() ? nlohmann::json(*report.nmi)
                                    : nlohmann::json(nullptr);
  j["qa_accuracy"] = report.qa_accuracy.has_value()
                         ? nlohmann::json(*report.qa_accuracy)
                         : nlohmann::json(nullptr);
  j["clustering_omitted"] = report.clustering_omitted;
  j["clustering_note"] = report.clustering_note;
  j["clusters_k"] = report.clusters_k;
  nlohmann::json rows = nlohmann::json::array();
  for (const EvalRow& row : report.rows) {
    rows.push_back({{"id", row.id},
                    {"reference", row.reference},
                    {"hypothesis", row.hypothesis},
                    {"wer", row.wer},
                    {"cer", row.cer},
                    {"cluster", row.cluster},
                    {"topic", row.topic}});
  }
  j["rows"] = std::move(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write evaluation report: " + path);
  out << j.dump(2) << "\n";
}

std::string format_metrics_table(const std::string& system_name,
                                 const EvalReport& report) {
  auto cell = [](std::optional<double> v) -> std::string {
    if (!v.has_value()) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return buf;
  };
  size_t name_w = std::max<size_t>(8, system_name.size());
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line),
                "%-*s  %8s  %8s  %8s  %8s  %8s  %8s\n",
                static_cast<int>(name_w), "System", "WER", "CER", "BLEU",
                "Acc", "Purity", "NMI");
  os << line;
  std::snprintf(line, sizeof(line),
                "%-*s  %8s  %8s  %8s  %8s  %8s  %8s\n",
                static_cast<int>(name_w), system_name.c_str(),
                cell(report.wer).c_str(), cell(report.cer).c_str(),
                cell(report.bleu4).c_str(), cell(report.qa_accuracy).c_str(),
                cell(report.purity).c_str(), cell(report.nmi).c_str());
  os << line;
  return os.str();
}

}  // namespace lau
