// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "lau/binio.hpp"
#include "lau/error.hpp"
#include "lau/rng.hpp"
#include "lau/utf8.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace lau {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void validate_utterance(const Utterance& u) {
  if (u.features.rank() != 2 || u.frames() < 1 || u.feature_dim() < 1) {
    throw Error("utterance " + u.id + ": features must be T x F with T,F >= 1");
  }
  for (size_t i = 0; i < u.features.numel(); ++i) {
    if (!std::isfinite(u.features[i])) {
      throw Error("utterance " + u.id + ": non-finite feature value");
    }
  }
  if (trim(u.translation).empty()) {
    throw Error("utterance " + u.id + ": empty translation");
  }
}

}  // namespace

Tensor load_features(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open feature file: " + path);
  std::string magic = read_bytes(is, 4);
  if (magic != "LAUF") throw Error("bad feature file magic in " + path);
  uint32_t t = read_u32(is);
  uint32_t f = read_u32(is);
  if (t == 0 || f == 0) throw Error("degenerate feature shape in " + path);
  Tensor features({t, f});
  std::vector<float> buf(static_cast<size_t>(t) * f);
  read_f32_array(is, buf.data(), buf.size());
  for (size_t i = 0; i < buf.size(); ++i) {
    features[i] = static_cast<double>(buf[i]);
  }
  return features;
}

void save_features(const Tensor& features, const std::string& path) {
  if (features.rank() != 2) throw Error("features must be rank 2");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write feature file: " + path);
  write_bytes(os, "LAUF");
  write_u32(os, static_cast<uint32_t>(features.dim(0)));
  write_u32(os, static_cast<uint32_t>(features.dim(1)));
  for (size_t i = 0; i < features.numel(); ++i) {
    write_f32(os, static_cast<float>(features[i]));
  }
  if (!os) throw Error("write failed: " + path);
}

Corpus load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open manifest: " + path);
  fs::path base = fs::path(path).parent_path();

  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::string prev_id;  // id of the record that pinned feature_dim
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("manifest line " + std::to_string(line_no) +
                  ": malformed JSON: " + e.what());
    }
    Utterance u;
    try {
      u.id = rec.at("id").get<std::string>();
      u.translation = rec.at("translation").get<std::string>();
      if (rec.contains("transcription") && !rec["transcription"].is_null()) {
        u.transcription = rec["transcription"].get<std::string>();
      }
      if (rec.contains("topic") && !rec["topic"].is_null()) {
        u.topic = rec["topic"].get<std::string>();
      }
      std::string feat_rel = rec.at("features").get<std::string>();
      fs::path feat_path = base / feat_rel;
      if (!fs::exists(feat_path)) {
        throw Error("missing feature file: " + feat_path.string());
      }
      u.features = load_features(feat_path.string());
    } catch (const json::exception& e) {
      throw Error("manifest line " + std::to_string(line_no) +
                  ": missing or mistyped field: " + e.what());
    }
    validate_utterance(u);
    if (!seen_ids.insert(u.id).second) {
      throw Error("duplicate utterance id: " + u.id);
    }
    if (corpus.empty()) {
      corpus.feature_dim = u.feature_dim();
      prev_id = u.id;
    } else if (u.feature_dim() != corpus.feature_dim) {
      throw Error("feature-dim mismatch: utterance " + prev_id + " has F=" +
                  std::to_string(corpus.feature_dim) + " but utterance " +
                  u.id + " has F=" + std::to_string(u.feature_dim()));
    }
    corpus.utterances.push_back(std::move(u));
  }
  if (corpus.empty()) throw Error("empty manifest: " + path);
  return corpus;
}

void save_manifest(const Corpus& corpus, const std::string& manifest_path,
                   const std::string& feature_dir) {
  fs::path base = fs::path(manifest_path).parent_path();
  fs::path feat_abs = base / feature_dir;
  fs::create_directories(feat_abs);
  std::ofstream os(manifest_path, std::ios::trunc);
  if (!os) throw Error("cannot write manifest: " + manifest_path);
  for (const auto& u : corpus.utterances) {
    std::string feat_rel =
        (fs::path(feature_dir) / (u.id + ".lauf")).generic_string();
    save_features(u.features, (base / feat_rel).string());
    json rec;
    rec["id"] = u.id;
    rec["features"] = feat_rel;
    rec["transcription"] =
        u.transcription ? json(*u.transcription) : json(nullptr);
    rec["translation"] = u.translation;
    rec["topic"] = u.topic ? json(*u.topic) : json(nullptr);
    os << rec.dump() << "\n";
  }
  if (!os) throw Error("write failed: " + manifest_path);
}

Vocabulary build_vocab(const Corpus& corpus) {
  if (corpus.empty()) throw Error("cannot build vocabulary from empty corpus");
  std::set<uint32_t> chars;
  for (const auto& u : corpus.utterances) {
    for (uint32_t cp : utf8_decode(u.translation)) chars.insert(cp);
  }
  Vocabulary vocab;
  vocab.tokens.push_back(kBlankToken);
  vocab.blank_index = 0;
  for (uint32_t cp : chars) vocab.tokens.push_back(utf8_encode_one(cp));
  return vocab;
}

std::vector<int> encode_text(const Vocabulary& vocab, const std::string& text) {
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < vocab.tokens.size(); ++i) {
    index[vocab.tokens[i]] = static_cast<int>(i);
  }
  std::vector<int> out;
  std::vector<uint32_t> cps = utf8_decode(text);
  out.reserve(cps.size());
  for (size_t pos = 0; pos < cps.size(); ++pos) {
    std::string ch = utf8_encode_one(cps[pos]);
    auto it = index.find(ch);
    if (it == index.end() || static_cast<size_t>(it->second) == vocab.blank_index) {
      throw Error("out-of-vocabulary character \"" + ch + "\" at position " +
                  std::to_string(pos));
    }
    out.push_back(it->second);
  }
  return out;
}

std::string decode_indices(const Vocabulary& vocab,
                           const std::vector<int>& indices) {
  std::string out;
  for (int idx : indices) {
    if (idx < 0 || static_cast<size_t>(idx) >= vocab.tokens.size()) {
      throw Error("token index out of range: " + std::to_string(idx));
    }
    if (static_cast<size_t>(idx) == vocab.blank_index) continue;
    out += vocab.tokens[static_cast<size_t>(idx)];
  }
  return out;
}

namespace {

// Each topic owns three letters of the pool, so translations from different
// topics share no words and almost no character 3-grams.
constexpr const char* kLetterPool = "abcdefghijklmnopqrstuvwxyz";
constexpr size_t kLettersPerTopic = 3;
constexpr size_t kWordsPerTopic = 8;

std::vector<std::string> topic_inventory(size_t topic, uint64_t seed) {
  const size_t pool = 26;
  Rng rng(mix_seed(seed, 0x70B1C000ULL + topic));
  std::vector<char> letters(kLettersPerTopic);
  for (size_t i = 0; i < kLettersPerTopic; ++i) {
    letters[i] = kLetterPool[(topic * kLettersPerTopic + i) % pool];
  }
  std::vector<std::string> words;
  std::set<std::string> seen;
  while (words.size() < kWordsPerTopic) {
    size_t len = 3 + rng.next_below(3);  // 3..5 letters
    std::string w;
    char prev = 0;
    for (size_t i = 0; i < len; ++i) {
      char c;
      do {
        c = letters[rng.next_below(kLettersPerTopic)];
      } while (c == prev);  // no adjacent repeats keeps CTC paths feasible
      w += c;
      prev = c;
    }
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

std::string sample_sentence(const std::vector<std::string>& inventory,
                            Rng& rng) {
  size_t n_words = 2 + rng.next_below(3);  // 2..4 words
  std::string sentence;
  for (size_t i = 0; i < n_words; ++i) {
    if (i) sentence += ' ';
    sentence += inventory[rng.next_below(inventory.size())];
  }
  return sentence;
}

}  // namespace

std::vector<double> toy_prototype_frame(uint32_t codepoint, size_t feature_dim,
                                        uint64_t seed) {
  Rng rng(mix_seed(seed, 0xF4A3E000ULL + codepoint));
  std::vector<double> frame(feature_dim);
  for (size_t i = 0; i < feature_dim; ++i) frame[i] = rng.uniform(-1.0, 1.0);
  return frame;
}

Corpus generate_toy_corpus(const ToyCorpusSpec& spec) {
  if (spec.n_topics < 2) throw Error("toy corpus needs n_topics >= 2");
  if (spec.frames_per_token < 1) {
    throw Error("toy corpus needs frames_per_token >= 1");
  }
  if (spec.feature_dim < 1) throw Error("toy corpus needs feature_dim >= 1");
  if (spec.noise_scale < 0.0) throw Error("noise_scale must be >= 0");
  if (spec.paraphrase_prob < 0.0 || spec.paraphrase_prob > 1.0) {
    throw Error("paraphrase_prob must be in [0,1]");
  }
  if (spec.n_topics * kLettersPerTopic > 26) {
    throw Error("toy corpus supports at most 8 topics");
  }

  std::vector<std::vector<std::string>> inventories;
  for (size_t t = 0; t < spec.n_topics; ++t) {
    inventories.push_back(topic_inventory(t, spec.seed));
  }

  Rng rng(mix_seed(spec.seed, 0xC0E905ULL));
  // Noise gets its own stream so that changing noise_scale perturbs the
  // features of a given seed's corpus without re-rolling its sentences.
  Rng noise_rng(mix_seed(spec.seed, 0x905EULL));
  Corpus corpus;
  corpus.feature_dim = spec.feature_dim;
  for (size_t n = 0; n < spec.n_utterances; ++n) {
    size_t topic = n % spec.n_topics;
    std::string sentence = sample_sentence(inventories[topic], rng);
    if (spec.paraphrase_prob > 0.0 && rng.uniform01() < spec.paraphrase_prob) {
      sentence = sample_sentence(inventories[topic], rng);
    }

    std::vector<uint32_t> cps = utf8_decode(sentence);
    size_t frames = cps.size() * spec.frames_per_token;
    Tensor features({frames, spec.feature_dim});
    size_t row = 0;
    for (uint32_t cp : cps) {
      std::vector<double> proto =
          toy_prototype_frame(cp, spec.feature_dim, spec.seed);
      for (size_t r = 0; r < spec.frames_per_token; ++r, ++row) {
        for (size_t fdim = 0; fdim < spec.feature_dim; ++fdim) {
          double noise = spec.noise_scale > 0.0
                             ? spec.noise_scale * noise_rng.normal()
                             : 0.0;
          features.at2(row, fdim) = proto[fdim] + noise;
        }
      }
    }

    Utterance u;
    u.id = "toy-" + std::to_string(n);
    u.features = std::move(features);
    u.translation = sentence;
    u.topic = "topic-" + std::to_string(topic);
    validate_utterance(u);
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

CorpusSplit split_corpus(const Corpus& corpus, size_t val_every_k) {
  CorpusSplit split;
  split.train.feature_dim = corpus.feature_dim;
  split.val.feature_dim = corpus.feature_dim;
  for (size_t i = 0; i < corpus.size(); ++i) {
    bool to_val = val_every_k > 0 && (i + 1) % val_every_k == 0;
    (to_val ? split.val : split.train).utterances.push_back(
        corpus.utterances[i]);
  }
  return split;
}

}  // namespace lau
