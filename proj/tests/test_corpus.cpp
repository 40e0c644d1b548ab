// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "lau/corpus.hpp"
#include "lau/error.hpp"
#include "lau/rng.hpp"
#include "lau/utf8.hpp"

namespace fs = std::filesystem;
using namespace lau;

namespace {

// Fresh scratch directory per test case; removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("lau-corpus-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

Tensor make_features(size_t t, size_t f, double scale) {
  Tensor x({t, f});
  for (size_t i = 0; i < x.numel(); ++i) {
    x[i] = scale * (static_cast<double>(i) - 2.5);
  }
  return x;
}

Corpus two_utterance_corpus() {
  Corpus c;
  c.feature_dim = 3;
  Utterance a;
  a.id = "utt-a";
  a.features = make_features(4, 3, 0.25);
  a.transcription = "ab";
  a.translation = "ba";
  a.topic = "sports";
  Utterance b;
  b.id = "utt-b";
  b.features = make_features(2, 3, -0.5);
  b.translation = "c\xc3\xa9";  // non-ASCII survives the round trip
  c.utterances.push_back(std::move(a));
  c.utterances.push_back(std::move(b));
  return c;
}

}  // namespace

TEST_CASE("feature files round trip exactly at f32 precision") {
  TempDir dir("featrt");
  Tensor x({3, 2});
  double vals[] = {0.0, 1.0, -1.5, 0.1, 1e-7, -3.25e4};
  for (size_t i = 0; i < 6; ++i) x[i] = vals[i];
  save_features(x, dir.file("a.lauf"));
  Tensor y = load_features(dir.file("a.lauf"));
  REQUIRE(y.rank() == 2);
  REQUIRE(y.dim(0) == 3);
  REQUIRE(y.dim(1) == 2);
  for (size_t i = 0; i < 6; ++i) {
    CHECK(y[i] == static_cast<double>(static_cast<float>(vals[i])));
  }
  // Values representable in f32 survive unchanged.
  CHECK(y[0] == 0.0);
  CHECK(y[2] == -1.5);
  CHECK(y[5] == -3.25e4);
}

TEST_CASE("feature file loader rejects damaged files") {
  TempDir dir("featbad");
  CHECK_THROWS_AS(load_features(dir.file("missing.lauf")), Error);

  {
    std::ofstream os(dir.file("magic.lauf"), std::ios::binary);
    os << "NOPE" << std::string(8, '\0');
  }
  CHECK_THROWS_AS(load_features(dir.file("magic.lauf")), Error);

  {
    // Valid header claiming 2x2, but only one float of payload.
    std::ofstream os(dir.file("short.lauf"), std::ios::binary);
    os << "LAUF";
    uint32_t dims[2] = {2, 2};
    os.write(reinterpret_cast<const char*>(dims), 8);
    float one = 1.0f;
    os.write(reinterpret_cast<const char*>(&one), 4);
  }
  CHECK_THROWS_AS(load_features(dir.file("short.lauf")), Error);

  {
    // Zero rows is a degenerate shape.
    std::ofstream os(dir.file("zero.lauf"), std::ios::binary);
    os << "LAUF";
    uint32_t dims[2] = {0, 2};
    os.write(reinterpret_cast<const char*>(dims), 8);
  }
  CHECK_THROWS_AS(load_features(dir.file("zero.lauf")), Error);
}

TEST_CASE("save_features rejects non-matrix input") {
  TempDir dir("featrank");
  Tensor cube({2, 2, 2});
  CHECK_THROWS_AS(save_features(cube, dir.file("cube.lauf")), Error);
}

TEST_CASE("manifest round trip preserves every field") {
  TempDir dir("manrt");
  Corpus c = two_utterance_corpus();
  save_manifest(c, dir.file("manifest.jsonl"), "feats");
  CHECK(fs::exists(dir.path / "feats" / "utt-a.lauf"));
  CHECK(fs::exists(dir.path / "feats" / "utt-b.lauf"));

  Corpus r = load_manifest(dir.file("manifest.jsonl"));
  REQUIRE(r.size() == 2);
  CHECK(r.feature_dim == 3);
  CHECK(r.utterances[0].id == "utt-a");
  CHECK(r.utterances[0].transcription.has_value());
  CHECK(*r.utterances[0].transcription == "ab");
  CHECK(r.utterances[0].translation == "ba");
  CHECK(r.utterances[0].topic.has_value());
  CHECK(*r.utterances[0].topic == "sports");
  CHECK(r.utterances[1].id == "utt-b");
  CHECK_FALSE(r.utterances[1].transcription.has_value());
  CHECK_FALSE(r.utterances[1].topic.has_value());
  CHECK(r.utterances[1].translation == "c\xc3\xa9");
  for (size_t u = 0; u < 2; ++u) {
    const Tensor& orig = c.utterances[u].features;
    const Tensor& back = r.utterances[u].features;
    REQUIRE(back.same_shape(orig));
    for (size_t i = 0; i < orig.numel(); ++i) {
      CHECK(back[i] == static_cast<double>(static_cast<float>(orig[i])));
    }
  }
}

TEST_CASE("manifest loader skips blank lines") {
  TempDir dir("manblank");
  Corpus c = two_utterance_corpus();
  save_manifest(c, dir.file("manifest.jsonl"), "feats");
  std::string text;
  {
    std::ifstream is(dir.file("manifest.jsonl"));
    std::string line;
    while (std::getline(is, line)) text += line + "\n\n";
  }
  {
    std::ofstream os(dir.file("spaced.jsonl"));
    os << "\n" << text;
  }
  Corpus r = load_manifest(dir.file("spaced.jsonl"));
  CHECK(r.size() == 2);
}

TEST_CASE("manifest loader rejects duplicate ids") {
  TempDir dir("mandup");
  Corpus c = two_utterance_corpus();
  c.utterances[1].id = "utt-a";
  save_manifest(c, dir.file("manifest.jsonl"), "feats");
  try {
    load_manifest(dir.file("manifest.jsonl"));
    FAIL("expected duplicate-id error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("utt-a") != std::string::npos);
  }
}

TEST_CASE("manifest loader names both sides of a feature-dim mismatch") {
  TempDir dir("mandim");
  Corpus c = two_utterance_corpus();
  c.utterances[1].features = make_features(2, 5, 1.0);
  save_manifest(c, dir.file("manifest.jsonl"), "feats");
  try {
    load_manifest(dir.file("manifest.jsonl"));
    FAIL("expected dimension-mismatch error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("utt-a") != std::string::npos);
    CHECK(msg.find("utt-b") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
    CHECK(msg.find("5") != std::string::npos);
  }
}

TEST_CASE("manifest loader rejects malformed records") {
  TempDir dir("manbadrec");
  {
    std::ofstream os(dir.file("broken.jsonl"));
    os << "{not json\n";
  }
  CHECK_THROWS_AS(load_manifest(dir.file("broken.jsonl")), Error);

  {
    std::ofstream os(dir.file("missing_field.jsonl"));
    os << R"({"id":"x","features":"x.lauf"})" << "\n";
  }
  CHECK_THROWS_AS(load_manifest(dir.file("missing_field.jsonl")), Error);

  {
    std::ofstream os(dir.file("no_feature_file.jsonl"));
    os << R"({"id":"x","features":"gone.lauf","translation":"hi"})" << "\n";
  }
  CHECK_THROWS_AS(load_manifest(dir.file("no_feature_file.jsonl")), Error);

  {
    std::ofstream os(dir.file("empty.jsonl"));
  }
  CHECK_THROWS_AS(load_manifest(dir.file("empty.jsonl")), Error);

  CHECK_THROWS_AS(load_manifest(dir.file("nonexistent.jsonl")), Error);
}

TEST_CASE("manifest loader rejects empty translations") {
  TempDir dir("manempty");
  Corpus c = two_utterance_corpus();
  save_manifest(c, dir.file("manifest.jsonl"), "feats");
  // Rewrite the second record with a whitespace-only translation.
  std::vector<std::string> lines;
  {
    std::ifstream is(dir.file("manifest.jsonl"));
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
  }
  REQUIRE(lines.size() == 2);
  {
    std::ofstream os(dir.file("manifest.jsonl"), std::ios::trunc);
    os << lines[0] << "\n";
    os << R"({"id":"utt-b","features":"feats/utt-b.lauf","translation":"  ",)"
       << R"("transcription":null,"topic":null})" << "\n";
  }
  CHECK_THROWS_AS(load_manifest(dir.file("manifest.jsonl")), Error);
}

TEST_CASE("non-finite feature values are rejected at ingestion") {
  TempDir dir("mannan");
  Corpus c = two_utterance_corpus();
  save_manifest(c, dir.file("manifest.jsonl"), "feats");
  {
    // Overwrite one payload float with a NaN bit pattern.
    std::fstream fsbin(dir.file("feats/utt-a.lauf"),
                       std::ios::binary | std::ios::in | std::ios::out);
    fsbin.seekp(12);
    uint32_t nan_bits = 0x7FC00000u;
    fsbin.write(reinterpret_cast<const char*>(&nan_bits), 4);
  }
  try {
    load_manifest(dir.file("manifest.jsonl"));
    FAIL("expected non-finite feature error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("utt-a") != std::string::npos);
  }
}

TEST_CASE("vocabulary is blank-first and sorted by code point") {
  Corpus c;
  c.feature_dim = 1;
  Utterance u;
  u.id = "u0";
  u.features = make_features(1, 1, 1.0);
  u.translation = "ba c\xc3\xa9 ab";  // chars: space, a, b, c, é
  c.utterances.push_back(std::move(u));
  Vocabulary v = build_vocab(c);
  REQUIRE(v.tokens.size() == 6);
  CHECK(v.blank_index == 0);
  CHECK(v.tokens[0] == std::string(kBlankToken));
  CHECK(v.tokens[1] == " ");
  CHECK(v.tokens[2] == "a");
  CHECK(v.tokens[3] == "b");
  CHECK(v.tokens[4] == "c");
  CHECK(v.tokens[5] == "\xc3\xa9");
}

TEST_CASE("vocabulary pools characters across utterances") {
  Corpus c = two_utterance_corpus();
  Vocabulary v = build_vocab(c);
  // Translations "ba" and "cé" give {a, b, c, é} plus blank.
  CHECK(v.tokens.size() == 5);
  CHECK_THROWS_AS(build_vocab(Corpus{}), Error);
}

TEST_CASE("encode and decode invert each other") {
  Corpus c = two_utterance_corpus();
  Vocabulary v = build_vocab(c);
  for (const auto& u : c.utterances) {
    std::vector<int> ids = encode_text(v, u.translation);
    CHECK(decode_indices(v, ids) == u.translation);
    for (int id : ids) CHECK(id != static_cast<int>(v.blank_index));
  }
}

TEST_CASE("encoding an out-of-vocabulary character names it") {
  Corpus c = two_utterance_corpus();
  Vocabulary v = build_vocab(c);
  try {
    encode_text(v, "ab!");
    FAIL("expected out-of-vocabulary error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("!") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);  // zero-based position
  }
  // The blank token itself is not encodable text.
  CHECK_THROWS_AS(encode_text(v, "a<blank>b"), Error);
}

TEST_CASE("decode ignores blanks and rejects bad indices") {
  Corpus c = two_utterance_corpus();
  Vocabulary v = build_vocab(c);
  std::vector<int> ids = encode_text(v, "ab");
  std::vector<int> with_blanks = {0, ids[0], 0, ids[1], 0};
  CHECK(decode_indices(v, with_blanks) == "ab");
  CHECK_THROWS_AS(decode_indices(v, {static_cast<int>(v.size())}), Error);
  CHECK_THROWS_AS(decode_indices(v, {-1}), Error);
}

TEST_CASE("toy corpus is deterministic and round-robins topics") {
  ToyCorpusSpec spec;
  spec.n_utterances = 9;
  spec.n_topics = 3;
  spec.feature_dim = 4;
  spec.seed = 42;
  spec.frames_per_token = 2;
  Corpus a = generate_toy_corpus(spec);
  Corpus b = generate_toy_corpus(spec);
  REQUIRE(a.size() == 9);
  CHECK(a.feature_dim == 4);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.utterances[i].id == "toy-" + std::to_string(i));
    REQUIRE(a.utterances[i].topic.has_value());
    CHECK(*a.utterances[i].topic == "topic-" + std::to_string(i % 3));
    CHECK(a.utterances[i].translation == b.utterances[i].translation);
    REQUIRE(a.utterances[i].features.same_shape(b.utterances[i].features));
    for (size_t j = 0; j < a.utterances[i].features.numel(); ++j) {
      CHECK(a.utterances[i].features[j] == b.utterances[i].features[j]);
    }
    // Speech side only: no transcriptions in the toy data.
    CHECK_FALSE(a.utterances[i].transcription.has_value());
  }
  // A different seed draws different sentences somewhere.
  spec.seed = 43;
  Corpus d = generate_toy_corpus(spec);
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (d.utterances[i].translation != a.utterances[i].translation) {
      any_diff = true;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("toy topics use disjoint letter inventories") {
  ToyCorpusSpec spec;
  spec.n_utterances = 30;
  spec.n_topics = 3;
  spec.seed = 7;
  Corpus c = generate_toy_corpus(spec);
  // Topic t draws words over three private letters starting at 'a' + 3t.
  for (const auto& u : c.utterances) {
    size_t t = static_cast<size_t>(u.topic->back() - '0');
    std::set<char> allowed = {static_cast<char>('a' + 3 * t),
                              static_cast<char>('a' + 3 * t + 1),
                              static_cast<char>('a' + 3 * t + 2), ' '};
    for (char ch : u.translation) {
      CHECK(allowed.count(ch) == 1);
    }
  }
}

TEST_CASE("toy sentences have bounded word shapes without repeats") {
  ToyCorpusSpec spec;
  spec.n_utterances = 40;
  spec.n_topics = 2;
  spec.seed = 3;
  Corpus c = generate_toy_corpus(spec);
  for (const auto& u : c.utterances) {
    std::vector<std::string> words;
    std::string w;
    for (char ch : u.translation + " ") {
      if (ch == ' ') {
        if (!w.empty()) words.push_back(w);
        w.clear();
      } else {
        w += ch;
      }
    }
    CHECK(words.size() >= 2);
    CHECK(words.size() <= 4);
    for (const auto& word : words) {
      CHECK(word.size() >= 3);
      CHECK(word.size() <= 5);
      for (size_t i = 1; i < word.size(); ++i) {
        CHECK(word[i] != word[i - 1]);  // keeps short CTC targets feasible
      }
    }
  }
}

TEST_CASE("noise-free toy features are exact prototype frames") {
  ToyCorpusSpec spec;
  spec.n_utterances = 4;
  spec.n_topics = 2;
  spec.feature_dim = 5;
  spec.seed = 11;
  spec.frames_per_token = 3;
  spec.noise_scale = 0.0;
  Corpus c = generate_toy_corpus(spec);
  for (const auto& u : c.utterances) {
    std::vector<uint32_t> cps = utf8_decode(u.translation);
    REQUIRE(u.frames() == cps.size() * 3);  // spaces get frames too
    size_t row = 0;
    for (uint32_t cp : cps) {
      std::vector<double> proto = toy_prototype_frame(cp, 5, spec.seed);
      for (size_t r = 0; r < 3; ++r, ++row) {
        for (size_t f = 0; f < 5; ++f) {
          CHECK(u.features.at2(row, f) == proto[f]);
        }
      }
    }
  }
}

TEST_CASE("toy noise perturbs every frame but stays near prototypes") {
  ToyCorpusSpec spec;
  spec.n_utterances = 2;
  spec.n_topics = 2;
  spec.feature_dim = 4;
  spec.seed = 5;
  spec.noise_scale = 0.05;
  Corpus noisy = generate_toy_corpus(spec);
  spec.noise_scale = 0.0;
  Corpus clean = generate_toy_corpus(spec);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(noisy.utterances[i].translation == clean.utterances[i].translation);
    const Tensor& n = noisy.utterances[i].features;
    const Tensor& c = clean.utterances[i].features;
    REQUIRE(n.same_shape(c));
    double max_dev = 0.0;
    for (size_t j = 0; j < n.numel(); ++j) {
      max_dev = std::max(max_dev, std::abs(n[j] - c[j]));
      CHECK(n[j] != c[j]);
    }
    CHECK(max_dev < 0.5);  // 0.05 sigma leaves prototypes recognizable
  }
}

TEST_CASE("toy corpus validates its parameters") {
  ToyCorpusSpec spec;
  spec.n_utterances = 2;
  spec.n_topics = 1;
  CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
  spec.n_topics = 9;  // 9 topics would need 27 private letters
  CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
  spec.n_topics = 2;
  spec.frames_per_token = 0;
  CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
  spec.frames_per_token = 1;
  spec.feature_dim = 0;
  CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
  spec.feature_dim = 2;
  spec.noise_scale = -0.1;
  CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
  spec.noise_scale = 0.0;
  spec.paraphrase_prob = 1.5;
  CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
}

TEST_CASE("paraphrase sampling stays inside the topic inventory") {
  ToyCorpusSpec base;
  base.n_utterances = 20;
  base.n_topics = 2;
  base.seed = 9;
  ToyCorpusSpec para = base;
  para.paraphrase_prob = 1.0;
  Corpus a = generate_toy_corpus(base);
  Corpus b = generate_toy_corpus(para);
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a.utterances[i].translation != b.utterances[i].translation) {
      any_diff = true;
    }
    size_t t = static_cast<size_t>(b.utterances[i].topic->back() - '0');
    for (char ch : b.utterances[i].translation) {
      if (ch == ' ') continue;
      CHECK(static_cast<size_t>(ch - 'a') / 3 == t);
    }
  }
  CHECK(any_diff);
}

TEST_CASE("split keeps every k-th utterance for validation") {
  ToyCorpusSpec spec;
  spec.n_utterances = 10;
  spec.n_topics = 2;
  spec.seed = 1;
  Corpus c = generate_toy_corpus(spec);
  CorpusSplit s = split_corpus(c, 5);
  REQUIRE(s.val.size() == 2);
  REQUIRE(s.train.size() == 8);
  CHECK(s.val.utterances[0].id == "toy-4");
  CHECK(s.val.utterances[1].id == "toy-9");
  CHECK(s.train.utterances[0].id == "toy-0");
  CHECK(s.train.feature_dim == c.feature_dim);
  CHECK(s.val.feature_dim == c.feature_dim);

  CorpusSplit all_train = split_corpus(c, 0);
  CHECK(all_train.train.size() == 10);
  CHECK(all_train.val.empty());

  CorpusSplit all_val = split_corpus(c, 1);
  CHECK(all_val.train.empty());
  CHECK(all_val.val.size() == 10);
}

TEST_CASE("random streams are deterministic under a fixed seed") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) {
    double ua = a.uniform01();
    CHECK(ua == b.uniform01());
    CHECK(ua >= 0.0);
    CHECK(ua < 1.0);
  }
  CHECK(a.normal() == b.normal());
  CHECK(a.next_below(17) == b.next_below(17));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  std::vector<size_t> v1 = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<size_t> v2 = v1;
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
}
