// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lau/corpus.hpp"
#include "lau/model.hpp"
#include "lau/trainer.hpp"

namespace lau {

// A config mistake the user can fix from the usage text. Mapped to exit
// code 2, as opposed to runtime failures (exit code 1).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error(msg) {}
};

struct ProviderSpec {
  std::string kind = "hash";  // "hash" or "cache"
  std::string path;           // cache file, when kind == "cache"
  std::string fallback = "error";
  uint64_t seed = 0;
};

// One experiment, fully described by a JSON file. feature_dim and
// vocab_size are always derived from the corpus, never configured.
struct ExperimentConfig {
  std::optional<std::string> manifest;  // load this corpus...
  std::optional<ToyCorpusSpec> toy;     // ...or generate this one
  ModelConfig model;
  TrainConfig train;
  ProviderSpec provider;
  size_t val_every_k = 5;  // every k-th utterance held out; 0 disables
  std::string output_dir;
};

ExperimentConfig load_experiment_config(const std::string& path);

// 6-significant-digit drift formatting (zero renders as 0.000000).
std::string format_drift(double drift);

// Entry point behind main(): parses argv, dispatches the subcommand,
// and maps errors to exit codes (0 success, 1 runtime failure, 2 usage).
int run_cli(int argc, const char* const* argv);

}  // namespace lau
