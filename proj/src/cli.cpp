// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lau/embedder.hpp"
#include "lau/evalmetrics.hpp"
#include "lau/losses.hpp"
#include "lau/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lau {

namespace {

std::string format_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw UsageError("config: unknown key \"" + key + "\" in " + where);
    }
  }
}

ToyCorpusSpec parse_toy(const json& j) {
  check_keys(j, "corpus.toy",
             {"n_utterances", "n_topics", "feature_dim", "seed",
              "frames_per_token", "noise_scale", "paraphrase_prob"});
  ToyCorpusSpec spec;
  spec.n_utterances = j.at("n_utterances").get<size_t>();
  if (j.contains("n_topics")) spec.n_topics = j.at("n_topics").get<size_t>();
  if (j.contains("feature_dim")) {
    spec.feature_dim = j.at("feature_dim").get<size_t>();
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
  if (j.contains("frames_per_token")) {
    spec.frames_per_token = j.at("frames_per_token").get<size_t>();
  }
  if (j.contains("noise_scale")) {
    spec.noise_scale = j.at("noise_scale").get<double>();
  }
  if (j.contains("paraphrase_prob")) {
    spec.paraphrase_prob = j.at("paraphrase_prob").get<double>();
  }
  return spec;
}

ModelConfig parse_model(const json& j) {
  check_keys(j, "model",
             {"encoder_layers", "encoder_hidden", "subsample", "embed_dim",
              "seed"});
  ModelConfig cfg;
  if (j.contains("encoder_layers")) {
    cfg.encoder_layers = j.at("encoder_layers").get<size_t>();
  }
  if (j.contains("encoder_hidden")) {
    cfg.encoder_hidden = j.at("encoder_hidden").get<size_t>();
  }
  if (j.contains("subsample")) cfg.subsample = j.at("subsample").get<size_t>();
  if (j.contains("embed_dim")) cfg.embed_dim = j.at("embed_dim").get<size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  return cfg;
}

TrainConfig parse_train(const json& j) {
  check_keys(j, "train",
             {"steps", "batch_size", "warmup_steps", "lr_scale", "lambda",
              "alpha", "semantic_kind", "seed", "eval_every", "d_model",
              "snapshot_each_eval"});
  TrainConfig cfg;
  if (j.contains("steps")) cfg.steps = j.at("steps").get<size_t>();
  if (j.contains("batch_size")) {
    cfg.batch_size = j.at("batch_size").get<size_t>();
  }
  if (j.contains("warmup_steps")) {
    cfg.warmup_steps = j.at("warmup_steps").get<size_t>();
  }
  if (j.contains("lr_scale")) cfg.lr_scale = j.at("lr_scale").get<double>();
  if (j.contains("lambda")) cfg.weights.lambda = j.at("lambda").get<double>();
  if (j.contains("alpha")) cfg.weights.alpha = j.at("alpha").get<double>();
  if (j.contains("semantic_kind")) {
    cfg.semantic_kind =
        semantic_kind_from_name(j.at("semantic_kind").get<std::string>());
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("eval_every")) {
    cfg.eval_every = j.at("eval_every").get<size_t>();
  }
  if (j.contains("d_model")) cfg.d_model = j.at("d_model").get<size_t>();
  if (j.contains("snapshot_each_eval")) {
    cfg.snapshot_each_eval = j.at("snapshot_each_eval").get<bool>();
  }
  cfg.validate();  // reject bad values at load time, as a usage error
  return cfg;
}

ProviderSpec parse_provider(const json& j) {
  check_keys(j, "provider", {"kind", "path", "fallback", "seed"});
  ProviderSpec spec;
  if (j.contains("kind")) spec.kind = j.at("kind").get<std::string>();
  if (j.contains("path")) spec.path = j.at("path").get<std::string>();
  if (j.contains("fallback")) {
    spec.fallback = j.at("fallback").get<std::string>();
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
  if (spec.kind != "hash" && spec.kind != "cache") {
    throw UsageError("config: provider.kind must be \"hash\" or \"cache\"");
  }
  if (spec.kind == "cache" && spec.path.empty()) {
    throw UsageError("config: provider.kind \"cache\" needs provider.path");
  }
  return spec;
}

std::unique_ptr<EmbeddingProvider> provider_from(const ProviderSpec& spec,
                                                 size_t embed_dim) {
  if (spec.kind == "hash") {
    return std::make_unique<HashEmbedder>(embed_dim, spec.seed);
  }
  return make_provider(spec.path, embed_dim, spec.seed, spec.fallback);
}

Corpus corpus_from(const ExperimentConfig& cfg) {
  if (cfg.manifest.has_value()) return load_manifest(*cfg.manifest);
  return generate_toy_corpus(*cfg.toy);
}

// Refuses to reuse a non-empty directory unless forced; creates it (and
// parents) otherwise.
void ensure_output_dir(const std::string& dir, bool force) {
  if (dir.empty()) throw UsageError("config: output_dir is required");
  fs::path p(dir);
  if (fs::exists(p)) {
    if (!fs::is_directory(p)) {
      throw Error(dir + " exists and is not a directory");
    }
    if (fs::directory_iterator(p) != fs::directory_iterator() && !force) {
      throw Error("output directory " + dir +
                  " is not empty; pass --force to overwrite");
    }
  } else {
    fs::create_directories(p);
  }
}

struct RunOutput {
  double drift = 0.0;
  double final_seq_loss = 0.0;
  double final_semantic_loss = 0.0;
  size_t steps = 0;
};

// The whole train pipeline for one configuration: corpus, split, vocab,
// init, checkpoints, logs, drift record, loss curves.
RunOutput run_one_training(const ExperimentConfig& cfg,
                           const std::string& out_dir) {
  Corpus corpus = corpus_from(cfg);
  // The vocabulary covers the full corpus so held-out utterances are
  // always encodable.
  Vocabulary vocab = build_vocab(corpus);
  CorpusSplit split = split_corpus(corpus, cfg.val_every_k);
  if (split.train.empty()) {
    throw UsageError("validation holdout left no training data; lower "
                     "val_every_k");
  }

  ModelConfig mc = cfg.model;
  mc.feature_dim = corpus.feature_dim;
  mc.vocab_size = vocab.size();
  mc.validate();
  ModelParams params = init_model(mc);
  std::unique_ptr<EmbeddingProvider> provider =
      provider_from(cfg.provider, mc.embed_dim);

  json extra;
  extra["vocab"] = vocab.tokens;
  extra["semantic_kind"] = semantic_kind_name(cfg.train.semantic_kind);
  extra["lambda"] = cfg.train.weights.lambda;
  extra["step"] = 0;
  save_checkpoint(params, out_dir + "/ckpt_step0.lauc", extra);

  TrainingLog log;
  TrainResult result;
  try {
    result = train(cfg.train, split.train, vocab, std::move(params), *provider,
                   log, &split.val);
  } catch (const Error&) {
    // Keep whatever was logged up to the failure (including the abort
    // marker) before propagating.
    write_train_csv(log, out_dir + "/train_log.csv");
    write_eval_csv(log, out_dir + "/val_log.csv");
    throw;
  }

  write_train_csv(log, out_dir + "/train_log.csv");
  write_eval_csv(log, out_dir + "/val_log.csv");
  extra["step"] = cfg.train.steps;
  save_checkpoint(result.params,
                  out_dir + "/ckpt_step" + std::to_string(cfg.train.steps) +
                      ".lauc",
                  extra);

  json drift_record;
  drift_record["semantic_kind"] = semantic_kind_name(cfg.train.semantic_kind);
  drift_record["lambda"] = cfg.train.weights.lambda;
  drift_record["drift"] = result.drift;
  std::ofstream drift_out(out_dir + "/drift.json", std::ios::binary);
  if (!drift_out) throw Error("cannot write drift record");
  drift_out << drift_record.dump(2) << "\n";

  std::vector<Series> curves(3);
  curves[0].name = "total";
  curves[1].name = "sequence";
  curves[2].name = "semantic";
  for (const StepRecord& r : log.steps) {
    double step = static_cast<double>(r.step);
    curves[0].points.emplace_back(step, r.total);
    curves[1].points.emplace_back(step, r.seq_loss);
    curves[2].points.emplace_back(step, r.semantic_loss);
  }
  write_line_chart_svg(out_dir + "/loss_curves.svg", "Training losses",
                       "step", "loss", curves);

  RunOutput out;
  out.drift = result.drift;
  out.steps = cfg.train.steps;
  if (!log.evals.empty()) {
    out.final_seq_loss = log.evals.back().seq_loss;
    out.final_semantic_loss = log.evals.back().semantic_loss;
  }
  return out;
}

int cmd_generate_corpus(const std::string& config_path, bool force) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (!cfg.toy.has_value()) {
    throw UsageError("generate-corpus needs a corpus.toy section in the "
                     "config");
  }
  ensure_output_dir(cfg.output_dir, force);
  Corpus corpus = generate_toy_corpus(*cfg.toy);
  std::string manifest = cfg.output_dir + "/manifest.jsonl";
  save_manifest(corpus, manifest, "features");
  std::cout << "wrote " << corpus.size() << " utterances (" << cfg.toy->n_topics
            << " topics, feature dim " << corpus.feature_dim << ") to "
            << manifest << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, bool force) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  ensure_output_dir(cfg.output_dir, force);
  RunOutput out = run_one_training(cfg, cfg.output_dir);
  std::cout << "trained " << out.steps << " steps; encoder drift "
            << format_drift(out.drift) << "; outputs in " << cfg.output_dir
            << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, std::vector<double> lambdas,
              std::vector<std::string> kinds, bool force) {
  if (lambdas.empty()) throw UsageError("sweep needs at least one lambda");
  if (kinds.empty()) throw UsageError("sweep needs at least one semantic kind");
  ExperimentConfig cfg = load_experiment_config(config_path);
  ensure_output_dir(cfg.output_dir, force);

  struct Row {
    std::string kind;
    double lambda;
    double drift;
    double final_seq;
    double final_semantic;
    bool ok;
  };
  std::vector<Row> rows;
  for (const std::string& kind : kinds) {
    SemanticKind parsed = semantic_kind_from_name(kind);
    for (double lambda : lambdas) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.train.semantic_kind = parsed;
      run_cfg.train.weights.lambda = lambda;
      std::string sub =
          cfg.output_dir + "/" + kind + "_lambda" + format_g(lambda);
      Row row{kind, lambda, 0.0, 0.0, 0.0, false};
      try {
        ensure_output_dir(sub, force);
        RunOutput out = run_one_training(run_cfg, sub);
        row.drift = out.drift;
        row.final_seq = out.final_seq_loss;
        row.final_semantic = out.final_semantic_loss;
        row.ok = true;
      } catch (const std::exception& e) {
        std::cerr << "sweep run " << kind << " lambda=" << format_g(lambda)
                  << " failed: " << e.what() << "\n";
      }
      rows.push_back(row);
    }
  }

  std::string csv_path = cfg.output_dir + "/sweep.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw Error("cannot write sweep summary: " + csv_path);
  csv << "kind,lambda,drift,final_seq_loss,final_semantic_loss,status\n";
  for (const Row& r : rows) {
    if (r.ok) {
      csv << r.kind << ',' << format_g(r.lambda) << ',' << format_full(r.drift)
          << ',' << format_full(r.final_seq) << ','
          << format_full(r.final_semantic) << ",ok\n";
    } else {
      csv << r.kind << ',' << format_g(r.lambda) << ",nan,nan,nan,failed\n";
    }
  }
  csv.close();

  std::vector<BarDatum> bars;
  for (const Row& r : rows) {
    if (!r.ok) continue;
    bars.push_back({r.kind + " \xce\xbb=" + format_g(r.lambda), r.drift});
  }
  if (!bars.empty()) {
    write_bar_chart_svg(cfg.output_dir + "/drift_bars.svg",
                        "Total parameter drift per configuration",
                        "encoder drift (L2)", bars);
  }

  size_t ok_count = 0;
  for (const Row& r : rows) ok_count += r.ok ? 1 : 0;
  std::cout << "sweep finished: " << ok_count << "/" << rows.size()
            << " runs succeeded; summary in " << csv_path << "\n";
  return ok_count > 0 ? 0 : 1;
}

Vocabulary vocab_from_header(const json& header) {
  if (!header.contains("vocab")) {
    throw Error("checkpoint lacks a vocabulary header; it was not written "
                "by the train command");
  }
  Vocabulary vocab;
  vocab.tokens = header.at("vocab").get<std::vector<std::string>>();
  if (vocab.tokens.empty() || vocab.tokens[0] != kBlankToken) {
    throw Error("checkpoint vocabulary is malformed (blank token must come "
                "first)");
  }
  vocab.blank_index = 0;
  return vocab;
}

int cmd_evaluate(const std::string& checkpoint_path,
                 const std::string& testset_path,
                 const ProviderSpec& provider_spec,
                 const std::string& questions_path, const std::string& out_path,
                 uint64_t cluster_seed) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Vocabulary vocab = vocab_from_header(ckpt.header);
  Corpus testset = load_manifest(testset_path);
  if (testset.feature_dim != ckpt.params.config.feature_dim) {
    throw Error("test set feature dimension " +
                std::to_string(testset.feature_dim) +
                " does not match the checkpoint's " +
                std::to_string(ckpt.params.config.feature_dim));
  }
  for (const Utterance& utt : testset.utterances) {
    try {
      encode_text(vocab, utt.translation);
    } catch (const Error& e) {
      throw Error("vocabulary mismatch between checkpoint and test set: " +
                  std::string(e.what()));
    }
  }

  std::unique_ptr<EmbeddingProvider> provider =
      provider_from(provider_spec, ckpt.params.config.embed_dim);
  EvalReport report =
      evaluate_run(ckpt.params, vocab, testset, *provider, cluster_seed);
  if (!questions_path.empty()) {
    MockJudge judge;
    report.qa_accuracy =
        qa_accuracy(judge, load_questions(questions_path), report);
  }
  write_eval_report(report, out_path);
  std::cout << format_metrics_table("e2e-st", report);
  if (report.clustering_omitted) {
    std::cout << "note: " << report.clustering_note << "\n";
  } else if (!report.clustering_note.empty()) {
    std::cout << "note: " << report.clustering_note << "\n";
  }
  std::cout << "report written to " << out_path << "\n";
  return 0;
}

int cmd_drift(const std::string& path_a, const std::string& path_b,
              const std::string& out_path) {
  Checkpoint a = load_checkpoint(path_a);
  Checkpoint b = load_checkpoint(path_b);
  EncoderSnapshot sa = snapshot_encoder(a.params, 0);
  EncoderSnapshot sb = snapshot_encoder(b.params, 0);
  double drift = parameter_drift(sa, sb);

  json record;
  record["checkpoint_a"] = path_a;
  record["checkpoint_b"] = path_b;
  record["drift"] = drift;
  std::cout << "drift: " << format_drift(drift) << "\n";
  std::cout << record.dump() << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot write drift record: " + out_path);
    out << record.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

std::string format_drift(double drift) {
  if (drift == 0.0) return "0.000000";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%#.6g", drift);
  return buf;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  check_keys(j, "the config root",
             {"corpus", "model", "train", "provider", "val_every_k",
              "output_dir"});

  ExperimentConfig cfg;
  try {
    if (!j.contains("corpus") || !j.at("corpus").is_object()) {
      throw UsageError("config: a corpus section is required");
    }
    const json& corpus = j.at("corpus");
    check_keys(corpus, "corpus", {"manifest", "toy"});
    if (corpus.contains("manifest") == corpus.contains("toy")) {
      throw UsageError("config: corpus needs exactly one of manifest or toy");
    }
    if (corpus.contains("manifest")) {
      cfg.manifest = corpus.at("manifest").get<std::string>();
    } else {
      cfg.toy = parse_toy(corpus.at("toy"));
    }
    if (j.contains("model")) cfg.model = parse_model(j.at("model"));
    if (j.contains("train")) cfg.train = parse_train(j.at("train"));
    if (j.contains("provider")) {
      cfg.provider = parse_provider(j.at("provider"));
    }
    if (j.contains("val_every_k")) {
      cfg.val_every_k = j.at("val_every_k").get<size_t>();
    }
    if (j.contains("output_dir")) {
      cfg.output_dir = j.at("output_dir").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  return cfg;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"speech-to-translation trainer with a semantically "
               "regularized encoder"};
  app.require_subcommand(1);

  std::string gen_config;
  bool gen_force = false;
  CLI::App* gen = app.add_subcommand(
      "generate-corpus", "materialize the synthetic corpus from the config");
  gen->add_option("--config", gen_config, "experiment config JSON")
      ->required();
  gen->add_flag("--force", gen_force, "overwrite a non-empty output directory");

  std::string train_config;
  bool train_force = false;
  CLI::App* tr = app.add_subcommand(
      "train", "run one training configuration end to end");
  tr->add_option("--config", train_config, "experiment config JSON")
      ->required();
  tr->add_flag("--force", train_force, "overwrite a non-empty output directory");

  std::string sweep_config;
  std::vector<double> sweep_lambdas{0.2, 1.0, 5.0};
  std::vector<std::string> sweep_kinds{"cosine", "mse"};
  bool sweep_force = false;
  CLI::App* sw = app.add_subcommand(
      "sweep", "train a grid of semantic kinds x lambda values");
  sw->add_option("--config", sweep_config, "experiment config JSON")
      ->required();
  sw->add_option("--lambdas", sweep_lambdas,
                 "semantic loss weights to sweep (comma separated)")
      ->delimiter(',');
  sw->add_option("--kinds", sweep_kinds,
                 "semantic loss kinds to sweep (cosine, mse)")
      ->delimiter(',');
  sw->add_flag("--force", sweep_force, "overwrite a non-empty output directory");

  std::string eval_checkpoint, eval_testset, eval_questions;
  std::string eval_out = "eval_report.json";
  ProviderSpec eval_provider;
  std::string eval_provider_arg = "hash";
  uint64_t eval_cluster_seed = 0;
  CLI::App* ev = app.add_subcommand(
      "evaluate", "score a checkpoint on a test manifest");
  ev->add_option("--checkpoint", eval_checkpoint, "model checkpoint")
      ->required();
  ev->add_option("--testset", eval_testset, "test manifest (JSON lines)")
      ->required();
  ev->add_option("--provider", eval_provider_arg,
                 "\"hash\" or a path to an embedding cache file");
  ev->add_option("--fallback", eval_provider.fallback,
                 "cache miss handling: error or hash");
  ev->add_option("--provider-seed", eval_provider.seed,
                 "seed for the hash embedder");
  ev->add_option("--cluster-seed", eval_cluster_seed,
                 "seed for the clustering initialization");
  ev->add_option("--questions", eval_questions,
                 "question set (JSON lines) for the offline judge");
  ev->add_option("--out", eval_out, "where to write the report JSON");

  std::string drift_a, drift_b, drift_out;
  CLI::App* dr = app.add_subcommand(
      "drift", "encoder parameter distance between two checkpoints");
  dr->add_option("checkpoint_a", drift_a, "first checkpoint")->required();
  dr->add_option("checkpoint_b", drift_b, "second checkpoint")->required();
  dr->add_option("--out", drift_out, "also write the JSON record here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // malformed invocations are usage errors
  }

  try {
    if (gen->parsed()) return cmd_generate_corpus(gen_config, gen_force);
    if (tr->parsed()) return cmd_train(train_config, train_force);
    if (sw->parsed()) {
      return cmd_sweep(sweep_config, sweep_lambdas, sweep_kinds, sweep_force);
    }
    if (ev->parsed()) {
      if (eval_provider_arg == "hash") {
        eval_provider.kind = "hash";
      } else {
        eval_provider.kind = "cache";
        eval_provider.path = eval_provider_arg;
      }
      return cmd_evaluate(eval_checkpoint, eval_testset, eval_provider,
                          eval_questions, eval_out, eval_cluster_seed);
    }
    if (dr->parsed()) return cmd_drift(drift_a, drift_b, drift_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lau
