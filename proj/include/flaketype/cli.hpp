// Copyright 2026 The flaketype Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// The `flaketype` command line. Exit codes: 0 ok, 1 usage, 2 data error,
// 3 internal invariant violation.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flaketype/augment.hpp"
#include "flaketype/config.hpp"
#include "flaketype/corpus.hpp"
#include "flaketype/dataset.hpp"
#include "flaketype/embed.hpp"
#include "flaketype/error.hpp"
#include "flaketype/experiment.hpp"
#include "flaketype/fewshot.hpp"
#include "flaketype/folds.hpp"
#include "flaketype/interpret.hpp"
#include "flaketype/siamese.hpp"

namespace flaketype {

namespace cli_detail {

// Writes to `path`, or to `fallback` when the path is empty or "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Backend backend_or_throw(const std::string& name) {
  auto b = parse_backend(name);
  if (!b) throw usage_error("unknown backend '" + name + "' (vocab, smells, codebert)");
  return *b;
}

inline std::set<Category> categories_or_throw(const std::vector<std::string>& names) {
  std::set<Category> out;
  for (const auto& n : names) out.insert(config_detail::category_or_throw(n));
  return out;
}

inline Aggregation aggregation_or_throw(const std::string& s) {
  if (s == "max") return Aggregation::kMax;
  if (s == "mean") return Aggregation::kMean;
  throw usage_error("aggregation must be max or mean");
}

// Drops categories below min_count or excluded, telling `err` what went.
inline std::vector<FlakyTest> select_categories(const std::vector<FlakyTest>& tests,
                                                const RunConfig& config, std::ostream& err) {
  auto result = filter_categories(tests, config.min_count, config.excluded);
  if (result.tests.size() != tests.size()) {
    err << "kept " << result.tests.size() << " of " << tests.size() << " tests in "
        << result.categories.size() << " categories\n";
  }
  return result.tests;
}

// A trained model file: the Siamese weights plus what is needed to embed new
// tests the same way (the backend and, for vocab, the vocabulary).
struct ModelBundle {
  SiameseModel model;
  Backend backend = Backend::kVocab;
  std::optional<VocabModel> vocab;
};

inline void save_bundle(const std::string& path, const ModelBundle& b) {
  nlohmann::json j = to_json(b.model);
  j["backend"] = std::string(to_string(b.backend));
  if (b.vocab) j["vocab"] = to_json(*b.vocab);
  emit(path, j.dump() + "\n", std::cout);
}

inline ModelBundle load_bundle(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception&) {
    throw data_error("malformed model file '" + path + "'");
  }
  ModelBundle b;
  b.model = model_from_json(j);
  b.backend = backend_or_throw(j.value("backend", std::string("vocab")));
  if (j.contains("vocab")) b.vocab = vocab_from_json(j.at("vocab"));
  if (b.backend == Backend::kVocab && !b.vocab) {
    throw data_error("vocab model file '" + path + "' has no vocabulary");
  }
  return b;
}

inline LabeledSet embed_for(const std::vector<FlakyTest>& tests, const ModelBundle& b,
                            const std::string& embeddings) {
  if (b.backend == Backend::kVocab) return gather(tests, vocab_store(tests, *b.vocab));
  if (embeddings.empty()) {
    throw usage_error("--embeddings is required for the " +
                      std::string(to_string(b.backend)) + " backend");
  }
  return gather(tests, import_store(embeddings, b.backend));
}

inline std::vector<std::string> split_command(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Flags that override the Siamese and few-shot settings of a RunConfig.
struct ModelFlags {
  CLI::Option* margin = nullptr;
  CLI::Option* pairs = nullptr;
  CLI::Option* lr = nullptr;
  CLI::Option* batch = nullptr;
  CLI::Option* out_dim = nullptr;
  CLI::Option* support = nullptr;
  CLI::Option* aggregation = nullptr;
  double margin_v = 0;
  std::size_t pairs_v = 0;
  double lr_v = 0;
  std::size_t batch_v = 0;
  std::size_t out_dim_v = 0;
  std::size_t support_v = 0;
  std::string aggregation_v;

  void add(CLI::App* app) {
    margin = app->add_option("--margin", margin_v, "Triplet margin (default 0.3)");
    pairs = app->add_option("--pairs", pairs_v, "Training pairs (default 10000)");
    lr = app->add_option("--lr", lr_v, "Learning rate (default 0.01)");
    batch = app->add_option("--batch-size", batch_v, "Pairs per batch (default 64)");
    out_dim = app->add_option("--output-dim", out_dim_v, "Embedding width (default 512)");
    support = app->add_option("--support-size", support_v, "Exemplars per category (default 5)");
    aggregation = app->add_option("--aggregation", aggregation_v, "max or mean");
  }
  void apply(RunConfig& c) const {
    if (margin->count()) c.siamese.margin = margin_v;
    if (pairs->count()) c.siamese.num_pairs = pairs_v;
    if (lr->count()) c.siamese.learning_rate = lr_v;
    if (batch->count()) c.siamese.batch_size = batch_v;
    if (out_dim->count()) c.siamese.output_dim = out_dim_v;
    if (support->count()) c.experiment.support_size = support_v;
    if (aggregation->count()) c.experiment.aggregation = aggregation_or_throw(aggregation_v);
  }
};

// Flags that override corpus selection and seeding.
struct CommonFlags {
  CLI::Option* seed = nullptr;
  CLI::Option* min_count = nullptr;
  CLI::Option* exclude = nullptr;
  std::uint64_t seed_v = 0;
  std::size_t min_count_v = 0;
  std::vector<std::string> exclude_v;

  void add(CLI::App* app, bool selection) {
    seed = app->add_option("--seed", seed_v, "Root seed (default 0)");
    if (selection) {
      min_count = app->add_option("--min-count", min_count_v,
                                  "Keep categories with this many originals (default 30)");
      exclude = app->add_option("--exclude", exclude_v,
                                "Categories to drop (default TestOrderDependency)")
                    ->delimiter(',');
    }
  }
  void apply(RunConfig& c) const {
    if (seed->count()) c.seed = seed_v;
    if (min_count && min_count->count()) c.min_count = min_count_v;
    if (exclude && exclude->count()) {
      std::vector<std::string> names;
      for (const auto& e : exclude_v) {
        if (!e.empty() && e != "none") names.push_back(e);
      }
      c.excluded = categories_or_throw(names);
    }
  }
};

}  // namespace cli_detail

// Runs the command line `args` (without the program name).
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Categorize flaky tests by root cause with a few-shot Siamese classifier."};
  app.name("flaketype");
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "TOML configuration; flags override it");

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Inspect a corpus file");
  corpus_cmd->require_subcommand(1);
  std::string corpus_path;
  auto* stats_cmd = corpus_cmd->add_subcommand("stats", "Per-category counts");
  stats_cmd->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  auto* validate_cmd = corpus_cmd->add_subcommand("validate", "Check a corpus file");
  validate_cmd->add_option("corpus", corpus_path, "Corpus JSONL")->required();

  // augment
  auto* augment_cmd = app.add_subcommand("augment", "Add mutated copies of every test");
  std::string output;
  std::size_t copies = 0;
  std::string targets;
  CommonFlags augment_flags;
  augment_cmd->add_option("corpus", corpus_path, "Corpus JSONL of original tests")->required();
  auto* copies_opt = augment_cmd->add_option("--copies", copies, "Copies per test (default 2)");
  auto* targets_opt = augment_cmd->add_option(
      "--targets", targets, "Per-category total sizes, e.g. AsyncWaits=285,Time=105");
  augment_flags.add(augment_cmd, false);
  augment_cmd->add_option("-o,--output", output, "Output corpus (default stdout)");

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "Build or import embeddings");
  embed_cmd->require_subcommand(1);
  auto* vocab_cmd = embed_cmd->add_subcommand("vocab", "Vocabulary count vectors");
  std::optional<std::size_t> train_fold;
  std::size_t folds = kDefaultFolds;
  std::string vocab_out;
  bool no_stem = false;
  CommonFlags vocab_flags;
  vocab_cmd->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  vocab_cmd->add_option("--train-fold", train_fold,
                        "Build the vocabulary from every fold but this one");
  vocab_cmd->add_option("--folds", folds, "Number of folds (default 4)");
  vocab_cmd->add_flag("--no-stem", no_stem, "Keep words unstemmed");
  vocab_cmd->add_option("--vocab-out", vocab_out, "Also write the vocabulary JSON");
  vocab_cmd->add_option("-o,--output", output, "Embedding JSONL (default stdout)");
  vocab_flags.add(vocab_cmd, false);
  auto* import_cmd = embed_cmd->add_subcommand("import", "Validate exported embeddings");
  std::string backend_name;
  std::string embeddings;
  std::string check_corpus;
  import_cmd->add_option("--backend", backend_name, "codebert or smells")->required();
  import_cmd->add_option("file", embeddings, "Embedding JSONL")->required();
  import_cmd->add_option("--corpus", check_corpus, "Require a vector for every test here");
  import_cmd->add_option("-o,--output", output, "Write the validated vectors");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the Siamese model and pick the support set");
  std::string model_path = "model.json";
  std::string support_path = "support.json";
  ModelFlags train_model;
  CommonFlags train_flags;
  backend_name = "vocab";
  train_cmd->add_option("corpus", corpus_path, "Training corpus JSONL")->required();
  train_cmd->add_option("--backend", backend_name, "vocab, smells or codebert");
  train_cmd->add_option("--embeddings", embeddings, "Embedding JSONL for smells/codebert");
  train_cmd->add_option("--model-out", model_path, "Model JSON (default model.json)");
  train_cmd->add_option("--support-out", support_path, "Support JSON (default support.json)");
  train_cmd->add_flag("--no-stem", no_stem, "Keep words unstemmed");
  train_model.add(train_cmd);
  train_flags.add(train_cmd, true);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Rank categories for tests");
  std::string aggregation_name = "max";
  classify_cmd->add_option("tests", corpus_path, "Corpus JSONL of tests")->required();
  classify_cmd->add_option("--model", model_path, "Model JSON")->required();
  classify_cmd->add_option("--support", support_path, "Support JSON")->required();
  classify_cmd->add_option("--embeddings", embeddings, "Embedding JSONL for smells/codebert");
  classify_cmd->add_option("--aggregation", aggregation_name, "max or mean");
  classify_cmd->add_option("-o,--output", output, "Prediction JSONL (default stdout)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Cross-validated comparison");
  std::vector<std::string> backend_names, classifier_names;
  std::string codebert_path, smells_path, json_path, csv_path;
  bool no_per_fold = false, check_reference = false;
  std::size_t jobs = 1;
  ModelFlags eval_model;
  CommonFlags eval_flags;
  evaluate_cmd->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  auto* backends_opt = evaluate_cmd->add_option("--backends", backend_names,
                                                "Comma-separated backends (default vocab)")
                           ->delimiter(',');
  auto* classifiers_opt =
      evaluate_cmd->add_option("--classifiers", classifier_names,
                               "Comma-separated classifiers (default all)")
          ->delimiter(',');
  auto* folds_opt = evaluate_cmd->add_option("--folds", folds, "Number of folds (default 4)");
  auto* jobs_opt = evaluate_cmd->add_option("--jobs", jobs, "Worker threads (default 1)");
  evaluate_cmd->add_option("--codebert", codebert_path, "Codebert embedding JSONL");
  evaluate_cmd->add_option("--smells", smells_path, "Smell vector JSONL");
  evaluate_cmd->add_option("--json", json_path, "Full JSON report");
  evaluate_cmd->add_flag("--no-per-fold", no_per_fold, "Leave per-fold predictions out of the JSON");
  evaluate_cmd->add_option("--emit-transformed-csv", csv_path,
                           "Post-Siamese vectors of held-out tests, for plotting");
  evaluate_cmd->add_flag("--check-reference", check_reference,
                         "Compare with the published result structure");
  evaluate_cmd->add_option("-o,--output", output, "Text report (default stdout)");
  eval_model.add(evaluate_cmd);
  eval_flags.add(evaluate_cmd, true);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Margin by pair-count grid of FSL scores");
  std::vector<double> margins = kSweepMargins;
  std::vector<std::size_t> pair_counts = kSweepPairs;
  std::string sweep_backend = "vocab";
  ModelFlags sweep_model;
  CommonFlags sweep_flags;
  sweep_cmd->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  sweep_cmd->add_option("--backend", sweep_backend, "vocab, smells or codebert");
  sweep_cmd->add_option("--embeddings", embeddings, "Embedding JSONL for smells/codebert");
  sweep_cmd->add_option("--margins", margins, "Comma-separated margins")->delimiter(',');
  sweep_cmd->add_option("--pair-counts", pair_counts, "Comma-separated pair counts")
      ->delimiter(',');
  auto* sweep_folds = sweep_cmd->add_option("--folds", folds, "Number of folds (default 4)");
  auto* sweep_jobs = sweep_cmd->add_option("--jobs", jobs, "Worker threads (default 1)");
  sweep_cmd->add_option("-o,--output", output, "Grid CSV (default stdout)");
  sweep_model.add(sweep_cmd);
  sweep_flags.add(sweep_cmd, true);

  // explain
  auto* explain_cmd = app.add_subcommand("explain", "Find the most influential statements");
  std::string embedder = "vocab", exporter, workdir = "flaketype-handshake";
  std::string annotated_path, prevalence_path;
  explain_cmd->add_option("tests", corpus_path, "Corpus JSONL of tests")->required();
  explain_cmd->add_option("--model", model_path, "Model JSON")->required();
  explain_cmd->add_option("--support", support_path, "Support JSON")->required();
  explain_cmd->add_option("--embedder", embedder, "vocab, store or handshake");
  explain_cmd->add_option("--embeddings", embeddings,
                          "Embedding JSONL holding the tests and their variants (store)");
  explain_cmd->add_option("--exporter", exporter,
                          "Exporter command run with --input/--output (handshake)");
  explain_cmd->add_option("--workdir", workdir, "Scratch directory for the handshake");
  explain_cmd->add_option("--aggregation", aggregation_name, "max or mean");
  explain_cmd->add_option("--annotated", annotated_path, "Annotated source text");
  explain_cmd->add_option("--prevalence", prevalence_path, "Statement-type prevalence table");
  explain_cmd->add_option("-o,--output", output, "Attribution JSON (default stdout)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    config.propagate();

    if (*corpus_cmd) {
      const auto tests = load_corpus(corpus_path);
      if (*stats_cmd) {
        out << format_stats(corpus_stats(tests));
      } else {
        if (tests.empty()) throw data_error("corpus '" + corpus_path + "' is empty");
        validate_corpus(tests);
        out << corpus_path << ": " << tests.size() << " valid tests\n";
      }
      return 0;
    }

    if (*augment_cmd) {
      augment_flags.apply(config);
      config.propagate();
      if (copies_opt->count()) config.augment.copies_per_test = copies;
      if (targets_opt->count()) config.augment.targets = parse_targets(targets);
      std::ostringstream s;
      write_corpus(s, augment_corpus(load_corpus(corpus_path), config.augment));
      emit(output, s.str(), out);
      return 0;
    }

    if (*vocab_cmd) {
      vocab_flags.apply(config);
      config.propagate();
      const auto tests = load_corpus(corpus_path);
      std::vector<FlakyTest> train = tests;
      if (train_fold) {
        if (*train_fold >= folds) throw usage_error("--train-fold must be below --folds");
        const auto assignment = stratified_group_kfold(tests, folds, config.seed);
        train = split_fold(tests, assignment, *train_fold).train;
      }
      const auto vocab = build_vocab(train, !no_stem);
      if (!vocab_out.empty()) emit(vocab_out, to_json(vocab).dump() + "\n", out);
      std::ostringstream s;
      write_store(s, vocab_store(tests, vocab));
      emit(output, s.str(), out);
      return 0;
    }

    if (*import_cmd) {
      const Backend backend = backend_or_throw(backend_name);
      if (backend == Backend::kVocab) throw usage_error("vocab vectors are built, not imported");
      const auto store = import_store(embeddings, backend);
      if (!check_corpus.empty()) {
        for (const auto& t : load_corpus(check_corpus)) store.at(t.id);
      }
      out << embeddings << ": " << store.size() << " vectors, dim " << store.dim() << ", "
          << store.errors().size() << " error rows, " << store.warnings().size()
          << " warnings\n";
      for (const auto& [id, msg] : store.errors()) err << "error row " << id << ": " << msg << "\n";
      for (const auto& [id, msg] : store.warnings()) err << "warning " << id << ": " << msg << "\n";
      if (!output.empty()) save_store(output, store);
      return 0;
    }

    if (*train_cmd) {
      train_flags.apply(config);
      train_model.apply(config);
      validate_config(config.siamese);
      config.propagate();
      const auto tests = select_categories(load_corpus(corpus_path), config, err);
      ModelBundle bundle;
      bundle.backend = backend_or_throw(backend_name);
      if (bundle.backend == Backend::kVocab) bundle.vocab = build_vocab(tests, !no_stem);
      const LabeledSet data = embed_for(tests, bundle, embeddings);
      bundle.model = train(data, config.siamese);
      const SupportSet support =
          select_support(data, bundle.model, config.experiment.support_size, data.categories());
      save_bundle(model_path, bundle);
      emit(support_path, to_json(support).dump() + "\n", out);
      const auto& h = bundle.model.loss_history;
      err << "trained on " << data.size() << " tests, margin=" << config.siamese.margin
          << " pairs=" << config.siamese.num_pairs << " lr=" << config.siamese.learning_rate
          << ", final batch loss " << (h.empty() ? 0.0 : h.back()) << "\n";
      return 0;
    }

    if (*classify_cmd) {
      const auto bundle = load_bundle(model_path);
      const auto support = load_support(support_path);
      const auto tests = load_corpus(corpus_path);
      const auto data = embed_for(tests, bundle, embeddings);
      std::ostringstream s;
      for (const auto& p : classify_all(data, bundle.model, support,
                                        aggregation_or_throw(aggregation_name))) {
        s << to_json(p).dump() << "\n";
      }
      emit(output, s.str(), out);
      return 0;
    }

    if (*evaluate_cmd) {
      eval_flags.apply(config);
      eval_model.apply(config);
      validate_config(config.siamese);
      config.propagate();
      if (backends_opt->count()) {
        config.backends.clear();
        for (const auto& b : backend_names) config.backends.push_back(backend_or_throw(b));
      }
      if (classifiers_opt->count()) {
        config.classifiers.clear();
        for (const auto& k : classifier_names) {
          auto v = parse_classifier(k);
          if (!v) throw usage_error("unknown classifier '" + k + "'");
          config.classifiers.push_back(*v);
        }
      }
      if (folds_opt->count()) config.experiment.folds = folds;
      if (jobs_opt->count()) config.experiment.jobs = jobs;
      config.experiment.keep_transformed = !csv_path.empty();
      const auto tests = select_categories(load_corpus(corpus_path), config, err);
      std::map<Backend, EmbeddingStore> stores;
      if (!codebert_path.empty()) {
        stores.emplace(Backend::kCodebert, import_store(codebert_path, Backend::kCodebert));
      }
      if (!smells_path.empty()) {
        stores.emplace(Backend::kSmells, import_store(smells_path, Backend::kSmells));
      }
      const auto report = run_experiment(tests, config.backends, config.classifiers, stores,
                                         config.experiment);
      std::string text = text_report(report);
      if (check_reference) {
        text += "\nReference structure\n";
        for (const auto& c : check_reference_structure(report)) {
          text += std::string(c.passed ? "PASS " : "FAIL ") + c.name + " (" + c.detail + ")\n";
        }
      }
      emit(output, text, out);
      if (!json_path.empty()) emit(json_path, to_json(report, !no_per_fold).dump(1) + "\n", out);
      if (!csv_path.empty()) {
        std::ostringstream csv;
        write_transformed_csv(csv, report);
        emit(csv_path, csv.str(), out);
      }
      return 0;
    }

    if (*sweep_cmd) {
      sweep_flags.apply(config);
      sweep_model.apply(config);
      config.propagate();
      if (sweep_folds->count()) config.experiment.folds = folds;
      if (sweep_jobs->count()) config.experiment.jobs = jobs;
      const Backend backend = backend_or_throw(sweep_backend);
      std::map<Backend, EmbeddingStore> stores;
      if (backend != Backend::kVocab) {
        if (embeddings.empty()) throw usage_error("--embeddings is required for this backend");
        stores.emplace(backend, import_store(embeddings, backend));
      }
      const auto tests = select_categories(load_corpus(corpus_path), config, err);
      std::ostringstream csv;
      write_sweep_csv(csv, run_sweep(tests, backend, stores, margins, pair_counts,
                                     config.experiment));
      emit(output, csv.str(), out);
      return 0;
    }

    if (*explain_cmd) {
      const auto bundle = load_bundle(model_path);
      const auto support = load_support(support_path);
      const auto tests = load_corpus(corpus_path);
      std::optional<EmbeddingStore> store;
      BatchEmbedder embed;
      if (embedder == "vocab") {
        if (!bundle.vocab) throw usage_error("the vocab embedder needs a vocab model");
        embed = vocab_embedder(*bundle.vocab);
      } else if (embedder == "store") {
        if (embeddings.empty()) throw usage_error("--embeddings is required for the store embedder");
        store = import_store(embeddings, bundle.backend);
        embed = store_embedder(*store);
      } else if (embedder == "handshake") {
        if (exporter.empty()) throw usage_error("--exporter is required for the handshake");
        embed = handshake_embedder(split_command(exporter), workdir, bundle.backend);
      } else {
        throw usage_error("embedder must be vocab, store or handshake");
      }
      const auto run = attribute_all(tests, bundle.model, support, embed,
                                     aggregation_or_throw(aggregation_name));
      const auto table = prevalence(run.attributions);
      nlohmann::json attributions = nlohmann::json::array();
      for (const auto& a : run.attributions) attributions.push_back(to_json(a));
      const nlohmann::json doc = {{"attributions", std::move(attributions)},
                                  {"skipped", run.skipped},
                                  {"prevalence", to_json(table)}};
      emit(output, doc.dump(1) + "\n", out);
      if (!annotated_path.empty()) {
        std::map<std::string, const FlakyTest*> by_id;
        for (const auto& t : tests) by_id[t.id] = &t;
        std::string text;
        for (const auto& a : run.attributions) text += annotate_source(*by_id.at(a.test_id), a) + "\n";
        emit(annotated_path, text, out);
      }
      if (!prevalence_path.empty()) emit(prevalence_path, format_prevalence(table), out);
      err << run.attributions.size() << " attributed, " << run.skipped.size() << " skipped\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kInternal);
  }
  return 0;
}

}  // namespace flaketype
