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

// Single-statement ablation: each variant of a test drops one statement, and
// the statement whose removal lowers the similarity to the correct category
// the most is reported as the most influential one.

#include <spawn.h>
#include <sys/wait.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "flaketype/corpus.hpp"
#include "flaketype/embed.hpp"
#include "flaketype/error.hpp"
#include "flaketype/fewshot.hpp"
#include "flaketype/javatok.hpp"
#include "flaketype/siamese.hpp"

extern char** environ;

namespace flaketype {

// True for a depth-0 unit opening the method itself (annotations,
// modifiers, signature and `{`), which ablation leaves alone.
inline bool is_method_header(const Statement& s) {
  if (s.depth != 0 || s.text.empty() || s.text.back() != '{') return false;
  const auto tokens = tokenize(s.text);
  if (tokens.empty()) return false;
  if (tokens.front().kind == TokenKind::kKeyword &&
      javatok_detail::is_header_keyword(tokens.front().text)) {
    return false;
  }
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::kPunct && t.text == "(") return true;
  }
  return false;
}

// The ablatable statements of a test: every segmented unit except a leading
// method header.
inline std::vector<Statement> body_statements(std::string_view code) {
  auto all = segment_statements(code);
  if (!all.empty() && is_method_header(all.front())) all.erase(all.begin());
  return all;
}

inline std::string variant_id(const std::string& id, std::size_t index) {
  return id + "#ablate" + std::to_string(index);
}

// Variant i is the test with the text of body statement i deleted; braces
// owned by other units stay.
inline std::vector<FlakyTest> ablate(const FlakyTest& test) {
  const auto statements = body_statements(test.code);
  if (statements.size() < 2) {
    throw data_error("nothing to ablate in '" + test.id + "'");
  }
  std::vector<FlakyTest> out;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    FlakyTest v = test;
    v.id = variant_id(test.id, i);
    const Span& s = statements[i].span;
    v.code = test.code.substr(0, s.start) + test.code.substr(s.end);
    out.push_back(std::move(v));
  }
  return out;
}

// Maps tests to vectors in one call; a missing result marks a test that
// could not be embedded.
using BatchEmbedder = std::function<std::vector<std::optional<Eigen::VectorXd>>(
    const std::vector<FlakyTest>&)>;

struct StatementAttribution {
  std::string test_id;
  Category category = Category::kAsyncWaits;
  double original_score = 0.0;
  std::vector<Statement> statements;
  std::vector<std::optional<double>> drops;  // missing when the variant failed
  std::size_t most_influential = 0;
};

namespace interpret_detail {

inline std::size_t argmax_drop(const std::vector<std::optional<double>>& drops,
                               const std::string& id) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < drops.size(); ++i) {
    if (drops[i] && (!best || *drops[i] > *drops[*best])) best = i;
  }
  if (!best) throw data_error("no ablated variant of '" + id + "' could be embedded");
  return *best;
}

inline StatementAttribution attribute_from(const FlakyTest& test, Category correct,
                                           const SiameseModel& model,
                                           const SupportSet& support,
                                           Aggregation aggregation,
                                           const std::optional<Eigen::VectorXd>& original,
                                           const std::vector<std::optional<Eigen::VectorXd>>& variants) {
  if (!original) throw data_error("test '" + test.id + "' could not be embedded");
  StatementAttribution a;
  a.test_id = test.id;
  a.category = correct;
  a.statements = body_statements(test.code);
  a.original_score = classify(*original, model, support, aggregation).score(correct);
  for (const auto& v : variants) {
    if (!v) {
      a.drops.push_back(std::nullopt);
      continue;
    }
    a.drops.push_back(a.original_score -
                      classify(*v, model, support, aggregation).score(correct));
  }
  a.most_influential = argmax_drop(a.drops, test.id);
  return a;
}

}  // namespace interpret_detail

// Drop of the correct category's score for every ablated variant. The caller
// is expected to pass only tests the classifier already gets right.
inline StatementAttribution attribute(const FlakyTest& test, Category correct,
                                      const SiameseModel& model, const SupportSet& support,
                                      const BatchEmbedder& embed,
                                      Aggregation aggregation = Aggregation::kMax) {
  auto batch = ablate(test);
  batch.insert(batch.begin(), test);
  auto vectors = embed(batch);
  if (vectors.size() != batch.size()) {
    throw internal_error("embedder returned " + std::to_string(vectors.size()) +
                         " results for " + std::to_string(batch.size()) + " tests");
  }
  return interpret_detail::attribute_from(
      test, correct, model, support, aggregation, vectors.front(),
      {vectors.begin() + 1, vectors.end()});
}

struct AttributionRun {
  std::vector<StatementAttribution> attributions;
  std::vector<std::string> skipped;  // id: reason
};

// Attributes every correctly classified test with at least two statements,
// embedding all originals and variants in a single batch.
inline AttributionRun attribute_all(const std::vector<FlakyTest>& tests,
                                    const SiameseModel& model, const SupportSet& support,
                                    const BatchEmbedder& embed,
                                    Aggregation aggregation = Aggregation::kMax) {
  AttributionRun run;
  std::vector<FlakyTest> batch;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // per test: start, count
  std::vector<const FlakyTest*> kept;
  for (const auto& t : tests) {
    if (body_statements(t.code).size() < 2) {
      run.skipped.push_back(t.id + ": nothing to ablate");
      continue;
    }
    auto variants = ablate(t);
    ranges.emplace_back(batch.size(), variants.size() + 1);
    batch.push_back(t);
    batch.insert(batch.end(), variants.begin(), variants.end());
    kept.push_back(&t);
  }
  if (batch.empty()) return run;
  const auto vectors = embed(batch);
  if (vectors.size() != batch.size()) {
    throw internal_error("embedder returned " + std::to_string(vectors.size()) +
                         " results for " + std::to_string(batch.size()) + " tests");
  }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const FlakyTest& t = *kept[k];
    const auto [start, count] = ranges[k];
    const auto& original = vectors[start];
    if (!original) {
      run.skipped.push_back(t.id + ": could not be embedded");
      continue;
    }
    const auto predicted = classify(*original, model, support, aggregation).top();
    if (predicted != t.category) {
      run.skipped.push_back(t.id + ": misclassified as " + std::string(to_string(predicted)));
      continue;
    }
    std::vector<std::optional<Eigen::VectorXd>> variants(
        vectors.begin() + static_cast<std::ptrdiff_t>(start + 1),
        vectors.begin() + static_cast<std::ptrdiff_t>(start + count));
    try {
      run.attributions.push_back(interpret_detail::attribute_from(
          t, t.category, model, support, aggregation, original, variants));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kData) throw;
      run.skipped.push_back(t.id + ": " + e.what());
    }
  }
  return run;
}

// ---- embedders ----

inline BatchEmbedder vocab_embedder(VocabModel vocab) {
  return [vocab = std::move(vocab)](const std::vector<FlakyTest>& tests) {
    std::vector<std::optional<Eigen::VectorXd>> out;
    for (const auto& t : tests) out.emplace_back(vocab_embed(t, vocab).values);
    return out;
  };
}

// Looks tests up in a fixed store; ids it lacks count as failures.
inline BatchEmbedder store_embedder(const EmbeddingStore& store) {
  return [&store](const std::vector<FlakyTest>& tests) {
    std::vector<std::optional<Eigen::VectorXd>> out;
    for (const auto& t : tests) {
      out.push_back(store.contains(t.id) ? std::optional(store.at(t.id)) : std::nullopt);
    }
    return out;
  };
}

// Runs `argv` and waits; returns the exit status (or -1 when it could not
// start or was killed).
inline int run_process(const std::vector<std::string>& argv) {
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = 0;
  if (posix_spawnp(&pid, args[0], nullptr, nullptr, args.data(), environ) != 0) return -1;
  int status = 0;
  if (waitpid(pid, &status, 0) < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Writes the batch as corpus JSONL, runs `command --input <in> --output
// <out>` and reads the embedding JSONL it produces. Error rows and ids
// absent from the output count as failures.
inline BatchEmbedder handshake_embedder(std::vector<std::string> command,
                                        std::filesystem::path workdir,
                                        Backend backend = Backend::kCodebert) {
  if (command.empty()) throw usage_error("handshake needs an exporter command");
  return [command = std::move(command), workdir = std::move(workdir),
          backend](const std::vector<FlakyTest>& tests) {
    std::filesystem::create_directories(workdir);
    const auto input = workdir / "variants.jsonl";
    const auto output = workdir / "variants.embeddings.jsonl";
    save_corpus(input.string(), tests);
    std::filesystem::remove(output);
    auto argv = command;
    argv.insert(argv.end(), {"--input", input.string(), "--output", output.string()});
    const int status = run_process(argv);
    if (status != 0) {
      throw data_error("exporter '" + command.front() + "' failed with status " +
                       std::to_string(status));
    }
    const EmbeddingStore store = import_store(output.string(), backend);
    std::vector<std::optional<Eigen::VectorXd>> out;
    for (const auto& t : tests) {
      out.push_back(store.contains(t.id) ? std::optional(store.at(t.id)) : std::nullopt);
    }
    return out;
  };
}

// ---- reports ----

using TagFn = std::function<std::set<StatementType>(const Statement&)>;

inline std::set<StatementType> default_tags(const Statement& s) {
  return classify_statement(s);
}

struct PrevalenceRow {
  std::size_t n = 0;
  std::array<double, kNumStatementTypes> percent{};
};

using PrevalenceTable = std::map<Category, PrevalenceRow>;

// Per category, the share of most influential statements tagged with each
// statement type. A statement may carry several tags.
inline PrevalenceTable prevalence(const std::vector<StatementAttribution>& attributions,
                                  const TagFn& tag = default_tags) {
  PrevalenceTable table;
  std::map<Category, std::array<std::size_t, kNumStatementTypes>> hits;
  for (const auto& a : attributions) {
    ++table[a.category].n;
    auto& h = hits[a.category];
    for (StatementType t : tag(a.statements.at(a.most_influential))) {
      ++h[static_cast<std::size_t>(t)];
    }
  }
  for (auto& [c, row] : table) {
    for (std::size_t k = 0; k < kNumStatementTypes; ++k) {
      row.percent[k] = 100.0 * static_cast<double>(hits[c][k]) / static_cast<double>(row.n);
    }
  }
  return table;
}

inline std::string format_prevalence(const PrevalenceTable& table) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "Category" << std::setw(5) << "N";
  for (auto name : kStatementTypeNames) out << std::setw(17) << name;
  out << "\n";
  for (const auto& [c, row] : table) {
    out << std::setw(22) << to_string(c) << std::setw(5) << row.n;
    for (double p : row.percent) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(1) << p;
      out << std::setw(17) << cell.str();
    }
    out << "\n";
  }
  return out.str();
}

inline nlohmann::json to_json(const PrevalenceTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [c, row] : table) {
    nlohmann::json cells = nlohmann::json::object();
    for (std::size_t k = 0; k < kNumStatementTypes; ++k) {
      cells[std::string(kStatementTypeNames[k])] = row.percent[k];
    }
    j[std::string(to_string(c))] = {{"n", row.n}, {"percent", std::move(cells)}};
  }
  return j;
}

inline nlohmann::json to_json(const StatementAttribution& a, const TagFn& tag = default_tags) {
  nlohmann::json statements = nlohmann::json::array();
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    nlohmann::json types = nlohmann::json::array();
    for (StatementType t : tag(a.statements[i])) types.push_back(std::string(to_string(t)));
    statements.push_back({{"index", i},
                          {"text", a.statements[i].text},
                          {"drop", a.drops[i] ? nlohmann::json(*a.drops[i]) : nlohmann::json()},
                          {"influential", i == a.most_influential},
                          {"types", std::move(types)}});
  }
  return {{"id", a.test_id},
          {"category", std::string(to_string(a.category))},
          {"score", a.original_score},
          {"most_influential", a.most_influential},
          {"statements", std::move(statements)}};
}

// The test's source with `>>` in front of every line touching the most
// influential statement.
inline std::string annotate_source(const FlakyTest& test, const StatementAttribution& a) {
  const Span span = a.statements.at(a.most_influential).span;
  std::ostringstream out;
  out << "// " << test.id << " [" << to_string(a.category) << "] most influential: statement "
      << a.most_influential;
  if (const auto& d = a.drops[a.most_influential]) out << " (drop " << *d << ")";
  out << "\n";
  std::size_t start = 0;
  while (start < test.code.size()) {
    std::size_t end = test.code.find('\n', start);
    if (end == std::string::npos) end = test.code.size();
    const bool hit = start < span.end && span.start < std::max(end, start + 1);
    out << (hit ? ">> " : "   ") << test.code.substr(start, end - start) << "\n";
    start = end + 1;
  }
  return out.str();
}

}  // namespace flaketype
