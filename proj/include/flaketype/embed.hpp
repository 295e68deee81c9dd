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

// Test representations: token-occurrence vocabulary vectors computed here,
// and imported smell / transformer vectors held in an EmbeddingStore.

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "flaketype/corpus.hpp"
#include "flaketype/error.hpp"
#include "flaketype/javatok.hpp"
#include "flaketype/porter_stemmer.hpp"

namespace flaketype {

enum class Backend { kVocab, kSmells, kCodebert };

inline constexpr std::size_t kCodebertDim = 768;
inline constexpr std::size_t kSmellsDim = 21;

inline std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::kVocab: return "vocab";
    case Backend::kSmells: return "smells";
    case Backend::kCodebert: return "codebert";
  }
  return "vocab";
}

inline std::optional<Backend> parse_backend(std::string_view s) {
  if (s == "vocab") return Backend::kVocab;
  if (s == "smells") return Backend::kSmells;
  if (s == "codebert") return Backend::kCodebert;
  return std::nullopt;
}

struct EmbeddingVector {
  std::string test_id;
  Backend backend = Backend::kVocab;
  Eigen::VectorXd values;

  std::size_t dim() const { return static_cast<std::size_t>(values.size()); }
};

// Stems of identifier and keyword tokens, split into words first.
inline std::vector<std::string> vocab_terms(std::string_view code,
                                            bool stemming = true) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(code)) {
    if (t.kind != TokenKind::kIdentifier && t.kind != TokenKind::kKeyword) {
      continue;
    }
    for (auto& w : split_identifier(t.text)) {
      out.push_back(stemming ? porter_stem(w) : std::move(w));
    }
  }
  return out;
}

struct VocabModel {
  std::map<std::string, std::size_t, std::less<>> index;  // dense [0, size)
  bool stemming = true;

  std::size_t size() const { return index.size(); }
};

// Vocabulary of the distinct terms in `train`, indexed in lexicographic order.
inline VocabModel build_vocab(const std::vector<FlakyTest>& train,
                              bool stemming = true) {
  if (train.empty()) throw usage_error("build_vocab needs a non-empty training set");
  std::set<std::string> terms;
  for (const auto& t : train) {
    for (auto& term : vocab_terms(t.code, stemming)) terms.insert(std::move(term));
  }
  VocabModel model;
  model.stemming = stemming;
  std::size_t i = 0;
  for (const auto& term : terms) model.index.emplace(term, i++);
  return model;
}

// Occurrence counts over the model's vocabulary; unknown terms are ignored.
inline EmbeddingVector vocab_embed(const FlakyTest& test,
                                   const VocabModel& model) {
  EmbeddingVector v;
  v.test_id = test.id;
  v.backend = Backend::kVocab;
  v.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.size()));
  for (const auto& term : vocab_terms(test.code, model.stemming)) {
    auto it = model.index.find(term);
    if (it != model.index.end()) v.values[static_cast<Eigen::Index>(it->second)] += 1.0;
  }
  return v;
}

// Vectors for one backend, all of one dimension, keyed by test id. Rows of
// the exporter that carried an error instead of a vector are kept in
// `errors` so lookups can say why an id is missing.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(Backend backend, std::size_t dim) : backend_(backend), dim_(dim) {}

  Backend backend() const { return backend_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return order_.size(); }
  const std::vector<std::string>& ids() const { return order_; }
  const std::map<std::string, std::string>& errors() const { return errors_; }
  const nlohmann::json& header() const { return header_; }

  bool contains(const std::string& id) const { return vectors_.count(id) > 0; }

  const Eigen::VectorXd& at(const std::string& id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) {
      auto err = errors_.find(id);
      throw data_error("test '" + id + "' not embedded" +
                       (err == errors_.end() ? "" : " (" + err->second + ")"));
    }
    return it->second;
  }

  void add(const std::string& id, Eigen::VectorXd values) {
    if (static_cast<std::size_t>(values.size()) != dim_) {
      throw data_error("embedding for '" + id + "' has dim " +
                       std::to_string(values.size()) + ", expected " +
                       std::to_string(dim_));
    }
    if (!values.allFinite()) {
      throw data_error("embedding for '" + id + "' has a non-finite value");
    }
    if (backend_ == Backend::kSmells) {
      for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (values[k] != 0.0 && values[k] != 1.0) {
          throw data_error("non-binary smell vector for '" + id + "'");
        }
      }
    }
    if (vectors_.count(id) || errors_.count(id)) {
      throw data_error("duplicate embedding id '" + id + "'");
    }
    order_.push_back(id);
    vectors_.emplace(id, std::move(values));
  }

  void add_error(const std::string& id, std::string message) {
    if (vectors_.count(id) || errors_.count(id)) {
      throw data_error("duplicate embedding id '" + id + "'");
    }
    errors_.emplace(id, std::move(message));
  }

  void set_header(nlohmann::json header) { header_ = std::move(header); }
  void add_warning(const std::string& id, std::string message) {
    warnings_.emplace_back(id, std::move(message));
  }
  const std::vector<std::pair<std::string, std::string>>& warnings() const {
    return warnings_;
  }

 private:
  Backend backend_ = Backend::kVocab;
  std::size_t dim_ = 0;
  std::vector<std::string> order_;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
  std::map<std::string, std::string> errors_;
  nlohmann::json header_;
  std::vector<std::pair<std::string, std::string>> warnings_;
};

// Reads embedding JSONL: `{"id", "backend", "vector"}` rows, plus optional
// `{"header": {...}}`, `{"id", "error"}` and `{"id", "warning"}` rows written
// by the exporter.
// The first vector fixes the dimension unless `expected_dim` is given;
// smells require 21 binary values and codebert 768.
inline EmbeddingStore read_store(std::istream& in, Backend backend,
                                 std::optional<std::size_t> expected_dim = {}) {
  if (backend == Backend::kSmells) {
    if (expected_dim && *expected_dim != kSmellsDim) {
      throw usage_error("smell vectors have dim 21");
    }
    expected_dim = kSmellsDim;
  } else if (backend == Backend::kCodebert) {
    if (expected_dim && *expected_dim != kCodebertDim) {
      throw usage_error("codebert vectors have dim 768");
    }
    expected_dim = kCodebertDim;
  }
  std::optional<EmbeddingStore> store;
  if (expected_dim) store.emplace(backend, *expected_dim);
  nlohmann::json header;
  std::map<std::string, std::string> pending_errors;
  std::vector<std::pair<std::string, std::string>> warnings;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw data_error(where + "malformed JSON");
    }
    if (!j.is_object()) throw data_error(where + "not a JSON object");
    if (j.contains("header")) {
      header = j["header"];
      continue;
    }
    if (!j.contains("id") || !j["id"].is_string()) {
      throw data_error(where + "missing id");
    }
    std::string id = j["id"].get<std::string>();
    if (j.contains("backend")) {
      if (!j["backend"].is_string() ||
          parse_backend(j["backend"].get<std::string>()) != backend) {
        throw data_error(where + "backend mismatch for '" + id + "'");
      }
    }
    if (j.contains("error") && !j.contains("vector")) {
      std::string msg = j["error"].is_string() ? j["error"].get<std::string>()
                                               : j["error"].dump();
      if (store) {
        store->add_error(id, msg);
      } else if (!pending_errors.emplace(id, msg).second) {
        throw data_error(where + "duplicate embedding id '" + id + "'");
      }
      continue;
    }
    if (j.contains("warning") && !j.contains("vector")) {
      warnings.emplace_back(id, j["warning"].is_string()
                                    ? j["warning"].get<std::string>()
                                    : j["warning"].dump());
      continue;
    }
    if (!j.contains("vector") || !j["vector"].is_array()) {
      throw data_error(where + "missing vector for '" + id + "'");
    }
    const auto& arr = j["vector"];
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t k = 0; k < arr.size(); ++k) {
      if (!arr[k].is_number()) {
        throw data_error(where + "non-numeric value in vector for '" + id + "'");
      }
      v[static_cast<Eigen::Index>(k)] = arr[k].get<double>();
    }
    if (!store) store.emplace(backend, arr.size());
    try {
      store->add(id, std::move(v));
    } catch (const Error& e) {
      throw data_error(where + e.what());
    }
  }
  if (!store) store.emplace(backend, expected_dim.value_or(0));
  for (auto& [id, msg] : pending_errors) store->add_error(id, msg);
  store->set_header(std::move(header));
  for (auto& [id, msg] : warnings) store->add_warning(id, std::move(msg));
  return std::move(*store);
}

inline EmbeddingStore import_store(const std::string& path, Backend backend,
                                   std::optional<std::size_t> expected_dim = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open embedding file '" + path + "'");
  return read_store(in, backend, expected_dim);
}

inline void write_store(std::ostream& out, const EmbeddingStore& store) {
  for (const auto& id : store.ids()) {
    const Eigen::VectorXd& v = store.at(id);
    nlohmann::json j;
    j["id"] = id;
    j["backend"] = std::string(to_string(store.backend()));
    j["vector"] = std::vector<double>(v.data(), v.data() + v.size());
    out << j.dump() << '\n';
  }
}

inline void save_store(const std::string& path, const EmbeddingStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write embedding file '" + path + "'");
  write_store(out, store);
}

inline EmbeddingStore vocab_store(const std::vector<FlakyTest>& tests,
                                  const VocabModel& model) {
  EmbeddingStore store(Backend::kVocab, model.size());
  for (const auto& t : tests) store.add(t.id, vocab_embed(t, model).values);
  return store;
}

inline nlohmann::json to_json(const VocabModel& model) {
  std::vector<std::string> terms(model.size());
  for (const auto& [term, idx] : model.index) terms[idx] = term;
  return {{"stemming", model.stemming}, {"terms", terms}};
}

inline VocabModel vocab_from_json(const nlohmann::json& j) {
  VocabModel model;
  model.stemming = j.at("stemming").get<bool>();
  auto terms = j.at("terms").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!model.index.emplace(terms[i], i).second) {
      throw data_error("duplicate vocabulary term '" + terms[i] + "'");
    }
  }
  return model;
}

}  // namespace flaketype
