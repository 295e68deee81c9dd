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

// Run configuration and the TOML files it is read from. The reader covers
// the part of TOML these files use: tables and dotted table headers,
// bare or quoted keys, basic and literal strings, integers, floats,
// booleans and (possibly multi-line) arrays of those, and `#` comments.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "flaketype/augment.hpp"
#include "flaketype/category.hpp"
#include "flaketype/embed.hpp"
#include "flaketype/error.hpp"
#include "flaketype/experiment.hpp"
#include "flaketype/fewshot.hpp"
#include "flaketype/javatok.hpp"
#include "flaketype/siamese.hpp"

namespace flaketype {

namespace toml_detail {

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    std::set<std::string> defined;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++i_;
        if (!at_end() && peek() == '[') fail("arrays of tables are not supported");
        skip_spaces();
        std::vector<std::string> path = key_path();
        skip_spaces();
        expect(']');
        end_of_line();
        std::string name;
        table = &root;
        for (const auto& k : path) {
          name += (name.empty() ? "" : ".") + k;
          auto& next = (*table)[k];
          if (next.is_null()) next = nlohmann::json::object();
          if (!next.is_object()) fail("'" + name + "' is not a table");
          table = &next;
        }
        if (!defined.insert(name).second) fail("table [" + name + "] defined twice");
        continue;
      }
      std::vector<std::string> path = key_path();
      skip_spaces();
      expect('=');
      skip_spaces();
      nlohmann::json value = parse_value();
      end_of_line();
      nlohmann::json* target = table;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        auto& next = (*target)[path[k]];
        if (next.is_null()) next = nlohmann::json::object();
        if (!next.is_object()) fail("'" + path[k] + "' is not a table");
        target = &next;
      }
      if (target->contains(path.back())) fail("key '" + path.back() + "' defined twice");
      (*target)[path.back()] = std::move(value);
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw usage_error("config line " + std::to_string(line_) + ": " + msg);
  }
  bool at_end() const { return i_ >= s_.size(); }
  char peek() const { return s_[i_]; }
  void advance() {
    if (s_[i_] == '\n') ++line_;
    ++i_;
  }
  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++i_;
  }
  void skip_comment() {
    if (!at_end() && peek() == '#') {
      while (!at_end() && peek() != '\n') ++i_;
    }
  }
  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (at_end()) return;
      if (peek() == '\r' || peek() == '\n') {
        advance();
        continue;
      }
      return;
    }
  }
  // Whitespace, comments and newlines, as allowed inside arrays.
  void skip_array_space() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (!at_end() && (peek() == '\r' || peek() == '\n')) {
        advance();
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (!at_end() && peek() == '\r') ++i_;
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected text after value");
    advance();
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path;
    while (true) {
      skip_spaces();
      if (at_end()) fail("expected a key");
      if (peek() == '"') {
        path.push_back(basic_string());
      } else if (peek() == '\'') {
        path.push_back(literal_string());
      } else {
        std::size_t start = i_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                             peek() == '_' || peek() == '-')) {
          ++i_;
        }
        if (start == i_) fail("expected a key");
        path.emplace_back(s_.substr(start, i_ - start));
      }
      skip_spaces();
      if (at_end() || peek() != '.') return path;
      ++i_;
    }
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = s_[i_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated string");
      char e = s_[i_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
  }

  std::string literal_string() {
    expect('\'');
    std::size_t end = s_.find('\'', i_);
    std::size_t nl = s_.find('\n', i_);
    if (end == std::string_view::npos || (nl != std::string_view::npos && nl < end)) {
      fail("unterminated string");
    }
    std::string out(s_.substr(i_, end - i_));
    i_ = end + 1;
    return out;
  }

  nlohmann::json parse_value() {
    if (at_end()) fail("missing value");
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') {
      ++i_;
      nlohmann::json arr = nlohmann::json::array();
      while (true) {
        skip_array_space();
        if (at_end()) fail("unterminated array");
        if (peek() == ']') {
          ++i_;
          return arr;
        }
        arr.push_back(parse_value());
        skip_array_space();
        if (!at_end() && peek() == ',') {
          ++i_;
          continue;
        }
        skip_array_space();
        expect(']');
        return arr;
      }
    }
    std::size_t start = i_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' &&
           peek() != '\n' && peek() != '\r' && peek() != ' ' && peek() != '\t') {
      ++i_;
    }
    std::string word(s_.substr(start, i_ - start));
    if (word == "true") return true;
    if (word == "false") return false;
    std::string digits;
    for (char ch : word) {
      if (ch != '_') digits += ch;
    }
    if (digits.empty()) fail("missing value");
    const bool is_float = digits.find_first_of(".eE") != std::string::npos ||
                          digits == "inf" || digits == "+inf" || digits == "-inf" ||
                          digits == "nan";
    try {
      std::size_t used = 0;
      if (is_float) {
        double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      } else {
        long long v = std::stoll(digits, &used, 10);
        if (used == digits.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("bad value '" + word + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
};

}  // namespace toml_detail

inline nlohmann::json parse_toml(std::string_view text) {
  return toml_detail::Reader(text).parse();
}

// Every setting, with the pinned defaults. One root seed feeds every
// random stream.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t min_count = 30;
  std::set<Category> excluded = {Category::kTestOrderDependency};
  AugmentationConfig augment;
  TrainingConfig siamese;
  ExperimentConfig experiment;
  std::vector<Backend> backends = {Backend::kVocab};
  std::vector<ClassifierKind> classifiers = {std::begin(kAllClassifiers),
                                             std::end(kAllClassifiers)};
  StatementPatterns patterns = StatementPatterns::defaults();

  // Copies the root seed and the shared Siamese settings into the module
  // configs.
  void propagate() {
    augment.seed = seed;
    siamese.seed = seed;
    experiment.seed = seed;
    experiment.siamese = siamese;
  }
};

namespace config_detail {

class Section {
 public:
  Section(const nlohmann::json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw usage_error("[" + name_ + "] must be a table");
    for (const auto& [k, v] : j_.items()) unused_.insert(k);
  }
  // Rejects keys nobody asked for.
  void done() const {
    if (!unused_.empty()) {
      throw usage_error("unknown key '" + *unused_.begin() + "' in [" + name_ + "]");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    unused_.erase(key);
    const auto& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw usage_error("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || v.get<long long>() < 0) throw usage_error("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw usage_error("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw usage_error("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw usage_error("bad value for '" + key + "' in [" + name_ + "]");
    }
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    if (!j_.contains(key)) return std::nullopt;
    unused_.erase(key);
    const auto& v = j_.at(key);
    std::vector<std::string> out;
    if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_string()) throw usage_error("'" + key + "' in [" + name_ + "] must hold strings");
        out.push_back(e.get<std::string>());
      }
      return out;
    }
    throw usage_error("'" + key + "' in [" + name_ + "] must be an array of strings");
  }

  const nlohmann::json* table(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    unused_.erase(key);
    return &j_.at(key);
  }

 private:
  const nlohmann::json& j_;
  std::string name_;
  std::set<std::string> unused_;
};

inline Category category_or_throw(const std::string& s) {
  auto c = parse_category(s);
  if (!c) throw usage_error("unknown category '" + s + "'");
  return *c;
}

}  // namespace config_detail

// Applies a parsed TOML document on top of `config`. Unknown sections and
// keys are errors so that typos do not pass silently.
inline void apply_config(RunConfig& config, const nlohmann::json& doc) {
  using config_detail::Section;
  Section root(doc, "root");
  root.get("seed", config.seed);
  if (auto* j = root.table("corpus")) {
    Section s(*j, "corpus");
    s.get("min_count", config.min_count);
    if (auto ex = s.strings("exclude")) {
      config.excluded.clear();
      for (const auto& c : *ex) config.excluded.insert(config_detail::category_or_throw(c));
    }
    s.done();
  }
  if (auto* j = root.table("augment")) {
    Section s(*j, "augment");
    s.get("copies", config.augment.copies_per_test);
    std::string targets;
    s.get("targets", targets);
    if (!targets.empty()) config.augment.targets = parse_targets(targets);
    std::string wordlist;
    s.get("wordlist", wordlist);
    if (!wordlist.empty()) {
      std::ifstream in(wordlist);
      if (!in) throw data_error("cannot open wordlist '" + wordlist + "'");
      config.augment.wordlist.clear();
      for (std::string w; in >> w;) config.augment.wordlist.push_back(w);
      if (config.augment.wordlist.empty()) throw data_error("wordlist is empty");
    }
    s.done();
  }
  if (auto* j = root.table("siamese")) {
    Section s(*j, "siamese");
    s.get("margin", config.siamese.margin);
    s.get("pairs", config.siamese.num_pairs);
    s.get("learning_rate", config.siamese.learning_rate);
    s.get("batch_size", config.siamese.batch_size);
    s.get("output_dim", config.siamese.output_dim);
    s.done();
  }
  if (auto* j = root.table("fewshot")) {
    Section s(*j, "fewshot");
    s.get("support_size", config.experiment.support_size);
    std::string agg;
    s.get("aggregation", agg);
    if (agg == "max") {
      config.experiment.aggregation = Aggregation::kMax;
    } else if (agg == "mean") {
      config.experiment.aggregation = Aggregation::kMean;
    } else if (!agg.empty()) {
      throw usage_error("aggregation must be max or mean");
    }
    s.done();
  }
  if (auto* j = root.table("evaluate")) {
    Section s(*j, "evaluate");
    s.get("folds", config.experiment.folds);
    s.get("jobs", config.experiment.jobs);
    s.get("stemming", config.experiment.stemming);
    s.get("augmented_in_test", config.experiment.augmented_in_test);
    if (auto b = s.strings("backends")) {
      config.backends.clear();
      for (const auto& name : *b) {
        auto v = parse_backend(name);
        if (!v) throw usage_error("unknown backend '" + name + "'");
        config.backends.push_back(*v);
      }
    }
    if (auto k = s.strings("classifiers")) {
      config.classifiers.clear();
      for (const auto& name : *k) {
        auto v = parse_classifier(name);
        if (!v) throw usage_error("unknown classifier '" + name + "'");
        config.classifiers.push_back(*v);
      }
    }
    s.done();
  }
  if (auto* j = root.table("baselines")) {
    Section s(*j, "baselines");
    s.get("knn_k", config.experiment.knn_k);
    s.get("tree_max_depth", config.experiment.tree.max_depth);
    s.get("tree_min_leaf", config.experiment.tree.min_leaf);
    s.get("rf_trees", config.experiment.forest.n_trees);
    s.get("svm_epochs", config.experiment.svm.epochs);
    s.get("svm_learning_rate", config.experiment.svm.learning_rate);
    s.get("svm_reg", config.experiment.svm.reg);
    s.done();
  }
  if (auto* j = root.table("statement_types")) {
    Section s(*j, "statement_types");
    for (StatementType t : kAllStatementTypes) {
      const std::string name(to_string(t));
      auto* tj = s.table(name);
      if (!tj) continue;
      Section ts(*tj, "statement_types." + name);
      auto& p = config.patterns[t];
      if (auto v = ts.strings("keywords")) p.keywords = {v->begin(), v->end()};
      if (auto v = ts.strings("words")) p.words = {v->begin(), v->end()};
      if (auto v = ts.strings("call_prefixes")) p.call_prefixes = {v->begin(), v->end()};
      ts.get("any_literal", p.any_literal);
      ts.done();
    }
    s.done();
  }
  root.done();
  validate_config(config.siamese);
  config.propagate();
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  apply_config(config, parse_toml(buf.str()));
  return config;
}

}  // namespace flaketype
