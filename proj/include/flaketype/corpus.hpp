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

// Labeled flaky-test corpus: JSONL loading/saving, comment stripping and
// category selection.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flaketype/category.hpp"
#include "flaketype/error.hpp"

namespace flaketype {

enum class Origin { kLuo, kTse22, kNew };

inline std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::kLuo: return "luo";
    case Origin::kTse22: return "tse22";
    case Origin::kNew: return "new";
  }
  return "new";
}

inline std::optional<Origin> parse_origin(std::string_view s) {
  if (s == "luo") return Origin::kLuo;
  if (s == "tse22") return Origin::kTse22;
  if (s == "new") return Origin::kNew;
  return std::nullopt;
}

struct FlakyTest {
  std::string id;
  std::string project_url;
  std::string test_name;
  std::string file_path;
  std::string code;
  Category category = Category::kAsyncWaits;
  Origin origin = Origin::kNew;
  std::optional<std::string> augmented_from;

  bool is_original() const { return !augmented_from.has_value(); }
};

// Removes `//` and `/* */` comments. String, character and text-block
// literals are copied verbatim. An unterminated block comment runs to the
// end of the input.
inline std::string strip_comments(std::string_view code) {
  std::string out;
  out.reserve(code.size());
  const std::size_t n = code.size();
  std::size_t i = 0;
  while (i < n) {
    char c = code[i];
    if (c == '/' && i + 1 < n && code[i + 1] == '/') {
      i += 2;
      while (i < n && code[i] != '\n' && code[i] != '\r') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && code[i + 1] == '*') {
      std::size_t end = code.find("*/", i + 2);
      i = end == std::string_view::npos ? n : end + 2;
      continue;
    }
    if (c == '"' && code.substr(i, 3) == "\"\"\"") {
      std::size_t end = code.find("\"\"\"", i + 3);
      std::size_t stop = end == std::string_view::npos ? n : end + 3;
      out.append(code.substr(i, stop - i));
      i = stop;
      continue;
    }
    if (c == '"' || c == '\'') {
      // Literal ends at the matching quote or, if unterminated, the line.
      std::size_t j = i + 1;
      while (j < n && code[j] != c && code[j] != '\n') {
        j += code[j] == '\\' ? 2 : 1;
      }
      std::size_t stop = std::min(n, j < n && code[j] == c ? j + 1 : j);
      out.append(code.substr(i, stop - i));
      i = stop;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

namespace corpus_detail {

inline bool is_blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\f') {
      return false;
    }
  }
  return true;
}

inline std::string required_string(const nlohmann::json& obj,
                                   const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw data_error("line " + std::to_string(line) + ": missing field '" +
                     field + "'");
  }
  return it->get<std::string>();
}

}  // namespace corpus_detail

inline nlohmann::json to_json(const FlakyTest& t) {
  nlohmann::json j;
  j["id"] = t.id;
  j["project_url"] = t.project_url;
  j["test_name"] = t.test_name;
  j["file_path"] = t.file_path;
  j["code"] = t.code;
  j["category"] = std::string(to_string(t.category));
  j["origin"] = std::string(to_string(t.origin));
  if (t.augmented_from) {
    j["augmented_from"] = *t.augmented_from;
  } else {
    j["augmented_from"] = nullptr;
  }
  return j;
}

// Parses one corpus record. `line` is 1-based and only used in messages.
inline FlakyTest flaky_test_from_json(const nlohmann::json& j,
                                      std::size_t line) {
  using corpus_detail::required_string;
  if (!j.is_object()) {
    throw data_error("line " + std::to_string(line) + ": not a JSON object");
  }
  FlakyTest t;
  t.id = required_string(j, "id", line);
  t.project_url = required_string(j, "project_url", line);
  t.test_name = required_string(j, "test_name", line);
  t.file_path = required_string(j, "file_path", line);
  std::string category = required_string(j, "category", line);
  auto parsed = parse_category(category);
  if (!parsed) {
    throw data_error("line " + std::to_string(line) +
                     ": unknown category '" + category + "'");
  }
  t.category = *parsed;
  std::string origin = required_string(j, "origin", line);
  auto parsed_origin = parse_origin(origin);
  if (!parsed_origin) {
    throw data_error("line " + std::to_string(line) + ": unknown origin '" +
                     origin + "'");
  }
  t.origin = *parsed_origin;
  if (auto it = j.find("augmented_from"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw data_error("line " + std::to_string(line) +
                       ": augmented_from must be a string or null");
    }
    t.augmented_from = it->get<std::string>();
  }
  t.code = strip_comments(required_string(j, "code", line));
  if (corpus_detail::is_blank(t.code)) {
    throw data_error("line " + std::to_string(line) + ": test '" + t.id +
                     "' has no code after comment stripping");
  }
  return t;
}

// Checks id uniqueness and that lineage references exist and have depth 1.
inline void validate_corpus(const std::vector<FlakyTest>& tests) {
  std::unordered_map<std::string_view, const FlakyTest*> by_id;
  by_id.reserve(tests.size());
  for (const auto& t : tests) {
    if (!by_id.emplace(t.id, &t).second) {
      throw data_error("duplicate id '" + t.id + "'");
    }
  }
  for (const auto& t : tests) {
    if (!t.augmented_from) continue;
    auto it = by_id.find(*t.augmented_from);
    if (it == by_id.end()) {
      throw data_error("test '" + t.id + "' augmented from unknown id '" +
                       *t.augmented_from + "'");
    }
    if (!it->second->is_original()) {
      throw data_error("test '" + t.id + "' augmented from '" +
                       *t.augmented_from + "', which is itself augmented");
    }
  }
}

inline std::vector<FlakyTest> read_corpus(std::istream& in) {
  std::vector<FlakyTest> tests;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (corpus_detail::is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw data_error("line " + std::to_string(line_no) +
                       ": malformed JSON (" + e.what() + ")");
    }
    tests.push_back(flaky_test_from_json(j, line_no));
  }
  validate_corpus(tests);
  return tests;
}

inline std::vector<FlakyTest> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open corpus file '" + path + "'");
  return read_corpus(in);
}

inline void write_corpus(std::ostream& out,
                         const std::vector<FlakyTest>& tests) {
  for (const auto& t : tests) out << to_json(t).dump() << '\n';
}

inline void save_corpus(const std::string& path,
                        const std::vector<FlakyTest>& tests) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write corpus file '" + path + "'");
  write_corpus(out, tests);
}

struct CorpusStats {
  std::array<std::size_t, kNumCategories> original{};
  std::array<std::size_t, kNumCategories> augmented{};

  std::size_t total() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < kNumCategories; ++i) {
      n += original[i] + augmented[i];
    }
    return n;
  }
};

inline CorpusStats corpus_stats(const std::vector<FlakyTest>& tests) {
  CorpusStats s;
  for (const auto& t : tests) {
    auto& bucket = t.is_original() ? s.original : s.augmented;
    ++bucket[index_of(t.category)];
  }
  return s;
}

// Aligned text table; categories with no members are omitted.
inline std::string format_stats(const CorpusStats& s) {
  std::ostringstream out;
  out << "category               original  augmented  total\n";
  std::size_t orig_sum = 0;
  std::size_t aug_sum = 0;
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    if (s.original[i] + s.augmented[i] == 0) continue;
    std::string name(kCategoryNames[i]);
    name.resize(21, ' ');
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  %8zu  %9zu  %5zu\n", s.original[i],
                  s.augmented[i], s.original[i] + s.augmented[i]);
    out << name << buf;
    orig_sum += s.original[i];
    aug_sum += s.augmented[i];
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-21s  %8zu  %9zu  %5zu\n", "total",
                orig_sum, aug_sum, orig_sum + aug_sum);
  out << buf;
  return out.str();
}

struct FilterResult {
  std::vector<FlakyTest> tests;
  std::set<Category> categories;
};

// Keeps categories with at least `min_count` original members that are not
// excluded. Augmented tests follow their category.
inline FilterResult filter_categories(const std::vector<FlakyTest>& tests,
                                      std::size_t min_count,
                                      const std::set<Category>& excluded) {
  if (min_count < 1) throw usage_error("min_count must be >= 1");
  auto stats = corpus_stats(tests);
  FilterResult result;
  for (Category c : kAllCategories) {
    if (excluded.count(c)) continue;
    if (stats.original[index_of(c)] >= min_count) result.categories.insert(c);
  }
  if (result.categories.size() < 2) {
    throw data_error("insufficient classes: " +
                     std::to_string(result.categories.size()) +
                     " categories meet min_count=" + std::to_string(min_count));
  }
  for (const auto& t : tests) {
    if (result.categories.count(t.category)) result.tests.push_back(t);
  }
  return result;
}

}  // namespace flaketype
