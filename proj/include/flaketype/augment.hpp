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

// Oversampling by mutation of flakiness-irrelevant code elements: local
// variable names and string/number/boolean literals. Method names, field
// accesses and API calls are left alone.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "flaketype/corpus.hpp"
#include "flaketype/error.hpp"
#include "flaketype/javatok.hpp"
#include "flaketype/random.hpp"
#include "flaketype/wordlist.hpp"

namespace flaketype {

struct AugmentationConfig {
  std::size_t copies_per_test = 2;
  std::uint64_t seed = 0;
  std::vector<std::string> wordlist = default_wordlist();
  // Per-category total size (originals plus copies). Categories listed here
  // ignore copies_per_test.
  std::map<Category, std::size_t> targets;
};

struct AugmentedTest {
  FlakyTest test;
  std::map<std::string, std::string> renames;
  std::size_t mutations = 0;  // 0 means nothing mutable was found
};

namespace augment_detail {

inline bool is_primitive(const Token& t) {
  static constexpr std::string_view kPrimitives[] = {
      "int", "long", "short", "byte", "char", "boolean", "float", "double"};
  return t.kind == TokenKind::kKeyword &&
         std::find(std::begin(kPrimitives), std::end(kPrimitives), t.text) !=
             std::end(kPrimitives);
}

inline bool is_punct(const Token& t, std::string_view s) {
  return t.kind == TokenKind::kPunct && t.text == s;
}
inline bool is_op(const Token& t, std::string_view s) {
  return t.kind == TokenKind::kOperator && t.text == s;
}

// Walks back over a type ending at `end` (inclusive). Returns the index of
// the type's first token, or nullopt when the tokens cannot form a type.
inline std::optional<std::size_t> type_start(const std::vector<Token>& toks,
                                             std::size_t end) {
  std::size_t i = end;
  while (i >= 1 && is_punct(toks[i], "]") && is_punct(toks[i - 1], "[")) {
    if (i < 2) return std::nullopt;
    i -= 2;
  }
  if (toks[i].kind == TokenKind::kOperator &&
      (toks[i].text == ">" || toks[i].text == ">>" || toks[i].text == ">>>")) {
    int depth = 0;
    for (;; --i) {
      const Token& t = toks[i];
      if (t.kind == TokenKind::kOperator && t.text.find_first_not_of('>') ==
                                                std::string::npos) {
        depth += static_cast<int>(t.text.size());
      } else if (is_op(t, "<")) {
        --depth;
        if (depth == 0) break;
      } else if (!(t.kind == TokenKind::kIdentifier || is_primitive(t) ||
                   is_punct(t, ".") || is_punct(t, ",") || is_op(t, "?") ||
                   is_op(t, "&") || is_punct(t, "[") || is_punct(t, "]") ||
                   (t.kind == TokenKind::kKeyword &&
                    (t.text == "extends" || t.text == "super")))) {
        return std::nullopt;
      }
      if (i == 0) return std::nullopt;
    }
    if (i == 0) return std::nullopt;
    --i;  // token before '<' is the raw type name
    if (toks[i].kind != TokenKind::kIdentifier) return std::nullopt;
  } else if (!(toks[i].kind == TokenKind::kIdentifier || is_primitive(toks[i]))) {
    return std::nullopt;
  }
  while (i >= 2 && is_punct(toks[i - 1], ".") &&
         toks[i - 2].kind == TokenKind::kIdentifier) {
    i -= 2;
  }
  return i;
}

inline bool ends_declarator(const Token& t) {
  return is_op(t, "=") || is_punct(t, ";") || is_punct(t, ",") ||
         is_op(t, ":") || is_punct(t, ")");
}

}  // namespace augment_detail

// Names introduced by local declarations: `Type name =`, `Type name;`,
// additional declarators after a comma, for-each variables, catch and lambda
// parameters. Returned in order of first declaration.
inline std::vector<std::string> local_declarations(
    const std::vector<Token>& toks) {
  using namespace augment_detail;
  std::vector<std::string> names;
  std::set<std::string> seen;
  auto add = [&](const std::string& n) {
    if (seen.insert(n).second) names.push_back(n);
  };
  const std::size_t n = toks.size();
  for (std::size_t i = 1; i < n; ++i) {
    const Token& t = toks[i];
    if (t.kind != TokenKind::kIdentifier) continue;
    const bool has_next = i + 1 < n;

    // Untyped lambda parameter: `x ->`.
    if (has_next && is_op(toks[i + 1], "->")) {
      const Token& prev = toks[i - 1];
      if (is_punct(prev, "(") || is_punct(prev, ",") || is_op(prev, "=") ||
          is_punct(prev, ";") || is_punct(prev, "{")) {
        add(t.text);
        continue;
      }
    }
    if (!has_next || !ends_declarator(toks[i + 1])) continue;
    if (is_punct(toks[i - 1], ".")) continue;
    auto start = type_start(toks, i - 1);
    if (!start) continue;
    if (*start > 0 && (is_punct(toks[*start - 1], ".") ||
                       is_op(toks[*start - 1], "::"))) {
      continue;
    }
    add(t.text);

    // Further declarators of the same declaration: `, name =|;|,`.
    int nest = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Token& u = toks[j];
      if (is_punct(u, "(") || is_punct(u, "[") || is_punct(u, "{")) {
        ++nest;
      } else if (is_punct(u, ")") || is_punct(u, "]") || is_punct(u, "}")) {
        if (nest == 0) break;
        --nest;
      } else if (nest == 0 && is_punct(u, ";")) {
        break;
      } else if (nest == 0 && is_punct(u, ",") && j + 2 < n &&
                 toks[j + 1].kind == TokenKind::kIdentifier &&
                 (is_op(toks[j + 2], "=") || is_punct(toks[j + 2], ";") ||
                  is_punct(toks[j + 2], ","))) {
        add(toks[j + 1].text);
      }
    }
  }
  // Parenthesised untyped lambda parameters: `(a, b) ->`.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(is_punct(toks[i], ")") && is_op(toks[i + 1], "->"))) continue;
    std::vector<std::string> params;
    std::size_t j = i;
    bool ok = true;
    while (j > 0) {
      --j;
      if (is_punct(toks[j], "(")) break;
      if (toks[j].kind == TokenKind::kIdentifier) {
        params.push_back(toks[j].text);
      } else if (!is_punct(toks[j], ",")) {
        ok = false;
        break;
      }
    }
    if (!ok || !is_punct(toks[j], "(")) continue;
    for (auto it = params.rbegin(); it != params.rend(); ++it) add(*it);
  }
  return names;
}

namespace augment_detail {

inline std::string random_digits(Rng& rng, std::size_t count, int base,
                                 bool nonzero_first) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t k = 0; k < count; ++k) {
    int lo = (k == 0 && nonzero_first && count > 1) ? 1 : 0;
    out.push_back(kDigits[uniform_int(rng, lo, base - 1)]);
  }
  return out;
}

inline std::size_t count_digits(std::string_view s, int base) {
  std::size_t n = 0;
  for (char c : s) {
    if (c == '_') continue;
    if (base == 16 ? std::isxdigit(static_cast<unsigned char>(c)) != 0
                   : (c >= '0' && c < static_cast<char>('0' + base))) {
      ++n;
    }
  }
  return n;
}

// A random number literal of the same lexical shape: radix prefix, integer
// or floating form, exponent and type suffix are preserved.
inline std::string mutate_number(std::string_view lit, Rng& rng) {
  std::string_view body = lit;
  std::string suffix;
  const bool hex = body.size() > 2 && body[0] == '0' &&
                   (body[1] == 'x' || body[1] == 'X');
  if (!body.empty()) {
    char last = body.back();
    bool is_suffix = hex ? (last == 'l' || last == 'L')
                         : std::string_view("lLfFdD").find(last) !=
                               std::string_view::npos;
    if (is_suffix) {
      suffix = std::string(1, last);
      body.remove_suffix(1);
    }
  }
  const bool long_suffix = suffix == "l" || suffix == "L";
  const std::size_t cap = long_suffix ? 18 : 9;
  if (hex) {
    if (body.find_first_of(".pP") != std::string_view::npos) {
      return std::string(lit);  // hex floating point: left alone
    }
    std::size_t n = std::min(count_digits(body.substr(2), 16), long_suffix ? std::size_t{15} : std::size_t{7});
    return std::string(body.substr(0, 2)) +
           random_digits(rng, std::max<std::size_t>(n, 1), 16, false) + suffix;
  }
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'b' || body[1] == 'B')) {
    std::size_t n = std::min(count_digits(body.substr(2), 2), long_suffix ? std::size_t{62} : std::size_t{30});
    return std::string(body.substr(0, 2)) +
           random_digits(rng, std::max<std::size_t>(n, 1), 2, false) + suffix;
  }
  const bool floating = body.find_first_of(".eE") != std::string_view::npos ||
                        suffix == "f" || suffix == "F" || suffix == "d" ||
                        suffix == "D";
  if (!floating) {
    if (body.size() > 1 && body[0] == '0') {
      std::size_t n = std::min(count_digits(body.substr(1), 8), cap - 1);
      return "0" + random_digits(rng, std::max<std::size_t>(n, 1), 8, false) +
             suffix;
    }
    std::size_t n = std::min(count_digits(body, 10), cap);
    return random_digits(rng, std::max<std::size_t>(n, 1), 10, true) + suffix;
  }
  // Floating: mantissa digits are replaced, exponent kept.
  std::size_t exp_pos = body.find_first_of("eE");
  std::string_view mantissa = body.substr(0, exp_pos);
  std::string exponent =
      exp_pos == std::string_view::npos ? "" : std::string(body.substr(exp_pos));
  std::size_t dot = mantissa.find('.');
  std::string int_part(mantissa.substr(0, dot));
  std::string out = int_part.empty()
                        ? ""
                        : random_digits(rng, count_digits(int_part, 10), 10, true);
  if (dot != std::string_view::npos) {
    out += '.';
    std::size_t frac = count_digits(mantissa.substr(dot + 1), 10);
    out += random_digits(rng, frac, 10, false);
  }
  return out + exponent + suffix;
}

inline std::string random_phrase(Rng& rng, const std::vector<std::string>& words) {
  std::size_t count = static_cast<std::size_t>(uniform_int(rng, 1, 3));
  std::string out;
  for (std::size_t k = 0; k < count; ++k) {
    if (k) out += ' ';
    out += words[uniform_index(rng, words.size())];
  }
  return out;
}

inline bool is_identifier_word(const std::string& w) {
  if (w.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(w[0]))) return false;
  for (char c : w) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace augment_detail

// Returns a mutated copy of an original test. Deterministic in
// (config.seed, test.id, copy_index).
inline AugmentedTest augment_test(const FlakyTest& test,
                                  const AugmentationConfig& config,
                                  std::size_t copy_index) {
  using namespace augment_detail;
  if (!test.is_original()) {
    throw usage_error("cannot augment '" + test.id +
                      "': it is already an augmented copy");
  }
  std::vector<std::string> words;
  for (const auto& w : config.wordlist) {
    if (is_identifier_word(w)) words.push_back(w);
  }
  if (words.empty()) throw usage_error("augmentation wordlist is empty");

  Rng rng = make_rng(derive_seed(config.seed, test.id, copy_index));
  const std::vector<Token> toks = tokenize(test.code);

  std::unordered_set<std::string> taken;
  for (const auto& t : toks) {
    if (t.kind == TokenKind::kIdentifier) taken.insert(t.text);
  }
  AugmentedTest out;
  for (const auto& name : local_declarations(toks)) {
    std::string fresh;
    for (int attempt = 0; attempt < 64; ++attempt) {
      fresh = words[uniform_index(rng, words.size())];
      if (attempt >= 8) {
        std::string second = words[uniform_index(rng, words.size())];
        second[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(second[0])));
        fresh += second;
      }
      if (attempt >= 32) fresh += std::to_string(attempt);
      if (!taken.count(fresh) &&
          tokenize(fresh).front().kind == TokenKind::kIdentifier) {
        break;
      }
    }
    taken.insert(fresh);
    out.renames.emplace(name, fresh);
  }

  std::string code;
  code.reserve(test.code.size() + 32);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    std::optional<std::string> replacement;
    switch (t.kind) {
      case TokenKind::kIdentifier: {
        auto it = out.renames.find(t.text);
        if (it == out.renames.end()) break;
        bool member = i > 0 && (is_punct(toks[i - 1], ".") ||
                                is_op(toks[i - 1], "::") ||
                                is_punct(toks[i - 1], "@"));
        bool call = i + 1 < toks.size() && is_punct(toks[i + 1], "(");
        if (!member && !call) replacement = it->second;
        break;
      }
      case TokenKind::kStringLit:
        replacement = "\"" + random_phrase(rng, words) + "\"";
        break;
      case TokenKind::kNumberLit:
        replacement = mutate_number(t.text, rng);
        break;
      case TokenKind::kBoolLit:
        replacement = coin_flip(rng) ? (t.text == "true" ? "false" : "true")
                                     : t.text;
        break;
      default:
        break;
    }
    if (!replacement) continue;
    code.append(test.code, pos, t.span.start - pos);
    code += *replacement;
    pos = t.span.end;
    ++out.mutations;
  }
  code.append(test.code, pos, std::string::npos);

  out.test = test;
  out.test.id = test.id + "#aug" + std::to_string(copy_index);
  out.test.code = std::move(code);
  out.test.augmented_from = test.id;
  return out;
}

// Number of copies for each original, in input order.
inline std::vector<std::size_t> copy_plan(const std::vector<FlakyTest>& tests,
                                          const AugmentationConfig& config) {
  std::map<Category, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    members[tests[i].category].push_back(i);
  }
  std::vector<std::size_t> plan(tests.size(), config.copies_per_test);
  for (const auto& [category, idx] : members) {
    auto target = config.targets.find(category);
    if (target == config.targets.end()) continue;
    if (target->second < idx.size()) {
      throw usage_error("augmentation target for " +
                        std::string(to_string(category)) + " (" +
                        std::to_string(target->second) +
                        ") is below its original count (" +
                        std::to_string(idx.size()) + ")");
    }
    std::size_t copies = target->second - idx.size();
    std::size_t base = copies / idx.size();
    std::size_t extra = copies % idx.size();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      plan[idx[k]] = base + (k < extra ? 1 : 0);
    }
  }
  return plan;
}

// originals ++ copies, copies grouped by original in input order.
inline std::vector<FlakyTest> augment_corpus(const std::vector<FlakyTest>& tests,
                                             const AugmentationConfig& config) {
  for (const auto& t : tests) {
    if (!t.is_original()) {
      throw usage_error("augment_corpus expects original tests only; '" +
                        t.id + "' is augmented");
    }
  }
  std::vector<std::size_t> plan = copy_plan(tests, config);
  std::vector<FlakyTest> out = tests;
  std::unordered_set<std::string> ids;
  for (const auto& t : tests) ids.insert(t.id);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    for (std::size_t c = 0; c < plan[i]; ++c) {
      AugmentedTest aug = augment_test(tests[i], config, c);
      if (!ids.insert(aug.test.id).second) {
        throw internal_error("augmentation produced duplicate id '" +
                             aug.test.id + "'");
      }
      out.push_back(std::move(aug.test));
    }
  }
  return out;
}

// Parses "AsyncWaits=285,Time=105".
inline std::map<Category, std::size_t> parse_targets(std::string_view spec) {
  std::map<Category, std::size_t> out;
  while (!spec.empty()) {
    std::size_t comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view() : spec.substr(comma + 1);
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw usage_error("bad target '" + std::string(item) +
                        "', expected Category=count");
    }
    auto c = parse_category(item.substr(0, eq));
    if (!c) throw usage_error("unknown category '" + std::string(item.substr(0, eq)) + "'");
    std::string count(item.substr(eq + 1));
    if (count.empty() || count.find_first_not_of("0123456789") != std::string::npos) {
      throw usage_error("bad target count '" + count + "'");
    }
    out[*c] = std::stoul(count);
  }
  return out;
}

}  // namespace flaketype
