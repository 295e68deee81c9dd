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

// Lexical analysis of Java test methods: tokens, statements and heuristic
// statement types. Input is expected to be comment-free.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "flaketype/error.hpp"

namespace flaketype {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kStringLit,
  kCharLit,
  kNumberLit,
  kBoolLit,
  kOperator,
  kPunct,
};

struct Token {
  TokenKind kind;
  std::string text;
  Span span;

  bool is(TokenKind k, std::string_view t) const {
    return kind == k && text == t;
  }
  bool is_literal() const {
    return kind == TokenKind::kStringLit || kind == TokenKind::kCharLit ||
           kind == TokenKind::kNumberLit || kind == TokenKind::kBoolLit;
  }
};

struct Diagnostic {
  std::size_t offset;
  std::string message;
};

namespace javatok_detail {

inline const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> kKeywords = {
      "abstract",   "assert",       "boolean",   "break",      "byte",
      "case",       "catch",        "char",      "class",      "const",
      "continue",   "default",      "do",        "double",     "else",
      "enum",       "extends",      "final",     "finally",    "float",
      "for",        "goto",         "if",        "implements", "import",
      "instanceof", "int",          "interface", "long",       "native",
      "new",        "package",      "private",   "protected",  "public",
      "return",     "short",        "static",    "strictfp",   "super",
      "switch",     "synchronized", "this",      "throw",      "throws",
      "transient",  "try",          "void",      "volatile",   "while",
      "null",
  };
  return kKeywords;
}

// Longest first.
inline constexpr std::string_view kOperators[] = {
    ">>>=", "<<=", ">>=", ">>>", "->", "::", "++", "--", "&&", "||", "==",
    "!=",   "<=",  ">=",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "<<",   ">>",  "+",   "-",   "*",  "/",  "%",  "=",  "<",  ">",  "!",
    "~",    "?",   ":",   "&",   "|",  "^",
};

inline bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
inline bool is_ident_part(unsigned char c) {
  return is_ident_start(c) || std::isdigit(c);
}
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

inline std::size_t scan_number(std::string_view s, std::size_t i) {
  const std::size_t n = s.size();
  auto digits = [&](auto pred) {
    while (i < n && (pred(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
      ++i;
    }
  };
  auto is_dec = [](unsigned char c) { return std::isdigit(c) != 0; };
  auto is_hex = [](unsigned char c) { return std::isxdigit(c) != 0; };
  if (s[i] == '0' && i + 1 < n && (s[i + 1] == 'x' || s[i + 1] == 'X')) {
    i += 2;
    digits(is_hex);
    if (i < n && s[i] == '.') {
      ++i;
      digits(is_hex);
    }
    if (i < n && (s[i] == 'p' || s[i] == 'P')) {
      ++i;
      if (i < n && (s[i] == '+' || s[i] == '-')) ++i;
      digits(is_dec);
    }
  } else if (s[i] == '0' && i + 1 < n && (s[i + 1] == 'b' || s[i + 1] == 'B')) {
    i += 2;
    digits([](unsigned char c) { return c == '0' || c == '1'; });
  } else {
    digits(is_dec);
    if (i < n && s[i] == '.' && i + 1 < n &&
        std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      ++i;
      digits(is_dec);
    } else if (i < n && s[i] == '.' &&
               !(i + 1 < n && is_ident_start(static_cast<unsigned char>(s[i + 1])))) {
      ++i;  // "1." is a double literal; "1.foo" is not a number.
    }
    if (i < n && (s[i] == 'e' || s[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < n && (s[j] == '+' || s[j] == '-')) ++j;
      if (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) {
        i = j;
        digits(is_dec);
      }
    }
  }
  if (i < n && std::string_view("lLfFdD").find(s[i]) != std::string_view::npos) {
    ++i;
  }
  return i;
}

}  // namespace javatok_detail

// Splits Java source into tokens. Never fails: unterminated literals end at
// the line break and are reported through `diagnostics` when provided.
// Characters outside the Java lexicon become single-character punct tokens.
inline std::vector<Token> tokenize(std::string_view code,
                                   std::vector<Diagnostic>* diagnostics = nullptr) {
  using namespace javatok_detail;
  std::vector<Token> tokens;
  const std::size_t n = code.size();
  std::size_t i = 0;
  auto emit = [&](TokenKind kind, std::size_t start, std::size_t end) {
    tokens.push_back({kind, std::string(code.substr(start, end - start)),
                      {start, end}});
  };
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(code[i]);
    if (is_space(code[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_part(static_cast<unsigned char>(code[i]))) ++i;
      std::string_view word = code.substr(start, i - start);
      TokenKind kind = TokenKind::kIdentifier;
      if (word == "true" || word == "false") {
        kind = TokenKind::kBoolLit;
      } else if (keywords().count(word)) {
        kind = TokenKind::kKeyword;
      }
      emit(kind, start, i);
      continue;
    }
    if (std::isdigit(c) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(code[i + 1])))) {
      i = scan_number(code, i);
      emit(TokenKind::kNumberLit, start, i);
      continue;
    }
    if (c == '"' && code.substr(i, 3) == "\"\"\"") {
      std::size_t end = code.find("\"\"\"", i + 3);
      if (end == std::string_view::npos) {
        if (diagnostics) {
          diagnostics->push_back({start, "unterminated text block"});
        }
        i = n;
      } else {
        i = end + 3;
      }
      emit(TokenKind::kStringLit, start, i);
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && code[j] != static_cast<char>(c) && code[j] != '\n' &&
             code[j] != '\r') {
        j += code[j] == '\\' ? 2 : 1;
      }
      j = std::min(j, n);
      bool closed = j < n && code[j] == static_cast<char>(c);
      if (closed) {
        ++j;
      } else if (diagnostics) {
        diagnostics->push_back(
            {start, c == '"' ? "unterminated string literal"
                             : "unterminated character literal"});
      }
      // Trailing whitespace before the line break is not part of the token.
      std::size_t end = j;
      if (!closed) {
        while (end > start + 1 && is_space(code[end - 1])) --end;
      }
      emit(c == '"' ? TokenKind::kStringLit : TokenKind::kCharLit, start, end);
      i = j;
      continue;
    }
    if (c == '.' && code.substr(i, 3) == "...") {
      emit(TokenKind::kPunct, i, i + 3);
      i += 3;
      continue;
    }
    if (std::string_view("(){}[];,.@").find(static_cast<char>(c)) !=
        std::string_view::npos) {
      emit(TokenKind::kPunct, i, i + 1);
      ++i;
      continue;
    }
    bool matched = false;
    for (std::string_view op : kOperators) {
      if (code.substr(i, op.size()) == op) {
        emit(TokenKind::kOperator, i, i + op.size());
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    // Unknown byte (for example a stray backslash); keep the input covered.
    emit(TokenKind::kPunct, i, i + 1);
    ++i;
  }
  return tokens;
}

// One segmentation unit. `span` covers the statement's own text; braces that
// merely attach to it (a closing `}` or a bare block `{`) are listed in
// `attached` so that every non-whitespace character is owned by exactly one
// statement, while ablation can delete `span` and leave block structure
// intact.
struct Statement {
  std::string text;
  Span span;
  int depth = 0;
  std::vector<Span> attached;
};

enum class StatementType {
  kControlFlow,
  kAsserts,
  kThreads,
  kConstants,
  kWaits,
  kTimeRelated,
  kExternalApiCalls,
  kNewInstances,
};

inline constexpr std::size_t kNumStatementTypes = 8;

inline constexpr std::array<StatementType, kNumStatementTypes>
    kAllStatementTypes = {
        StatementType::kControlFlow, StatementType::kAsserts,
        StatementType::kThreads,     StatementType::kConstants,
        StatementType::kWaits,       StatementType::kTimeRelated,
        StatementType::kExternalApiCalls, StatementType::kNewInstances,
};

inline constexpr std::array<std::string_view, kNumStatementTypes>
    kStatementTypeNames = {
        "ControlFlow", "Asserts",     "Threads",          "Constants",
        "Waits",       "TimeRelated", "ExternalApiCalls", "NewInstances",
};

constexpr std::string_view to_string(StatementType t) {
  return kStatementTypeNames[static_cast<std::size_t>(t)];
}

inline std::optional<StatementType> parse_statement_type(std::string_view s) {
  for (std::size_t i = 0; i < kNumStatementTypes; ++i) {
    if (kStatementTypeNames[i] == s) return kAllStatementTypes[i];
  }
  return std::nullopt;
}

namespace javatok_detail {

inline bool is_header_keyword(std::string_view w) {
  static constexpr std::string_view kHeaders[] = {
      "if",    "for",     "while",   "do",           "switch", "try",
      "catch", "finally", "else",    "synchronized",
  };
  return std::find(std::begin(kHeaders), std::end(kHeaders), w) !=
         std::end(kHeaders);
}

inline bool is_assignment_op(std::string_view op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" ||
         op == "%=" || op == "&=" || op == "|=" || op == "^=" || op == "<<=" ||
         op == ">>=" || op == ">>>=";
}

}  // namespace javatok_detail

// Splits a method (or method body) into statements.
//
// Rules: a `;` outside parentheses ends a statement, so `for(;;)` headers
// stay whole. A `{` outside parentheses ends a header statement (control
// keywords, method signatures, class-like declarations) unless the pending
// statement is an expression (assignment, `new`, lambda arrow, `return`,
// `throw`), in which case the braces stay inside that statement. A `}` or a
// bare `{` attaches to the preceding statement, or to the next one when
// nothing precedes it.
inline std::vector<Statement> segment_statements(
    std::string_view code, std::vector<Diagnostic>* diagnostics = nullptr) {
  using namespace javatok_detail;
  const std::vector<Token> tokens = tokenize(code, diagnostics);
  std::vector<Statement> out;

  int depth = 0;          // block depth from headers and bare braces
  int paren = 0;          // () and [] nesting inside the pending statement
  int inline_braces = 0;  // {} nesting owned by the pending statement
  std::optional<std::size_t> first;  // first token of pending statement
  std::size_t last = 0;              // last token of pending statement
  bool expression = false;
  int pending_depth = 0;
  std::vector<Span> orphan_braces;  // braces seen before any statement

  auto attach = [&](Span s) {
    if (out.empty()) {
      orphan_braces.push_back(s);
    } else {
      out.back().attached.push_back(s);
    }
  };
  auto flush = [&]() {
    if (!first) return;
    Statement st;
    st.span = {tokens[*first].span.start, tokens[last].span.end};
    st.text = std::string(code.substr(st.span.start, st.span.size()));
    st.depth = pending_depth;
    st.attached = std::move(orphan_braces);
    orphan_braces.clear();
    out.push_back(std::move(st));
    first.reset();
    paren = 0;
    inline_braces = 0;
    expression = false;
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    const bool punct = t.kind == TokenKind::kPunct;
    if (!first) {
      if (punct && t.text == "}") {
        if (depth == 0) {
          if (diagnostics) {
            diagnostics->push_back({t.span.start, "unbalanced closing brace"});
          }
        } else {
          --depth;
        }
        attach(t.span);
        continue;
      }
      if (punct && t.text == "{") {
        attach(t.span);
        ++depth;
        continue;
      }
      if (punct && t.text == ";") {
        // Empty statement; keep it owned by a neighbour.
        attach(t.span);
        continue;
      }
      first = i;
      pending_depth = depth;
      if (t.kind == TokenKind::kKeyword &&
          (t.text == "return" || t.text == "throw")) {
        expression = true;
      }
    }
    last = i;

    if (punct && (t.text == "(" || t.text == "[")) {
      ++paren;
      continue;
    }
    if (punct && (t.text == ")" || t.text == "]")) {
      if (paren > 0) --paren;
      continue;
    }
    if (paren > 0) continue;

    if (t.kind == TokenKind::kOperator &&
        (is_assignment_op(t.text) || t.text == "->")) {
      expression = true;
    } else if (t.is(TokenKind::kKeyword, "new")) {
      expression = true;
    }

    if (punct && t.text == "{") {
      const Token& head = tokens[*first];
      bool header = head.kind == TokenKind::kKeyword &&
                    is_header_keyword(head.text);
      if (inline_braces > 0 || (expression && !header)) {
        ++inline_braces;
        continue;
      }
      flush();
      ++depth;
      continue;
    }
    if (punct && t.text == "}") {
      if (inline_braces > 0) {
        --inline_braces;
        continue;
      }
      // A closing brace while a statement is pending: the statement lacked a
      // terminator. Close it, then attach the brace.
      if (diagnostics) {
        diagnostics->push_back({t.span.start, "statement without terminator"});
      }
      last = i - 1;
      flush();
      if (depth == 0) {
        if (diagnostics) {
          diagnostics->push_back({t.span.start, "unbalanced closing brace"});
        }
      } else {
        --depth;
      }
      attach(t.span);
      continue;
    }
    if (punct && t.text == ";" && inline_braces == 0) {
      flush();
      continue;
    }
  }
  if (first) {
    if (inline_braces > 0 && diagnostics) {
      diagnostics->push_back({code.size(), "unclosed brace in statement"});
    }
    flush();
  }
  if (depth > 0 && diagnostics) {
    diagnostics->push_back({code.size(), "unbalanced opening brace"});
  }
  if (!orphan_braces.empty()) {
    // Input with braces but no statements: a brace-only statement.
    Statement st;
    st.span = orphan_braces.front();
    st.text = std::string(code.substr(st.span.start, st.span.size()));
    st.attached.assign(orphan_braces.begin() + 1, orphan_braces.end());
    out.push_back(std::move(st));
  }
  return out;
}

// Lower-case words of an identifier, split at camelCase humps, underscores
// and digits: "HTTPServer2_port" -> {"http", "server", "port"}.
inline std::vector<std::string> split_identifier(std::string_view ident) {
  std::vector<std::string> words;
  std::string cur;
  auto push = [&]() {
    if (!cur.empty()) words.push_back(std::move(cur));
    cur.clear();
  };
  const std::size_t n = ident.size();
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char c = static_cast<unsigned char>(ident[i]);
    if (c == '_' || c == '$' || std::isdigit(c)) {
      push();
      continue;
    }
    if (std::isupper(c)) {
      bool prev_lower = i > 0 && std::islower(static_cast<unsigned char>(ident[i - 1]));
      bool next_lower = i + 1 < n && std::islower(static_cast<unsigned char>(ident[i + 1]));
      bool prev_upper = i > 0 && std::isupper(static_cast<unsigned char>(ident[i - 1]));
      if (prev_lower || (prev_upper && next_lower)) push();
      cur.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    cur.push_back(static_cast<char>(c));
  }
  push();
  return words;
}

// Pattern lists behind classify_statement. Each type matches when any rule
// fires on the statement's tokens.
struct TypePatterns {
  std::set<std::string, std::less<>> keywords;       // exact keyword tokens
  std::set<std::string, std::less<>> words;          // identifier words
  std::set<std::string, std::less<>> call_prefixes;  // `prefix...(`
  bool any_literal = false;
};

struct StatementPatterns {
  std::array<TypePatterns, kNumStatementTypes> types;

  TypePatterns& operator[](StatementType t) {
    return types[static_cast<std::size_t>(t)];
  }
  const TypePatterns& operator[](StatementType t) const {
    return types[static_cast<std::size_t>(t)];
  }

  static StatementPatterns defaults() {
    StatementPatterns p;
    p[StatementType::kControlFlow].keywords = {
        "if", "else", "for", "while", "do", "switch", "case", "break",
        "continue"};
    p[StatementType::kAsserts].keywords = {"assert"};
    p[StatementType::kAsserts].call_prefixes = {"assert", "verify", "expect"};
    p[StatementType::kThreads].keywords = {"synchronized"};
    p[StatementType::kThreads].words = {"thread", "threads", "runnable",
                                        "executor", "executors", "join",
                                        "interrupt"};
    p[StatementType::kConstants].any_literal = true;
    p[StatementType::kWaits].words = {"sleep", "wait", "await", "timeout",
                                      "awaitility"};
    p[StatementType::kTimeRelated].words = {
        "date",    "calendar", "instant",      "duration",     "time",
        "millis",  "nanos",    "clock",        "timezone",     "epoch",
        "nanoseconds", "microseconds", "milliseconds", "seconds",
        "minutes", "hours",    "days"};
    p[StatementType::kExternalApiCalls].words = {
        "http",   "https",   "socket", "port",       "url",    "uri",
        "file",   "files",   "path",   "paths",      "database", "db",
        "jdbc",   "sql",     "connection", "server", "client", "host",
        "network", "inet"};
    p[StatementType::kNewInstances].keywords = {"new"};
    return p;
  }
};

namespace javatok_detail {

inline bool istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace javatok_detail

inline std::set<StatementType> classify_tokens(
    const std::vector<Token>& tokens,
    const StatementPatterns& patterns = StatementPatterns::defaults()) {
  std::set<StatementType> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    const bool is_call = i + 1 < tokens.size() &&
                         tokens[i + 1].is(TokenKind::kPunct, "(");
    std::vector<std::string> words;
    if (t.kind == TokenKind::kIdentifier) words = split_identifier(t.text);
    for (StatementType type : kAllStatementTypes) {
      if (out.count(type)) continue;
      const TypePatterns& p = patterns[type];
      bool hit = false;
      if (t.is_literal()) {
        hit = p.any_literal;
      } else if (t.kind == TokenKind::kKeyword) {
        hit = p.keywords.count(t.text) > 0;
      } else if (t.kind == TokenKind::kIdentifier) {
        for (const auto& w : words) {
          if (p.words.count(w)) {
            hit = true;
            break;
          }
        }
        if (!hit && is_call) {
          for (const auto& prefix : p.call_prefixes) {
            if (javatok_detail::istarts_with(t.text, prefix)) {
              hit = true;
              break;
            }
          }
        }
      }
      if (hit) out.insert(type);
    }
  }
  return out;
}

inline std::set<StatementType> classify_statement(
    const Statement& stmt,
    const StatementPatterns& patterns = StatementPatterns::defaults()) {
  return classify_tokens(tokenize(stmt.text), patterns);
}

}  // namespace flaketype
