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

// The original Porter (1980) suffix-stripping stemmer for lowercase ASCII
// words. Words of length <= 2 are returned unchanged.

#include <string>
#include <string_view>

namespace flaketype {
namespace porter_detail {

class Stemmer {
 public:
  explicit Stemmer(std::string word) : b_(std::move(word)) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return b_;
  }

 private:
  bool is_consonant(std::size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b_[0, end).
  int measure(std::size_t end) const {
    int n = 0;
    std::size_t i = 0;
    while (i < end && is_consonant(i)) ++i;
    while (i < end) {
      while (i < end && !is_consonant(i)) ++i;
      if (i >= end) break;
      while (i < end && is_consonant(i)) ++i;
      ++n;
    }
    return n;
  }

  bool has_vowel(std::size_t end) const {
    for (std::size_t i = 0; i < end; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t end) const {
    if (end < 2) return false;
    if (b_[end - 1] != b_[end - 2]) return false;
    return is_consonant(end - 1);
  }

  // cvc with the final c not w, x or y.
  bool cvc(std::size_t end) const {
    if (end < 3) return false;
    if (!is_consonant(end - 1) || is_consonant(end - 2) ||
        !is_consonant(end - 3)) {
      return false;
    }
    char c = b_[end - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends_with(std::string_view s) const {
    return b_.size() >= s.size() &&
           std::string_view(b_).substr(b_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const {
    return b_.size() - suffix.size();
  }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    b_.resize(stem_len(suffix));
    b_.append(with);
  }

  // Replaces `suffix` with `with` if the remaining stem has measure > 0.
  // Returns true when the suffix matched, regardless of replacement.
  bool rule_m0(std::string_view suffix, std::string_view with) {
    if (!ends_with(suffix)) return false;
    if (measure(stem_len(suffix)) > 0) replace_suffix(suffix, with);
    return true;
  }

  void step1ab() {
    if (ends_with("sses")) {
      replace_suffix("sses", "ss");
    } else if (ends_with("ies")) {
      replace_suffix("ies", "i");
    } else if (ends_with("ss")) {
      // unchanged
    } else if (ends_with("s")) {
      replace_suffix("s", "");
    }

    bool second_pass = false;
    if (ends_with("eed")) {
      if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
    } else if (ends_with("ed") && has_vowel(stem_len("ed"))) {
      replace_suffix("ed", "");
      second_pass = true;
    } else if (ends_with("ing") && has_vowel(stem_len("ing"))) {
      replace_suffix("ing", "");
      second_pass = true;
    }

    if (!second_pass) return;
    if (ends_with("at")) {
      b_.append("e");
    } else if (ends_with("bl")) {
      b_.append("e");
    } else if (ends_with("iz")) {
      b_.append("e");
    } else if (double_consonant(b_.size())) {
      char c = b_.back();
      if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
    } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
      b_.append("e");
    }
  }

  void step1c() {
    if (ends_with("y") && has_vowel(b_.size() - 1)) {
      b_.back() = 'i';
    }
  }

  void step2() {
    static constexpr std::pair<std::string_view, std::string_view> kRules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"},
    };
    for (const auto& [suffix, with] : kRules) {
      if (rule_m0(suffix, with)) return;
    }
  }

  void step3() {
    static constexpr std::pair<std::string_view, std::string_view> kRules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    for (const auto& [suffix, with] : kRules) {
      if (rule_m0(suffix, with)) return;
    }
  }

  void step4() {
    static constexpr std::string_view kSuffixes[] = {
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement",
        "ment", "ent", "ion",  "ou",  "ism", "ate",  "iti",  "ous", "ive",
        "ize",
    };
    for (std::string_view suffix : kSuffixes) {
      if (!ends_with(suffix)) continue;
      // "ement" and "ment" are longer matches of "ent"; the list order
      // above tries them first.
      std::size_t stem = stem_len(suffix);
      if (suffix == "ion") {
        if (stem > 0 && (b_[stem - 1] == 's' || b_[stem - 1] == 't') &&
            measure(stem) > 1) {
          b_.resize(stem);
        }
      } else if (measure(stem) > 1) {
        b_.resize(stem);
      }
      return;
    }
  }

  void step5() {
    if (ends_with("e")) {
      std::size_t stem = b_.size() - 1;
      int m = measure(stem);
      if (m > 1 || (m == 1 && !cvc(stem))) b_.pop_back();
    }
    if (measure(b_.size()) > 1 && double_consonant(b_.size()) &&
        b_.back() == 'l') {
      b_.pop_back();
    }
  }

  std::string b_;
};

}  // namespace porter_detail

inline std::string porter_stem(std::string_view word) {
  return porter_detail::Stemmer(std::string(word)).run();
}

}  // namespace flaketype
