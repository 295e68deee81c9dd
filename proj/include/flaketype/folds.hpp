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

// Stratified group k-fold assignment: an original test and its augmented
// copies form one group that never straddles two folds.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "flaketype/category.hpp"
#include "flaketype/corpus.hpp"
#include "flaketype/error.hpp"
#include "flaketype/random.hpp"

namespace flaketype {

inline constexpr std::size_t kDefaultFolds = 4;

struct FoldAssignment {
  std::size_t k = kDefaultFolds;
  std::map<std::string, std::size_t> fold_of;

  std::size_t at(const std::string& id) const {
    auto it = fold_of.find(id);
    if (it == fold_of.end()) throw data_error("test '" + id + "' has no fold");
    return it->second;
  }
};

// The original id of a test's family.
inline const std::string& family_of(const FlakyTest& t) {
  return t.augmented_from ? *t.augmented_from : t.id;
}

// Families are shuffled per category and dealt to the fold holding the
// fewest originals of that category, breaking ties by fewest tests overall
// and then by fold index.
inline FoldAssignment stratified_group_kfold(const std::vector<FlakyTest>& tests,
                                             std::size_t k = kDefaultFolds,
                                             std::uint64_t seed = 0) {
  if (k < 2) throw usage_error("need at least 2 folds");
  validate_corpus(tests);
  std::map<std::string, std::size_t> family_size;
  std::map<Category, std::vector<std::string>> families;
  for (const auto& t : tests) {
    ++family_size[family_of(t)];
    if (t.is_original()) families[t.category].push_back(t.id);
  }
  std::map<std::string, Category> origin_category;
  for (const auto& t : tests) {
    if (t.is_original()) origin_category.emplace(t.id, t.category);
  }
  for (const auto& t : tests) {
    if (!t.is_original() && origin_category.at(*t.augmented_from) != t.category) {
      throw data_error("augmented test '" + t.id +
                       "' has a different category than its origin");
    }
  }
  for (const auto& [c, f] : families) {
    if (f.size() < k) {
      throw data_error("category " + std::string(to_string(c)) + " has " +
                       std::to_string(f.size()) + " original tests, fewer than " +
                       std::to_string(k) + " folds");
    }
  }
  FoldAssignment out;
  out.k = k;
  std::map<std::string, std::size_t> family_fold;
  std::vector<std::size_t> fold_tests(k, 0);
  for (auto& [category, ids] : families) {
    Rng rng = make_rng(derive_seed(seed, "folds", index_of(category)));
    shuffle(std::span(ids), rng);
    std::vector<std::size_t> per_fold(k, 0);
    for (const auto& id : ids) {
      std::size_t best = 0;
      for (std::size_t f = 1; f < k; ++f) {
        if (std::tie(per_fold[f], fold_tests[f]) <
            std::tie(per_fold[best], fold_tests[best])) {
          best = f;
        }
      }
      ++per_fold[best];
      fold_tests[best] += family_size[id];
      family_fold[id] = best;
    }
  }
  for (const auto& t : tests) out.fold_of[t.id] = family_fold.at(family_of(t));
  return out;
}

struct FoldSplit {
  std::vector<FlakyTest> train;
  std::vector<FlakyTest> test;
};

// Training folds keep their augmented copies; the held-out fold keeps its
// augmented copies too when `augmented_in_test` is set.
inline FoldSplit split_fold(const std::vector<FlakyTest>& tests,
                            const FoldAssignment& folds, std::size_t fold,
                            bool augmented_in_test = true) {
  FoldSplit s;
  for (const auto& t : tests) {
    if (folds.at(t.id) != fold) {
      s.train.push_back(t);
    } else if (augmented_in_test || t.is_original()) {
      s.test.push_back(t);
    }
  }
  return s;
}

}  // namespace flaketype
