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

#include "flaketype/folds.hpp"

#include <gtest/gtest.h>

#include "flaketype/augment.hpp"
#include "test_support.hpp"

namespace flaketype {
namespace {

using testing::make_test;

std::vector<FlakyTest> four_category_corpus() {
  return filter_categories(testing::table_one_corpus(), 30,
                           {Category::kTestOrderDependency})
      .tests;
}

TEST(StratifiedGroupKFold, EightFamiliesTwoPerFold) {
  std::vector<FlakyTest> tests;
  for (int i = 0; i < 8; ++i) {
    tests.push_back(make_test("t" + std::to_string(i), Category::kTime, "x();"));
  }
  auto folds = stratified_group_kfold(tests, 4, 1);
  std::vector<int> count(4, 0);
  for (const auto& t : tests) ++count[folds.at(t.id)];
  EXPECT_EQ(count, (std::vector<int>{2, 2, 2, 2}));
}

TEST(StratifiedGroupKFold, FamilySharesFold) {
  std::vector<FlakyTest> tests;
  for (int i = 0; i < 4; ++i) {
    tests.push_back(make_test("o" + std::to_string(i), Category::kTime, "x();"));
  }
  tests.push_back(make_test("o2#aug0", Category::kTime, "x();", "o2"));
  tests.push_back(make_test("o2#aug1", Category::kTime, "x();", "o2"));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto folds = stratified_group_kfold(tests, 4, seed);
    EXPECT_EQ(folds.at("o2#aug0"), folds.at("o2"));
    EXPECT_EQ(folds.at("o2#aug1"), folds.at("o2"));
  }
}

TEST(StratifiedGroupKFold, TableOneAsyncWaitsPerFold) {
  auto tests = four_category_corpus();
  auto folds = stratified_group_kfold(tests, 4, 7);
  std::vector<int> count(4, 0);
  for (const auto& t : tests) {
    if (t.category == Category::kAsyncWaits) ++count[folds.at(t.id)];
  }
  for (int c : count) {
    EXPECT_GE(c, 22);
    EXPECT_LE(c, 23);
  }
}

TEST(StratifiedGroupKFold, ProportionsWithinOneOfIdeal) {
  auto tests = testing::table_one_corpus();
  tests = filter_categories(tests, 4, {}).tests;
  auto folds = stratified_group_kfold(tests, 4, 3);
  auto stats = corpus_stats(tests);
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    if (stats.original[c] == 0) continue;
    std::vector<double> count(4, 0);
    for (const auto& t : tests) {
      if (index_of(t.category) == c) ++count[folds.at(t.id)];
    }
    const double ideal = static_cast<double>(stats.original[c]) / 4.0;
    for (double n : count) EXPECT_LE(std::abs(n - ideal), 1.0) << kCategoryNames[c];
  }
}

TEST(StratifiedGroupKFold, NoLeakageOverRandomAugmentedCorpora) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_rng(seed);
    std::vector<FlakyTest> originals;
    const std::size_t categories = 2 + uniform_index(rng, 3);
    for (std::size_t c = 0; c < categories; ++c) {
      const std::size_t n = 4 + uniform_index(rng, 10);
      for (std::size_t i = 0; i < n; ++i) {
        originals.push_back(make_test(std::to_string(c) + "-" + std::to_string(i),
                                      kAllCategories[c],
                                      testing::snippet_for(kAllCategories[c], i)));
      }
    }
    AugmentationConfig config;
    config.copies_per_test = uniform_index(rng, 4);
    config.seed = seed;
    auto corpus = augment_corpus(originals, config);
    auto folds = stratified_group_kfold(corpus, 4, seed);
    for (const auto& t : corpus) {
      EXPECT_EQ(folds.at(t.id), folds.at(family_of(t))) << t.id;
    }
  }
}

TEST(StratifiedGroupKFold, DeterministicPerSeed) {
  auto tests = four_category_corpus();
  EXPECT_EQ(stratified_group_kfold(tests, 4, 5).fold_of,
            stratified_group_kfold(tests, 4, 5).fold_of);
  EXPECT_NE(stratified_group_kfold(tests, 4, 5).fold_of,
            stratified_group_kfold(tests, 4, 6).fold_of);
}

TEST(StratifiedGroupKFold, Errors) {
  std::vector<FlakyTest> tests;
  for (int i = 0; i < 3; ++i) {
    tests.push_back(make_test("t" + std::to_string(i), Category::kTime, "x();"));
  }
  EXPECT_THROW(stratified_group_kfold(tests, 4, 0), Error);
  EXPECT_THROW(stratified_group_kfold(tests, 1, 0), Error);
  tests.push_back(make_test("t3", Category::kTime, "x();"));
  tests.push_back(make_test("t3#aug0", Category::kIO, "x();", "t3"));
  EXPECT_THROW(stratified_group_kfold(tests, 4, 0), Error);
}

TEST(SplitFold, PartitionsAndOptionallyDropsHeldOutCopies) {
  std::vector<FlakyTest> originals;
  for (int i = 0; i < 8; ++i) {
    originals.push_back(make_test("o" + std::to_string(i), Category::kTime, "int a = 1;"));
  }
  AugmentationConfig config;
  auto corpus = augment_corpus(originals, config);
  auto folds = stratified_group_kfold(corpus, 4, 0);
  std::size_t total_test = 0;
  for (std::size_t f = 0; f < 4; ++f) {
    auto s = split_fold(corpus, folds, f);
    EXPECT_EQ(s.train.size() + s.test.size(), corpus.size());
    total_test += s.test.size();
    auto originals_only = split_fold(corpus, folds, f, false);
    for (const auto& t : originals_only.test) EXPECT_TRUE(t.is_original());
    EXPECT_EQ(originals_only.test.size(), 2u);
  }
  EXPECT_EQ(total_test, corpus.size());
}

}  // namespace
}  // namespace flaketype
