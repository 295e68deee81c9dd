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

#include "flaketype/augment.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "test_support.hpp"

namespace flaketype {
namespace {

using testing::make_test;

std::vector<TokenKind> kinds(const std::string& code) {
  std::vector<TokenKind> out;
  for (const auto& t : tokenize(code)) out.push_back(t.kind);
  return out;
}

std::vector<std::string> decls(const std::string& code) {
  return local_declarations(tokenize(code));
}

TEST(LocalDeclarations, Patterns) {
  EXPECT_EQ(decls("int count = 5; assertEquals(5, count);"),
            (std::vector<std::string>{"count"}));
  EXPECT_EQ(decls("Map<String, List<Integer>> m = new HashMap<>(); int[] xs;"),
            (std::vector<std::string>{"m", "xs"}));
  EXPECT_EQ(decls("for (String s : items) { use(s); }"),
            (std::vector<std::string>{"s"}));
  EXPECT_EQ(decls("try { a(); } catch (IOException e) { log(e); }"),
            (std::vector<std::string>{"e"}));
  EXPECT_EQ(decls("int a = 1, b = 2, c;"),
            (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(decls("for (int i = 0, j = 9; i < j; i++) {}"),
            (std::vector<std::string>{"i", "j"}));
  EXPECT_EQ(decls("list.forEach(x -> use(x)); map.forEach((k, v) -> put(k, v));"),
            (std::vector<std::string>{"x", "k", "v"}));
  EXPECT_EQ(decls("final java.util.Date when = now();"),
            (std::vector<std::string>{"when"}));
}

TEST(LocalDeclarations, NotDeclarations) {
  EXPECT_TRUE(decls("if (a > b) { c = d; }").empty());
  EXPECT_TRUE(decls("x = y; return z; throw e;").empty());
  EXPECT_TRUE(decls("while (i < n && m > k) { i++; }").empty());
  EXPECT_TRUE(decls("foo(bar, baz); this.count = 3;").empty());
  EXPECT_TRUE(decls("public void testFoo() throws Exception {").empty());
}

TEST(AugmentTest, RenamesConsistentlyAndMutatesLiterals) {
  AugmentationConfig config;
  config.seed = 42;
  auto original = make_test("t1", Category::kTime,
                            "int count = 5; assertEquals(5, count);");
  auto aug = augment_test(original, config, 0);
  ASSERT_EQ(aug.renames.size(), 1u);
  const std::string fresh = aug.renames.at("count");
  EXPECT_NE(fresh, "count");

  auto toks = tokenize(aug.test.code);
  ASSERT_EQ(toks.size(), 12u);
  EXPECT_EQ(toks[1].text, fresh);
  EXPECT_EQ(toks[9].text, fresh);
  EXPECT_EQ(toks[3].kind, TokenKind::kNumberLit);
  EXPECT_EQ(toks[7].kind, TokenKind::kNumberLit);
  EXPECT_EQ(toks[5].text, "assertEquals");  // API call untouched
  EXPECT_EQ(aug.mutations, 4u);

  EXPECT_EQ(aug.test.category, Category::kTime);
  EXPECT_EQ(aug.test.augmented_from, std::optional<std::string>("t1"));
  EXPECT_EQ(aug.test.id, "t1#aug0");
  EXPECT_EQ(kinds(aug.test.code), kinds(original.code));
}

TEST(AugmentTest, DeterministicPerSeedIdAndCopy) {
  AugmentationConfig config;
  config.seed = 7;
  auto t = make_test("x", Category::kConcurrency,
                     testing::snippet_for(Category::kConcurrency, 3));
  EXPECT_EQ(augment_test(t, config, 1).test.code,
            augment_test(t, config, 1).test.code);
  // Different copies and seeds give different streams.
  std::set<std::string> variants;
  for (std::size_t c = 0; c < 5; ++c) variants.insert(augment_test(t, config, c).test.code);
  EXPECT_GT(variants.size(), 1u);
  AugmentationConfig other = config;
  other.seed = 8;
  EXPECT_NE(augment_test(t, config, 0).test.code, augment_test(t, other, 0).test.code);
}

TEST(AugmentTest, MemberAccessAndCallsAreNotRenamed) {
  AugmentationConfig config;
  auto t = make_test("m", Category::kTime,
                     "void f(int size) { this.size = size; size(); }");
  auto aug = augment_test(t, config, 0);
  const std::string fresh = aug.renames.at("size");
  EXPECT_EQ(aug.test.code,
            "void f(int " + fresh + ") { this.size = " + fresh + "; size(); }");
}

TEST(AugmentTest, NothingMutableIsFlagged) {
  auto t = make_test("n", Category::kTime, "service.stop();");
  auto aug = augment_test(t, AugmentationConfig{}, 0);
  EXPECT_EQ(aug.mutations, 0u);
  EXPECT_EQ(aug.test.code, t.code);
  EXPECT_EQ(aug.test.augmented_from, std::optional<std::string>("n"));
}

TEST(AugmentTest, RejectsAugmentedInput) {
  auto t = make_test("a", Category::kTime, "x();", "orig");
  EXPECT_THROW(augment_test(t, AugmentationConfig{}, 0), Error);
}

TEST(MutateNumber, KeepsLexicalShape) {
  Rng rng = make_rng(1);
  const std::pair<const char*, const char*> shapes[] = {
      {"1000", "^[1-9][0-9]{3}$"},
      {"7", "^[0-9]$"},
      {"5000L", "^[1-9][0-9]{3}L$"},
      {"0x1F", "^0x[0-9a-f]{2}$"},
      {"0b101", "^0b[01]{3}$"},
      {"1.5f", "^[0-9]\\.[0-9]f$"},
      {"12.25", "^[1-9][0-9]\\.[0-9]{2}$"},
      {".5", "^\\.[0-9]$"},
      {"1e10", "^[0-9]e10$"},
      {"2.0E-3d", "^[0-9]\\.[0-9]E-3d$"},
      {"017", "^0[0-7]{2}$"},
      {"2147483647", "^[1-9][0-9]{8}$"},
  };
  for (int round = 0; round < 20; ++round) {
    for (const auto& [lit, pattern] : shapes) {
      std::string m = augment_detail::mutate_number(lit, rng);
      EXPECT_TRUE(std::regex_match(m, std::regex(pattern))) << lit << " -> " << m;
      auto toks = tokenize(m);
      ASSERT_EQ(toks.size(), 1u) << m;
      EXPECT_EQ(toks[0].kind, TokenKind::kNumberLit) << m;
    }
  }
}

TEST(AugmentCorpus, CopiesPerTest) {
  std::vector<FlakyTest> tests;
  for (int i = 0; i < 4; ++i) {
    tests.push_back(make_test("o" + std::to_string(i), Category::kAsyncWaits,
                              testing::snippet_for(Category::kAsyncWaits, i)));
  }
  AugmentationConfig config;
  config.copies_per_test = 2;
  auto out = augment_corpus(tests, config);
  ASSERT_EQ(out.size(), 12u);
  std::size_t with_lineage = 0;
  for (const auto& t : out) with_lineage += t.augmented_from ? 1 : 0;
  EXPECT_EQ(with_lineage, 8u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(out[i].id, tests[i].id);
  EXPECT_EQ(out[4].id, "o0#aug0");
  EXPECT_EQ(out[5].id, "o0#aug1");
  EXPECT_NO_THROW(validate_corpus(out));
}

TEST(AugmentCorpus, ZeroCopiesIsIdentity) {
  auto tests = testing::table_one_corpus();
  AugmentationConfig config;
  config.copies_per_test = 0;
  auto out = augment_corpus(tests, config);
  ASSERT_EQ(out.size(), tests.size());
  for (std::size_t i = 0; i < tests.size(); ++i) {
    EXPECT_EQ(to_json(out[i]), to_json(tests[i]));
  }
}

TEST(AugmentCorpus, PerCategoryTargetsHitExactly) {
  auto four = filter_categories(testing::table_one_corpus(), 30,
                                {Category::kTestOrderDependency});
  AugmentationConfig config;
  config.targets = parse_targets(
      "AsyncWaits=285,UnorderedCollections=136,Concurrency=113,Time=105");
  auto out = augment_corpus(four.tests, config);
  EXPECT_EQ(out.size(), 639u);
  auto stats = corpus_stats(out);
  EXPECT_EQ(stats.original[index_of(Category::kAsyncWaits)] +
                stats.augmented[index_of(Category::kAsyncWaits)],
            285u);
  EXPECT_EQ(stats.original[index_of(Category::kUnorderedCollections)] +
                stats.augmented[index_of(Category::kUnorderedCollections)],
            136u);
  EXPECT_EQ(stats.original[index_of(Category::kConcurrency)] +
                stats.augmented[index_of(Category::kConcurrency)],
            113u);
  EXPECT_EQ(stats.original[index_of(Category::kTime)] +
                stats.augmented[index_of(Category::kTime)],
            105u);
}

TEST(AugmentCorpus, TargetBelowOriginalsIsAnError) {
  auto tests = testing::table_one_corpus();
  AugmentationConfig config;
  config.targets[Category::kAsyncWaits] = 10;
  EXPECT_THROW(augment_corpus(tests, config), Error);
}

TEST(AugmentCorpus, SameSeedByteIdentical) {
  auto tests = testing::table_one_corpus();
  AugmentationConfig config;
  config.seed = 99;
  std::ostringstream a, b;
  write_corpus(a, augment_corpus(tests, config));
  write_corpus(b, augment_corpus(tests, config));
  EXPECT_EQ(a.str(), b.str());
}

TEST(AugmentCorpus, StructurePreservedAndRenamingBijective) {
  auto tests = testing::table_one_corpus();
  tests.push_back(make_test("extra", Category::kTime,
                            "for (int i = 0, j = 2; i < j; i++) {\n"
                            "  Map<String, Long> seen = new HashMap<>();\n"
                            "  list.forEach((k, v) -> seen.put(k, 0x1FL));\n"
                            "} catch (Exception e) { fail(\"\"\"\n x \"\"\"); }"));
  AugmentationConfig config;
  config.copies_per_test = 3;
  config.seed = 5;
  for (const auto& t : tests) {
    auto names = local_declarations(tokenize(t.code));
    for (std::size_t c = 0; c < config.copies_per_test; ++c) {
      auto aug = augment_test(t, config, c);
      EXPECT_EQ(kinds(aug.test.code), kinds(t.code)) << t.id;
      EXPECT_EQ(segment_statements(aug.test.code).size(),
                segment_statements(t.code).size())
          << t.id;
      ASSERT_EQ(aug.renames.size(), names.size());
      std::set<std::string> images;
      for (const auto& name : names) images.insert(aug.renames.at(name));
      EXPECT_EQ(images.size(), names.size()) << t.id;
    }
  }
}

TEST(ParseTargets, Errors) {
  EXPECT_THROW(parse_targets("AsyncWaits"), Error);
  EXPECT_THROW(parse_targets("Bogus=3"), Error);
  EXPECT_THROW(parse_targets("Time=-1"), Error);
  EXPECT_EQ(parse_targets("Time=3,").at(Category::kTime), 3u);
}

}  // namespace
}  // namespace flaketype
