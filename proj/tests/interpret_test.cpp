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

#include "flaketype/interpret.hpp"

#include <gtest/gtest.h>

#include "interpret_oracle.hpp"
#include "test_support.hpp"

namespace flaketype {
namespace {

using testing::make_test;

const char* kThree =
    "@Test public void t() {\n"
    "  int a = 1;\n"
    "  Thread.sleep(a);\n"
    "  assertTrue(done);\n"
    "}\n";

std::vector<std::string> texts(const std::vector<Statement>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("flaketype-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(Ablate, ThreeStatementsGiveThreeVariants) {
  auto test = make_test("t", Category::kAsyncWaits, kThree);
  auto variants = ablate(test);
  ASSERT_EQ(variants.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(variants[i].id, "t#ablate" + std::to_string(i));
    EXPECT_EQ(body_statements(variants[i].code).size(), 2u);
    EXPECT_LT(variants[i].code.size(), test.code.size());
    EXPECT_EQ(variants[i].category, test.category);
  }
  EXPECT_EQ(variants[1].code.find("sleep"), std::string::npos);
}

TEST(Ablate, MethodHeaderIsNotAStatement) {
  auto statements = body_statements(kThree);
  ASSERT_EQ(statements.size(), 3u);
  EXPECT_EQ(statements[0].text, "int a = 1;");
  EXPECT_EQ(body_statements("int a = 1; a++;").size(), 2u);
  EXPECT_EQ(body_statements("if (x) { y(); }").front().text, "if (x) {");
}

TEST(Ablate, ResegmentingVariantDropsExactlyOneStatement) {
  std::vector<FlakyTest> tests;
  for (Category c : {Category::kAsyncWaits, Category::kTime, Category::kConcurrency,
                     Category::kUnorderedCollections}) {
    for (std::size_t i = 0; i < 5; ++i) {
      tests.push_back(make_test("x", c, testing::snippet_for(c, i)));
    }
  }
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    tests.push_back(testing::planted_test(seed).test);
  }
  for (const auto& t : tests) {
    const auto original = texts(body_statements(t.code));
    const auto variants = ablate(t);
    for (std::size_t i = 0; i < variants.size(); ++i) {
      auto expected = original;
      expected.erase(expected.begin() + static_cast<std::ptrdiff_t>(i));
      EXPECT_EQ(texts(body_statements(variants[i].code)), expected) << t.code << i;
    }
  }
}

TEST(Ablate, FewerThanTwoStatementsIsAnError) {
  try {
    ablate(make_test("one", Category::kTime, "@Test void t() {\n  x();\n}\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    EXPECT_NE(std::string(e.what()).find("nothing to ablate"), std::string::npos);
  }
}

TEST(Attribute, PlantedSleepStatementWins) {
  const auto model = testing::passthrough_model();
  const auto support = testing::planted_support();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = testing::planted_test(seed);
    auto a = attribute(p.test, Category::kAsyncWaits, model, support,
                       testing::planted_embedder());
    EXPECT_EQ(a.most_influential, p.sleep_index) << p.test.code;
    EXPECT_NE(a.statements[a.most_influential].text.find("sleep"), std::string::npos);
    EXPECT_EQ(a.drops.size(), a.statements.size());
  }
}

TEST(Attribute, IdenticalVariantsTieAtIndexZero) {
  auto constant = [](const std::vector<FlakyTest>& tests) {
    return std::vector<std::optional<Eigen::VectorXd>>(tests.size(), Eigen::Vector2d(2, 1));
  };
  auto a = attribute(make_test("t", Category::kAsyncWaits, kThree), Category::kAsyncWaits,
                     testing::passthrough_model(), testing::planted_support(), constant);
  EXPECT_EQ(a.most_influential, 0u);
  for (const auto& d : a.drops) EXPECT_EQ(*d, 0.0);
}

TEST(Attribute, NegativeDropsAreKept) {
  // Removing the sleep moves the test towards Time, the correct class here.
  auto a = attribute(make_test("t", Category::kTime, kThree), Category::kTime,
                     testing::passthrough_model(), testing::planted_support(),
                     testing::planted_embedder());
  EXPECT_LT(*a.drops[1], 0.0);
  EXPECT_EQ(*a.drops[0], 0.0);
  EXPECT_EQ(a.most_influential, 0u);
}

TEST(Attribute, FailedVariantsAreMissingAndSkipped) {
  auto failing = [](const std::vector<FlakyTest>& tests) {
    std::vector<std::optional<Eigen::VectorXd>> out;
    for (const auto& t : tests) {
      if (t.id == "t#ablate1") {
        out.emplace_back();
      } else {
        out.emplace_back(testing::planted_vector(t.code, 2));
      }
    }
    return out;
  };
  auto a = attribute(make_test("t", Category::kAsyncWaits, kThree), Category::kAsyncWaits,
                     testing::passthrough_model(), testing::planted_support(), failing);
  EXPECT_FALSE(a.drops[1].has_value());
  EXPECT_EQ(a.most_influential, 0u);
  EXPECT_TRUE(to_json(a).at("statements")[1].at("drop").is_null());

  auto none = [](const std::vector<FlakyTest>& tests) {
    std::vector<std::optional<Eigen::VectorXd>> out(tests.size());
    out[0] = Eigen::Vector2d(1, 1);
    return out;
  };
  EXPECT_THROW(attribute(make_test("t", Category::kAsyncWaits, kThree), Category::kAsyncWaits,
                         testing::passthrough_model(), testing::planted_support(), none),
               Error);
}

TEST(Attribute, Deterministic) {
  const auto p = testing::planted_test(7);
  auto run = [&] {
    return to_json(attribute(p.test, Category::kAsyncWaits, testing::passthrough_model(),
                             testing::planted_support(), testing::planted_embedder()))
        .dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(AttributeAll, SkipsMisclassifiedAndShortTests) {
  std::vector<FlakyTest> tests = {
      testing::planted_test(1).test,
      make_test("short", Category::kAsyncWaits, "@Test void t() {\n  sleep();\n}\n"),
      make_test("wrong", Category::kTime, kThree),
  };
  auto run = attribute_all(tests, testing::passthrough_model(), testing::planted_support(),
                           testing::planted_embedder());
  ASSERT_EQ(run.attributions.size(), 1u);
  EXPECT_EQ(run.attributions[0].test_id, tests[0].id);
  ASSERT_EQ(run.skipped.size(), 2u);
  EXPECT_NE(run.skipped[0].find("nothing to ablate"), std::string::npos);
  EXPECT_NE(run.skipped[1].find("misclassified"), std::string::npos);
}

TEST(VocabEmbedder, RemovingOnlyOccurrenceChangesOneComponent) {
  auto test = make_test("t", Category::kAsyncWaits, kThree);
  const auto vocab = build_vocab({test});
  const auto embed = vocab_embedder(vocab);
  const auto variants = ablate(test);
  const auto original = *embed({test})[0];
  const auto without_sleep = *embed({variants[1]})[0];
  const Eigen::VectorXd diff = original - without_sleep;
  // `Thread.sleep(a)` holds the only `thread` and `sleep`, and one of two `a`s.
  std::set<std::string> changed;
  for (const auto& [term, index] : vocab.index) {
    if (diff[static_cast<Eigen::Index>(index)] != 0.0) changed.insert(term);
  }
  EXPECT_EQ(changed, (std::set<std::string>{"a", "sleep", "thread"}));
  auto single = make_test("u", Category::kTime,
                          "@Test void u() {\n  foo();\n  zebra();\n}\n");
  const auto v2 = build_vocab({single});
  const auto e2 = vocab_embedder(v2);
  const Eigen::VectorXd d2 = *e2({single})[0] - *e2({ablate(single)[1]})[0];
  EXPECT_EQ((d2.array() != 0.0).count(), 1);
  EXPECT_EQ(d2[static_cast<Eigen::Index>(v2.index.at("zebra"))], 1.0);
}

TEST(Prevalence, SingleAssertRow) {
  auto test = make_test("t", Category::kTime,
                        "@Test void t() {\n  x();\n  assertTrue(done);\n}\n");
  StatementAttribution a;
  a.test_id = "t";
  a.category = Category::kTime;
  a.statements = body_statements(test.code);
  a.drops = {0.0, 0.5};
  a.most_influential = 1;
  auto table = prevalence({a});
  ASSERT_EQ(table.size(), 1u);
  const auto& row = table.at(Category::kTime);
  EXPECT_EQ(row.n, 1u);
  for (std::size_t k = 0; k < kNumStatementTypes; ++k) {
    EXPECT_EQ(row.percent[k], kAllStatementTypes[k] == StatementType::kAsserts ? 100.0 : 0.0);
  }
  EXPECT_NE(format_prevalence(table).find("100.0"), std::string::npos);
}

TEST(Prevalence, CellsInRangeAndRowSumAtLeastMax) {
  std::vector<StatementAttribution> all;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto p = testing::planted_test(seed);
    p.test.category = seed % 2 ? Category::kAsyncWaits : Category::kTime;
    auto a = attribute(p.test, Category::kAsyncWaits, testing::passthrough_model(),
                       testing::planted_support(), testing::planted_embedder());
    a.category = p.test.category;
    all.push_back(a);
  }
  for (const auto& [c, row] : prevalence(all)) {
    EXPECT_EQ(row.n, 20u);
    double sum = 0, max = 0;
    for (double p : row.percent) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 100.0);
      sum += p;
      max = std::max(max, p);
    }
    EXPECT_GE(sum, max);
    EXPECT_EQ(row.percent[static_cast<std::size_t>(StatementType::kWaits)], 100.0);
  }
}

TEST(Reports, AnnotatedSourceMarksInfluentialLine) {
  auto test = make_test("t", Category::kAsyncWaits, kThree);
  auto a = attribute(test, Category::kAsyncWaits, testing::passthrough_model(),
                     testing::planted_support(), testing::planted_embedder());
  const auto text = annotate_source(test, a);
  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> marked;
  while (std::getline(lines, line)) {
    if (line.rfind(">> ", 0) == 0) marked.push_back(line);
  }
  ASSERT_EQ(marked.size(), 1u);
  EXPECT_NE(marked[0].find("Thread.sleep"), std::string::npos);
  const auto j = to_json(a);
  EXPECT_EQ(j.at("most_influential"), 1);
  EXPECT_TRUE(j.at("statements")[1].at("influential"));
}

std::vector<std::string> fake_exporter(std::vector<std::string> extra = {}) {
  std::vector<std::string> cmd = {FLAKETYPE_PYTHON,
                                  std::string(FLAKETYPE_FIXTURE_DIR) + "/fake_exporter.py"};
  cmd.insert(cmd.end(), extra.begin(), extra.end());
  return cmd;
}

TEST(Handshake, AttributionThroughExporterProcess) {
  const auto dir = scratch_dir("handshake");
  const auto embed = handshake_embedder(fake_exporter(), dir);
  const auto model = testing::passthrough_model(kCodebertDim);
  const auto support = testing::planted_support();
  std::vector<FlakyTest> tests;
  for (std::uint64_t seed = 0; seed < 10; ++seed) tests.push_back(testing::planted_test(seed).test);
  auto run = attribute_all(tests, model, support, embed);
  ASSERT_EQ(run.attributions.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(run.attributions[i].most_influential, testing::planted_test(i).sleep_index);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "variants.jsonl"));
  EXPECT_EQ(load_corpus((dir / "variants.jsonl").string()).size(),
            10 + [&] {
              std::size_t n = 0;
              for (const auto& t : tests) n += body_statements(t.code).size();
              return n;
            }());
  std::filesystem::remove_all(dir);
}

TEST(Handshake, ErrorRowsBecomeMissingDrops) {
  const auto dir = scratch_dir("handshake-errors");
  auto test = make_test("t", Category::kAsyncWaits, kThree);
  auto embed = handshake_embedder(
      fake_exporter({"--fail-id", "t#ablate1", "--fail-id", "t#ablate2"}), dir);
  auto a = attribute(test, Category::kAsyncWaits, testing::passthrough_model(kCodebertDim),
                     testing::planted_support(), embed);
  EXPECT_TRUE(a.drops[0].has_value());
  EXPECT_FALSE(a.drops[1].has_value());
  EXPECT_FALSE(a.drops[2].has_value());
  EXPECT_EQ(a.most_influential, 0u);
  auto broken = handshake_embedder(fake_exporter({"--fail-id", "t"}), dir);
  EXPECT_THROW(attribute(test, Category::kAsyncWaits, testing::passthrough_model(kCodebertDim),
                         testing::planted_support(), broken),
               Error);
  std::filesystem::remove_all(dir);
}

TEST(Handshake, ExporterFailuresAreReported) {
  const auto dir = scratch_dir("handshake-fail");
  auto test = make_test("t", Category::kAsyncWaits, kThree);
  auto failing = handshake_embedder(fake_exporter({"--exit-code", "4"}), dir);
  EXPECT_THROW(failing({test}), Error);
  auto missing = handshake_embedder({"/nonexistent/exporter"}, dir);
  EXPECT_THROW(missing({test}), Error);
  EXPECT_THROW(handshake_embedder({}, dir), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace flaketype
