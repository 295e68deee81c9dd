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

// Planted-feature oracle for attribution: an embedder that only reacts to the
// token `sleep`, a model that passes its first two coordinates through, and
// synthetic tests whose single `sleep` statement is known in advance.

#include <string>
#include <vector>

#include "flaketype/interpret.hpp"
#include "flaketype/random.hpp"

namespace flaketype::testing {

inline std::size_t count_sleep(std::string_view code) {
  std::size_t n = 0;
  for (const auto& t : tokenize(code)) n += t.kind == TokenKind::kIdentifier && t.text == "sleep";
  return n;
}

// (1 + 3 * #sleep, 1, 0, ...).
inline Eigen::VectorXd planted_vector(std::string_view code, std::size_t dim) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  v[0] = 1.0 + 3.0 * static_cast<double>(count_sleep(code));
  v[1] = 1.0;
  return v;
}

inline BatchEmbedder planted_embedder(std::size_t dim = 2) {
  return [dim](const std::vector<FlakyTest>& tests) {
    std::vector<std::optional<Eigen::VectorXd>> out;
    for (const auto& t : tests) out.emplace_back(planted_vector(t.code, dim));
    return out;
  };
}

inline SiameseModel passthrough_model(std::size_t dim = 2) {
  SiameseModel m;
  m.W = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(dim));
  m.W(0, 0) = 1.0;
  m.W(1, 1) = 1.0;
  m.b = Eigen::VectorXd::Zero(2);
  return m;
}

// AsyncWaits sits on the first axis, Time on the second.
inline SupportSet planted_support() {
  SupportSet s;
  s.exemplars[Category::kAsyncWaits] = {{"async", Eigen::Vector2d(1, 0)}};
  s.exemplars[Category::kTime] = {{"time", Eigen::Vector2d(0, 1)}};
  return s;
}

struct PlantedTest {
  FlakyTest test;
  std::size_t sleep_index = 0;
};

// 2 to 8 body statements drawn from a pool without `sleep`, plus one
// `Thread.sleep(...)` at a random position.
inline PlantedTest planted_test(std::uint64_t seed) {
  static const std::vector<std::string> pool = {
      "int count = 5;",
      "String name = \"alpha\";",
      "client.connect(host, port);",
      "assertEquals(3, list.size());",
      "map.put(\"k\", value);",
      "if (ready) {\n    done = true;\n  }",
      "for (int i = 0; i < n; i++) {\n    total += i;\n  }",
      "Object lock = new Object();",
      "server.start();",
      "assertTrue(result.isEmpty());",
  };
  Rng rng = make_rng(derive_seed(seed, "planted-test"));
  const std::size_t others = 1 + uniform_index(rng, 7);
  std::vector<std::string> stmts;
  for (std::size_t i = 0; i < others; ++i) stmts.push_back(pool[uniform_index(rng, pool.size())]);
  const std::size_t at = uniform_index(rng, others + 1);
  stmts.insert(stmts.begin() + static_cast<std::ptrdiff_t>(at),
               "Thread.sleep(" + std::to_string(100 + uniform_index(rng, 900)) + ");");
  std::string code = "@Test\npublic void planted" + std::to_string(seed) + "() throws Exception {\n";
  for (const auto& s : stmts) code += "  " + s + "\n";
  code += "}\n";
  PlantedTest p;
  p.test.id = "planted-" + std::to_string(seed);
  p.test.category = Category::kAsyncWaits;
  p.test.code = code;
  // A pool entry with a block is two statements: its header and its body.
  std::size_t index = 0;
  for (std::size_t i = 0; i < at; ++i) index += stmts[i].find('{') == std::string::npos ? 1 : 2;
  p.sleep_index = index;
  return p;
}

}  // namespace flaketype::testing
