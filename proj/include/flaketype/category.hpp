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

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "flaketype/error.hpp"

namespace flaketype {

// Flakiness root-cause categories. The enum order is the canonical column
// order used by confusion matrices and reports.
enum class Category : int {
  kAsyncWaits = 0,
  kUnorderedCollections,
  kConcurrency,
  kTime,
  kTestOrderDependency,
  kNetwork,
  kRandomness,
  kTestCaseTimeout,
  kResourceLeak,
  kPlatformDependency,
  kTooRestrictiveRange,
  kIO,
};

inline constexpr std::size_t kNumCategories = 12;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kAsyncWaits,         Category::kUnorderedCollections,
    Category::kConcurrency,        Category::kTime,
    Category::kTestOrderDependency, Category::kNetwork,
    Category::kRandomness,         Category::kTestCaseTimeout,
    Category::kResourceLeak,       Category::kPlatformDependency,
    Category::kTooRestrictiveRange, Category::kIO,
};

inline constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "AsyncWaits",         "UnorderedCollections", "Concurrency",
    "Time",               "TestOrderDependency",  "Network",
    "Randomness",         "TestCaseTimeout",      "ResourceLeak",
    "PlatformDependency", "TooRestrictiveRange",  "IO",
};

constexpr std::size_t index_of(Category c) {
  return static_cast<std::size_t>(c);
}

constexpr std::string_view to_string(Category c) {
  return kCategoryNames[index_of(c)];
}

inline std::optional<Category> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    if (kCategoryNames[i] == name) return kAllCategories[i];
  }
  return std::nullopt;
}

inline Category category_or_throw(std::string_view name) {
  auto c = parse_category(name);
  if (!c) throw data_error("unknown category: " + std::string(name));
  return *c;
}

// Ordering by name, used wherever ties between categories are broken.
struct CategoryNameLess {
  bool operator()(Category a, Category b) const {
    return to_string(a) < to_string(b);
  }
};

}  // namespace flaketype
