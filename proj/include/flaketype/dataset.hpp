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

// Labeled feature matrices shared by the Siamese model, the few-shot
// classifier and the baselines.

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flaketype/category.hpp"
#include "flaketype/corpus.hpp"
#include "flaketype/embed.hpp"
#include "flaketype/error.hpp"

namespace flaketype {

// One row per sample.
struct LabeledSet {
  std::vector<std::string> ids;
  Eigen::MatrixXd X;
  std::vector<Category> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }
  Eigen::VectorXd row(std::size_t i) const {
    return X.row(static_cast<Eigen::Index>(i)).transpose();
  }
  std::set<Category> categories() const {
    return {labels.begin(), labels.end()};
  }
};

inline LabeledSet make_labeled_set(const std::vector<Eigen::VectorXd>& rows,
                                   const std::vector<Category>& labels,
                                   std::vector<std::string> ids = {}) {
  if (rows.size() != labels.size()) {
    throw internal_error("row and label counts differ");
  }
  LabeledSet set;
  const Eigen::Index d = rows.empty() ? 0 : rows.front().size();
  set.X.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw data_error("rows of differing dimension");
    set.X.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  set.labels = labels;
  if (ids.empty()) {
    for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back(std::to_string(i));
  }
  set.ids = std::move(ids);
  return set;
}

// Looks up every test in `store`; a missing id is a data error.
inline LabeledSet gather(const std::vector<FlakyTest>& tests,
                         const EmbeddingStore& store) {
  LabeledSet set;
  set.X.resize(static_cast<Eigen::Index>(tests.size()),
               static_cast<Eigen::Index>(store.dim()));
  for (std::size_t i = 0; i < tests.size(); ++i) {
    set.X.row(static_cast<Eigen::Index>(i)) = store.at(tests[i].id).transpose();
    set.ids.push_back(tests[i].id);
    set.labels.push_back(tests[i].category);
  }
  return set;
}

inline LabeledSet subset(const LabeledSet& set,
                         const std::vector<std::size_t>& rows) {
  LabeledSet out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), set.X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) =
        set.X.row(static_cast<Eigen::Index>(rows[i]));
    out.ids.push_back(set.ids[rows[i]]);
    out.labels.push_back(set.labels[rows[i]]);
  }
  return out;
}

}  // namespace flaketype
