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

// Independent neighbour search and tree walking, plus the golden baseline
// fixture shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "flaketype/baselines.hpp"
#include "test_support.hpp"

namespace flaketype::testing {

struct KnnInstance {
  LabeledSet train;
  Eigen::VectorXd query;
  std::size_t k;
};

// Integer grid coordinates, so that distance ties are exact and frequent.
inline KnnInstance random_knn_instance(std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, "knn-instance", 0));
  const std::size_t n = 5 + uniform_index(rng, 36);
  const std::size_t d = 1 + uniform_index(rng, 6);
  const std::size_t classes = 2 + uniform_index(rng, 3);
  std::vector<Eigen::VectorXd> rows;
  std::vector<Category> labels;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (auto& x : v) x = static_cast<double>(uniform_int(rng, -3, 3));
    rows.push_back(v);
    labels.push_back(kAllCategories[uniform_index(rng, classes)]);
  }
  KnnInstance inst{make_labeled_set(rows, labels), Eigen::VectorXd(static_cast<Eigen::Index>(d)),
                   1 + uniform_index(rng, n)};
  for (auto& x : inst.query) x = static_cast<double>(uniform_int(rng, -3, 3));
  return inst;
}

// Full sort of every training row by (distance, row); majority of the
// first k, then smaller mean distance, then category name.
inline Category brute_force_knn(const LabeledSet& train, const Eigen::VectorXd& query,
                                std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < train.size(); ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < query.size(); ++j) {
      const double diff = train.X(static_cast<Eigen::Index>(i), j) - query[j];
      s += diff * diff;
    }
    all.emplace_back(std::sqrt(s), i);
  }
  std::sort(all.begin(), all.end());
  std::map<std::string, std::pair<int, double>> tally;  // name -> votes, dist sum
  for (std::size_t n = 0; n < k; ++n) {
    auto& t = tally[std::string(to_string(train.labels[all[n].second]))];
    t.first += 1;
    t.second += all[n].first;
  }
  std::string best;
  int best_votes = -1;
  double best_mean = 0;
  for (const auto& [name, t] : tally) {  // ascending names
    const double mean = t.second / t.first;
    if (t.first > best_votes || (t.first == best_votes && mean < best_mean)) {
      best = name;
      best_votes = t.first;
      best_mean = mean;
    }
  }
  return *parse_category(best);
}

// Follows the tree from the root and takes the majority of the leaf counts.
inline Category walk_tree(const DecisionTree& tree, const Eigen::VectorXd& x) {
  const TreeNode* node = &tree.nodes.front();
  while (node->feature >= 0) {
    const bool go_left = x[node->feature] < node->threshold;
    node = &tree.nodes[static_cast<std::size_t>(go_left ? node->left : node->right)];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < tree.classes.size(); ++c) {
    if (node->class_counts[c] > node->class_counts[best]) best = c;
  }
  return tree.classes[best];
}

inline LabeledSet set_from_json(const nlohmann::json& j) {
  std::vector<Eigen::VectorXd> rows;
  std::vector<Category> labels;
  for (const auto& r : j) {
    auto v = r.at("x").get<std::vector<double>>();
    rows.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    labels.push_back(*parse_category(r.at("label").get<std::string>()));
  }
  return make_labeled_set(rows, labels);
}

inline nlohmann::json set_to_json(const LabeledSet& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    Eigen::VectorXd v = s.row(i);
    arr.push_back({{"x", std::vector<double>(v.data(), v.data() + v.size())},
                   {"label", std::string(to_string(s.labels[i]))}});
  }
  return arr;
}

// Trains every baseline on the fixture's training rows and predicts its
// queries.
inline nlohmann::json baseline_predictions(const nlohmann::json& fixture) {
  const LabeledSet train = set_from_json(fixture.at("train"));
  const LabeledSet queries = set_from_json(fixture.at("queries"));
  const auto tree = dt_train(train);
  ForestConfig fc;
  fc.seed = 17;
  const auto forest = rf_train(train, fc);
  const auto svm = svm_train(train);
  nlohmann::json out = {{"knn", nlohmann::json::array()},
                        {"dt", nlohmann::json::array()},
                        {"rf", nlohmann::json::array()},
                        {"svm", nlohmann::json::array()}};
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Eigen::VectorXd q = queries.row(i);
    out["knn"].push_back(std::string(to_string(knn_predict(train, q, 5))));
    out["dt"].push_back(std::string(to_string(dt_predict(tree, q))));
    out["rf"].push_back(std::string(to_string(rf_predict(forest, q))));
    out["svm"].push_back(std::string(to_string(svm_predict(svm, q))));
  }
  return out;
}

// A fresh fixture: 30 training rows in three overlapping clusters and 12
// queries, with the current predictions.
inline nlohmann::json golden_baseline_json() {
  auto data = gaussian_clusters(3, 14, 4, 2.0, 1.0, 2024);
  const auto all = make_labeled_set(data.points, data.labels);
  std::vector<std::size_t> train_rows, query_rows;
  for (std::size_t i = 0; i < all.size(); ++i) (i < 30 ? train_rows : query_rows).push_back(i);
  nlohmann::json fixture = {{"train", set_to_json(subset(all, train_rows))},
                            {"queries", set_to_json(subset(all, query_rows))}};
  fixture["predictions"] = baseline_predictions(fixture);
  return fixture;
}

}  // namespace flaketype::testing
