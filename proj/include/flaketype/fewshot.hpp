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

// Support-set construction and nearest-exemplar few-shot classification in
// the learned similarity space.

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "flaketype/category.hpp"
#include "flaketype/dataset.hpp"
#include "flaketype/error.hpp"
#include "flaketype/siamese.hpp"

namespace flaketype {

inline constexpr std::size_t kDefaultSupportSize = 5;

struct Exemplar {
  std::string id;
  Eigen::VectorXd vector;  // transformed, unit norm
};

struct SupportSet {
  std::map<Category, std::vector<Exemplar>> exemplars;

  bool empty() const { return exemplars.empty(); }
  std::set<Category> categories() const {
    std::set<Category> out;
    for (const auto& [c, e] : exemplars) out.insert(c);
    return out;
  }
};

enum class Aggregation { kMax, kMean };

struct Prediction {
  std::string test_id;
  std::vector<std::pair<Category, double>> ranking;  // best first

  Category top() const { return ranking.front().first; }
  double score(Category c) const {
    for (const auto& [cat, s] : ranking) {
      if (cat == c) return s;
    }
    throw internal_error("category " + std::string(to_string(c)) + " not ranked");
  }
};

// Centrality of each row of the unit-row matrix `Y` within its class: the
// mean dot product with the other members (0 for a singleton class).
inline std::vector<double> class_centrality(const Eigen::MatrixXd& Y,
                                            const std::vector<std::size_t>& members) {
  std::vector<double> out(members.size(), 0.0);
  if (members.size() < 2) return out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (i == j) continue;
      sum += Y.row(static_cast<Eigen::Index>(members[i]))
                 .dot(Y.row(static_cast<Eigen::Index>(members[j])));
    }
    out[i] = sum / static_cast<double>(members.size() - 1);
  }
  return out;
}

// Per category, the k members most similar on average to their classmates
// (medoid first, ties to the earlier row). Every category in `required`
// must have members.
inline SupportSet select_support(const LabeledSet& train, const SiameseModel& model,
                                 std::size_t k,
                                 const std::set<Category>& required = {}) {
  if (k < 1) throw usage_error("support size must be at least 1");
  if (train.size() == 0) throw data_error("support selection needs training data");
  const Eigen::MatrixXd Y = forward_rows(model, train.X);
  std::map<Category, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train.size(); ++i) by_class[train.labels[i]].push_back(i);
  for (Category c : required) {
    if (!by_class.count(c)) {
      throw data_error("category " + std::string(to_string(c)) +
                       " has no training examples");
    }
  }
  SupportSet support;
  for (const auto& [category, members] : by_class) {
    const auto centrality = class_centrality(Y, members);
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return centrality[a] > centrality[b];
    });
    auto& out = support.exemplars[category];
    for (std::size_t r = 0; r < std::min(k, members.size()); ++r) {
      const std::size_t row = members[order[r]];
      out.push_back({train.ids[row], Y.row(static_cast<Eigen::Index>(row)).transpose()});
    }
  }
  return support;
}

// Ranks categories by their best (or mean) similarity to the transformed
// query; equal scores are ordered by category name.
inline std::vector<std::pair<Category, double>> rank_transformed(
    const Eigen::VectorXd& y, const SupportSet& support, Aggregation aggregation) {
  if (support.empty()) throw data_error("empty support set");
  std::vector<std::pair<Category, double>> ranking;
  for (const auto& [category, exemplars] : support.exemplars) {
    if (exemplars.empty()) continue;
    double score = aggregation == Aggregation::kMax
                       ? -std::numeric_limits<double>::infinity()
                       : 0.0;
    for (const auto& e : exemplars) {
      if (e.vector.size() != y.size()) {
        throw data_error("support vector dim does not match the model");
      }
      const double s = std::clamp(y.dot(e.vector), -1.0, 1.0);
      score = aggregation == Aggregation::kMax ? std::max(score, s) : score + s;
    }
    if (aggregation == Aggregation::kMean) score /= static_cast<double>(exemplars.size());
    ranking.emplace_back(category, score);
  }
  if (ranking.empty()) throw data_error("empty support set");
  std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return to_string(a.first) < to_string(b.first);
  });
  return ranking;
}

inline Prediction classify(const Eigen::VectorXd& query, const SiameseModel& model,
                           const SupportSet& support,
                           Aggregation aggregation = Aggregation::kMax,
                           std::string test_id = {}) {
  if (support.empty()) throw data_error("empty support set");
  Prediction p;
  p.test_id = std::move(test_id);
  p.ranking = rank_transformed(forward(model, query), support, aggregation);
  return p;
}

inline std::vector<Prediction> classify_all(const LabeledSet& queries,
                                            const SiameseModel& model,
                                            const SupportSet& support,
                                            Aggregation aggregation = Aggregation::kMax) {
  if (support.empty()) throw data_error("empty support set");
  const Eigen::MatrixXd Y = forward_rows(model, queries.X);
  std::vector<Prediction> out;
  out.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Prediction p;
    p.test_id = queries.ids[i];
    p.ranking = rank_transformed(Y.row(static_cast<Eigen::Index>(i)).transpose(),
                                 support, aggregation);
    out.push_back(std::move(p));
  }
  return out;
}

inline nlohmann::json to_json(const SupportSet& s) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [category, exemplars] : s.exemplars) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : exemplars) {
      arr.push_back({{"id", e.id},
                     {"vector", std::vector<double>(e.vector.data(),
                                                    e.vector.data() + e.vector.size())}});
    }
    cats[std::string(to_string(category))] = std::move(arr);
  }
  return {{"categories", std::move(cats)}};
}

inline SupportSet support_from_json(const nlohmann::json& j) {
  SupportSet s;
  try {
    for (const auto& [name, arr] : j.at("categories").items()) {
      Category c = category_or_throw(name);
      auto& out = s.exemplars[c];
      for (const auto& e : arr) {
        auto v = e.at("vector").get<std::vector<double>>();
        out.push_back({e.at("id").get<std::string>(),
                       Eigen::Map<const Eigen::VectorXd>(
                           v.data(), static_cast<Eigen::Index>(v.size()))});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed support file: ") + e.what());
  }
  return s;
}

inline void save_support(const std::string& path, const SupportSet& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write support file '" + path + "'");
  out << to_json(s).dump() << '\n';
}

inline SupportSet load_support(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open support file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw data_error("malformed support file '" + path + "'");
  }
  return support_from_json(j);
}

inline nlohmann::json to_json(const Prediction& p) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& [c, s] : p.ranking) {
    ranking.push_back({{"category", std::string(to_string(c))}, {"score", s}});
  }
  return {{"id", p.test_id}, {"ranking", std::move(ranking)}};
}

}  // namespace flaketype
