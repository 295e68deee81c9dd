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

// Supervised baselines over labeled feature matrices: k-nearest neighbours,
// a CART decision tree, a bagged random forest and a one-vs-rest linear SVM.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "flaketype/category.hpp"
#include "flaketype/dataset.hpp"
#include "flaketype/error.hpp"
#include "flaketype/random.hpp"

namespace flaketype {

// Category-sorted class list of a training set.
inline std::vector<Category> class_list(const LabeledSet& train) {
  auto s = train.categories();
  return {s.begin(), s.end()};
}

// Index of the best entry under "higher value wins, then lower category
// name".
inline std::size_t argmax_by_name(const std::vector<Category>& classes,
                                  const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (values[i] > values[best] ||
        (values[i] == values[best] && to_string(classes[i]) < to_string(classes[best]))) {
      best = i;
    }
  }
  return best;
}

// ---- k-nearest neighbours ----

struct KnnResult {
  Category label;
  std::vector<Category> classes;
  std::vector<double> scores;  // inverse-distance weight share per class
};

inline KnnResult knn_classify(const LabeledSet& train, const Eigen::VectorXd& query,
                              std::size_t k = 5) {
  if (train.size() == 0) throw data_error("KNN needs a non-empty training set");
  if (k < 1 || k > train.size()) {
    throw usage_error("KNN k must lie in [1, training size]");
  }
  if (static_cast<std::size_t>(query.size()) != train.dim()) {
    throw data_error("query dim does not match the training data");
  }
  std::vector<std::pair<double, std::size_t>> dist(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    dist[i] = {(train.X.row(static_cast<Eigen::Index>(i)).transpose() - query).norm(), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                    dist.end());
  KnnResult r;
  r.classes = class_list(train);
  std::vector<double> votes(r.classes.size(), 0.0);
  std::vector<double> dist_sum(r.classes.size(), 0.0);
  r.scores.assign(r.classes.size(), 0.0);
  double weight_total = 0.0;
  for (std::size_t n = 0; n < k; ++n) {
    const auto c = static_cast<std::size_t>(
        std::lower_bound(r.classes.begin(), r.classes.end(), train.labels[dist[n].second]) -
        r.classes.begin());
    votes[c] += 1.0;
    dist_sum[c] += dist[n].first;
    const double w = 1.0 / (dist[n].first + 1e-12);
    r.scores[c] += w;
    weight_total += w;
  }
  for (auto& s : r.scores) s /= weight_total;
  // Majority, then smaller mean distance, then category name.
  std::size_t best = r.classes.size();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    if (votes[c] == 0) continue;
    if (best == r.classes.size()) {
      best = c;
      continue;
    }
    const double mc = dist_sum[c] / votes[c];
    const double mb = dist_sum[best] / votes[best];
    if (votes[c] > votes[best] || (votes[c] == votes[best] && mc < mb) ||
        (votes[c] == votes[best] && mc == mb &&
         to_string(r.classes[c]) < to_string(r.classes[best]))) {
      best = c;
    }
  }
  r.label = r.classes[best];
  return r;
}

inline Category knn_predict(const LabeledSet& train, const Eigen::VectorXd& query,
                            std::size_t k = 5) {
  return knn_classify(train, query, k).label;
}

// ---- CART decision tree ----

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Category label = Category::kAsyncWaits;
  std::vector<double> class_counts;  // in the tree's class order
};

struct DecisionTree {
  std::vector<Category> classes;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack = {{0, 0}};
    while (!stack.empty()) {
      auto [n, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (nodes[static_cast<std::size_t>(n)].feature >= 0) {
        stack.push_back({nodes[static_cast<std::size_t>(n)].left, d + 1});
        stack.push_back({nodes[static_cast<std::size_t>(n)].right, d + 1});
      }
    }
    return best;
  }
};

struct TreeConfig {
  std::size_t max_depth = 0;     // 0: unlimited
  std::size_t min_leaf = 1;
  std::size_t max_features = 0;  // 0: all features
};

namespace tree_detail {

inline double gini(const std::vector<double>& counts, double n) {
  if (n <= 0) return 0.0;
  double s = 1.0;
  for (double c : counts) s -= (c / n) * (c / n);
  return s;
}

struct Builder {
  const LabeledSet& data;
  const std::vector<std::size_t>& class_of;  // row -> class index
  std::size_t n_classes;
  TreeConfig config;
  Rng* rng;
  DecisionTree tree;

  std::vector<double> counts(const std::vector<std::size_t>& rows) const {
    std::vector<double> c(n_classes, 0.0);
    for (auto r : rows) c[class_of[r]] += 1.0;
    return c;
  }

  int build(std::vector<std::size_t> rows, std::size_t depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto cnt = counts(rows);
    tree.nodes[static_cast<std::size_t>(id)].class_counts = cnt;
    tree.nodes[static_cast<std::size_t>(id)].label =
        tree.classes[argmax_by_name(tree.classes, cnt)];
    const double n = static_cast<double>(rows.size());
    const bool pure = std::count_if(cnt.begin(), cnt.end(), [](double c) { return c > 0; }) <= 1;
    if (pure || (config.max_depth && depth >= config.max_depth) ||
        rows.size() < 2 * config.min_leaf) {
      return id;
    }
    const std::size_t d = data.dim();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    if (config.max_features && config.max_features < d) {
      shuffle(std::span(features), *rng);
    }
    const std::size_t wanted = config.max_features ? config.max_features : d;
    int best_f = -1;
    double best_thr = 0.0, best_imp = std::numeric_limits<double>::infinity();
    std::size_t visited = 0;
    std::vector<std::pair<double, std::size_t>> vals(rows.size());
    for (std::size_t fi = 0; fi < d && visited < wanted; ++fi) {
      const auto f = static_cast<Eigen::Index>(features[fi]);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        vals[i] = {data.X(static_cast<Eigen::Index>(rows[i]), f), class_of[rows[i]]};
      }
      std::sort(vals.begin(), vals.end());
      if (vals.front().first == vals.back().first) continue;  // constant here
      ++visited;
      std::vector<double> left(n_classes, 0.0), right = cnt;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left[vals[i].second] += 1;
        right[vals[i].second] -= 1;
        if (vals[i].first == vals[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        if (nl < static_cast<double>(config.min_leaf) ||
            nr < static_cast<double>(config.min_leaf)) {
          continue;
        }
        const double imp = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (imp < best_imp) {
          best_imp = imp;
          best_f = static_cast<int>(f);
          best_thr = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
          if (best_thr <= vals[i].first) best_thr = vals[i + 1].first;
        }
      }
    }
    if (best_f < 0) return id;
    std::vector<std::size_t> l, r;
    for (auto row : rows) {
      (data.X(static_cast<Eigen::Index>(row), best_f) < best_thr ? l : r).push_back(row);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int li = build(std::move(l), depth + 1);
    const int ri = build(std::move(r), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_f;
    node.threshold = best_thr;
    node.left = li;
    node.right = ri;
    return id;
  }
};

}  // namespace tree_detail

// Grows a tree on `rows` of `train` (all rows when empty). Split candidates
// are midpoints between consecutive distinct values; samples with a value
// below the threshold go left.
inline DecisionTree dt_train(const LabeledSet& train, const TreeConfig& config = {},
                             std::vector<std::size_t> rows = {}, Rng* rng = nullptr,
                             std::vector<Category> classes = {}) {
  if (train.size() == 0) throw data_error("decision tree needs at least one sample");
  if (config.min_leaf < 1) throw usage_error("min_leaf must be at least 1");
  if (!train.X.allFinite()) throw data_error("training data has a non-finite value");
  if (rows.empty()) {
    rows.resize(train.size());
    std::iota(rows.begin(), rows.end(), 0);
  }
  if (classes.empty()) classes = class_list(train);
  std::vector<std::size_t> class_of(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    class_of[i] = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), train.labels[i]) - classes.begin());
  }
  Rng fallback = make_rng(0);
  tree_detail::Builder b{train, class_of, classes.size(), config,
                         rng ? rng : &fallback, {}};
  b.tree.classes = classes;
  b.build(std::move(rows), 0);
  return std::move(b.tree);
}

inline const TreeNode& dt_leaf(const DecisionTree& tree, const Eigen::VectorXd& query) {
  std::size_t n = 0;
  while (tree.nodes[n].feature >= 0) {
    const auto& node = tree.nodes[n];
    n = static_cast<std::size_t>(query[node.feature] < node.threshold ? node.left
                                                                       : node.right);
  }
  return tree.nodes[n];
}

inline Category dt_predict(const DecisionTree& tree, const Eigen::VectorXd& query) {
  return dt_leaf(tree, query).label;
}

// Class fractions of the leaf reached by `query`.
inline std::vector<double> dt_scores(const DecisionTree& tree, const Eigen::VectorXd& query) {
  const auto& leaf = dt_leaf(tree, query);
  const double n = std::accumulate(leaf.class_counts.begin(), leaf.class_counts.end(), 0.0);
  std::vector<double> out = leaf.class_counts;
  for (auto& v : out) v /= n;
  return out;
}

// ---- random forest ----

struct RandomForest {
  std::vector<Category> classes;
  std::vector<DecisionTree> trees;
};

struct ForestConfig {
  std::size_t n_trees = 200;
  std::uint64_t seed = 0;
  bool bootstrap = true;
  std::size_t max_features = 0;  // 0: ceil(sqrt(dims))
  TreeConfig tree;
  std::size_t jobs = 1;
};

// Tree t uses its own generator seeded from (seed, t), so the forest does
// not depend on `jobs`.
inline RandomForest rf_train(const LabeledSet& train, const ForestConfig& config = {}) {
  if (config.n_trees < 1) throw usage_error("forest needs at least one tree");
  if (train.size() == 0) throw data_error("forest needs at least one sample");
  RandomForest forest;
  forest.classes = class_list(train);
  forest.trees.resize(config.n_trees);
  TreeConfig tc = config.tree;
  tc.max_features = config.max_features
                        ? config.max_features
                        : static_cast<std::size_t>(
                              std::ceil(std::sqrt(static_cast<double>(train.dim()))));
  auto grow = [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(config.seed, "forest-tree", t));
    std::vector<std::size_t> rows(train.size());
    if (config.bootstrap) {
      for (auto& r : rows) r = uniform_index(rng, train.size());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees[t] = dt_train(train, tc, std::move(rows), &rng, forest.classes);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, config.n_trees));
  if (jobs == 1) {
    for (std::size_t t = 0; t < config.n_trees; ++t) grow(t);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t j = 0; j < jobs; ++j) {
      workers.emplace_back([&, j] {
        try {
          for (std::size_t t = j; t < config.n_trees; t += jobs) grow(t);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return forest;
}

// Votes per class, in forest.classes order; they sum to the tree count.
inline std::vector<std::size_t> rf_votes(const RandomForest& forest,
                                         const Eigen::VectorXd& query) {
  std::vector<std::size_t> votes(forest.classes.size(), 0);
  for (const auto& tree : forest.trees) {
    const Category c = dt_predict(tree, query);
    ++votes[static_cast<std::size_t>(
        std::lower_bound(forest.classes.begin(), forest.classes.end(), c) -
        forest.classes.begin())];
  }
  return votes;
}

inline std::vector<double> rf_scores(const RandomForest& forest,
                                     const Eigen::VectorXd& query) {
  auto votes = rf_votes(forest, query);
  std::vector<double> out(votes.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    out[i] = static_cast<double>(votes[i]) / static_cast<double>(forest.trees.size());
  }
  return out;
}

inline Category rf_predict(const RandomForest& forest, const Eigen::VectorXd& query) {
  return forest.classes[argmax_by_name(forest.classes, rf_scores(forest, query))];
}

// ---- one-vs-rest linear SVM ----

struct SvmConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.1;
  double reg = 1e-3;
};

// Features are standardized with the training mean and deviation before
// the per-class hinge-loss fit.
struct LinearSvm {
  std::vector<Category> classes;
  Eigen::MatrixXd W;  // one row per class
  Eigen::VectorXd b;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  std::vector<std::vector<double>> objective;  // per class, per epoch
};

// Full-batch subgradient descent on reg/2 |w|^2 + mean(max(0, 1 - y f(x)))
// with step size lr / sqrt(epoch + 1).
inline LinearSvm svm_train(const LabeledSet& train, const SvmConfig& config = {}) {
  if (!train.X.allFinite()) throw data_error("SVM features must be finite");
  LinearSvm svm;
  svm.classes = class_list(train);
  if (svm.classes.size() < 2) throw data_error("SVM needs at least 2 classes");
  const auto n = static_cast<Eigen::Index>(train.size());
  const auto d = static_cast<Eigen::Index>(train.dim());
  svm.mean = train.X.colwise().mean().transpose();
  Eigen::MatrixXd Xs = train.X.rowwise() - svm.mean.transpose();
  svm.scale = (Xs.array().square().colwise().sum() / static_cast<double>(n)).sqrt().transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (svm.scale[j] == 0.0) svm.scale[j] = 1.0;
  }
  Xs = Xs.array().rowwise() / svm.scale.transpose().array();
  svm.W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(svm.classes.size()), d);
  svm.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(svm.classes.size()));
  for (std::size_t c = 0; c < svm.classes.size(); ++c) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y[i] = train.labels[static_cast<std::size_t>(i)] == svm.classes[c] ? 1.0 : -1.0;
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    double bias = 0.0;
    std::vector<double> trace;
    for (std::size_t e = 0; e < config.epochs; ++e) {
      const Eigen::VectorXd margin = y.cwiseProduct((Xs * w).array().matrix() +
                                                    Eigen::VectorXd::Constant(n, bias));
      double hinge = 0.0;
      Eigen::VectorXd gw = config.reg * w;
      double gb = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (margin[i] < 1.0) {
          hinge += 1.0 - margin[i];
          gw -= y[i] * Xs.row(i).transpose() / static_cast<double>(n);
          gb -= y[i] / static_cast<double>(n);
        }
      }
      trace.push_back(0.5 * config.reg * w.squaredNorm() + hinge / static_cast<double>(n));
      const double step = config.learning_rate / std::sqrt(static_cast<double>(e + 1));
      w -= step * gw;
      bias -= step * gb;
    }
    svm.W.row(static_cast<Eigen::Index>(c)) = w.transpose();
    svm.b[static_cast<Eigen::Index>(c)] = bias;
    svm.objective.push_back(std::move(trace));
  }
  return svm;
}

inline std::vector<double> svm_scores(const LinearSvm& svm, const Eigen::VectorXd& query) {
  if (!query.allFinite()) throw data_error("SVM features must be finite");
  const Eigen::VectorXd x = (query - svm.mean).cwiseQuotient(svm.scale);
  const Eigen::VectorXd f = svm.W * x + svm.b;
  return {f.data(), f.data() + f.size()};
}

inline Category svm_predict(const LinearSvm& svm, const Eigen::VectorXd& query) {
  return svm.classes[argmax_by_name(svm.classes, svm_scores(svm, query))];
}

}  // namespace flaketype
