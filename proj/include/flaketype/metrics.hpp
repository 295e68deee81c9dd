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

// Classification metrics: support-weighted precision, recall and F1, the
// multiclass Matthews correlation coefficient, and one-vs-rest AUC.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "flaketype/category.hpp"
#include "flaketype/error.hpp"

namespace flaketype {

// Rows are true classes, columns predicted classes, both in `classes` order.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<Category> classes)
      : classes_(std::move(classes)),
        counts_(classes_.size(), std::vector<std::size_t>(classes_.size(), 0)) {}

  const std::vector<Category>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  std::size_t index(Category c) const {
    auto it = std::find(classes_.begin(), classes_.end(), c);
    if (it == classes_.end()) {
      throw data_error("category " + std::string(to_string(c)) +
                       " is not one of the evaluated classes");
    }
    return static_cast<std::size_t>(it - classes_.begin());
  }

  void add(Category truth, Category predicted, std::size_t n = 1) {
    counts_[index(truth)][index(predicted)] += n;
  }
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth][predicted];
  }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts_) t = std::accumulate(row.begin(), row.end(), t);
    return t;
  }
  std::size_t true_count(std::size_t k) const {
    return std::accumulate(counts_[k].begin(), counts_[k].end(), std::size_t{0});
  }
  std::size_t predicted_count(std::size_t k) const {
    std::size_t t = 0;
    for (const auto& row : counts_) t += row[k];
    return t;
  }

 private:
  std::vector<Category> classes_;
  std::vector<std::vector<std::size_t>> counts_;
};

inline ConfusionMatrix make_confusion(const std::vector<Category>& classes,
                                      const std::vector<Category>& truth,
                                      const std::vector<Category>& predicted) {
  if (truth.size() != predicted.size()) {
    throw internal_error("truth and prediction counts differ");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = std::numeric_limits<double>::quiet_NaN();
  std::size_t support = 0;
};

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double auc = std::numeric_limits<double>::quiet_NaN();
  std::map<Category, ClassMetrics> per_class;
  std::vector<std::string> warnings;
};

// One-vs-rest AUC of `scores` for the positives `is_positive`, by the
// Mann-Whitney statistic with ties counted as one half. NaN when either
// side is empty.
inline double binary_auc(const std::vector<double>& scores,
                         const std::vector<bool>& is_positive) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over runs of equal scores.
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive[order[k]]) {
        pos_rank_sum += rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::numeric_limits<double>::quiet_NaN();
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1) / 2.0) / (np * static_cast<double>(n_neg));
}

// Multiclass MCC from the confusion matrix (the R_K statistic); 0 when the
// denominator vanishes.
inline double multiclass_mcc(const ConfusionMatrix& cm) {
  const double s = static_cast<double>(cm.total());
  double c = 0.0, pt = 0.0, pp = 0.0, tt = 0.0;
  for (std::size_t k = 0; k < cm.size(); ++k) {
    c += static_cast<double>(cm.at(k, k));
    const double p = static_cast<double>(cm.predicted_count(k));
    const double t = static_cast<double>(cm.true_count(k));
    pt += p * t;
    pp += p * p;
    tt += t * t;
  }
  const double denom = (s * s - pp) * (s * s - tt);
  if (denom <= 0.0) return 0.0;
  return (c * s - pt) / std::sqrt(denom);
}

// `scores` (one row per query, columns in cm.classes() order) and `truth`
// feed the AUC; pass an empty matrix to skip it. Classes absent from the
// ground truth are left out of every weighted average with a warning.
inline MetricsReport compute_metrics(const ConfusionMatrix& cm,
                                     const Eigen::MatrixXd& scores = {},
                                     const std::vector<Category>& truth = {}) {
  MetricsReport r;
  const std::size_t total = cm.total();
  if (total == 0) throw data_error("no evaluated queries");
  const bool with_auc = scores.size() > 0;
  if (with_auc && (static_cast<std::size_t>(scores.rows()) != truth.size() ||
                   static_cast<std::size_t>(scores.cols()) != cm.size())) {
    throw internal_error("score table does not match the evaluated classes");
  }
  double auc_weight = 0.0, auc_sum = 0.0;
  for (std::size_t k = 0; k < cm.size(); ++k) {
    const Category c = cm.classes()[k];
    ClassMetrics m;
    m.support = cm.true_count(k);
    const double tp = static_cast<double>(cm.at(k, k));
    const std::size_t predicted = cm.predicted_count(k);
    m.precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    m.recall = m.support == 0 ? 0.0 : tp / static_cast<double>(m.support);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2 * m.precision * m.recall / (m.precision + m.recall);
    if (m.support == 0) {
      r.warnings.push_back("class " + std::string(to_string(c)) +
                           " has no true instances; excluded from averages");
    }
    if (with_auc) {
      std::vector<double> col(scores.rows());
      std::vector<bool> pos(scores.rows());
      for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        col[static_cast<std::size_t>(i)] = scores(i, static_cast<Eigen::Index>(k));
        pos[static_cast<std::size_t>(i)] = truth[static_cast<std::size_t>(i)] == c;
      }
      m.auc = binary_auc(col, pos);
      if (!std::isnan(m.auc)) {
        auc_sum += static_cast<double>(m.support) * m.auc;
        auc_weight += static_cast<double>(m.support);
      }
    }
    const double w = static_cast<double>(m.support) / static_cast<double>(total);
    r.precision += w * m.precision;
    r.recall += w * m.recall;
    r.f1 += w * m.f1;
    r.per_class[c] = m;
  }
  r.mcc = multiclass_mcc(cm);
  if (with_auc) {
    if (auc_weight > 0.0) {
      r.auc = auc_sum / auc_weight;
    } else {
      r.warnings.push_back("AUC undefined: ground truth holds a single class");
    }
  }
  return r;
}

// Arithmetic mean over folds; per-class values average over the folds in
// which the class occurs, NaN AUCs are skipped.
inline MetricsReport average_reports(const std::vector<MetricsReport>& folds) {
  if (folds.empty()) throw internal_error("no fold reports to average");
  MetricsReport out;
  out.auc = 0.0;
  std::size_t auc_n = 0;
  std::map<Category, std::size_t> seen, auc_seen;
  for (const auto& f : folds) {
    out.precision += f.precision;
    out.recall += f.recall;
    out.f1 += f.f1;
    out.mcc += f.mcc;
    if (!std::isnan(f.auc)) {
      out.auc += f.auc;
      ++auc_n;
    }
    for (const auto& [c, m] : f.per_class) {
      if (m.support == 0) continue;
      auto& acc = out.per_class[c];
      if (!seen[c]++) acc.auc = 0.0;
      acc.precision += m.precision;
      acc.recall += m.recall;
      acc.f1 += m.f1;
      acc.support += m.support;
      if (!std::isnan(m.auc)) {
        acc.auc += m.auc;
        ++auc_seen[c];
      }
    }
    out.warnings.insert(out.warnings.end(), f.warnings.begin(), f.warnings.end());
  }
  const double n = static_cast<double>(folds.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  out.mcc /= n;
  out.auc = auc_n ? out.auc / static_cast<double>(auc_n)
                  : std::numeric_limits<double>::quiet_NaN();
  for (auto& [c, m] : out.per_class) {
    const double k = static_cast<double>(seen[c]);
    m.precision /= k;
    m.recall /= k;
    m.f1 /= k;
    m.auc = auc_seen[c] ? m.auc / static_cast<double>(auc_seen[c])
                        : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

inline nlohmann::json nan_to_null(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

inline nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [c, m] : r.per_class) {
    per[std::string(to_string(c))] = {{"precision", m.precision},
                                      {"recall", m.recall},
                                      {"f1", m.f1},
                                      {"auc", nan_to_null(m.auc)},
                                      {"support", m.support}};
  }
  return {{"precision", r.precision}, {"recall", r.recall},
          {"f1", r.f1},               {"mcc", r.mcc},
          {"auc", nan_to_null(r.auc)}, {"per_class", std::move(per)},
          {"warnings", r.warnings}};
}

}  // namespace flaketype
