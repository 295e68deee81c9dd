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

// Scalar re-implementations of the metrics working from raw label lists,
// by different formulas than the library: MCC as a covariance ratio over
// one-hot indicators, AUC by enumerating positive/negative pairs.

#include <cmath>
#include <cstddef>
#include <vector>

#include "flaketype/metrics.hpp"
#include "flaketype/random.hpp"

namespace flaketype::testing {

struct OracleMetrics {
  double precision = 0, recall = 0, f1 = 0, mcc = 0, auc = 0;
};

inline OracleMetrics oracle_metrics(std::size_t classes, const std::vector<int>& truth,
                                    const std::vector<int>& pred,
                                    const std::vector<std::vector<double>>& scores) {
  const std::size_t n = truth.size();
  OracleMetrics o;
  double auc_w = 0;
  for (std::size_t k = 0; k < classes; ++k) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool t = truth[i] == static_cast<int>(k);
      const bool p = pred[i] == static_cast<int>(k);
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double support = tp + fn;
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0;
    const double rec = support > 0 ? tp / support : 0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0;
    o.precision += support * prec / static_cast<double>(n);
    o.recall += support * rec / static_cast<double>(n);
    o.f1 += support * f1 / static_cast<double>(n);
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (truth[i] != static_cast<int>(k)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (truth[j] == static_cast<int>(k)) continue;
        pairs += 1;
        if (scores[i][k] > scores[j][k]) wins += 1;
        if (scores[i][k] == scores[j][k]) wins += 0.5;
      }
    }
    if (pairs > 0) {
      o.auc += support * wins / pairs;
      auc_w += support;
    }
  }
  o.auc = auc_w > 0 ? o.auc / auc_w : std::nan("");
  // Covariance between one-hot prediction and truth indicator matrices.
  auto cov = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double s = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      double ma = 0, mb = 0;
      for (std::size_t i = 0; i < n; ++i) {
        ma += a[i] == static_cast<int>(k);
        mb += b[i] == static_cast<int>(k);
      }
      ma /= static_cast<double>(n);
      mb /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        s += ((a[i] == static_cast<int>(k)) - ma) * ((b[i] == static_cast<int>(k)) - mb);
      }
    }
    return s;
  };
  const double denom = cov(pred, pred) * cov(truth, truth);
  o.mcc = denom > 0 ? cov(pred, truth) / std::sqrt(denom) : 0.0;
  return o;
}

struct RandomScoredSet {
  std::size_t classes;
  std::vector<int> truth, pred;
  std::vector<std::vector<double>> scores;
};

// Random labels and scores; predictions are the score argmax. Scores are
// drawn from a coarse grid so ties occur.
inline RandomScoredSet random_scored_set(std::uint64_t seed) {
  Rng rng = make_rng(seed);
  RandomScoredSet s;
  s.classes = 2 + uniform_index(rng, 4);
  const std::size_t n = 5 + uniform_index(rng, 60);
  for (std::size_t i = 0; i < n; ++i) {
    const int t = static_cast<int>(uniform_index(rng, s.classes));
    std::vector<double> row(s.classes);
    for (auto& v : row) v = static_cast<double>(uniform_index(rng, 10)) / 10.0;
    // Bias the true class upwards half of the time.
    if (coin_flip(rng)) row[static_cast<std::size_t>(t)] += 0.5;
    int best = 0;
    for (std::size_t k = 1; k < s.classes; ++k) {
      if (row[k] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    s.truth.push_back(t);
    s.pred.push_back(best);
    s.scores.push_back(row);
  }
  return s;
}

inline MetricsReport library_metrics(const RandomScoredSet& s) {
  std::vector<Category> classes(kAllCategories.begin(),
                                kAllCategories.begin() + static_cast<std::ptrdiff_t>(s.classes));
  ConfusionMatrix cm(classes);
  std::vector<Category> truth;
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(s.truth.size()),
                         static_cast<Eigen::Index>(s.classes));
  for (std::size_t i = 0; i < s.truth.size(); ++i) {
    cm.add(classes[static_cast<std::size_t>(s.truth[i])],
           classes[static_cast<std::size_t>(s.pred[i])]);
    truth.push_back(classes[static_cast<std::size_t>(s.truth[i])]);
    for (std::size_t k = 0; k < s.classes; ++k) {
      scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = s.scores[i][k];
    }
  }
  return compute_metrics(cm, scores, truth);
}

// Largest absolute difference between library and oracle over all five
// headline metrics; NaN AUCs on both sides count as agreement.
inline double metric_discrepancy(const RandomScoredSet& s) {
  const MetricsReport r = library_metrics(s);
  const OracleMetrics o = oracle_metrics(s.classes, s.truth, s.pred, s.scores);
  double worst = 0;
  for (auto [a, b] : {std::pair{r.precision, o.precision}, {r.recall, o.recall},
                      {r.f1, o.f1}, {r.mcc, o.mcc}, {r.auc, o.auc}}) {
    if (std::isnan(a) && std::isnan(b)) continue;
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace flaketype::testing
