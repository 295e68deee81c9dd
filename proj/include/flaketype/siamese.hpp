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

// The learned similarity space: an affine map followed by L2 normalization,
// trained with a triplet margin loss, in-batch hard-negative mining and
// plain SGD on hand-derived gradients.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "flaketype/category.hpp"
#include "flaketype/dataset.hpp"
#include "flaketype/error.hpp"
#include "flaketype/random.hpp"

namespace flaketype {

struct TrainingConfig {
  double margin = 0.3;
  std::size_t num_pairs = 10000;
  double learning_rate = 0.01;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  std::size_t output_dim = 512;
};

struct SiameseModel {
  Eigen::MatrixXd W;  // output_dim x input_dim
  Eigen::VectorXd b;
  std::uint64_t seed = 0;
  TrainingConfig config;
  std::vector<double> loss_history;  // mean triplet loss of each batch

  std::size_t input_dim() const { return static_cast<std::size_t>(W.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(W.rows()); }
};

inline void validate_config(const TrainingConfig& c) {
  if (!(c.margin > 0.0 && c.margin < 1.0)) {
    throw usage_error("margin must lie in (0, 1)");
  }
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw usage_error("learning rate must be positive");
  }
  if (c.batch_size == 0) throw usage_error("batch size must be positive");
  if (c.output_dim == 0) throw usage_error("output dim must be positive");
}

// Uniform in +-sqrt(6 / (d + out)), zero bias.
inline SiameseModel init_model(std::size_t input_dim, const TrainingConfig& config) {
  if (input_dim == 0) throw data_error("input dim must be positive");
  SiameseModel m;
  m.seed = config.seed;
  m.config = config;
  const auto out = static_cast<Eigen::Index>(config.output_dim);
  const auto d = static_cast<Eigen::Index>(input_dim);
  const double a = std::sqrt(6.0 / static_cast<double>(input_dim + config.output_dim));
  Rng rng = make_rng(derive_seed(config.seed, "siamese-init", 0));
  m.W.resize(out, d);
  for (Eigen::Index i = 0; i < out; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m.W(i, j) = uniform_real(rng, -a, a);
  }
  m.b = Eigen::VectorXd::Zero(out);
  return m;
}

inline void check_input(const SiameseModel& model, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != model.input_dim()) {
    throw data_error("input has dim " + std::to_string(x.size()) +
                     ", model expects " + std::to_string(model.input_dim()));
  }
  if (!x.allFinite()) throw data_error("input has a non-finite value");
}

inline Eigen::VectorXd normalize_or_throw(const Eigen::VectorXd& z) {
  const double n = z.norm();
  if (!(n > std::numeric_limits<double>::min()) || !std::isfinite(n)) {
    throw data_error("degenerate pre-normalization output");
  }
  return z / n;
}

inline Eigen::VectorXd forward(const SiameseModel& model, const Eigen::VectorXd& x) {
  check_input(model, x);
  return normalize_or_throw(model.W * x + model.b);
}

// Transforms every row of `X`; the result has one unit row per input row.
inline Eigen::MatrixXd forward_rows(const SiameseModel& model, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != model.input_dim()) {
    throw data_error("input has dim " + std::to_string(X.cols()) +
                     ", model expects " + std::to_string(model.input_dim()));
  }
  Eigen::MatrixXd Z = (X * model.W.transpose()).rowwise() + model.b.transpose();
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    Z.row(i) = normalize_or_throw(Z.row(i).transpose()).transpose();
  }
  return Z;
}

inline double cosine_sim(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw data_error("cosine of vectors of different dim");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw data_error("cosine similarity of a zero vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

// For unit vectors the cosine is the dot product.
inline double triplet_loss(const Eigen::VectorXd& a, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& n, double margin) {
  return std::max(a.dot(n) - a.dot(p) + margin, 0.0);
}

struct Candidate {
  const Eigen::VectorXd* x;
  Category label;
};

// Index into `candidates` of the differently labeled candidate closest to
// the anchor in the transformed space; ties go to the lowest index.
inline std::size_t mine_hard_negative(const SiameseModel& model,
                                      const Eigen::VectorXd& anchor,
                                      const std::vector<Candidate>& candidates,
                                      Category anchor_label) {
  const Eigen::VectorXd ya = forward(model, anchor);
  std::size_t best = candidates.size();
  double best_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].label == anchor_label) continue;
    const double s = ya.dot(forward(model, *candidates[i].x));
    if (s > best_sim) {
      best_sim = s;
      best = i;
    }
  }
  if (best == candidates.size()) throw data_error("no negative candidate for anchor");
  return best;
}

struct Gradient {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
};

namespace siamese_detail {

// Backpropagates dL/dy through y = z / |z|, z = W x + b.
inline void accumulate(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       double z_norm, const Eigen::VectorXd& dy, Gradient& g) {
  const Eigen::VectorXd dz = (dy - y * y.dot(dy)) / z_norm;
  g.W.noalias() += dz * x.transpose();
  g.b += dz;
}

}  // namespace siamese_detail

// Triplet loss of forward(a), forward(p), forward(n) and its gradient with
// respect to W and b, accumulated into `grad` when given.
inline double triplet_loss_and_gradient(const SiameseModel& model,
                                        const Eigen::VectorXd& a,
                                        const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& n, double margin,
                                        Gradient* grad) {
  const Eigen::VectorXd za = model.W * a + model.b;
  const Eigen::VectorXd zp = model.W * p + model.b;
  const Eigen::VectorXd zn = model.W * n + model.b;
  const Eigen::VectorXd ya = normalize_or_throw(za);
  const Eigen::VectorXd yp = normalize_or_throw(zp);
  const Eigen::VectorXd yn = normalize_or_throw(zn);
  const double loss = triplet_loss(ya, yp, yn, margin);
  if (grad != nullptr && loss > 0.0) {
    siamese_detail::accumulate(a, ya, za.norm(), yn - yp, *grad);
    siamese_detail::accumulate(p, yp, zp.norm(), -ya, *grad);
    siamese_detail::accumulate(n, yn, zn.norm(), ya, *grad);
  }
  return loss;
}

// Samples `count` anchor-positive pairs: a class uniformly, then two
// distinct members of it uniformly.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(
    const LabeledSet& data, std::size_t count, Rng& rng) {
  std::map<Category, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);
  std::vector<const std::vector<std::size_t>*> classes;
  for (const auto& [c, members] : by_class) classes.push_back(&members);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& members = *classes[uniform_index(rng, classes.size())];
    const std::size_t ai = uniform_index(rng, members.size());
    std::size_t pi = uniform_index(rng, members.size() - 1);
    if (pi >= ai) ++pi;
    pairs.emplace_back(members[ai], members[pi]);
  }
  return pairs;
}

inline void check_training_data(const LabeledSet& data) {
  std::map<Category, std::size_t> counts;
  for (auto c : data.labels) ++counts[c];
  if (counts.size() < 2) throw data_error("training needs at least 2 classes");
  for (const auto& [c, n] : counts) {
    if (n < 2) {
      throw data_error("class " + std::string(to_string(c)) +
                       " has a single example; training needs at least 2");
    }
  }
  if (!data.X.allFinite()) throw data_error("training data has a non-finite value");
}

// Mean triplet loss of one batch with in-batch hard negatives; when `grad`
// is given, accumulates the gradient of that mean. Candidates for the
// negative of anchor i are the batch's anchors and positives in order
// (a0, p0, a1, p1, ...). When the batch holds a single class, `fallback`
// supplies the negative for each anchor.
inline double batch_loss_and_gradient(
    const SiameseModel& model, const LabeledSet& data,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    double margin, Gradient* grad,
    const std::vector<std::size_t>& fallback = {}) {
  std::vector<std::size_t> pool;
  pool.reserve(2 * pairs.size());
  for (const auto& [a, p] : pairs) {
    pool.push_back(a);
    pool.push_back(p);
  }
  Eigen::MatrixXd Xp(static_cast<Eigen::Index>(pool.size()), data.X.cols());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Xp.row(static_cast<Eigen::Index>(i)) = data.X.row(static_cast<Eigen::Index>(pool[i]));
  }
  // Columns are pre-normalization outputs of the pool.
  Eigen::MatrixXd Z = (model.W * Xp.transpose()).colwise() + model.b;
  Eigen::VectorXd norms(Z.cols());
  Eigen::MatrixXd Y(Z.rows(), Z.cols());
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    Y.col(j) = normalize_or_throw(Z.col(j));
    norms[j] = Z.col(j).norm();
  }
  const Eigen::MatrixXd S = Y.transpose() * Y;
  Eigen::MatrixXd dY;
  if (grad != nullptr) dY = Eigen::MatrixXd::Zero(Y.rows(), Y.cols());

  double total = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto ai = static_cast<Eigen::Index>(2 * k);
    const auto pi = ai + 1;
    const Category label = data.labels[pairs[k].first];
    Eigen::Index ni = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (data.labels[pool[j]] == label) continue;
      const double s = S(ai, static_cast<Eigen::Index>(j));
      if (s > best) {
        best = s;
        ni = static_cast<Eigen::Index>(j);
      }
    }
    if (ni >= 0) {
      const double loss = std::max(S(ai, ni) - S(ai, pi) + margin, 0.0);
      total += loss;
      if (grad != nullptr && loss > 0.0) {
        dY.col(ai) += Y.col(ni) - Y.col(pi);
        dY.col(pi) -= Y.col(ai);
        dY.col(ni) += Y.col(ai);
      }
      continue;
    }
    if (k >= fallback.size()) throw internal_error("batch has no negative");
    const Eigen::VectorXd xn = data.row(fallback[k]);
    total += triplet_loss_and_gradient(model, Xp.row(ai).transpose(),
                                       Xp.row(pi).transpose(), xn, margin,
                                       nullptr);
    if (grad != nullptr) {
      Gradient g{Eigen::MatrixXd::Zero(grad->W.rows(), grad->W.cols()),
                 Eigen::VectorXd::Zero(grad->b.size())};
      triplet_loss_and_gradient(model, Xp.row(ai).transpose(),
                                Xp.row(pi).transpose(), xn, margin, &g);
      grad->W += g.W / static_cast<double>(pairs.size());
      grad->b += g.b / static_cast<double>(pairs.size());
    }
  }
  const double count = static_cast<double>(pairs.size());
  if (grad != nullptr) {
    // dZ = (I - y y^T) dY / |z| column by column, then dW = dZ Xp.
    Eigen::MatrixXd dZ(Y.rows(), Y.cols());
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      dZ.col(j) = (dY.col(j) - Y.col(j) * Y.col(j).dot(dY.col(j))) / norms[j];
    }
    dZ /= count;
    grad->W.noalias() += dZ * Xp;
    grad->b += dZ.rowwise().sum();
  }
  return total / count;
}

// One pass over `num_pairs` sampled pairs in batches of `batch_size`.
inline SiameseModel train(const LabeledSet& data, const TrainingConfig& config) {
  validate_config(config);
  check_training_data(data);
  SiameseModel model = init_model(data.dim(), config);
  Rng rng = make_rng(derive_seed(config.seed, "siamese-pairs", 0));
  const auto pairs = sample_pairs(data, config.num_pairs, rng);
  Rng neg_rng = make_rng(derive_seed(config.seed, "siamese-fallback", 0));

  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < pairs.size(); start += config.batch_size) {
    const std::size_t end = std::min(pairs.size(), start + config.batch_size);
    std::vector<std::pair<std::size_t, std::size_t>> batch(pairs.begin() + start,
                                                           pairs.begin() + end);
    // Single-class batch: draw each anchor's negative from the whole set.
    std::vector<std::size_t> fallback;
    const Category first = data.labels[batch.front().first];
    bool single_class = std::all_of(batch.begin(), batch.end(), [&](const auto& pr) {
      return data.labels[pr.first] == first;
    });
    if (single_class) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] != first) others.push_back(i);
      }
      for (std::size_t k = 0; k < batch.size(); ++k) {
        fallback.push_back(others[uniform_index(neg_rng, others.size())]);
      }
    }
    Gradient g{Eigen::MatrixXd::Zero(model.W.rows(), model.W.cols()),
               Eigen::VectorXd::Zero(model.b.size())};
    double loss = std::numeric_limits<double>::quiet_NaN();
    try {
      loss = batch_loss_and_gradient(model, data, batch, config.margin, &g, fallback);
    } catch (const Error& e) {
      throw internal_error("training diverged at batch " + std::to_string(batch_index) +
                           ": " + e.what());
    }
    if (!std::isfinite(loss) || !g.W.allFinite() || !g.b.allFinite()) {
      throw internal_error("non-finite loss or gradient at batch " +
                           std::to_string(batch_index) + " (lr " +
                           std::to_string(config.learning_rate) + ")");
    }
    model.loss_history.push_back(loss);
    model.W -= config.learning_rate * g.W;
    model.b -= config.learning_rate * g.b;
    if (!model.W.allFinite() || !model.b.allFinite()) {
      throw internal_error("non-finite weights after batch " +
                           std::to_string(batch_index));
    }
    ++batch_index;
  }
  return model;
}

inline nlohmann::json to_json(const TrainingConfig& c) {
  return {{"margin", c.margin},         {"num_pairs", c.num_pairs},
          {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"seed", c.seed},             {"output_dim", c.output_dim}};
}

inline TrainingConfig training_config_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  c.margin = j.value("margin", c.margin);
  c.num_pairs = j.value("num_pairs", c.num_pairs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.output_dim = j.value("output_dim", c.output_dim);
  return c;
}

inline nlohmann::json to_json(const SiameseModel& m) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(m.W.size()));
  for (Eigen::Index i = 0; i < m.W.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.W.cols(); ++j) w.push_back(m.W(i, j));
  }
  return {{"input_dim", m.input_dim()},
          {"output_dim", m.output_dim()},
          {"W", w},
          {"b", std::vector<double>(m.b.data(), m.b.data() + m.b.size())},
          {"seed", m.seed},
          {"config", to_json(m.config)},
          {"loss_history", m.loss_history}};
}

inline SiameseModel model_from_json(const nlohmann::json& j) {
  SiameseModel m;
  try {
    const auto d = j.at("input_dim").get<std::size_t>();
    const auto out = j.at("output_dim").get<std::size_t>();
    const auto w = j.at("W").get<std::vector<double>>();
    const auto b = j.at("b").get<std::vector<double>>();
    if (w.size() != d * out || b.size() != out) {
      throw data_error("model weights do not match its dimensions");
    }
    m.W.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < out; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        m.W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = w[i * d + k];
      }
    }
    m.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(out));
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("config")) m.config = training_config_from_json(j.at("config"));
    m.loss_history = j.value("loss_history", std::vector<double>{});
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed model file: ") + e.what());
  }
  if (!m.W.allFinite() || !m.b.allFinite()) {
    throw data_error("model has a non-finite weight");
  }
  return m;
}

inline void save_model(const std::string& path, const SiameseModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write model file '" + path + "'");
  out << to_json(m).dump() << '\n';
}

inline SiameseModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw data_error("malformed model file '" + path + "'");
  }
  return model_from_json(j);
}

}  // namespace flaketype
