#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "airwrite/detail/rng.hpp"
#include "airwrite/errors.hpp"
#include "airwrite/matrix.hpp"

namespace airwrite {

struct TrainConfig {
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double val_fraction = 0.2;
  int patience = 10;
  int max_epochs = 500;
  int n_classes = 26;
  double init_scale = 0.01;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be > 0");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "validation fraction must lie in (0, 1)");
    }
    if (patience < 1) throw Error(ErrorCode::InvalidArgument, "patience must be >= 1");
    if (max_epochs < 1) throw Error(ErrorCode::InvalidArgument, "max_epochs must be >= 1");
    if (n_classes < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 classes");
  }
};

// Multinomial logistic regression. weights is n_features x n_classes.
struct BaselineModel {
  Matrix<double> weights;
  std::vector<double> bias;
  std::string feature_spec;

  std::size_t n_features() const { return weights.rows(); }
  std::size_t n_classes() const { return weights.cols(); }
};

struct TrainHistory {
  std::vector<double> train_loss;    // full training-portion loss after each epoch
  std::vector<double> val_accuracy;  // after each epoch
  int best_epoch = -1;
  bool stopped_early = false;
};

struct TrainResult {
  BaselineModel model;
  TrainHistory history;
};

inline void logits_into(const BaselineModel& m, std::span<const double> x, std::span<double> out) {
  std::copy(m.bias.begin(), m.bias.end(), out.begin());
  const std::size_t c = m.n_classes();
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* w = &m.weights(j, 0);
    for (std::size_t k = 0; k < c; ++k) out[k] += xj * w[k];
  }
}

// Argmax of logits per row; ties go to the lowest class index.
inline std::vector<int> predict(const BaselineModel& m, const Matrix<double>& features) {
  if (features.cols() != m.n_features()) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(m.n_features()) +
                                                  " features, got " + std::to_string(features.cols()));
  }
  std::vector<int> out(features.rows());
  std::vector<double> z(m.n_classes());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    logits_into(m, features.row(i), z);
    out[i] = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  return out;
}

// Mean categorical cross-entropy over `rows`, plus its gradient when `grad`
// is non-null (grad must be shaped like m).
inline double cross_entropy(const BaselineModel& m, const Matrix<double>& x, std::span<const int> labels,
                            std::span<const std::size_t> rows, BaselineModel* grad) {
  const std::size_t c = m.n_classes();
  if (grad) {
    std::fill(grad->weights.flat().begin(), grad->weights.flat().end(), 0.0);
    std::fill(grad->bias.begin(), grad->bias.end(), 0.0);
  }
  std::vector<double> z(c);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    const auto xr = x.row(r);
    logits_into(m, xr, z);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double& v : z) {
      v = std::exp(v - zmax);
      denom += v;
    }
    const auto y = static_cast<std::size_t>(labels[r]);
    loss += -(std::log(z[y] / denom));
    if (!grad) continue;
    for (std::size_t k = 0; k < c; ++k) z[k] = (z[k] / denom - (k == y ? 1.0 : 0.0)) * inv_n;
    for (std::size_t j = 0; j < xr.size(); ++j) {
      const double xj = xr[j];
      if (xj == 0.0) continue;
      double* g = &grad->weights(j, 0);
      for (std::size_t k = 0; k < c; ++k) g[k] += xj * z[k];
    }
    for (std::size_t k = 0; k < c; ++k) grad->bias[k] += z[k];
  }
  return loss * inv_n;
}

inline double cross_entropy(const BaselineModel& m, const Matrix<double>& x, std::span<const int> labels,
                            BaselineModel* grad = nullptr) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return cross_entropy(m, x, labels, rows, grad);
}

struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

// Per class, round(fraction * count) shuffled members go to validation.
inline IndexSplit stratified_split(std::span<const int> labels, double val_fraction, std::uint64_t seed) {
  int n_classes = 0;
  for (int y : labels) n_classes = std::max(n_classes, y + 1);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  detail::Rng rng(detail::mix_seed(seed, 0x57A7));
  IndexSplit split;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(members.size())));
    split.val.insert(split.val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_val));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

inline double accuracy_on(const BaselineModel& m, const Matrix<double>& x, std::span<const int> labels,
                          std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  std::vector<double> z(m.n_classes());
  std::size_t hits = 0;
  for (std::size_t r : rows) {
    logits_into(m, x.row(r), z);
    const auto pred = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    hits += pred == labels[r];
  }
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

inline BaselineModel init_model(std::size_t n_features, std::size_t n_classes, double scale, std::uint64_t seed) {
  BaselineModel m{Matrix<double>(n_features, n_classes), std::vector<double>(n_classes, 0.0), {}};
  detail::Rng rng(detail::mix_seed(seed, 0x1A17));
  for (double& w : m.weights.flat()) w = scale * rng.normal();
  return m;
}

// Mini-batch Adam on mean cross-entropy with an 80:20 stratified hold-out.
// Training stops once validation accuracy has not improved for `patience`
// epochs, and the parameters of the best epoch are returned.
inline TrainResult train_baseline(const Matrix<double>& features, std::span<const int> labels,
                                  const TrainConfig& cfg) {
  cfg.validate();
  if (labels.size() != features.rows()) {
    throw Error(ErrorCode::LengthMismatch, "features and labels differ in length");
  }
  if (features.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "need at least one feature");
  std::vector<bool> present(static_cast<std::size_t>(cfg.n_classes), false);
  for (int y : labels) {
    if (y < 0 || y >= cfg.n_classes) throw Error(ErrorCode::InvalidArgument, "label out of range");
    present[static_cast<std::size_t>(y)] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw Error(ErrorCode::DegenerateLabels, "training data holds fewer than 2 classes");
  }
  for (double v : features.flat()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteData, "non-finite feature value");
  }

  auto split = stratified_split(labels, cfg.val_fraction, cfg.seed);
  if (split.train.empty()) throw Error(ErrorCode::DegenerateLabels, "empty training portion");
  // Tiny inputs can leave the hold-out empty; monitor the training portion then.
  const std::span<const std::size_t> monitor = split.val.empty() ? split.train : split.val;

  const std::size_t d = features.cols();
  const auto c = static_cast<std::size_t>(cfg.n_classes);
  TrainResult result{init_model(d, c, cfg.init_scale, cfg.seed), {}};
  BaselineModel& model = result.model;
  BaselineModel grad = model;
  std::vector<double> m1(d * c + c, 0.0), m2(d * c + c, 0.0);

  BaselineModel best = model;
  double best_acc = -1.0;
  int since_best = 0;
  detail::Rng rng(detail::mix_seed(cfg.seed, 0xE90C));
  std::vector<std::size_t> order = split.train;
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      const auto batch = std::span<const std::size_t>(order).subspan(start, len);
      const double loss = cross_entropy(model, features, labels, batch, &grad);
      if (!std::isfinite(loss)) throw Error(ErrorCode::NonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch));
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      auto update = [&](double& param, double g, std::size_t slot) {
        m1[slot] = cfg.beta1 * m1[slot] + (1.0 - cfg.beta1) * g;
        m2[slot] = cfg.beta2 * m2[slot] + (1.0 - cfg.beta2) * g * g;
        const double mhat = m1[slot] / bc1;
        const double vhat = m2[slot] / bc2;
        param -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
      };
      auto w = model.weights.flat();
      const auto gw = grad.weights.flat();
      for (std::size_t i = 0; i < w.size(); ++i) update(w[i], gw[i], i);
      for (std::size_t k = 0; k < c; ++k) update(model.bias[k], grad.bias[k], w.size() + k);
    }
    const double train_loss = cross_entropy(model, features, labels, split.train, nullptr);
    if (!std::isfinite(train_loss)) throw Error(ErrorCode::NonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch));
    const double acc = accuracy_on(model, features, labels, monitor);
    result.history.train_loss.push_back(train_loss);
    result.history.val_accuracy.push_back(acc);
    if (acc > best_acc) {
      best_acc = acc;
      best = model;
      result.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      result.history.stopped_early = true;
      break;
    }
  }
  model = std::move(best);
  return result;
}

}  // namespace airwrite
