#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "airwrite/errors.hpp"
#include "airwrite/matrix.hpp"
#include "airwrite/trial_store.hpp"

namespace airwrite {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  Matrix<std::size_t> counts{kNumClasses, kNumClasses};

  std::size_t n_classes() const { return counts.rows(); }

  std::size_t total() const {
    std::size_t s = 0;
    for (auto v : counts.flat()) s += v;
    return s;
  }

  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < n_classes(); ++i) s += counts(i, i);
    return s;
  }

  double accuracy() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    auto a = counts.flat();
    const auto b = o.counts.flat();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return *this;
  }
};

inline ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                        int n_classes = kNumClasses) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  }
  ConfusionMatrix cm{Matrix<std::size_t>(static_cast<std::size_t>(n_classes), static_cast<std::size_t>(n_classes))};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || predicted[i] < 0 || predicted[i] >= n_classes) {
      throw Error(ErrorCode::InvalidArgument, "class index out of range");
    }
    ++cm.counts(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

struct ConfusablePair {
  int first = 0;   // lower class index
  int second = 0;
  std::size_t count = 0;
  double percent = 0.0;  // share of all off-diagonal mass, in percent
};

// Unordered pairs ranked by counts[i][j] + counts[j][i]; ties resolve
// alphabetically by (first, second).
inline std::vector<ConfusablePair> top_confusable_pairs(const ConfusionMatrix& cm, std::size_t k) {
  const std::size_t n = cm.n_classes();
  const std::size_t errors = cm.total() - cm.trace();
  if (errors == 0) throw Error(ErrorCode::NoErrors, "confusion matrix has no off-diagonal entries");
  std::vector<ConfusablePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t c = cm.counts(i, j) + cm.counts(j, i);
      if (c == 0) continue;
      pairs.push_back({static_cast<int>(i), static_cast<int>(j), c,
                       100.0 * static_cast<double>(c) / static_cast<double>(errors)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  if (pairs.size() > k) pairs.resize(k);
  return pairs;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

inline MeanStd mean_std(std::span<const double> xs) {
  if (xs.empty()) return {};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(xs.size()))};
}

inline std::string format_mean_std(MeanStd ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.3f", ms.mean, ms.std);
  return buf;
}

}  // namespace airwrite
