#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "airwrite/errors.hpp"

namespace airwrite {

struct StatTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double dof1 = 0.0;  // t-tests: the (possibly fractional) degrees of freedom
  double dof2 = 0.0;  // ANOVA only: within-group degrees of freedom
};

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta parameters must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(F > f) for F ~ F(d1, d2).
inline double f_survival(double f, double d1, double d2) {
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

// P(T > t) for Student t with `dof` degrees of freedom.
inline double t_survival(double t, double dof) {
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t >= 0.0 ? tail : 1.0 - tail;
}

// Single-factor ANOVA. F = MS_between / MS_within with (k-1, N-k) dof.
inline StatTestResult one_way_anova(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw Error(ErrorCode::InvalidArgument, "ANOVA needs at least 2 groups");
  std::size_t n_total = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw Error(ErrorCode::InvalidArgument, "each ANOVA group needs at least 2 samples");
    for (double v : g) grand += v;
    n_total += g.size();
  }
  grand /= static_cast<double>(n_total);
  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double v : g) ss_within += (v - mean) * (v - mean);
  }
  const double k = static_cast<double>(groups.size());
  const double d1 = k - 1.0;
  const double d2 = static_cast<double>(n_total) - k;
  StatTestResult r{0.0, 1.0, d1, d2};
  if (ss_within == 0.0) {
    if (ss_between == 0.0) throw Error(ErrorCode::DegenerateGroups, "all observations are identical");
    r.statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.statistic = (ss_between / d1) / (ss_within / d2);
  r.p_value = f_survival(r.statistic, d1, d2);
  return r;
}

// One-tailed t-test. The statistic is signed (positive when mean(a) >
// mean(b)); the p-value is the upper tail at |t|. Paired mode uses the
// per-index differences, unpaired mode is Welch's test.
inline StatTestResult t_test_one_tailed(std::span<const double> a, std::span<const double> b,
                                        bool paired = true) {
  auto mean_var = [](std::span<const double> xs) {
    double m = 0.0;
    for (double v : xs) m += v;
    m /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double v : xs) ss += (v - m) * (v - m);
    return std::pair{m, ss / static_cast<double>(xs.size() - 1)};
  };
  StatTestResult r;
  double diff = 0.0;
  double se2 = 0.0;
  if (paired) {
    if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
    if (a.size() < 2) throw Error(ErrorCode::InvalidArgument, "paired t-test needs at least 2 pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const auto [m, v] = mean_var(d);
    diff = m;
    se2 = v / static_cast<double>(d.size());
    r.dof1 = static_cast<double>(d.size() - 1);
  } else {
    if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::InvalidArgument, "each sample needs at least 2 values");
    const auto [ma, va] = mean_var(a);
    const auto [mb, vb] = mean_var(b);
    const double sa = va / static_cast<double>(a.size());
    const double sb = vb / static_cast<double>(b.size());
    diff = ma - mb;
    se2 = sa + sb;
    r.dof1 = se2 == 0.0 ? static_cast<double>(a.size() + b.size() - 2)
                        : se2 * se2 / (sa * sa / static_cast<double>(a.size() - 1) +
                                       sb * sb / static_cast<double>(b.size() - 1));
  }
  if (se2 == 0.0) {
    if (diff == 0.0) throw Error(ErrorCode::ZeroVariance, "samples are identical; no evidence either way");
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = 0.0;
    return r;
  }
  r.statistic = diff / std::sqrt(se2);
  r.p_value = t_survival(std::abs(r.statistic), r.dof1);
  return r;
}

}  // namespace airwrite
