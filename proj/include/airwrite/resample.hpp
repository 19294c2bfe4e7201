#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "airwrite/errors.hpp"
#include "airwrite/matrix.hpp"
#include "airwrite/trial_store.hpp"

namespace airwrite {

enum class InterpMethod { Nearest, Linear, Quadratic, Cubic };

inline std::string_view to_string(InterpMethod m) {
  switch (m) {
    case InterpMethod::Nearest: return "nearest";
    case InterpMethod::Linear: return "linear";
    case InterpMethod::Quadratic: return "quadratic";
    case InterpMethod::Cubic: return "cubic";
  }
  return "?";
}

inline InterpMethod parse_interp(std::string_view s) {
  if (s == "nearest") return InterpMethod::Nearest;
  if (s == "linear") return InterpMethod::Linear;
  if (s == "quadratic") return InterpMethod::Quadratic;
  if (s == "cubic") return InterpMethod::Cubic;
  throw Error(ErrorCode::InvalidArgument, "unknown interpolation method '" + std::string(s) + "'");
}

inline std::size_t min_points(InterpMethod m) {
  switch (m) {
    case InterpMethod::Quadratic: return 3;
    case InterpMethod::Cubic: return 4;
    default: return 2;
  }
}

struct ResampleSpec {
  double target_length_s = 4.0;
  InterpMethod method = InterpMethod::Cubic;
};

struct FixedTrial {
  TrialRecord record;
  Matrix<double> samples;  // n_channels x N

  std::size_t n_channels() const { return samples.rows(); }
  std::size_t n_samples() const { return samples.cols(); }
};

// N = round(L * fs), halves away from zero.
inline std::size_t target_samples(double length_s, double sample_rate_hz) {
  if (!(length_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "target length must be > 0");
  return static_cast<std::size_t>(std::llround(length_s * sample_rate_hz));
}

namespace detail {

// Solves a tridiagonal system in place (Thomas algorithm). Diagonally
// dominant systems only; no pivoting.
inline void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                              std::vector<double> upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Quadratic spline on unit-spaced samples with breakpoints at the midpoints
// between samples. Piece i lives on [i - 1/2, i + 1/2] and is
//   y_i + b_i (t - i) + c_i (t - i)^2.
// Unknowns are the slopes m_k at the midpoints k + 1/2; value and slope
// continuity give m_{k-1} + 6 m_k + m_{k+1} = 8 (y_{k+1} - y_k), and the
// natural ends (c_0 = c_{l-1} = 0) turn the first and last rows into 7, 1.
struct QuadraticSpline {
  std::vector<double> b, c;

  explicit QuadraticSpline(std::span<const double> y) {
    const std::size_t l = y.size();
    const std::size_t n = l - 1;
    std::vector<double> lower(n, 1.0), diag(n, 6.0), upper(n, 1.0), m(n);
    for (std::size_t k = 0; k < n; ++k) m[k] = 8.0 * (y[k + 1] - y[k]);
    diag.front() = 7.0;
    diag.back() = n == 1 ? 8.0 : 7.0;  // l == 2 collapses to a single line
    solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper), m);
    b.resize(l);
    c.resize(l);
    b[0] = m[0];
    c[0] = 0.0;
    for (std::size_t i = 1; i + 1 < l; ++i) {
      b[i] = 0.5 * (m[i - 1] + m[i]);
      c[i] = 0.5 * (m[i] - m[i - 1]);
    }
    b[l - 1] = m[n - 1];
    c[l - 1] = 0.0;
  }

  double operator()(std::span<const double> y, double t) const {
    const auto last = static_cast<double>(y.size() - 1);
    const auto i = static_cast<std::size_t>(std::min(std::floor(t + 0.5), last));
    const double u = t - static_cast<double>(i);
    return y[i] + u * (b[i] + u * c[i]);
  }
};

// Not-a-knot cubic spline on unit-spaced samples, parameterized by the second
// derivatives M_i. Interior rows M_{i-1} + 4 M_i + M_{i+1} = 6 (second
// difference); not-a-knot (M_0 = 2 M_1 - M_2 and its mirror) is folded into
// the first and last interior rows.
struct CubicSpline {
  std::vector<double> second;

  explicit CubicSpline(std::span<const double> y) {
    const std::size_t l = y.size();
    const std::size_t n = l - 2;  // interior unknowns M_1..M_{l-2}
    std::vector<double> lower(n, 1.0), diag(n, 4.0), upper(n, 1.0), r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = 6.0 * (y[k + 2] - 2.0 * y[k + 1] + y[k]);
    diag.front() = 6.0;
    upper.front() = 0.0;
    diag.back() = 6.0;
    lower.back() = 0.0;
    solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper), r);
    second.resize(l);
    for (std::size_t k = 0; k < n; ++k) second[k + 1] = r[k];
    second[0] = 2.0 * second[1] - second[2];
    second[l - 1] = 2.0 * second[l - 2] - second[l - 3];
  }

  double operator()(std::span<const double> y, double t) const {
    const std::size_t l = y.size();
    if (t == static_cast<double>(l - 1)) return y[l - 1];
    const auto i = static_cast<std::size_t>(std::floor(t));
    const double u = t - static_cast<double>(i);
    const double m0 = second[i];
    const double m1 = second[i + 1];
    const double slope = (y[i + 1] - y[i]) - (2.0 * m0 + m1) / 6.0;
    return y[i] + u * (slope + u * (0.5 * m0 + u * (m1 - m0) / 6.0));
  }
};

}  // namespace detail

// Evaluates the chosen interpolant of `values` (knots at 0..l-1) at each
// query time, in sample-index units.
inline std::vector<double> interpolate(std::span<const double> values,
                                       std::span<const double> query_times,
                                       InterpMethod method) {
  const std::size_t l = values.size();
  if (l < min_points(method)) {
    throw Error(ErrorCode::InsufficientPoints,
                std::string(to_string(method)) + " interpolation needs at least " +
                    std::to_string(min_points(method)) + " samples");
  }
  const auto last = static_cast<double>(l - 1);
  for (double q : query_times) {
    if (!(q >= 0.0 && q <= last)) {
      throw Error(ErrorCode::OutOfDomain, "query time " + std::to_string(q) + " outside [0, " +
                                              std::to_string(last) + "]");
    }
  }
  std::vector<double> out(query_times.size());
  switch (method) {
    case InterpMethod::Nearest:
      for (std::size_t k = 0; k < out.size(); ++k) {
        const double idx = std::min(std::floor(query_times[k] + 0.5), last);
        out[k] = values[static_cast<std::size_t>(idx)];
      }
      break;
    case InterpMethod::Linear:
      for (std::size_t k = 0; k < out.size(); ++k) {
        const double t = query_times[k];
        if (t == last) {
          out[k] = values[l - 1];
          continue;
        }
        const auto i = static_cast<std::size_t>(std::floor(t));
        const double u = t - static_cast<double>(i);
        out[k] = values[i] + u * (values[i + 1] - values[i]);
      }
      break;
    case InterpMethod::Quadratic: {
      const detail::QuadraticSpline spline(values);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = spline(values, query_times[k]);
      break;
    }
    case InterpMethod::Cubic: {
      const detail::CubicSpline spline(values);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = spline(values, query_times[k]);
      break;
    }
  }
  return out;
}

// Truncates (keeping the head) or stretches every channel to exactly
// round(L * fs) samples. Stretching evaluates the interpolant on N times
// evenly spaced from the first to the last original sample.
inline FixedTrial fit_length(const Trial& trial, const ResampleSpec& spec) {
  const std::size_t n_out = target_samples(spec.target_length_s, trial.record.sample_rate_hz);
  if (n_out < 2) throw Error(ErrorCode::InvalidArgument, "target length is below 2 samples");
  const std::size_t n_in = trial.n_samples();
  FixedTrial out{trial.record, Matrix<double>(trial.n_channels(), n_out)};
  if (n_in >= n_out) {
    for (std::size_t ch = 0; ch < trial.n_channels(); ++ch) {
      const auto src = trial.samples.row(ch);
      std::copy_n(src.begin(), n_out, out.samples.row(ch).begin());
    }
    return out;
  }
  if (n_in < 2) throw Error(ErrorCode::DegenerateSignal, "cannot interpolate fewer than 2 samples");
  std::vector<double> queries(n_out);
  const double span = static_cast<double>(n_in - 1);
  for (std::size_t i = 0; i < n_out; ++i) {
    queries[i] = span * static_cast<double>(i) / static_cast<double>(n_out - 1);
  }
  queries.back() = span;
  for (std::size_t ch = 0; ch < trial.n_channels(); ++ch) {
    const auto res = interpolate(trial.samples.row(ch), queries, spec.method);
    std::copy(res.begin(), res.end(), out.samples.row(ch).begin());
  }
  return out;
}

inline Trial as_trial(const FixedTrial& f) { return Trial{f.record, f.samples}; }

}  // namespace airwrite
