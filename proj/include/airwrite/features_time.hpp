#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "airwrite/errors.hpp"
#include "airwrite/matrix.hpp"
#include "airwrite/resample.hpp"

namespace airwrite {

// Rectangular sliding windows. hop = round(W * (1 - overlap)).
struct WindowPlan {
  std::size_t window_len = 250;
  double overlap = 0.5;

  std::size_t hop() const {
    return static_cast<std::size_t>(std::llround(static_cast<double>(window_len) * (1.0 - overlap)));
  }

  void validate() const {
    if (window_len < 2) throw Error(ErrorCode::InvalidArgument, "window length must be >= 2");
    if (!(overlap >= 0.0 && overlap < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "overlap must lie in [0, 1)");
    }
    if (hop() < 1) throw Error(ErrorCode::InvalidArgument, "hop rounds to zero");
  }

  std::size_t frame_count(std::size_t n) const {
    if (n < window_len) {
      throw Error(ErrorCode::SignalTooShort, "signal of " + std::to_string(n) +
                                                 " samples is shorter than the window (" +
                                                 std::to_string(window_len) + ")");
    }
    return (n - window_len) / hop() + 1;
  }
};

enum class EnvelopeKind { MAV, Energy, Variance, RMS, TM3, TM4, TM5, LogD };

inline constexpr EnvelopeKind kAllEnvelopeKinds[] = {
    EnvelopeKind::MAV, EnvelopeKind::Energy, EnvelopeKind::Variance, EnvelopeKind::RMS,
    EnvelopeKind::TM3, EnvelopeKind::TM4,    EnvelopeKind::TM5,      EnvelopeKind::LogD};

inline std::string_view to_string(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::MAV: return "mav";
    case EnvelopeKind::Energy: return "energy";
    case EnvelopeKind::Variance: return "var";
    case EnvelopeKind::RMS: return "rms";
    case EnvelopeKind::TM3: return "tm3";
    case EnvelopeKind::TM4: return "tm4";
    case EnvelopeKind::TM5: return "tm5";
    case EnvelopeKind::LogD: return "logd";
  }
  return "?";
}

inline EnvelopeKind parse_envelope_kind(std::string_view s) {
  for (auto k : kAllEnvelopeKinds) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown envelope feature '" + std::string(s) + "'");
}

struct EnvelopeOptions {
  EnvelopeKind kind = EnvelopeKind::MAV;
  bool variance_zero_mean = true;
};

inline constexpr double kLogDetectorFloor = 1e-12;

struct Envelope {
  Matrix<double> values;  // n_channels x n_frames
  WindowPlan plan;
  EnvelopeOptions options;
};

// Frame i covers [i * hop, i * hop + W); samples that do not fill a whole
// window at the tail are dropped.
inline std::vector<std::span<const double>> segment(std::span<const double> channel,
                                                    const WindowPlan& plan) {
  plan.validate();
  const std::size_t frames = plan.frame_count(channel.size());
  std::vector<std::span<const double>> out;
  out.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    out.push_back(channel.subspan(i * plan.hop(), plan.window_len));
  }
  return out;
}

inline double envelope_feature(std::span<const double> x, EnvelopeOptions opt) {
  const std::size_t w = x.size();
  if (w < 2) throw Error(ErrorCode::InvalidArgument, "window must hold at least 2 samples");
  const double inv_w = 1.0 / static_cast<double>(w);
  double acc = 0.0;
  switch (opt.kind) {
    case EnvelopeKind::MAV:
      for (double v : x) acc += std::abs(v);
      return acc * inv_w;
    case EnvelopeKind::Energy:
    case EnvelopeKind::RMS:
      for (double v : x) acc += v * v;
      return opt.kind == EnvelopeKind::RMS ? std::sqrt(acc * inv_w) : acc * inv_w;
    case EnvelopeKind::Variance: {
      double mean = 0.0;
      if (!opt.variance_zero_mean) {
        for (double v : x) mean += v;
        mean *= inv_w;
      }
      for (double v : x) acc += (v - mean) * (v - mean);
      return acc / static_cast<double>(w - 1);
    }
    case EnvelopeKind::TM3:
      for (double v : x) {
        const double a = std::abs(v);
        acc += a * a * a;
      }
      return acc * inv_w;
    case EnvelopeKind::TM4:
      for (double v : x) {
        const double s = v * v;
        acc += s * s;
      }
      return acc * inv_w;
    case EnvelopeKind::TM5:
      for (double v : x) {
        const double a = std::abs(v);
        const double s = a * a;
        acc += s * s * a;
      }
      return acc * inv_w;
    case EnvelopeKind::LogD:
      for (double v : x) acc += std::log(std::max(std::abs(v), kLogDetectorFloor));
      return std::exp(acc * inv_w);
  }
  return 0.0;
}

inline double envelope_feature(std::span<const double> x, EnvelopeKind kind) {
  return envelope_feature(x, EnvelopeOptions{kind, true});
}

inline Envelope compute_envelope(const Matrix<double>& samples, const WindowPlan& plan,
                                 EnvelopeOptions opt) {
  plan.validate();
  const std::size_t frames = plan.frame_count(samples.cols());
  Envelope env{Matrix<double>(samples.rows(), frames), plan, opt};
  for (std::size_t ch = 0; ch < samples.rows(); ++ch) {
    const auto windows = segment(samples.row(ch), plan);
    for (std::size_t i = 0; i < frames; ++i) env.values(ch, i) = envelope_feature(windows[i], opt);
  }
  return env;
}

inline Envelope compute_envelope(const FixedTrial& trial, const WindowPlan& plan,
                                 EnvelopeOptions opt) {
  return compute_envelope(trial.samples, plan, opt);
}

inline constexpr double kZnormStdFloor = 1e-12;

// Per row: subtract the mean, divide by the population standard deviation.
// Rows whose deviation is below the floor become zeros.
inline void znorm_inplace(Matrix<double>& m) {
  const std::size_t k = m.cols();
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "z-normalization needs at least 2 values per row");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (double v : row) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(k));
    if (sd < kZnormStdFloor) {
      std::fill(row.begin(), row.end(), 0.0);
      continue;
    }
    for (double& v : row) v = (v - mean) / sd;
  }
}

inline Matrix<double> znorm(Matrix<double> m) {
  znorm_inplace(m);
  return m;
}

}  // namespace airwrite
