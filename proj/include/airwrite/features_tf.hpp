#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "airwrite/errors.hpp"
#include "airwrite/fft.hpp"
#include "airwrite/matrix.hpp"

namespace airwrite {

// Periodic Hann: w[n] = 0.5 (1 - cos(2 pi n / W)).
inline std::vector<double> hann_window(std::size_t w) {
  if (w < 2) throw Error(ErrorCode::InvalidArgument, "Hann window needs W >= 2");
  std::vector<double> out(w);
  for (std::size_t n = 0; n < w; ++n) {
    out[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                   static_cast<double>(w)));
  }
  return out;
}

struct StftConfig {
  std::size_t window_len = 200;

  std::size_t hop() const { return window_len / 2; }
  std::size_t n_bins() const { return window_len / 2 + 1; }

  void validate() const {
    if (window_len < 4 || window_len % 2 != 0) {
      throw Error(ErrorCode::InvalidArgument, "STFT window must be even and >= 4");
    }
  }

  std::size_t frame_count(std::size_t n) const {
    if (n < window_len) {
      throw Error(ErrorCode::SignalTooShort, "signal of " + std::to_string(n) +
                                                 " samples is shorter than the STFT window");
    }
    return (n - window_len) / hop() + 1;
  }
};

// One-sided magnitude STFT of one channel: rows are bins 0..W/2, columns are
// frames. n_fft equals the window length.
class StftMagnitude {
 public:
  explicit StftMagnitude(StftConfig cfg)
      : cfg_((cfg.validate(), cfg)), window_(hann_window(cfg.window_len)), plan_(cfg.window_len) {}

  const StftConfig& config() const { return cfg_; }

  Matrix<double> operator()(std::span<const double> channel) const {
    const std::size_t frames = cfg_.frame_count(channel.size());
    const std::size_t w = cfg_.window_len;
    Matrix<double> out(cfg_.n_bins(), frames);
    std::vector<cplx> buf(w);
    for (std::size_t f = 0; f < frames; ++f) {
      const auto seg = channel.subspan(f * cfg_.hop(), w);
      for (std::size_t n = 0; n < w; ++n) buf[n] = seg[n] * window_[n];
      plan_.forward(buf);
      for (std::size_t k = 0; k < cfg_.n_bins(); ++k) out(k, f) = std::abs(buf[k]);
    }
    return out;
  }

 private:
  StftConfig cfg_;
  std::vector<double> window_;
  FftPlan plan_;
};

inline Matrix<double> stft_magnitude(std::span<const double> channel, const StftConfig& cfg) {
  return StftMagnitude(cfg)(channel);
}

// Analytic Morlet basis function
//   psi_{sigma,tau}(t) = sigma^{-1/2} pi^{-1/4} exp(i w0 u) exp(-u^2 / 2),  u = (t - tau) / sigma.
inline cplx morlet(double t, double sigma, double omega0, double tau = 0.0) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "Morlet scale must be > 0");
  const double u = (t - tau) / sigma;
  const double amp = std::exp(-0.5 * u * u) / (std::sqrt(std::sqrt(std::numbers::pi)) * std::sqrt(sigma));
  return {amp * std::cos(omega0 * u), amp * std::sin(omega0 * u)};
}

struct CwtConfig {
  std::size_t n_scales = 60;
  double omega0 = 6.0;
  double f_min_hz = 4.0;
  double f_max_hz = 500.0;
  std::size_t decimation = 100;
  double support_radius = 4.0;  // in units of sigma

  void validate(double sample_rate_hz) const {
    if (n_scales < 1) throw Error(ErrorCode::InvalidArgument, "need at least one CWT scale");
    if (!(omega0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega0 must be > 0");
    if (!(f_min_hz > 0.0 && f_min_hz < f_max_hz && f_max_hz <= sample_rate_hz / 2.0)) {
      throw Error(ErrorCode::InvalidArgument, "CWT band must satisfy 0 < f_min < f_max <= fs/2");
    }
    if (decimation < 1) throw Error(ErrorCode::InvalidArgument, "decimation must be >= 1");
    if (!(support_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "support radius must be > 0");
  }

  std::size_t frame_count(std::size_t n) const { return (n - 1) / decimation + 1; }

  // Pseudo-frequencies, log-spaced from f_max down to f_min so that the
  // matching scales increase.
  std::vector<double> pseudo_frequencies() const {
    std::vector<double> f(n_scales);
    for (std::size_t j = 0; j < n_scales; ++j) {
      const double frac = n_scales == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(n_scales - 1);
      f[j] = f_max_hz * std::pow(f_min_hz / f_max_hz, frac);
    }
    return f;
  }

  // Scales in samples: sigma_j = w0 fs / (2 pi f_j).
  std::vector<double> scales(double sample_rate_hz) const {
    auto f = pseudo_frequencies();
    for (double& v : f) v = omega0 * sample_rate_hz / (2.0 * std::numbers::pi * v);
    return f;
  }
};

inline double pseudo_frequency(double sigma_samples, double omega0, double sample_rate_hz) {
  return omega0 * sample_rate_hz / (2.0 * std::numbers::pi * sigma_samples);
}

// Magnitude CWT on the decimated grid tau = 0, D, 2D, ... Each coefficient is
// the sample-period-weighted sum of y[t] conj(psi_{sigma,tau}(t)) over
// |t - tau| <= R sigma, with time measured in seconds. Near the edges the
// support is simply truncated.
class CwtMagnitude {
 public:
  CwtMagnitude(CwtConfig cfg, double sample_rate_hz)
      : cfg_(cfg), fs_(sample_rate_hz), scales_(cfg.scales(sample_rate_hz)) {
    cfg_.validate(sample_rate_hz);
    const double dt = 1.0 / fs_;
    kernels_.reserve(scales_.size());
    for (double sigma : scales_) {
      const auto radius = static_cast<std::ptrdiff_t>(std::floor(cfg_.support_radius * sigma));
      std::vector<cplx> k(static_cast<std::size_t>(2 * radius + 1));
      for (std::ptrdiff_t off = -radius; off <= radius; ++off) {
        k[static_cast<std::size_t>(off + radius)] =
            std::conj(morlet(static_cast<double>(off) * dt, sigma * dt, cfg_.omega0)) * dt;
      }
      kernels_.push_back(std::move(k));
    }
  }

  const std::vector<double>& scales() const { return scales_; }
  const CwtConfig& config() const { return cfg_; }

  Matrix<double> operator()(std::span<const double> channel) const {
    const std::size_t n = channel.size();
    if (n < 2) throw Error(ErrorCode::SignalTooShort, "CWT needs at least 2 samples");
    const std::size_t frames = cfg_.frame_count(n);
    Matrix<double> out(scales_.size(), frames);
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;
    for (std::size_t j = 0; j < scales_.size(); ++j) {
      const auto& k = kernels_[j];
      const auto radius = static_cast<std::ptrdiff_t>(k.size() / 2);
      for (std::size_t f = 0; f < frames; ++f) {
        const auto tau = static_cast<std::ptrdiff_t>(f * cfg_.decimation);
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, tau - radius);
        const std::ptrdiff_t hi = std::min(last, tau + radius);
        double re = 0.0;
        double im = 0.0;
        for (std::ptrdiff_t t = lo; t <= hi; ++t) {
          const cplx& w = k[static_cast<std::size_t>(t - tau + radius)];
          const double y = channel[static_cast<std::size_t>(t)];
          re += y * w.real();
          im += y * w.imag();
        }
        out(j, f) = std::hypot(re, im);
      }
    }
    return out;
  }

 private:
  CwtConfig cfg_;
  double fs_;
  std::vector<double> scales_;
  std::vector<std::vector<cplx>> kernels_;
};

inline Matrix<double> cwt_magnitude(std::span<const double> channel, const CwtConfig& cfg,
                                    double sample_rate_hz) {
  return CwtMagnitude(cfg, sample_rate_hz)(channel);
}

}  // namespace airwrite
