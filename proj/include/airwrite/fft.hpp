#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "airwrite/errors.hpp"

namespace airwrite {

using cplx = std::complex<double>;

namespace detail {

// In-place iterative radix-2 transform; size must be a power of two.
// Forward uses exp(-2 pi i k n / N).
class Radix2 {
 public:
  explicit Radix2(std::size_t n) : n_(n), twiddle_(n / 2), rev_(n) {
    const unsigned bits = static_cast<unsigned>(std::countr_zero(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (unsigned b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
      rev_[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle_[k] = {std::cos(a), std::sin(a)};
    }
  }

  void forward(std::span<cplx> x) const { run(x, false); }
  void inverse(std::span<cplx> x) const { run(x, true); }  // unscaled

 private:
  void run(std::span<cplx> x, bool inv) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < rev_[i]) std::swap(x[i], x[rev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const cplx w = inv ? std::conj(twiddle_[k * step]) : twiddle_[k * step];
          const cplx t = w * x[start + k + half];
          x[start + k + half] = x[start + k] - t;
          x[start + k] += t;
        }
      }
    }
  }

  std::size_t n_;
  std::vector<cplx> twiddle_;
  std::vector<std::size_t> rev_;
};

}  // namespace detail

// Forward DFT of fixed length. Powers of two go straight to radix-2; other
// lengths use Bluestein's chirp-z identity on a padded power-of-two grid.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n)
      : n_(n),
        m_(padded_size(n)),
        core_(m_) {
    if (std::has_single_bit(n)) return;
    chirp_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      // k^2 mod 2n keeps the angle argument small for large k.
      const auto k2 = static_cast<double>((k * k) % (2 * n));
      const double a = -std::numbers::pi * k2 / static_cast<double>(n);
      chirp_[k] = {std::cos(a), std::sin(a)};
    }
    kernel_.assign(m_, cplx{});
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel_[k] = std::conj(chirp_[k]);
      kernel_[m_ - k] = std::conj(chirp_[k]);
    }
    core_.forward(kernel_);
  }

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<cplx> x) const {
    if (x.size() != n_) throw Error(ErrorCode::DimensionMismatch, "FFT input length mismatch");
    if (chirp_.empty()) {
      core_.forward(x);
      return;
    }
    std::vector<cplx> a(m_, cplx{});
    for (std::size_t k = 0; k < n_; ++k) a[k] = x[k] * chirp_[k];
    core_.forward(a);
    for (std::size_t k = 0; k < m_; ++k) a[k] *= kernel_[k];
    core_.inverse(a);
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) x[k] = a[k] * chirp_[k] * scale;
  }

  std::vector<cplx> forward_real(std::span<const double> x) const {
    std::vector<cplx> buf(x.begin(), x.end());
    forward(buf);
    return buf;
  }

 private:
  static std::size_t padded_size(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "FFT length must be positive");
    return std::has_single_bit(n) ? n : std::bit_ceil(2 * n - 1);
  }

  std::size_t n_;
  std::size_t m_;
  detail::Radix2 core_;
  std::vector<cplx> chirp_;
  std::vector<cplx> kernel_;
};

}  // namespace airwrite
