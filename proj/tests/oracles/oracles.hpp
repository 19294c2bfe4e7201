#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numeric paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

namespace oracle {

// ---------------------------------------------------------------------------
// Envelope features: textbook two-pass loops with std::pow.

enum class Feature { MAV, Energy, Variance, RMS, TM3, TM4, TM5, LogD };

inline double feature(std::span<const double> x, Feature f, bool zero_mean = true) {
  const double w = static_cast<double>(x.size());
  double s = 0.0;
  switch (f) {
    case Feature::MAV:
      for (double v : x) s += std::fabs(v);
      return s / w;
    case Feature::Energy:
      for (double v : x) s += std::pow(v, 2);
      return s / w;
    case Feature::RMS:
      for (double v : x) s += std::pow(v, 2);
      return std::sqrt(s / w);
    case Feature::Variance: {
      double mu = 0.0;
      if (!zero_mean) {
        for (double v : x) mu += v;
        mu /= w;
      }
      for (double v : x) s += std::pow(v - mu, 2);
      return s / (w - 1.0);
    }
    case Feature::TM3:
      for (double v : x) s += std::pow(std::fabs(v), 3);
      return s / w;
    case Feature::TM4:
      for (double v : x) s += std::pow(v, 4);
      return s / w;
    case Feature::TM5:
      for (double v : x) s += std::pow(std::fabs(v), 5);
      return s / w;
    case Feature::LogD:
      for (double v : x) s += std::log(std::fabs(v) < 1e-12 ? 1e-12 : std::fabs(v));
      return std::exp(s / w);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// O(W^2) DFT.

inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const long double a = -2.0L * std::numbers::pi_v<long double> *
                            static_cast<long double>((k * t) % n) / static_cast<long double>(n);
      re += x[t] * std::cos(a);
      im += x[t] * std::sin(a);
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense Gaussian elimination with partial pivoting.

inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular system");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Quadratic spline with breakpoints at sample midpoints, natural ends.
// Piece i (centred on sample i): a_i + b_i u + c_i u^2, u = t - i.
inline std::vector<double> quadratic_spline_dense(std::span<const double> y, std::span<const double> queries) {
  const std::size_t l = y.size();
  const std::size_t n = 3 * l;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  std::size_t row = 0;
  auto A = [](std::size_t i) { return 3 * i; };
  auto B = [](std::size_t i) { return 3 * i + 1; };
  auto C = [](std::size_t i) { return 3 * i + 2; };
  for (std::size_t i = 0; i < l; ++i, ++row) {
    a[row][A(i)] = 1.0;
    b[row] = y[i];
  }
  for (std::size_t k = 0; k + 1 < l; ++k) {
    // value at k + 1/2
    a[row][A(k)] = 1.0;
    a[row][B(k)] = 0.5;
    a[row][C(k)] = 0.25;
    a[row][A(k + 1)] = -1.0;
    a[row][B(k + 1)] = 0.5;
    a[row][C(k + 1)] = -0.25;
    ++row;
    // slope at k + 1/2
    a[row][B(k)] = 1.0;
    a[row][C(k)] = 1.0;
    a[row][B(k + 1)] = -1.0;
    a[row][C(k + 1)] = 1.0;
    ++row;
  }
  a[row++][C(0)] = 1.0;
  a[row++][C(l - 1)] = 1.0;
  const auto coef = solve_dense(a, b);
  std::vector<double> out;
  for (double t : queries) {
    auto i = static_cast<std::size_t>(std::floor(t + 0.5));
    if (i > l - 1) i = l - 1;
    const double u = t - static_cast<double>(i);
    out.push_back(coef[A(i)] + coef[B(i)] * u + coef[C(i)] * u * u);
  }
  return out;
}

// Not-a-knot cubic spline: one cubic per interval, C2 at interior knots,
// third derivative continuous at the first and last interior knots.
inline std::vector<double> cubic_spline_dense(std::span<const double> y, std::span<const double> queries) {
  const std::size_t l = y.size();
  const std::size_t m = l - 1;  // intervals
  const std::size_t n = 4 * m;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < m; ++i) {
    a[row][4 * i] = 1.0;
    b[row++] = y[i];
    for (int p = 0; p < 4; ++p) a[row][4 * i + p] = 1.0;
    b[row++] = y[i + 1];
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    // first derivative at right end of interval i equals left end of i + 1
    a[row][4 * i + 1] = 1.0;
    a[row][4 * i + 2] = 2.0;
    a[row][4 * i + 3] = 3.0;
    a[row][4 * (i + 1) + 1] = -1.0;
    ++row;
    a[row][4 * i + 2] = 2.0;
    a[row][4 * i + 3] = 6.0;
    a[row][4 * (i + 1) + 2] = -2.0;
    ++row;
  }
  a[row][3] = 1.0;
  a[row][7] = -1.0;
  ++row;
  a[row][4 * (m - 2) + 3] = 1.0;
  a[row][4 * (m - 1) + 3] = -1.0;
  ++row;
  const auto coef = solve_dense(a, b);
  std::vector<double> out;
  for (double t : queries) {
    auto i = static_cast<std::size_t>(std::floor(t));
    if (i > m - 1) i = m - 1;
    const double u = t - static_cast<double>(i);
    out.push_back(coef[4 * i] + u * (coef[4 * i + 1] + u * (coef[4 * i + 2] + u * coef[4 * i + 3])));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Direct-summation Morlet CWT on the decimated grid, evaluating the wavelet
// in closed form at each term.

inline std::vector<std::vector<double>> direct_cwt(std::span<const double> y, std::span<const double> sigmas,
                                                   double omega0, double fs, std::size_t decimation,
                                                   double radius = 4.0) {
  const double dt = 1.0 / fs;
  const double norm = std::pow(std::numbers::pi, -0.25);
  const auto n = static_cast<long>(y.size());
  std::vector<std::vector<double>> out;
  for (double sigma : sigmas) {
    std::vector<double> row;
    const double sigma_s = sigma * dt;
    for (long tau = 0; tau < n; tau += static_cast<long>(decimation)) {
      std::complex<double> acc = 0.0;
      for (long t = 0; t < n; ++t) {
        if (std::fabs(static_cast<double>(t - tau)) > radius * sigma) continue;
        const double u = (static_cast<double>(t) * dt - static_cast<double>(tau) * dt) / sigma_s;
        const std::complex<double> psi = norm / std::sqrt(sigma_s) * std::exp(-0.5 * u * u) *
                                         std::exp(std::complex<double>(0.0, omega0 * u));
        acc += y[static_cast<std::size_t>(t)] * std::conj(psi) * dt;
      }
      row.push_back(std::abs(acc));
    }
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composite Simpson quadrature and the densities used by the test oracles.

template <typename F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// P(F > f) by integrating the F density after substituting x = s^2, which
// removes the x^{-1/2} singularity for d1 = 1.
inline double f_survival_quadrature(double f, double d1, double d2, std::size_t intervals = 1000000) {
  if (f <= 0.0) return 1.0;
  const double log_c = std::lgamma(0.5 * (d1 + d2)) - std::lgamma(0.5 * d1) - std::lgamma(0.5 * d2) +
                       0.5 * d1 * std::log(d1 / d2);
  auto g = [&](double s) {
    const double x = s * s;
    return 2.0 * std::exp(log_c - 0.5 * (d1 + d2) * std::log1p(d1 * x / d2)) * std::pow(s, d1 - 1.0);
  };
  return 1.0 - simpson(g, 0.0, std::sqrt(f), intervals);
}

// P(T > t), t >= 0.
inline double t_survival_quadrature(double t, double nu, std::size_t intervals = 1000000) {
  const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
  auto f = [&](double x) { return std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(x * x / nu)); };
  return 0.5 - simpson(f, 0.0, t, intervals);
}

// ---------------------------------------------------------------------------

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("airwrite_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline double rel_err(double a, double b) {
  const double d = std::fabs(a - b);
  const double s = std::max(std::fabs(a), std::fabs(b));
  return s == 0.0 ? d : d / s;
}

}  // namespace oracle
