#include <gtest/gtest.h>

#include <random>

#include "airwrite/resample.hpp"
#include "oracles/oracles.hpp"

using namespace airwrite;

namespace {

constexpr InterpMethod kMethods[] = {InterpMethod::Nearest, InterpMethod::Linear, InterpMethod::Quadratic,
                                     InterpMethod::Cubic};

Trial ramp_trial(std::size_t ch, std::size_t n, double fs = 2000.0) {
  Trial t{TrialRecord{"S01", 'A', 0, fs, static_cast<int>(ch), "x"}, Matrix<double>(ch, n)};
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t i = 0; i < n; ++i) t.samples(c, i) = static_cast<double>(i) + 100.0 * static_cast<double>(c);
  return t;
}

}  // namespace

TEST(Resample, TargetSamples) {
  EXPECT_EQ(target_samples(4.0, 2000.0), 8000u);
  EXPECT_EQ(target_samples(0.00125, 2000.0), 3u);  // 2.5 rounds away from zero
  EXPECT_THROW(target_samples(0.0, 2000.0), Error);
}

TEST(Resample, NearestExample) {
  const std::vector<double> y{0.0, 2.0};
  const std::vector<double> q{0.0, 0.5, 1.0};
  EXPECT_EQ(interpolate(y, q, InterpMethod::Nearest), (std::vector<double>{0.0, 2.0, 2.0}));
}

TEST(Resample, CubicReproducesParabolaAtHalf) {
  const std::vector<double> y{0.0, 1.0, 4.0, 9.0};
  const std::vector<double> q{1.5};
  EXPECT_NEAR(interpolate(y, q, InterpMethod::Cubic)[0], 2.25, 1e-12);
}

TEST(Resample, KnotPassingAllMethods) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t l = 3 + rng() % 60;
    const auto y = oracle::random_vector(rng, l, -5.0, 5.0);
    std::vector<double> q(l);
    for (std::size_t i = 0; i < l; ++i) q[i] = static_cast<double>(i);
    for (auto m : kMethods) {
      if (l < min_points(m)) continue;
      const auto out = interpolate(y, q, m);
      for (std::size_t i = 0; i < l; ++i) EXPECT_NEAR(out[i], y[i], 1e-12) << to_string(m) << " l=" << l;
    }
  }
}

TEST(Resample, QuadraticMatchesDenseOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t l = 3 + rng() % 25;
    const auto y = oracle::random_vector(rng, l);
    const auto q = oracle::random_vector(rng, 40, 0.0, static_cast<double>(l - 1));
    const auto got = interpolate(y, q, InterpMethod::Quadratic);
    const auto want = oracle::quadratic_spline_dense(y, q);
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
  }
}

TEST(Resample, CubicMatchesDenseOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t l = 4 + rng() % 25;
    const auto y = oracle::random_vector(rng, l);
    const auto q = oracle::random_vector(rng, 40, 0.0, static_cast<double>(l - 1));
    const auto got = interpolate(y, q, InterpMethod::Cubic);
    const auto want = oracle::cubic_spline_dense(y, q);
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
  }
}

TEST(Resample, CubicReproducesQuadratics) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    const std::size_t l = 4 + rng() % 30;
    std::vector<double> y(l);
    for (std::size_t i = 0; i < l; ++i) {
      const double t = static_cast<double>(i);
      y[i] = a + b * t + c * t * t;
    }
    const auto q = oracle::random_vector(rng, 50, 0.0, static_cast<double>(l - 1));
    const auto out = interpolate(y, q, InterpMethod::Cubic);
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(out[i], a + b * q[i] + c * q[i] * q[i], 1e-9);
  }
}

TEST(Resample, LinearIsExactOnLines) {
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
  const std::vector<double> q{0.25, 1.5, 2.75, 3.0};
  const auto out = interpolate(y, q, InterpMethod::Linear);
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(out[i], 1.0 + 2.0 * q[i], 1e-15);
}

TEST(Resample, DomainAndPointCountErrors) {
  const std::vector<double> y{1.0, 2.0, 3.0};
  const std::vector<double> bad{3.5};
  try {
    interpolate(y, bad, InterpMethod::Linear);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
  const std::vector<double> two{1.0, 2.0};
  const std::vector<double> q{0.5};
  try {
    interpolate(two, q, InterpMethod::Cubic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientPoints);
  }
  EXPECT_NO_THROW(interpolate(two, q, InterpMethod::Linear));
}

TEST(Resample, FitLengthTruncatesHead) {
  const auto t = ramp_trial(2, 9000);
  const auto f = fit_length(t, ResampleSpec{4.0, InterpMethod::Cubic});
  ASSERT_EQ(f.n_samples(), 8000u);
  for (std::size_t i = 0; i < 8000; ++i) {
    EXPECT_EQ(f.samples(0, i), t.samples(0, i));
    EXPECT_EQ(f.samples(1, i), t.samples(1, i));
  }
}

TEST(Resample, FitLengthStretchKeepsEndpoints) {
  const auto t = ramp_trial(3, 3000);
  for (auto m : kMethods) {
    const auto f = fit_length(t, ResampleSpec{4.0, m});
    ASSERT_EQ(f.n_samples(), 8000u);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(f.samples(c, 0), t.samples(c, 0));
      EXPECT_EQ(f.samples(c, 7999), t.samples(c, 2999));
    }
    if (m != InterpMethod::Nearest) {
      // a ramp stays a ramp
      EXPECT_NEAR(f.samples(0, 4000), 2999.0 * 4000.0 / 7999.0, 1e-8);
    }
  }
}

TEST(Resample, FitLengthArithmeticProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> len(0.01, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t l = 4 + rng() % 1500;
    const double L = len(rng);
    const auto t = ramp_trial(1, l);
    const auto f = fit_length(t, ResampleSpec{L, InterpMethod::Linear});
    EXPECT_EQ(f.n_samples(), static_cast<std::size_t>(std::llround(L * 2000.0)));
    EXPECT_EQ(f.samples(0, 0), 0.0);
  }
}

TEST(Resample, FitLengthDegenerate) {
  const auto t = ramp_trial(1, 1);
  try {
    fit_length(t, ResampleSpec{4.0, InterpMethod::Linear});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSignal);
  }
}

TEST(Resample, ParseNames) {
  for (auto m : kMethods) EXPECT_EQ(parse_interp(to_string(m)), m);
  EXPECT_THROW(parse_interp("sinc"), Error);
}
