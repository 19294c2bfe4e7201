#include <gtest/gtest.h>

#include <random>

#include "airwrite/features_time.hpp"
#include "oracles/oracles.hpp"

using namespace airwrite;

namespace {

oracle::Feature to_oracle(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::MAV: return oracle::Feature::MAV;
    case EnvelopeKind::Energy: return oracle::Feature::Energy;
    case EnvelopeKind::Variance: return oracle::Feature::Variance;
    case EnvelopeKind::RMS: return oracle::Feature::RMS;
    case EnvelopeKind::TM3: return oracle::Feature::TM3;
    case EnvelopeKind::TM4: return oracle::Feature::TM4;
    case EnvelopeKind::TM5: return oracle::Feature::TM5;
    case EnvelopeKind::LogD: return oracle::Feature::LogD;
  }
  return oracle::Feature::MAV;
}

}  // namespace

TEST(FeaturesTime, WorkedExamples) {
  const std::vector<double> x{1.0, -2.0, 3.0};
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::MAV), 2.0, 1e-15);
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::Energy), 14.0 / 3.0, 1e-14);
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::TM3), 12.0, 1e-13);
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::TM4), 98.0 / 3.0, 1e-13);
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::TM5), 276.0 / 3.0, 1e-12);
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::Variance), 7.0, 1e-14);
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::RMS), std::sqrt(14.0 / 3.0), 1e-14);
  const std::vector<double> y{1.0, 2.0, 4.0};
  EXPECT_NEAR(envelope_feature(y, EnvelopeKind::LogD), 2.0, 1e-14);
}

TEST(FeaturesTime, VarianceWithMeanRemoved) {
  const std::vector<double> x{1.0, -2.0, 3.0};
  EXPECT_NEAR(envelope_feature(x, EnvelopeOptions{EnvelopeKind::Variance, false}), 19.0 / 3.0, 1e-14);
}

TEST(FeaturesTime, LogDetectorFloor) {
  const std::vector<double> x{0.0, 1.0};
  EXPECT_NEAR(envelope_feature(x, EnvelopeKind::LogD), std::sqrt(1e-12), 1e-20);
}

TEST(FeaturesTime, MatchesNaiveOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t w = 25 + rng() % 276;
    const auto x = oracle::random_vector(rng, w, -3.0, 3.0);
    for (auto k : kAllEnvelopeKinds) {
      const double got = envelope_feature(x, k);
      const double want = oracle::feature(x, to_oracle(k));
      EXPECT_LE(oracle::rel_err(got, want), 1e-12) << to_string(k);
    }
  }
}

TEST(FeaturesTime, ScalingLaws) {
  std::mt19937_64 rng(11);
  const double c = 1.7;
  const std::pair<EnvelopeKind, double> laws[] = {
      {EnvelopeKind::MAV, c},         {EnvelopeKind::RMS, c},         {EnvelopeKind::Energy, c * c},
      {EnvelopeKind::Variance, c * c}, {EnvelopeKind::TM3, c * c * c}, {EnvelopeKind::TM4, std::pow(c, 4)},
      {EnvelopeKind::TM5, std::pow(c, 5)}, {EnvelopeKind::LogD, c}};
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::random_vector(rng, 100);
    std::vector<double> cx(x);
    for (double& v : cx) v *= c;
    for (auto [k, factor] : laws) {
      EXPECT_LE(oracle::rel_err(envelope_feature(cx, k), factor * envelope_feature(x, k)), 1e-9) << to_string(k);
    }
  }
}

TEST(FeaturesTime, FrameCounts) {
  const WindowPlan p{250, 0.5};
  EXPECT_EQ(p.hop(), 125u);
  EXPECT_EQ(p.frame_count(8000), 63u);
  EXPECT_EQ(p.frame_count(250), 1u);
  try {
    p.frame_count(249);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SignalTooShort);
  }
  EXPECT_THROW((WindowPlan{250, 1.0}.validate()), Error);
}

TEST(FeaturesTime, SegmentsCoverExpectedSpans) {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const auto segs = segment(x, WindowPlan{100, 0.25});
  EXPECT_EQ(segs.size(), (1000u - 100u) / 75u + 1u);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EXPECT_EQ(segs[i].size(), 100u);
    EXPECT_EQ(segs[i].front(), static_cast<double>(75 * i));
  }
}

TEST(FeaturesTime, EnvelopeShape) {
  Matrix<double> m(5, 8000, 1.0);
  const auto env = compute_envelope(m, WindowPlan{}, EnvelopeOptions{});
  EXPECT_EQ(env.values.rows(), 5u);
  EXPECT_EQ(env.values.cols(), 63u);
}

TEST(FeaturesTime, ZnormExample) {
  Matrix<double> m(1, 3);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(0, 2) = 3.0;
  const auto z = znorm(m);
  EXPECT_NEAR(z(0, 0), -std::sqrt(1.5), 1e-14);
  EXPECT_NEAR(z(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(z(0, 2), std::sqrt(1.5), 1e-14);
}

TEST(FeaturesTime, ZnormProperties) {
  std::mt19937_64 rng(12);
  Matrix<double> m(4, 77);
  for (double& v : m.flat()) v = std::uniform_real_distribution<double>(-5, 5)(rng);
  for (std::size_t i = 0; i < 77; ++i) m(2, i) = 3.0;  // constant row
  const auto z = znorm(m);
  for (std::size_t r = 0; r < 4; ++r) {
    double mean = 0.0, ss = 0.0;
    for (double v : z.row(r)) mean += v;
    mean /= 77.0;
    for (double v : z.row(r)) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt(ss / 77.0), r == 2 ? 0.0 : 1.0, 1e-12);
  }
  for (double v : z.row(2)) EXPECT_EQ(v, 0.0);
}

TEST(FeaturesTime, ParseNames) {
  for (auto k : kAllEnvelopeKinds) EXPECT_EQ(parse_envelope_kind(to_string(k)), k);
  EXPECT_THROW(parse_envelope_kind("zc"), Error);
}
