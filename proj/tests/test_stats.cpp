#include <gtest/gtest.h>

#include "airwrite/stats.hpp"
#include "oracles/oracles.hpp"

using namespace airwrite;

TEST(Stats, IncompleteBetaKnownValues) {
  EXPECT_NEAR(incomplete_beta(1.0, 1.0, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(incomplete_beta(2.0, 1.0, 0.5), 0.25, 1e-14);
  EXPECT_NEAR(incomplete_beta(0.5, 0.5, 0.5), 0.5, 1e-12);
  EXPECT_EQ(incomplete_beta(3.0, 2.0, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(3.0, 2.0, 1.0), 1.0);
}

TEST(Stats, FSurvivalMatchesQuadrature) {
  const double cases[][3] = {{0.5, 1, 8}, {2.0, 3, 16}, {4.2, 4, 20}, {1.0, 2, 5}, {9.0, 1, 30}};
  for (const auto& c : cases) {
    EXPECT_NEAR(f_survival(c[0], c[1], c[2]), oracle::f_survival_quadrature(c[0], c[1], c[2], 200000), 1e-6);
  }
}

TEST(Stats, TSurvivalMatchesQuadrature) {
  const double cases[][2] = {{0.3, 4}, {1.5, 9}, {2.8, 4}, {4.0, 2.5}};
  for (const auto& c : cases) {
    EXPECT_NEAR(t_survival(c[0], c[1]), oracle::t_survival_quadrature(c[0], c[1], 200000), 1e-6);
  }
  EXPECT_NEAR(t_survival(0.0, 5.0), 0.5, 1e-15);
  EXPECT_NEAR(t_survival(-1.2, 5.0), 1.0 - t_survival(1.2, 5.0), 1e-15);
}

TEST(Stats, AnovaByHand) {
  const std::vector<std::vector<double>> g{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto r = one_way_anova(g);
  EXPECT_NEAR(r.statistic, 27.0, 1e-12);  // MSB 27 / MSW 1
  EXPECT_EQ(r.dof1, 2.0);
  EXPECT_EQ(r.dof2, 6.0);
  EXPECT_NEAR(r.p_value, oracle::f_survival_quadrature(27.0, 2, 6, 200000), 1e-6);
}

TEST(Stats, AnovaIdenticalGroups) {
  const std::vector<std::vector<double>> g{{1, 2, 3}, {1, 2, 3}};
  const auto r = one_way_anova(g);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-15);
  const std::vector<std::vector<double>> flat{{2, 2}, {2, 2}};
  try {
    one_way_anova(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateGroups);
  }
}

TEST(Stats, PairedTTest) {
  const std::vector<double> a{0.9, 0.8, 0.85, 0.95, 0.9};
  const std::vector<double> b{0.7, 0.75, 0.8, 0.8, 0.85};
  const auto r = t_test_one_tailed(a, b);
  // differences 0.2 0.05 0.05 0.15 0.05
  const double mean = 0.1, sd = std::sqrt((0.01 + 0.0025 * 3 + 0.0025) / 4.0);
  EXPECT_NEAR(r.statistic, mean / (sd / std::sqrt(5.0)), 1e-12);
  EXPECT_EQ(r.dof1, 4.0);
  EXPECT_NEAR(r.p_value, oracle::t_survival_quadrature(r.statistic, 4, 200000), 1e-6);
  const auto flipped = t_test_one_tailed(b, a);
  EXPECT_NEAR(flipped.statistic, -r.statistic, 1e-12);
  EXPECT_NEAR(flipped.p_value, r.p_value, 1e-15);
}

TEST(Stats, WelchTTest) {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{2, 4, 6, 8, 10};
  const auto r = t_test_one_tailed(a, b, false);
  const double va = 5.0 / 3.0 / 4.0, vb = 10.0 / 5.0;
  EXPECT_NEAR(r.statistic, (2.5 - 6.0) / std::sqrt(va + vb), 1e-12);
  const double dof = (va + vb) * (va + vb) / (va * va / 3.0 + vb * vb / 4.0);
  EXPECT_NEAR(r.dof1, dof, 1e-12);
  EXPECT_NEAR(r.p_value, oracle::t_survival_quadrature(std::fabs(r.statistic), dof, 200000), 1e-6);
}

TEST(Stats, ZeroVariance) {
  const std::vector<double> a{0.5, 0.5, 0.5};
  try {
    t_test_one_tailed(a, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVariance);
  }
  const std::vector<double> b{0.4, 0.4, 0.4};
  const auto r = t_test_one_tailed(a, b);
  EXPECT_TRUE(std::isinf(r.statistic));
  EXPECT_EQ(r.p_value, 0.0);
}
