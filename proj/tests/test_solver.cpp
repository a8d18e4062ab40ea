// Copyright 2026 The nilm-dp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nilmdp/solver.hpp"
#include "oracles.hpp"

namespace nilmdp {
namespace {

void expect_vector_near(const SwitchVector& got, std::vector<double> want,
                        double tol = 1e-12) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(got[i], want[i], tol) << "entry " << i;
  }
}

TEST(SolveL1Boxed, ZeroWhenWithinTolerance) {
  const L1Solution s = solve_l1_boxed(AppliancePowerVector({3, 2, 1}), 0.4, 0.5);
  expect_vector_near(s.delta_star, {0, 0, 0});
  EXPECT_EQ(s.objective, 0.0);
}

TEST(SolveL1Boxed, GreedyFillWithOneFraction) {
  const L1Solution s = solve_l1_boxed(AppliancePowerVector({3, 2, 1}), 4.5, 0.5);
  expect_vector_near(s.delta_star, {1, 0.5, 0});
  EXPECT_DOUBLE_EQ(s.objective, 1.5);
  EXPECT_DOUBLE_EQ(s.active_target, 4.0);
  const auto grid = oracle::grid_optimum({3, 2, 1}, 4.0, 5.0, 1000);
  ASSERT_TRUE(grid.has_value());
  EXPECT_NEAR(*grid, 1.5, 1e-9);
}

TEST(SolveL1Boxed, InfeasibleBeyondFleet) {
  EXPECT_THROW(solve_l1_boxed(AppliancePowerVector({3, 2, 1}), 7, 0.5),
               InfeasibleError);
}

TEST(SolveL1Boxed, ExactSingleMatch) {
  const L1Solution s = solve_l1_boxed(AppliancePowerVector({3, 2, 1}), 3, 0);
  expect_vector_near(s.delta_star, {1, 0, 0});
}

TEST(SolveL1Boxed, TiesGoToLowerIndex) {
  const L1Solution s = solve_l1_boxed(AppliancePowerVector({2, 5, 5}), 5, 0);
  expect_vector_near(s.delta_star, {0, 1, 0});
}

TEST(SolveL1Boxed, Saturating) {
  const L1Solution s =
      solve_l1_boxed_saturating(AppliancePowerVector({3, 2, 1}), 7, 0.5);
  EXPECT_TRUE(s.saturated);
  expect_vector_near(s.delta_star, {1, 1, 1});
  EXPECT_FALSE(solve_l1_boxed_saturating(AppliancePowerVector({3, 2, 1}), 2, 0.5)
                   .saturated);
}

TEST(SolveL1Boxed, ParameterErrors) {
  EXPECT_THROW(solve_l1_boxed(AppliancePowerVector({1}), -1, 0), ParameterError);
  EXPECT_THROW(solve_l1_boxed(AppliancePowerVector({1}), 1, -1), ParameterError);
}

TEST(SolveL1Boxed, MatchesVertexOracleFuzz) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> pw(1.0, 100.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> p(1 + gen() % 8);
    double total = 0;
    for (double& v : p) total += (v = pw(gen));
    const double delta = std::uniform_real_distribution<double>(0, 10)(gen);
    const double k = std::uniform_real_distribution<double>(0, total + delta)(gen);
    const L1Solution s = solve_l1_boxed(AppliancePowerVector(p), k, delta);
    const double dot = s.delta_star.dot(AppliancePowerVector(p));
    EXPECT_GE(dot, k - delta - 1e-9);
    EXPECT_LE(dot, k + delta + 1e-9);
    EXPECT_NEAR(s.objective, s.delta_star.l1(), 1e-12);
    const auto best = oracle::lp_optimum(p, std::max(0.0, k - delta), k + delta);
    ASSERT_TRUE(best.has_value());
    EXPECT_NEAR(s.objective, *best, 1e-9);
  }
}

TEST(SolveL1Boxed, AtMostOneFractionalEntry) {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> pw(1.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(1 + gen() % 10);
    double total = 0;
    for (double& v : p) total += (v = pw(gen));
    const double k = std::uniform_real_distribution<double>(0, total)(gen);
    const L1Solution s = solve_l1_boxed(AppliancePowerVector(p), k, 0.5);
    int fractional = 0;
    for (double v : s.delta_star.values()) fractional += (v > 0 && v < 1);
    EXPECT_LE(fractional, 1);
  }
}

TEST(RoundProbabilistic, BinaryInputsUnchanged) {
  Rng rng(1);
  EXPECT_EQ(round_probabilistic(SwitchVector({1, 0, 1}), rng), SwitchVector({1, 0, 1}));
  EXPECT_EQ(round_probabilistic(SwitchVector({0, 0, 0}), rng), SwitchVector({0, 0, 0}));
}

TEST(RoundProbabilistic, FrequencyMatchesProbability) {
  Rng rng(2);
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += round_probabilistic(SwitchVector({0.3}), rng)[0] == 1.0;
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.3, 3 * oracle::binomial_sigma(0.3, n));
}

TEST(RoundProbabilistic, RejectsOutOfRange) {
  Rng rng(3);
  const std::vector<double> bad{0.5, 1.2};
  EXPECT_THROW(round_probabilistic(std::span<const double>(bad), rng), DomainError);
}

TEST(CheckSparsity, Cases) {
  EXPECT_TRUE(check_sparsity(std::vector<SwitchVector>{SwitchVector({0, 0, 0})}, 1));
  EXPECT_FALSE(check_sparsity(std::vector<SwitchVector>{SwitchVector({1, 1, 1})}, 2));
  EXPECT_TRUE(check_sparsity(std::vector<SwitchVector>{}, 1));
}

TEST(CheckSparsity, MatchesDirectCount) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen() % 8;
    std::vector<SwitchVector> ds;
    std::size_t worst = 0;
    for (int t = 0; t < 6; ++t) {
      std::vector<double> v(n);
      std::size_t c = 0;
      for (double& x : v) c += (x = static_cast<double>(gen() % 2)) == 1.0;
      worst = std::max(worst, c);
      ds.emplace_back(v);
    }
    const std::size_t u = gen() % (n + 1);
    EXPECT_EQ(check_sparsity(ds, u), worst <= u);
  }
}

TEST(CheckPowerConcentration, Cases) {
  EXPECT_TRUE(check_power_concentration(AppliancePowerVector({1, 1, 1}), 0.2, 3));
  EXPECT_FALSE(check_power_concentration(AppliancePowerVector({1, 10}), 1, 2));
  for (std::size_t u = 1; u <= 6; ++u) {
    EXPECT_TRUE(check_power_concentration(AppliancePowerVector(std::vector<double>(6, 7.0)),
                                          0.0, u));
  }
}

TEST(CheckPowerConcentration, MatchesOracleFuzz) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pw(1.0, 50.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> p(1 + gen() % 8);
    for (double& v : p) v = pw(gen);
    const double delta = std::uniform_real_distribution<double>(0, 5)(gen);
    const std::size_t u = 1 + gen() % p.size();
    EXPECT_EQ(check_power_concentration(AppliancePowerVector(p), delta, u),
              oracle::concentration_holds(p, delta, u - 1));
  }
}

}  // namespace
}  // namespace nilmdp
