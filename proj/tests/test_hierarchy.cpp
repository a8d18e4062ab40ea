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

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "nilmdp/hierarchy.hpp"
#include "nilmdp/solver.hpp"
#include "oracles.hpp"

namespace nilmdp {
namespace {

std::vector<double> powers_of(const Hierarchy& h) {
  auto s = h.power_subvector.powers();
  return {s.begin(), s.end()};
}

TEST(Decompose, Singleton) {
  const auto hs = decompose(AppliancePowerVector({42}), 1.0);
  ASSERT_EQ(hs.size(), 1u);
  EXPECT_EQ(hs[0].member_indices, (std::vector<std::size_t>{0}));
  EXPECT_EQ(hs[0].p_u, 0.0);
}

TEST(Decompose, LargeApplianceSplitsOff) {
  const auto hs = decompose(AppliancePowerVector({1, 1, 1, 10}), 0.1);
  ASSERT_EQ(hs.size(), 2u);
  EXPECT_EQ(hs[0].member_indices, (std::vector<std::size_t>{3}));
  EXPECT_EQ(hs[1].member_indices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(hs[0].p_min, 10);
  EXPECT_DOUBLE_EQ(hs[0].p_u, 1);
  EXPECT_DOUBLE_EQ(hs[1].p_u, 0);
}

TEST(Decompose, PairsAlwaysAdmitted) {
  const auto hs = decompose(AppliancePowerVector({1, 1000}), 0.1);
  ASSERT_EQ(hs.size(), 1u);
  EXPECT_EQ(hs[0].n_i, 2u);
}

TEST(Decompose, EqualPowersFormOneHierarchy) {
  // With S equal powers w the criterion reads (⌊S/2⌋+1)w − 2δ ≥ ⌊S/2⌋w.
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto hs = decompose(AppliancePowerVector(std::vector<double>(n, 5.0)), 2.4);
    EXPECT_EQ(hs.size(), 1u) << n;
    if (n >= 3) {
      EXPECT_EQ(decompose(AppliancePowerVector(std::vector<double>(n, 5.0)), 2.6).size(),
                (n + 1) / 2)
          << n;
    }
  }
}

TEST(Decompose, PuUsesFleetPowersBelowMinimum) {
  const auto hs = decompose(AppliancePowerVector({3, 4, 100, 110, 5000}), 0.1, 2);
  ASSERT_EQ(hs.size(), 3u);
  EXPECT_DOUBLE_EQ(hs[0].p_u, 110 + 100);
  EXPECT_DOUBLE_EQ(hs[1].p_u, 4 + 3);
  EXPECT_DOUBLE_EQ(hs[2].p_u, 0);
}

TEST(Decompose, NegativeDeltaRejected) {
  EXPECT_THROW(decompose(AppliancePowerVector({1}), -1), ParameterError);
}

TEST(GoodHierarchy, Cases) {
  EXPECT_TRUE(good_hierarchy_check(std::vector<double>{7}, 100));
  EXPECT_TRUE(good_hierarchy_check(std::vector<double>{1, 1, 1}, 0.1));
  EXPECT_FALSE(good_hierarchy_check(std::vector<double>{1, 10}, 1));
}

TEST(GoodHierarchy, MatchesOracleFuzz) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> pw(1.0, 30.0);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<double> p(1 + gen() % 8);
    for (double& v : p) v = pw(gen);
    const double d = std::uniform_real_distribution<double>(0, 3)(gen);
    EXPECT_EQ(good_hierarchy_check(p, d),
              oracle::concentration_holds(p, d, p.size() - 1));
  }
}

TEST(Decompose, PartitionAndSoundnessFuzz) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + gen() % 12;
    std::vector<double> p(n);
    const double hi = (gen() % 2) ? 100.0 : 3000.0;
    for (double& v : p) v = std::uniform_real_distribution<double>(1.0, hi)(gen);
    const double pmin = *std::min_element(p.begin(), p.end());
    const double d = std::uniform_real_distribution<double>(0.0, 0.999 * pmin / 2)(gen);
    const std::size_t u_max = 1 + gen() % 4;
    const auto hs = decompose(AppliancePowerVector(p), d, u_max);
    std::multiset<std::size_t> seen;
    double last_max = 1e300;
    for (const auto& h : hs) {
      EXPECT_TRUE(good_hierarchy_check(h, d));
      const auto hp = powers_of(h);
      EXPECT_TRUE(oracle::concentration_holds(hp, d, hp.size() - 1));
      if (h.n_i <= u_max) {
        EXPECT_TRUE(check_power_concentration(h.power_subvector, d, u_max));
      }
      EXPECT_LE(h.p_max(), last_max);
      last_max = h.p_max();
      EXPECT_TRUE(std::is_sorted(h.member_indices.begin(), h.member_indices.end()));
      seen.insert(h.member_indices.begin(), h.member_indices.end());
    }
    ASSERT_EQ(seen.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(seen.count(i), 1u);
  }
}

TEST(HierarchicalInfer, SingleHierarchyMatchesMultiShot) {
  const AppliancePowerVector p({50, 52, 54, 56});
  ASSERT_EQ(decompose(p, 1.0).size(), 1u);
  const MeterSeries y({50, 102, 102, 158, 104, 104, 54, 0});
  Rng a(31), b(31);
  const auto hr = hierarchical_infer(StateVector({1, 0, 0, 0}), y, p, {1.0, 1}, a);
  const auto mr = multi_shot_infer(StateVector({1, 0, 0, 0}), y, p, {1.0, 1}, b);
  EXPECT_EQ(hr.states.columns(), mr.states.columns());
  EXPECT_EQ(hr.corrections_applied, mr.corrections_applied);
}

TEST(HierarchicalInfer, SeparatedHierarchiesRecoverExactly) {
  // Only the largest member of each hierarchy switches, the regime in which
  // the relaxed solve is exact.
  const AppliancePowerVector p({10, 11, 1000});
  std::vector<Hierarchy> used;
  std::vector<double> x = {1, 0, 1};
  std::vector<StateVector> truth;
  std::vector<double> y{StateVector(x).dot(p)};
  Rng gen(2);
  for (int t = 0; t < 60; ++t) {
    if (gen.bernoulli(0.2)) x[1] = 1 - x[1];
    if (gen.bernoulli(0.2)) x[2] = 1 - x[2];
    truth.emplace_back(x);
    y.push_back(StateVector(x).dot(p));
  }
  Rng rng(5);
  const double delta = 1e-9;
  const auto r = hierarchical_infer(StateVector({1, 0, 1}), MeterSeries(y), p,
                                    {delta, 1}, rng, {}, &used);
  ASSERT_EQ(used.size(), 2u);
  EXPECT_EQ(accuracy_multi_shot(r.states, StateMatrix(truth)), 1.0);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    EXPECT_LE(std::abs(y[t + 1] - r.states[t].dot(p)), delta * used.size());
  }
}

TEST(HierarchicalInfer, OutputShape) {
  const AppliancePowerVector p({20, 21, 22, 100, 105, 110, 500});
  Rng rng(1);
  const auto r = hierarchical_infer(StateVector::zeros(7), MeterSeries({0, 20, 120, 620, 600}),
                                    p, {0.5, 1}, rng);
  EXPECT_EQ(r.states.horizon(), 4u);
  EXPECT_EQ(r.states.appliances(), 7u);
  EXPECT_EQ(r.switch_probs.size(), 4u);
  for (const auto& c : r.states.columns()) EXPECT_TRUE(c.is_binary());
}

}  // namespace
}  // namespace nilmdp
