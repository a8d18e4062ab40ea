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

#include "nilmdp/bounds.hpp"
#include "nilmdp/hierarchy.hpp"
#include "nilmdp/solver.hpp"
#include "oracles.hpp"

namespace nilmdp {
namespace {

TEST(RipConstant, SingleApplianceIsZero) {
  EXPECT_EQ(rip_constant(AppliancePowerVector({5}), 1), 0.0);
}

TEST(RipConstant, TwoApplianceExample) {
  EXPECT_NEAR(rip_constant(AppliancePowerVector({3, 4}), 1), 0.64, 1e-12);
}

TEST(RipConstant, SingularValueReadingAtLeastOne) {
  EXPECT_GE(rip_constant(AppliancePowerVector({3, 4}), 2,
                         RipInterpretation::kSingularValue),
            1.0);
}

TEST(RipConstant, RangeChecked) {
  EXPECT_THROW(rip_constant(AppliancePowerVector({3, 4}), 0), ParameterError);
  EXPECT_THROW(rip_constant(AppliancePowerVector({3, 4}), 3), ParameterError);
}

TEST(RipConstant, MatchesExhaustiveEnumeration) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> pw(0.5, 500.0);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<double> p(1 + gen() % 12);
    for (double& v : p) v = pw(gen);
    const AppliancePowerVector apv(p);
    for (std::size_t s = 1; s <= p.size(); ++s) {
      EXPECT_NEAR(rip_constant(apv, s), oracle::rip_exhaustive(p, s), 1e-12);
    }
  }
}

TEST(CofP, OverrideWins) {
  const CValue c = c_of_p(AppliancePowerVector({60, 65, 70}), 1,
                          RipInterpretation::kSubsetNorm, 0.015);
  ASSERT_TRUE(c.defined());
  EXPECT_EQ(*c.value, 0.015);
  EXPECT_TRUE(c.from_override);
}

TEST(CofP, ZeroConstantsFormula) {
  const auto c = c_from_constants(0.0, 0.0, 4.0);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(*c, 4.0 / ((std::sqrt(3.0) - 1.0) * 4.0), 1e-15);
  EXPECT_NEAR(*c, 1.3660, 1e-4);
}

TEST(CofP, UndefinedCases) {
  EXPECT_FALSE(c_from_constants(0.0, 1.0, 4.0).has_value());
  EXPECT_FALSE(c_from_constants(2.0, 0.5, 4.0).has_value());
  EXPECT_FALSE(c_of_p(AppliancePowerVector({3, 4}), 1, RipInterpretation::kSingularValue)
                   .defined());
  EXPECT_FALSE(c_of_p(AppliancePowerVector({60, 65, 70, 75}), 1).defined());
}

TEST(CofP, SingleApplianceComputable) {
  const CValue c = c_of_p(AppliancePowerVector({4}), 1);
  ASSERT_TRUE(c.defined());
  EXPECT_NEAR(*c.value, 1.0 / (std::sqrt(3.0) - 1.0), 1e-12);
}

TEST(RecoveryError, SingleApplianceErrorWithinCDelta) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const double pw = std::uniform_real_distribution<double>(1, 100)(gen);
    const double d = std::uniform_real_distribution<double>(1e-6, 2 * pw)(gen);
    const AppliancePowerVector p({pw});
    const double c = *c_of_p(p, 1).value;
    const double truth = static_cast<double>(gen() % 2);
    const L1Solution s = solve_l1_boxed(p, truth * pw, d);
    EXPECT_LE(std::abs(s.delta_star[0] - truth), c * d + 1e-12);
  }
}

TEST(LowerBound, PaperOperatingPoint) {
  const BoundReport r = lower_bound_one_shot(2, 1, 8, 0.015);
  EXPECT_NEAR(r.lower, 0.30890, 1e-5);
  EXPECT_NEAR(r.lower, static_cast<double>(oracle::lower_one_shot(2, 1, 8, 0.015)), 1e-14);
  EXPECT_NEAR(r.get("b"), 7.94, 1e-12);
  EXPECT_NEAR(r.get("main_term"), 22.12 / 32, 1e-12);
  EXPECT_NEAR(r.get("exp_term"), 1.55e-4, 1e-6);
  EXPECT_EQ(r.clamped_lower, r.lower);
}

TEST(LowerBound, SmallDeltaTendsToOne) {
  EXPECT_NEAR(lower_bound_one_shot(1e-12, 1, 8, 0.015).lower, 1.0, 1e-10);
}

TEST(LowerBound, StrongPrivacyClampsToZero) {
  // The main term alone is 19.2538; the tail term adds back 17.548.
  const BoundReport r = lower_bound_one_shot(2, 0.01, 8, 0.015);
  EXPECT_NEAR(r.get("main_term"), 19.25375, 1e-10);
  EXPECT_NEAR(r.lower, -0.70574461658268, 1e-12);
  EXPECT_EQ(r.clamped_lower, 0.0);
}

TEST(LowerBound, ParameterErrors) {
  EXPECT_THROW(lower_bound_one_shot(2, 0, 8, 0.015), ParameterError);
  EXPECT_THROW(lower_bound_one_shot(0, 1, 8, 0.015), ParameterError);
}

TEST(UpperBound, OperatingPoint) {
  const BoundReport r = upper_bound_one_shot(2, 1, 8, 10);
  EXPECT_NEAR(r.upper, 1.0 - 46.0 / 1280.0 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(r.upper, 0.98678, 5e-6);
  EXPECT_EQ(r.get("A2"), 0.0);
}

TEST(UpperBound, LargeEpsilonTendsToOne) {
  EXPECT_NEAR(upper_bound_one_shot(2, 200, 8, 10).upper, 1.0, 1e-12);
}

TEST(BoundProperties, A2IdentityAndMonotonicityFuzz) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 3000; ++trial) {
    const double n = static_cast<double>(1 + gen() % 20);
    const double pn = std::uniform_real_distribution<double>(1, 5000)(gen);
    const double d = std::uniform_real_distribution<double>(1e-3, 50)(gen);
    const double e = std::exp(std::uniform_real_distribution<double>(-7, 7)(gen));
    const BoundReport up = upper_bound_one_shot(d, e, n, pn);
    EXPECT_NEAR(up.get("A2"), 0.0, 1e-9 * std::max(1.0, up.get("m") * up.get("m")));
    EXPECT_NEAR(up.upper, static_cast<double>(oracle::upper_one_shot(d, e, n, pn)),
                1e-9 * std::max(1.0, std::abs(up.upper)));
  }
}

TEST(BoundProperties, LowerMonotoneInEpsilonWhenBNonNegative) {
  std::mt19937_64 gen(15);
  for (int trial = 0; trial < 500; ++trial) {
    const double n = static_cast<double>(1 + gen() % 20);
    const double c = std::uniform_real_distribution<double>(0, 2)(gen);
    const double d = std::uniform_real_distribution<double>(1e-3, n / (2 + c))(gen);
    double prev = -1e300;
    for (double le = -3; le <= 3; le += 0.05) {
      const double v = lower_bound_one_shot(d, std::pow(10.0, le), n, c).lower;
      EXPECT_GE(v, prev - 1e-9 * std::max(1.0, std::abs(prev)));
      prev = v;
    }
  }
}

TEST(BoundProperties, ClampedLowerBelowClampedUpper) {
  for (double e : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const BoundReport lo = lower_bound_one_shot(2, e, 8, 0.015);
    const BoundReport up = upper_bound_one_shot(2, e, 8, 220.0);
    EXPECT_LE(lo.clamped_lower, up.clamped_upper) << e;
  }
}

TEST(MultiShotBounds, SingleStepReducesToOneShotUpper) {
  const BoundReport r = multi_shot_bounds(2, 1, 8, 1, 0.015, 10);
  EXPECT_EQ(r.lower, 1.0);
  EXPECT_NEAR(r.upper, upper_bound_one_shot(2, 1, 8, 10).upper, 1e-15);
}

TEST(MultiShotBounds, AsStatedExceedsOne) {
  const BoundReport r = multi_shot_bounds(2, 1, 8, 10, 0.015, 10);
  const double b = static_cast<double>(oracle::lower_one_shot(2, 1, 8, 0.015));
  EXPECT_NEAR(r.lower, 1 - 9 * (1 - 8 * b) / 2, 1e-12);
  EXPECT_NEAR(r.lower, 7.62, 5e-3);
  EXPECT_EQ(r.clamped_lower, 1.0);
  EXPECT_NEAR(r.upper, 0.998678, 1e-6);
}

TEST(MultiShotBounds, CorrectedVariant) {
  const BoundReport r =
      multi_shot_bounds(2, 1, 8, 10, 0.015, 10, BoundVariant::kCorrected);
  const double b = static_cast<double>(oracle::lower_one_shot(2, 1, 8, 0.015));
  EXPECT_NEAR(r.lower, 1 - 9 * (1 - b) * 8 / 2, 1e-12);
  EXPECT_EQ(r.clamped_lower, 0.0);
}

TEST(HierarchicalBounds, SingleHierarchyBase) {
  const auto hs = decompose(AppliancePowerVector({5, 6, 7}), 0.1, 1);
  ASSERT_EQ(hs.size(), 1u);
  const BoundReport r = hierarchical_bounds(hs, 0.1, 1, 5, 1, {0.015});
  const BoundReport m = multi_shot_bounds(0.1, 1, 3, 5, 0.015, hs[0].power_subvector.l2_norm());
  EXPECT_EQ(r.get("delta_prime[1]"), 0.0);
  EXPECT_NEAR(r.lower, m.lower, 1e-15);
  EXPECT_NEAR(r.upper, m.upper, 1e-15);
}

TEST(HierarchicalBounds, TwoHierarchyRecursion) {
  // Reference values from an independent 40-digit evaluation.
  const auto hs = decompose(AppliancePowerVector({6, 6, 1, 1}), 0.1, 2);
  ASSERT_EQ(hs.size(), 2u);
  const BoundReport r = hierarchical_bounds(hs, 0.1, 1, 5, 2, {0.015, 0.015});
  EXPECT_NEAR(r.get("delta_prime[1]"), 1.0, 1e-15);
  EXPECT_NEAR(r.get("m[1]"), -0.036136502338440176, 1e-12);
  EXPECT_NEAR(r.get("M[1]"), 0.99314448937287552, 1e-12);
  EXPECT_NEAR(r.get("delta_prime[2]"), 84.852813742385703, 1e-9);
  EXPECT_NEAR(r.get("m[2]"), -119718.22420486625, 1e-6);
  EXPECT_NEAR(r.get("M[2]"), -2.0857740376880165, 1e-12);
  EXPECT_NEAR(r.lower, -59859.130170684295, 1e-6);
  EXPECT_NEAR(r.upper, -0.54631477415757048, 1e-12);
  EXPECT_EQ(r.clamped_lower, 0.0);
  EXPECT_EQ(r.clamped_upper, 0.0);
}

TEST(HierarchicalBounds, PerfectUpperLevelsLeaveOnlyPu) {
  // With T = 1 every m_k is exactly 1, so no error carries forward.
  const auto hs = decompose(AppliancePowerVector({1000, 1010, 50, 52}), 1e-6, 1);
  ASSERT_EQ(hs.size(), 2u);
  const BoundReport r = hierarchical_bounds(hs, 1e-6, 1e6, 1, 1, {0.015, 0.015});
  EXPECT_GE(r.get("m[1]"), 1.0);
  EXPECT_DOUBLE_EQ(r.get("delta_prime[2]"), hs[1].p_u / 2.0);
  EXPECT_DOUBLE_EQ(r.get("delta_prime[1]"), hs[0].p_u / 2.0);
}

TEST(HierarchicalBounds, UndefinedWithoutOverride) {
  const auto hs = decompose(AppliancePowerVector({60, 65, 70, 75}), 1, 1);
  const BoundReport r = hierarchical_bounds(hs, 1, 1, 5, 1, {});
  EXPECT_TRUE(std::isnan(r.lower));
  EXPECT_FALSE(r.undefined.empty());
}

}  // namespace
}  // namespace nilmdp
