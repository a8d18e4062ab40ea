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

// Relaxed L1 recovery of a switch vector from one differenced reading.
//
// With a single aggregate meter the sensing operator is the row P, so the
// relaxed problem
//
//   minimize   sum_i d_i
//   subject to K - delta <= d . P <= K + delta,   0 <= d_i <= 1
//
// is a fractional knapsack: a unit of objective buys the most watts on the
// largest appliance. Filling in descending power order is therefore optimal
// and no general LP machinery is needed.

#ifndef NILMDP_SOLVER_HPP_
#define NILMDP_SOLVER_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "nilmdp/core.hpp"
#include "nilmdp/random.hpp"

namespace nilmdp {

struct L1Solution {
  SwitchVector delta_star;
  double objective = 0.0;      // ||delta_star||_1
  double active_target = 0.0;  // delta_star . P
  bool saturated = false;      // infeasible step replaced by all-ones
};

inline L1Solution solve_l1_boxed(const AppliancePowerVector& p, double k,
                                 double delta) {
  if (!(k >= 0.0)) throw ParameterError("solve_l1_boxed: K must be >= 0");
  if (!(delta >= 0.0)) throw ParameterError("solve_l1_boxed: delta must be >= 0");
  const std::size_t n = p.size();
  std::vector<double> d(n, 0.0);
  if (k <= delta) return {SwitchVector(std::move(d)), 0.0, 0.0, false};

  const double target = k - delta;
  if (target > p.total()) {
    throw InfeasibleError("solve_l1_boxed: target " + std::to_string(target) +
                          " W exceeds total fleet power " +
                          std::to_string(p.total()) + " W");
  }
  double residual = target;
  for (std::size_t i : p.descending_order()) {
    if (residual <= 0.0) break;
    if (residual >= p[i]) {
      d[i] = 1.0;
      residual -= p[i];
    } else {
      d[i] = residual / p[i];
      residual = 0.0;
    }
  }
  SwitchVector sv(std::move(d));
  const double objective = sv.l1();
  const double active = sv.dot(p);
  return {std::move(sv), objective, active, false};
}

// Infeasible steps saturate instead of aborting a long run.
inline L1Solution solve_l1_boxed_saturating(const AppliancePowerVector& p,
                                            double k, double delta) {
  try {
    return solve_l1_boxed(p, k, delta);
  } catch (const InfeasibleError&) {
    SwitchVector ones = SwitchVector::ones(p.size());
    const double active = ones.dot(p);
    return {std::move(ones), static_cast<double>(p.size()), active, true};
  }
}

// Each entry becomes 1 with probability equal to its value.
inline SwitchVector round_probabilistic(std::span<const double> values,
                                        Rng& rng) {
  detail::require_unit_entries(values, "round_probabilistic");
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0 && rng.uniform() < values[i]) out[i] = 1.0;
  }
  return SwitchVector(std::move(out));
}

inline SwitchVector round_probabilistic(const SwitchVector& v, Rng& rng) {
  return round_probabilistic(v.values(), rng);
}

// ||Δ_t||_0 <= u_max for every t.
inline bool check_sparsity(std::span<const SwitchVector> deltas,
                           std::size_t u_max) {
  return std::all_of(deltas.begin(), deltas.end(), [&](const SwitchVector& d) {
    return d.support() <= u_max;
  });
}

// Sum of the U smallest powers minus the U−1 largest must exceed 2δ for
// every U in [1, u_max − 1]. U is capped at N, where the condition reduces
// to the smallest power exceeding 2δ.
inline bool check_power_concentration(std::span<const double> powers,
                                      double delta, std::size_t u_max) {
  std::vector<double> asc(powers.begin(), powers.end());
  std::sort(asc.begin(), asc.end());
  const std::size_t n = asc.size();
  if (u_max <= 1 || n == 0) return true;
  const std::size_t last_u = std::min(u_max - 1, n);
  double low = 0.0;
  double high = 0.0;
  for (std::size_t u = 1; u <= last_u; ++u) {
    low += asc[u - 1];
    if (u >= 2) high += asc[n - (u - 1)];
    if (!(low - high > 2.0 * delta)) return false;
  }
  return true;
}

inline bool check_power_concentration(const AppliancePowerVector& p,
                                      double delta, std::size_t u_max) {
  return check_power_concentration(p.powers(), delta, u_max);
}

}  // namespace nilmdp

#endif  // NILMDP_SOLVER_HPP_
