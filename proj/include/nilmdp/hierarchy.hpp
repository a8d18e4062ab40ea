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

// Greedy grouping of appliances into power-concentrated hierarchies and
// largest-first hierarchical decoding.

#ifndef NILMDP_HIERARCHY_HPP_
#define NILMDP_HIERARCHY_HPP_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

#include "nilmdp/core.hpp"
#include "nilmdp/inference.hpp"

namespace nilmdp {

struct Hierarchy {
  std::vector<std::size_t> member_indices;  // ascending original index
  AppliancePowerVector power_subvector;
  std::size_t n_i = 0;
  double p_min = 0.0;  // smallest member power
  double p_u = 0.0;    // largest sum of u_max fleet powers below p_min

  double p_max() const { return power_subvector.max(); }
};

namespace detail {

inline double sum_range(const std::vector<double>& v, std::size_t first,
                        std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += v[first + i];
  return s;
}

// Admission test for the next (larger) power into an ascending set c.
inline bool admits(const std::vector<double>& c, double next, double delta) {
  if (c.size() <= 1) return true;
  const std::size_t half = c.size() / 2;
  const double lhs = sum_range(c, 0, half + 1) - 2.0 * delta;
  double rhs = next;
  for (std::size_t j = 1; j + 1 <= half; ++j) rhs += c[c.size() - j];
  return lhs >= rhs;
}

}  // namespace detail

inline Hierarchy make_hierarchy(const AppliancePowerVector& p,
                                std::vector<std::size_t> members,
                                std::size_t u_max) {
  std::sort(members.begin(), members.end());
  Hierarchy h{members, p.subset(members), members.size(), 0.0, 0.0};
  h.p_min = h.power_subvector.min();
  std::vector<double> below;
  for (double w : p.powers()) {
    if (w < h.p_min) below.push_back(w);
  }
  std::sort(below.begin(), below.end(), std::greater<>());
  const std::size_t take = std::min(u_max, below.size());
  h.p_u = detail::sum_range(below, 0, take);
  return h;
}

// Builds sets over ascending powers, admitting the next appliance while the
// set has at most one member or the admission inequality holds. Returned in
// decoding order: descending by each set's largest power.
inline std::vector<Hierarchy> decompose(const AppliancePowerVector& p,
                                        double delta, std::size_t u_max = 1) {
  if (!(delta >= 0.0)) throw ParameterError("decompose: delta must be >= 0");
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  std::vector<double> current_powers;
  for (std::size_t idx : p.ascending_order()) {
    if (detail::admits(current_powers, p[idx], delta)) {
      current.push_back(idx);
      current_powers.push_back(p[idx]);
    } else {
      groups.push_back(std::move(current));
      current = {idx};
      current_powers = {p[idx]};
    }
  }
  if (!current.empty()) groups.push_back(std::move(current));

  std::vector<Hierarchy> out;
  out.reserve(groups.size());
  for (auto& g : groups) out.push_back(make_hierarchy(p, std::move(g), u_max));
  std::stable_sort(out.begin(), out.end(),
                   [](const Hierarchy& a, const Hierarchy& b) {
                     return a.p_max() > b.p_max();
                   });
  return out;
}

// Every U < S: sum of the U smallest − 2δ > sum of the U − 1 largest.
inline bool good_hierarchy_check(std::span<const double> powers,
                                 double delta) {
  std::vector<double> asc(powers.begin(), powers.end());
  std::sort(asc.begin(), asc.end());
  const std::size_t s = asc.size();
  double low = 0.0;
  double high = 0.0;
  for (std::size_t u = 1; u < s; ++u) {
    low += asc[u - 1];
    if (u >= 2) high += asc[s - (u - 1)];
    if (!(low - 2.0 * delta > high)) return false;
  }
  return true;
}

inline bool good_hierarchy_check(const Hierarchy& h, double delta) {
  return good_hierarchy_check(h.power_subvector.powers(), delta);
}

// Decodes hierarchies largest-first with multi-shot inference, subtracting
// each decoded contribution from the readings passed to the next. Residual
// readings are left unclamped.
inline InferenceResult hierarchical_infer(const StateVector& x0,
                                          const MeterSeries& y,
                                          const AppliancePowerVector& p,
                                          const SensitivityParams& sens,
                                          Rng& rng,
                                          MultiShotOptions options = {},
                                          std::vector<Hierarchy>* used = nullptr) {
  detail::require_same_length(x0.size(), p.size(), "hierarchical_infer x0");
  std::vector<Hierarchy> hierarchies = decompose(p, sens.delta, sens.u_max);
  const std::size_t horizon = y.horizon();
  const std::size_t n = p.size();

  InferenceResult result;
  if (used) *used = hierarchies;
  if (horizon == 0) return result;

  std::vector<std::vector<double>> states(horizon, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> probs(horizon, std::vector<double>(n, 0.0));
  result.corrections_applied.assign(horizon, 0);
  std::vector<double> residual(y.readings().begin(), y.readings().end());

  // Power still unexplained below each hierarchy: the standing load the
  // correction step must tolerate while the upper levels are decoded.
  double lower_load = p.total();
  const double base_tol = options.correction_tolerance.value_or(sens.delta);

  for (const Hierarchy& h : hierarchies) {
    std::vector<double> x0_sub;
    for (std::size_t i : h.member_indices) x0_sub.push_back(x0[i]);
    StateVector x0_h(std::move(x0_sub));
    lower_load -= h.power_subvector.total();
    // Switches of up to u_max smaller appliances widen the step interval by
    // P_U / 2, the same widening the hierarchical bound applies.
    const SensitivityParams sens_h{sens.delta + h.p_u / 2.0, sens.u_max};
    MultiShotOptions options_h;
    options_h.correction_tolerance = base_tol + std::max(0.0, lower_load);
    InferenceResult sub =
        multi_shot_infer(x0_h, MeterSeries(residual), h.power_subvector, sens_h,
                         rng, options_h);
    result.saturated_steps += sub.saturated_steps;
    residual[0] -= x0_h.dot(h.power_subvector);
    for (std::size_t t = 0; t < horizon; ++t) {
      for (std::size_t k = 0; k < h.n_i; ++k) {
        states[t][h.member_indices[k]] = sub.states.at(t, k);
        probs[t][h.member_indices[k]] = sub.switch_probs[t][k];
      }
      result.corrections_applied[t] += sub.corrections_applied[t];
      residual[t + 1] -= sub.states[t].dot(h.power_subvector);
    }
  }

  std::vector<StateVector> cols;
  cols.reserve(horizon);
  for (auto& s : states) cols.emplace_back(std::move(s));
  result.states = StateMatrix(std::move(cols));
  result.switch_probs.reserve(horizon);
  for (auto& v : probs) result.switch_probs.emplace_back(std::move(v));
  return result;
}

}  // namespace nilmdp

#endif  // NILMDP_HIERARCHY_HPP_
