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

// One-shot and multi-shot switch-event inference.

#ifndef NILMDP_INFERENCE_HPP_
#define NILMDP_INFERENCE_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "nilmdp/core.hpp"
#include "nilmdp/random.hpp"
#include "nilmdp/solver.hpp"

namespace nilmdp {

inline double k_delta(double y_curr, double y_prev) {
  return std::abs(y_curr - y_prev);
}

struct OneShotResult {
  SwitchVector delta_star;
  SwitchVector delta_bar;
  bool saturated = false;
};

// Noise-agnostic: the readings may already carry injected noise.
inline OneShotResult one_shot_infer(const AppliancePowerVector& p,
                                    double y_prev, double y_curr,
                                    const SensitivityParams& sens, Rng& rng,
                                    bool saturate_infeasible = false) {
  const double k = k_delta(y_curr, y_prev);
  L1Solution sol = saturate_infeasible
                       ? solve_l1_boxed_saturating(p, k, sens.delta)
                       : solve_l1_boxed(p, k, sens.delta);
  SwitchVector rounded = round_probabilistic(sol.delta_star, rng);
  return {std::move(sol.delta_star), std::move(rounded), sol.saturated};
}

// 1 − ||Δ̂ − Δ||_1 / N.
inline double accuracy_one_shot(std::span<const double> delta_hat,
                                std::span<const double> delta_true) {
  detail::require_same_length(delta_hat.size(), delta_true.size(),
                              "accuracy_one_shot");
  if (delta_hat.empty()) throw DimensionError("accuracy_one_shot: empty");
  double err = 0.0;
  for (std::size_t i = 0; i < delta_hat.size(); ++i) {
    err += std::abs(delta_hat[i] - delta_true[i]);
  }
  return 1.0 - err / static_cast<double>(delta_hat.size());
}

inline double accuracy_one_shot(const SwitchVector& delta_hat,
                                const SwitchVector& delta_true) {
  return accuracy_one_shot(delta_hat.values(), delta_true.values());
}

// 1 − ||X̂ − X||_1 / (N T).
inline double accuracy_multi_shot(const StateMatrix& result,
                                  const StateMatrix& truth) {
  detail::require_same_length(result.horizon(), truth.horizon(),
                              "accuracy_multi_shot horizon");
  detail::require_same_length(result.appliances(), truth.appliances(),
                              "accuracy_multi_shot appliances");
  if (result.horizon() == 0 || result.appliances() == 0) {
    throw DimensionError("accuracy_multi_shot: empty matrix");
  }
  double err = 0.0;
  for (std::size_t t = 0; t < result.horizon(); ++t) {
    for (std::size_t i = 0; i < result.appliances(); ++i) {
      err += std::abs(result.at(t, i) - truth.at(t, i));
    }
  }
  return 1.0 - err / static_cast<double>(result.horizon() *
                                         result.appliances());
}

struct CorrectionResult {
  StateVector states;
  std::size_t changes = 0;
};

// Binary adjustment of a rounded state against its reading. Estimates above
// y + tol switch off appliances from the largest power down; estimates below
// y − tol switch on appliances from the smallest power up. Each loop visits
// at most N appliances; a visit that does not change a state still counts
// toward the N.
inline CorrectionResult correct_states(const StateVector& rounded,
                                       const AppliancePowerVector& p,
                                       double reading, double tolerance) {
  std::vector<double> x(rounded.values().begin(), rounded.values().end());
  const std::size_t n = p.size();
  auto estimate = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * p[i];
    return s;
  };
  std::size_t changes = 0;
  if (estimate() > reading + tolerance) {
    for (std::size_t k = 0; k < n && estimate() > reading + tolerance; ++k) {
      const std::size_t j = p.descending_order()[k];
      if (x[j] != 0.0) {
        x[j] = 0.0;
        ++changes;
      }
    }
  } else if (estimate() < reading - tolerance) {
    for (std::size_t k = 0; k < n && estimate() < reading - tolerance; ++k) {
      const std::size_t j = p.ascending_order()[k];
      if (x[j] != 1.0) {
        x[j] = 1.0;
        ++changes;
      }
    }
  }
  return {StateVector(std::move(x)), changes};
}

struct InferenceResult {
  StateMatrix states;                      // X̄_1..X̄_T, binary
  std::vector<SwitchVector> switch_probs;  // Δ*_1..Δ*_T
  std::vector<std::size_t> corrections_applied;
  std::size_t saturated_steps = 0;
};

struct MultiShotOptions {
  // Defaults to sens.delta. Zero reproduces the uncorrected-tolerance
  // variant that toggles whenever the estimate differs from the reading.
  std::optional<double> correction_tolerance;
};

// Chained inference over y_0..y_T:
//   1. K_t = |y_t − y_{t−1}| and Δ*_t from the relaxed solver per step;
//   2. X_t = X_{t−1} ⊙ (1 − Δ*_t) + (1 − X_{t−1}) ⊙ Δ*_t from X_0 = x0;
//   3. X_t is rounded independently per slot and corrected against y_t.
// Propagation runs on the unrounded probabilities; corrections do not feed
// back into later slots.
inline InferenceResult multi_shot_infer(const StateVector& x0,
                                        const MeterSeries& y,
                                        const AppliancePowerVector& p,
                                        const SensitivityParams& sens,
                                        Rng& rng,
                                        MultiShotOptions options = {}) {
  detail::require_same_length(x0.size(), p.size(), "multi_shot_infer x0");
  if (!x0.is_binary()) throw DomainError("multi_shot_infer: x0 must be binary");
  const double tol = options.correction_tolerance.value_or(sens.delta);
  if (!(tol >= 0.0)) {
    throw ParameterError("multi_shot_infer: correction tolerance must be >= 0");
  }
  InferenceResult result;
  const std::size_t horizon = y.horizon();
  if (horizon == 0) return result;

  result.switch_probs.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    L1Solution sol =
        solve_l1_boxed_saturating(p, k_delta(y[t], y[t - 1]), sens.delta);
    if (sol.saturated) ++result.saturated_steps;
    result.switch_probs.push_back(std::move(sol.delta_star));
  }

  std::vector<StateVector> probs;
  probs.reserve(horizon);
  StateVector prev = x0;
  for (std::size_t t = 0; t < horizon; ++t) {
    prev = apply_switch(prev, result.switch_probs[t]);
    probs.push_back(prev);
  }

  std::vector<StateVector> states;
  states.reserve(horizon);
  result.corrections_applied.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    SwitchVector rounded = round_probabilistic(probs[t].values(), rng);
    StateVector as_state(std::vector<double>(rounded.values().begin(),
                                             rounded.values().end()));
    CorrectionResult c = correct_states(as_state, p, y[t + 1], tol);
    result.corrections_applied.push_back(c.changes);
    states.push_back(std::move(c.states));
  }
  result.states = StateMatrix(std::move(states));
  return result;
}

}  // namespace nilmdp

#endif  // NILMDP_INFERENCE_HPP_
