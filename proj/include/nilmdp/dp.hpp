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

// Additive noise mechanisms for meter readings.
//
// Samplers are pure functions of (config, seed, draw index): the k-th noise
// value for a series is drawn from IndexedUniforms(dp.seed, k). Experiment
// trials get independent streams by deriving dp.seed from (master, trial).
//
// Privacy is accounted per reading with a single epsilon; no composition over
// the horizon is applied.

#ifndef NILMDP_DP_HPP_
#define NILMDP_DP_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nilmdp/core.hpp"
#include "nilmdp/random.hpp"

namespace nilmdp {

struct NoiseSample {
  double value = 0.0;  // watts
  Mechanism mechanism = Mechanism::kNone;
  std::uint64_t index = 0;
};

struct Sensitivity {
  double delta_f = 0.0;
  double delta = 0.0;
};

// Δf = max_t (upper_t − lower_t), δ = 2Δf.
inline Sensitivity sensitivity(std::span<const ReadingBounds> bounds) {
  if (bounds.empty()) throw EmptyInputError("sensitivity: no bounds given");
  double widest = 0.0;
  for (std::size_t t = 0; t < bounds.size(); ++t) {
    const double gap = bounds[t].upper - bounds[t].lower;
    if (gap < 0.0) {
      throw BoundsError("sensitivity: upper < lower at index " +
                        std::to_string(t));
    }
    widest = std::max(widest, gap);
  }
  return {widest, 2.0 * widest};
}

inline double laplace_pdf(double s, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("laplace_pdf: lambda must be > 0");
  return std::exp(-std::abs(s) / lambda) / (2.0 * lambda);
}

inline double laplace_scale(const DpConfig& dp) {
  if (!(dp.epsilon > 0.0)) throw ParameterError("laplace: epsilon must be > 0");
  return dp.delta_f / dp.epsilon;
}

inline NoiseSample laplace_sample(const DpConfig& dp, std::uint64_t index) {
  const double lambda = laplace_scale(dp);
  IndexedUniforms u(dp.seed, index);
  const double sign = u.next() < 0.5 ? -1.0 : 1.0;
  const double magnitude = -lambda * std::log(u.next_open_low());
  return {sign * magnitude, Mechanism::kLaplace, index};
}

// Latent variables of one staircase draw.
struct StaircaseDraw {
  double gamma = 0.5;
  int s_sign = 1;
  std::uint64_t g = 0;
  double u = 0.0;
  int b_bit = 0;
};

inline double staircase_gamma(double epsilon) {
  return 1.0 / (1.0 + std::exp(epsilon / 2.0));
}

// n = S((1−B)(G+γU)Δf + B(G+γ+(1−γ)U)Δf)
inline double staircase_value(const StaircaseDraw& d, double delta_f) {
  const double g = static_cast<double>(d.g);
  const double low = (g + d.gamma * d.u) * delta_f;
  const double high = (g + d.gamma + (1.0 - d.gamma) * d.u) * delta_f;
  return d.s_sign * ((1 - d.b_bit) * low + d.b_bit * high);
}

inline StaircaseDraw staircase_draw(const DpConfig& dp, std::uint64_t index) {
  if (!(dp.epsilon > 0.0)) {
    throw ParameterError("staircase: epsilon must be > 0");
  }
  if (!(dp.delta_f > 0.0)) {
    throw ParameterError("staircase: delta_f must be > 0");
  }
  IndexedUniforms u(dp.seed, index);
  StaircaseDraw d;
  d.gamma = staircase_gamma(dp.epsilon);
  d.s_sign = u.next() < 0.5 ? -1 : 1;
  // Pr(G = i) = (1 − b) b^i with b = e^{−ε}; ln b = −ε.
  d.g = static_cast<std::uint64_t>(
      std::floor(std::log(u.next_open_low()) / -dp.epsilon));
  d.u = u.next();
  // γ / (γ + (1 − γ) b) with b = e^{−ε}; (1 − γ)/γ = e^{ε/2} reduces it to
  // 1 / (1 + e^{−ε/2}), which stays finite for large ε.
  const double p_zero = 1.0 / (1.0 + std::exp(-dp.epsilon / 2.0));
  d.b_bit = u.next() < p_zero ? 0 : 1;
  return d;
}

inline NoiseSample staircase_sample(const DpConfig& dp, std::uint64_t index) {
  return {staircase_value(staircase_draw(dp, index), dp.delta_f),
          Mechanism::kStaircase, index};
}

inline NoiseSample sample_noise(const DpConfig& dp, std::uint64_t index) {
  switch (dp.mechanism) {
    case Mechanism::kLaplace:
      return laplace_sample(dp, index);
    case Mechanism::kStaircase:
      return staircase_sample(dp, index);
    case Mechanism::kNone:
      break;
  }
  return {0.0, Mechanism::kNone, index};
}

struct InjectOptions {
  // Clamp noisy readings at zero. Off by default: clamping biases the
  // differenced readings the inference consumes.
  bool clamp_nonnegative = false;
};

// Returns y_t + n_t with one independent draw per index. The draws are also
// written to `noise_out` when given.
inline MeterSeries inject_noise(const MeterSeries& series, const DpConfig& dp,
                                InjectOptions options = {},
                                std::vector<double>* noise_out = nullptr) {
  dp.validate();
  if (noise_out) noise_out->assign(series.size(), 0.0);
  if (dp.mechanism == Mechanism::kNone) return series;
  std::vector<double> noisy(series.readings().begin(),
                            series.readings().end());
  for (std::size_t t = 0; t < noisy.size(); ++t) {
    const double n = sample_noise(dp, t).value;
    if (noise_out) (*noise_out)[t] = n;
    noisy[t] += n;
    if (options.clamp_nonnegative && noisy[t] < 0.0) noisy[t] = 0.0;
  }
  return MeterSeries(std::move(noisy));
}

}  // namespace nilmdp

#endif  // NILMDP_DP_HPP_
