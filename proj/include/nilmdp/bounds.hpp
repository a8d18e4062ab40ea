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

// Closed-form accuracy bounds for one-shot, multi-shot and hierarchical
// inference under Laplace noise.
//
// Every evaluator returns the raw formula value and its clamp to [0,1]; the
// formulas leave [0,1] in regimes that are never plotted, and tests assert on
// the raw values.

#ifndef NILMDP_BOUNDS_HPP_
#define NILMDP_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nilmdp/core.hpp"
#include "nilmdp/hierarchy.hpp"

namespace nilmdp {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double clamp01(double raw) {
  if (std::isnan(raw)) return kNaN;
  return std::clamp(raw, 0.0, 1.0);
}

struct BoundReport {
  double lower = kNaN;
  double upper = kNaN;
  double clamped_lower = kNaN;
  double clamped_upper = kNaN;
  std::map<std::string, double> intermediates;
  std::vector<std::string> undefined;  // names whose value is not finite

  void set_lower(double raw) {
    lower = raw;
    clamped_lower = clamp01(raw);
  }
  void set_upper(double raw) {
    upper = raw;
    clamped_upper = clamp01(raw);
  }
  void note(const std::string& name, double value) {
    intermediates[name] = value;
    if (!std::isfinite(value)) undefined.push_back(name);
  }
  double get(const std::string& name) const {
    auto it = intermediates.find(name);
    return it == intermediates.end() ? kNaN : it->second;
  }
};

enum class RipInterpretation { kSubsetNorm, kSingularValue };

inline RipInterpretation parse_rip_interpretation(const std::string& s) {
  if (s == "subset-norm") return RipInterpretation::kSubsetNorm;
  if (s == "singular-value") return RipInterpretation::kSingularValue;
  throw ParameterError("unknown interpretation '" + s + "'");
}

namespace detail {

// Deviation of one subset of the unit-normalized power row, given its
// squared norm and size.
inline double rip_deviation(double sq_norm, std::size_t size,
                            RipInterpretation interp) {
  if (interp == RipInterpretation::kSubsetNorm) return std::abs(sq_norm - 1.0);
  // A 1 x k row has one nonzero singular value; for k >= 2 the smallest is 0.
  const double sigma_min_sq = size == 1 ? sq_norm : 0.0;
  return std::max(1.0 - sigma_min_sq, sq_norm - 1.0);
}

// Error-free transformations: a + b = s + e and a·b = p + e exactly.
inline std::pair<double, double> two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline std::pair<double, double> two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

// m − 2δ − N||P|| with m = N||P|| + 2δ carried as an unevaluated sum, so the
// result is the residual of double-double arithmetic rather than of doubles.
inline double m_residual(double n, double p_norm, double delta) {
  const auto [np_hi, np_lo] = two_prod(n, p_norm);
  const auto [s, e] = two_sum(np_hi, 2.0 * delta);
  const auto [m_hi, m_lo] = two_sum(s, e + np_lo);
  const auto [a, ea] = two_sum(m_hi, -2.0 * delta);
  const auto [b, eb] = two_sum(a, -np_hi);
  return b + (ea + eb + m_lo - np_lo);
}

}  // namespace detail

// Smallest δ_S with (1 − δ_S) ≤ ||P̂_U||² ≤ (1 + δ_S) over |U| ≤ S, P̂ the
// unit-normalized power row. ||P̂_U||² grows with U under inclusion, so the
// extremes are attained on the smallest-power and largest-power prefixes.
inline double rip_constant(const AppliancePowerVector& p, std::size_t s,
                           RipInterpretation interp =
                               RipInterpretation::kSubsetNorm) {
  const std::size_t n = p.size();
  if (s < 1 || s > n) {
    throw ParameterError("rip_constant: S must lie in [1, N]");
  }
  const double norm_sq = p.l2_norm() * p.l2_norm();
  double worst = 0.0;
  double small = 0.0;
  double large = 0.0;
  for (std::size_t k = 1; k <= s; ++k) {
    const double a = p[p.ascending_order()[k - 1]];
    const double b = p[p.descending_order()[k - 1]];
    small += a * a / norm_sq;
    large += b * b / norm_sq;
    worst = std::max({worst, detail::rip_deviation(small, k, interp),
                      detail::rip_deviation(large, k, interp)});
  }
  return worst;
}

// 4 / ((sqrt(3(1 − δ4)) − sqrt(1 + δ3)) ||P||); nullopt where undefined.
inline std::optional<double> c_from_constants(double delta_3u,
                                              double delta_4u,
                                              double p_norm) {
  if (delta_4u >= 1.0 || !(p_norm > 0.0)) return std::nullopt;
  const double gap =
      std::sqrt(3.0 * (1.0 - delta_4u)) - std::sqrt(1.0 + delta_3u);
  if (!(gap > 0.0)) return std::nullopt;
  return 4.0 / (gap * p_norm);
}

struct CValue {
  std::optional<double> value;     // what downstream bounds use
  std::optional<double> computed;  // formula result, when defined
  bool from_override = false;
  double delta_3u = kNaN;
  double delta_4u = kNaN;

  bool defined() const { return value.has_value(); }
};

// S = 3U and 4U are capped at N.
inline CValue c_of_p(const AppliancePowerVector& p, std::size_t u_max,
                     RipInterpretation interp = RipInterpretation::kSubsetNorm,
                     std::optional<double> override_value = std::nullopt) {
  if (u_max < 1) throw ParameterError("c_of_p: u_max must be >= 1");
  CValue c;
  c.delta_3u = rip_constant(p, std::min(3 * u_max, p.size()), interp);
  c.delta_4u = rip_constant(p, std::min(4 * u_max, p.size()), interp);
  c.computed = c_from_constants(c.delta_3u, c.delta_4u, p.l2_norm());
  if (override_value) {
    c.value = override_value;
    c.from_override = true;
  } else {
    c.value = c.computed;
  }
  return c;
}

// E[α] ≥ 1 − (4Cδε + 8δε + 3δ)/(4εN) + (A₁ε + B₁)/(4εN) e^{−2εb/δ}
//   b  = 2(N − (2 + C)δ)
//   A₁ = 2N − 4δ − 2Cδ,  B₁ = 3δ
inline BoundReport lower_bound_one_shot(double delta, double epsilon,
                                        double n, double c) {
  if (!(epsilon > 0.0) || !(delta > 0.0) || !(n >= 1.0)) {
    throw ParameterError("lower_bound_one_shot: need epsilon > 0, delta > 0, N >= 1");
  }
  BoundReport r;
  const double b = 2.0 * (n - (2.0 + c) * delta);
  const double a1 = 2.0 * n - 4.0 * delta - 2.0 * c * delta;
  const double b1 = 3.0 * delta;
  const double main =
      (4.0 * c * delta * epsilon + 8.0 * delta * epsilon + 3.0 * delta) /
      (4.0 * epsilon * n);
  const double decay = std::exp(-2.0 * epsilon * b / delta);
  const double tail = (a1 * epsilon + b1) / (4.0 * epsilon * n) * decay;
  r.note("C(P)", c);
  r.note("b", b);
  r.note("A1", a1);
  r.note("B1", b1);
  r.note("main_term", main);
  r.note("exp_term", tail);
  r.set_lower(1.0 - main + tail);
  return r;
}

// E[α] ≤ 1 + (A₂ε² + B₂ε + C₂)/(8δεN||P||) e^{−2εm/δ}
//          − (16δε² + 4δε + 3δ)/(16εN||P||) e^{−ε}
//   m  = N||P|| + 2δ
//   A₂ = 4m² − 8δm − 4mN||P||,  B₂ = 6δm − 8δ² − 4δN||P||,  C₂ = 3δ²
inline BoundReport upper_bound_one_shot(double delta, double epsilon, double n,
                                        double p_norm) {
  if (!(epsilon > 0.0) || !(delta > 0.0) || !(n >= 1.0) || !(p_norm > 0.0)) {
    throw ParameterError(
        "upper_bound_one_shot: need epsilon > 0, delta > 0, N >= 1, ||P|| > 0");
  }
  BoundReport r;
  const double np = n * p_norm;
  const double m = np + 2.0 * delta;
  // 4m² − 8δm − 4mN||P|| = 4m(m − 2δ − N||P||).
  const double a2 = 4.0 * m * detail::m_residual(n, p_norm, delta);
  const double b2 = 6.0 * delta * m - 8.0 * delta * delta - 4.0 * delta * np;
  const double c2 = 3.0 * delta * delta;
  const double first = (a2 * epsilon * epsilon + b2 * epsilon + c2) /
                       (8.0 * delta * epsilon * np) *
                       std::exp(-2.0 * epsilon * m / delta);
  const double second =
      (16.0 * delta * epsilon * epsilon + 4.0 * delta * epsilon + 3.0 * delta) /
      (16.0 * epsilon * np) * std::exp(-epsilon);
  r.note("m", m);
  r.note("A2", a2);
  r.note("B2", b2);
  r.note("C2", c2);
  r.note("first_term", first);
  r.note("second_term", second);
  r.set_upper(1.0 + first - second);
  return r;
}

enum class BoundVariant { kAsStated, kCorrected };

inline BoundVariant parse_bound_variant(const std::string& s) {
  if (s == "as-stated") return BoundVariant::kAsStated;
  if (s == "corrected") return BoundVariant::kCorrected;
  throw ParameterError("unknown bound variant '" + s + "'");
}

// 1 − (T − 1) G / 2 ≤ E[α_m] ≤ 1 − (1 − B)/T with b, B the raw one-shot
// bounds. G = 1 − bN as stated, or (1 − b)N, which is what α ≥ b implies
// for E||Δ* − Δ⁰||.
inline BoundReport multi_shot_bounds(double delta, double epsilon, double n,
                                     std::size_t horizon, double c,
                                     double p_norm,
                                     BoundVariant variant =
                                         BoundVariant::kAsStated) {
  if (horizon < 1) throw ParameterError("multi_shot_bounds: T must be >= 1");
  const double t = static_cast<double>(horizon);
  const double b = lower_bound_one_shot(delta, epsilon, n, c).lower;
  const double big_b = upper_bound_one_shot(delta, epsilon, n, p_norm).upper;
  const double g =
      variant == BoundVariant::kAsStated ? 1.0 - b * n : (1.0 - b) * n;
  BoundReport r;
  r.note("b(delta,eps)", b);
  r.note("B(delta,eps)", big_b);
  r.note("G", g);
  // With T = 1 the G term vanishes even when G itself is infinite.
  const double b_m = horizon == 1 ? 1.0 : 1.0 - (t - 1.0) * g / 2.0;
  const double b_big_m = 1.0 - (1.0 - big_b) / t;
  r.note("b_m", b_m);
  r.note("B_M", b_big_m);
  r.set_lower(b_m);
  r.set_upper(b_big_m);
  return r;
}

// Per-hierarchy bounds, decoded largest-first:
//   m_i = b_m(δ + 2δ'_i/(2 + C_i), ε),  M_i = B_M(δ + δ'_i, ε)
//   δ'_i = P^i_U/2 + Σ_{k<i} N_k T (1 − m_k) ||P_k||
// with m_k taken clamped to [0,1]. Overall bounds are N_i-weighted means.
// `c_per_hierarchy` entries override C(P_i); missing entries fall back to the
// computed value, and an undefined C leaves the report undefined.
inline BoundReport hierarchical_bounds(
    const std::vector<Hierarchy>& hierarchies, double delta, double epsilon,
    std::size_t horizon, std::size_t u_max,
    const std::vector<std::optional<double>>& c_per_hierarchy,
    BoundVariant variant = BoundVariant::kAsStated,
    RipInterpretation interp = RipInterpretation::kSubsetNorm) {
  if (hierarchies.empty()) {
    throw EmptyInputError("hierarchical_bounds: no hierarchies");
  }
  BoundReport r;
  const double t = static_cast<double>(horizon);
  double carried = 0.0;  // Σ_{k<i} N_k T (1 − m_k) ||P_k||
  double lower_mix = 0.0;
  double upper_mix = 0.0;
  double total_n = 0.0;
  bool defined = true;
  for (std::size_t i = 0; i < hierarchies.size(); ++i) {
    const Hierarchy& h = hierarchies[i];
    const std::string tag = "[" + std::to_string(i + 1) + "]";
    std::optional<double> override_c;
    if (i < c_per_hierarchy.size()) override_c = c_per_hierarchy[i];
    const CValue c = c_of_p(h.power_subvector, u_max, interp, override_c);
    const double n_i = static_cast<double>(h.n_i);
    const double p_norm = h.power_subvector.l2_norm();
    const double delta_prime = h.p_u / 2.0 + carried;
    r.note("delta_prime" + tag, delta_prime);
    if (!c.defined()) {
      r.note("C(P)" + tag, kNaN);
      defined = false;
      break;
    }
    r.note("C(P)" + tag, *c.value);
    const double m_i =
        multi_shot_bounds(delta + 2.0 * delta_prime / (2.0 + *c.value), epsilon,
                          n_i, horizon, *c.value, p_norm, variant)
            .lower;
    const double big_m_i =
        multi_shot_bounds(delta + delta_prime, epsilon, n_i, horizon, *c.value,
                          p_norm, variant)
            .upper;
    r.note("m" + tag, m_i);
    r.note("M" + tag, big_m_i);
    carried += n_i * t * (1.0 - clamp01(m_i)) * p_norm;
    lower_mix += m_i * n_i;
    upper_mix += big_m_i * n_i;
    total_n += n_i;
  }
  if (!defined) return r;
  r.set_lower(lower_mix / total_n);
  r.set_upper(upper_mix / total_n);
  return r;
}

}  // namespace nilmdp

#endif  // NILMDP_BOUNDS_HPP_
