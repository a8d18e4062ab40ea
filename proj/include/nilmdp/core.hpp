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

// Shared domain types for disaggregation under injected noise. Every type is
// immutable after construction and validates its invariants in the
// constructor.

#ifndef NILMDP_CORE_HPP_
#define NILMDP_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilmdp {

// Error taxonomy. Every failure raised by the library derives from Error so
// callers that only care about "data problem vs. bug" can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};
class ParameterError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class InfeasibleError : public Error {
 public:
  using Error::Error;
};
class EmptyInputError : public Error {
 public:
  using Error::Error;
};
class BoundsError : public Error {
 public:
  using Error::Error;
};
class EstimationError : public Error {
 public:
  using Error::Error;
};
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};
class DataError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b,
                                const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

inline bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

inline void require_unit_entries(std::span<const double> values,
                                 const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!in_unit_interval(values[i])) {
      throw DomainError(std::string(what) + ": entry " + std::to_string(i) +
                        " = " + std::to_string(values[i]) +
                        " outside [0,1]");
    }
  }
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

// Mean on-power of every appliance, in watts, kept in user order.
class AppliancePowerVector {
 public:
  explicit AppliancePowerVector(std::vector<double> powers,
                                std::vector<std::string> names = {})
      : powers_(std::move(powers)), names_(std::move(names)) {
    if (powers_.empty()) {
      throw ParameterError("AppliancePowerVector: at least one appliance");
    }
    for (std::size_t i = 0; i < powers_.size(); ++i) {
      if (!(powers_[i] > 0.0) || !std::isfinite(powers_[i])) {
        throw ParameterError("AppliancePowerVector: power " +
                             std::to_string(i) + " must be finite and > 0");
      }
    }
    if (names_.empty()) {
      names_.reserve(powers_.size());
      for (std::size_t i = 0; i < powers_.size(); ++i) {
        names_.push_back("app_" + std::to_string(i + 1));
      }
    }
    detail::require_same_length(names_.size(), powers_.size(),
                                "AppliancePowerVector names");
    l2_norm_ = detail::l2_norm(powers_);
    ascending_.resize(powers_.size());
    std::iota(ascending_.begin(), ascending_.end(), std::size_t{0});
    // Stable so equal powers keep lowest-index-first order.
    std::stable_sort(ascending_.begin(), ascending_.end(),
                     [this](std::size_t a, std::size_t b) {
                       return powers_[a] < powers_[b];
                     });
    descending_.resize(powers_.size());
    std::iota(descending_.begin(), descending_.end(), std::size_t{0});
    std::stable_sort(descending_.begin(), descending_.end(),
                     [this](std::size_t a, std::size_t b) {
                       return powers_[a] > powers_[b];
                     });
  }

  std::size_t size() const { return powers_.size(); }
  double operator[](std::size_t i) const { return powers_[i]; }
  std::span<const double> powers() const { return powers_; }
  const std::vector<std::string>& names() const { return names_; }
  double l2_norm() const { return l2_norm_; }
  double total() const {
    return std::accumulate(powers_.begin(), powers_.end(), 0.0);
  }
  double max() const { return powers_[descending_.front()]; }
  double min() const { return powers_[ascending_.front()]; }

  // Index permutations; ties resolve to the lower original index first.
  const std::vector<std::size_t>& ascending_order() const {
    return ascending_;
  }
  const std::vector<std::size_t>& descending_order() const {
    return descending_;
  }

  std::vector<double> sorted_ascending() const {
    std::vector<double> out;
    out.reserve(powers_.size());
    for (std::size_t i : ascending_) out.push_back(powers_[i]);
    return out;
  }

  AppliancePowerVector subset(std::span<const std::size_t> indices) const {
    std::vector<double> p;
    std::vector<std::string> n;
    for (std::size_t i : indices) {
      if (i >= powers_.size()) {
        throw DimensionError("AppliancePowerVector::subset: index out of range");
      }
      p.push_back(powers_[i]);
      n.push_back(names_[i]);
    }
    return AppliancePowerVector(std::move(p), std::move(n));
  }

 private:
  std::vector<double> powers_;
  std::vector<std::string> names_;
  double l2_norm_ = 0.0;
  std::vector<std::size_t> ascending_;
  std::vector<std::size_t> descending_;
};

// Sequence of reals in [0,1]. Base for state and switch vectors.
template <typename Tag>
class UnitVector {
 public:
  UnitVector() = default;
  explicit UnitVector(std::vector<double> values) : values_(std::move(values)) {
    detail::require_unit_entries(values_, Tag::kName);
  }
  static UnitVector zeros(std::size_t n) {
    return UnitVector(std::vector<double>(n, 0.0));
  }
  static UnitVector ones(std::size_t n) {
    return UnitVector(std::vector<double>(n, 1.0));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  bool is_binary() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return v == 0.0 || v == 1.0; });
  }
  double l1() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
  }
  std::size_t support() const {
    return static_cast<std::size_t>(std::count_if(
        values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
  }
  double dot(const AppliancePowerVector& p) const {
    detail::require_same_length(values_.size(), p.size(), Tag::kName);
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * p[i];
    return s;
  }

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  std::vector<double> values_;
};

struct StateTag {
  static constexpr const char* kName = "StateVector";
};
struct SwitchTag {
  static constexpr const char* kName = "SwitchVector";
};

// Probabilistic on/off states of N appliances at one slot.
using StateVector = UnitVector<StateTag>;
// Per-appliance switch indicators (or switch probabilities) between slots.
using SwitchVector = UnitVector<SwitchTag>;

// T columns of N states each.
class StateMatrix {
 public:
  StateMatrix() = default;
  explicit StateMatrix(std::vector<StateVector> columns,
                       bool ground_truth = false)
      : columns_(std::move(columns)), ground_truth_(ground_truth) {
    for (const auto& c : columns_) {
      detail::require_same_length(c.size(), columns_.front().size(),
                                  "StateMatrix column");
      if (ground_truth_ && !c.is_binary()) {
        throw DomainError("StateMatrix: ground-truth columns must be binary");
      }
    }
  }

  std::size_t horizon() const { return columns_.size(); }
  std::size_t appliances() const {
    return columns_.empty() ? 0 : columns_.front().size();
  }
  const StateVector& operator[](std::size_t t) const { return columns_[t]; }
  const std::vector<StateVector>& columns() const { return columns_; }
  bool ground_truth() const { return ground_truth_; }
  double at(std::size_t t, std::size_t i) const { return columns_[t][i]; }

  // Rows restricted to the given appliance indices.
  StateMatrix select(std::span<const std::size_t> indices) const {
    std::vector<StateVector> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) {
      std::vector<double> v;
      v.reserve(indices.size());
      for (std::size_t i : indices) v.push_back(c[i]);
      cols.emplace_back(std::move(v));
    }
    return StateMatrix(std::move(cols), ground_truth_);
  }

  // Columns [first, last).
  StateMatrix slice(std::size_t first, std::size_t last) const {
    return StateMatrix(
        std::vector<StateVector>(columns_.begin() + first,
                                 columns_.begin() + last),
        ground_truth_);
  }

 private:
  std::vector<StateVector> columns_;
  bool ground_truth_ = false;
};

struct ReadingBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Aggregate readings y_0..y_T in watts.
class MeterSeries {
 public:
  MeterSeries() = default;
  explicit MeterSeries(std::vector<double> readings,
                       std::optional<std::vector<ReadingBounds>> bounds =
                           std::nullopt)
      : readings_(std::move(readings)), bounds_(std::move(bounds)) {
    for (double r : readings_) {
      if (!std::isfinite(r)) throw DomainError("MeterSeries: non-finite reading");
    }
    if (bounds_) {
      detail::require_same_length(bounds_->size(), readings_.size(),
                                  "MeterSeries bounds");
      for (std::size_t t = 0; t < readings_.size(); ++t) {
        const auto& b = (*bounds_)[t];
        if (b.lower > readings_[t] || readings_[t] > b.upper) {
          throw BoundsError("MeterSeries: reading " + std::to_string(t) +
                            " outside its bounds");
        }
      }
    }
  }

  std::size_t size() const { return readings_.size(); }
  // Number of transitions T; a series of T+1 readings has horizon T.
  std::size_t horizon() const {
    return readings_.empty() ? 0 : readings_.size() - 1;
  }
  double operator[](std::size_t t) const { return readings_[t]; }
  std::span<const double> readings() const { return readings_; }
  const std::optional<std::vector<ReadingBounds>>& bounds() const {
    return bounds_;
  }

 private:
  std::vector<double> readings_;
  std::optional<std::vector<ReadingBounds>> bounds_;
};

enum class Mechanism { kLaplace, kStaircase, kNone };

inline const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kLaplace:
      return "laplace";
    case Mechanism::kStaircase:
      return "staircase";
    case Mechanism::kNone:
      return "none";
  }
  return "?";
}

inline Mechanism parse_mechanism(const std::string& s) {
  if (s == "laplace") return Mechanism::kLaplace;
  if (s == "staircase") return Mechanism::kStaircase;
  if (s == "none") return Mechanism::kNone;
  throw ParameterError("unknown mechanism '" + s + "'");
}

struct DpConfig {
  double epsilon = 1.0;
  double delta_f = 0.0;  // watts
  Mechanism mechanism = Mechanism::kLaplace;
  std::uint64_t seed = 0;

  void validate() const {
    if (mechanism != Mechanism::kNone &&
        !(epsilon > 0.0 && std::isfinite(epsilon))) {
      throw ParameterError("DpConfig: epsilon must be > 0");
    }
    if (!(delta_f >= 0.0) || !std::isfinite(delta_f)) {
      throw ParameterError("DpConfig: delta_f must be >= 0");
    }
  }
};

struct SensitivityParams {
  double delta = 1.0;       // fluctuation budget, watts
  std::size_t u_max = 1;    // bound on simultaneous switches per slot

  void validate() const {
    if (!(delta > 0.0)) throw ParameterError("SensitivityParams: delta > 0");
    if (u_max < 1) throw ParameterError("SensitivityParams: u_max >= 1");
  }
  // Noise scale used by the mechanisms.
  double delta_f() const { return delta / 2.0; }
};

// Elementwise product of two equal-length sequences.
inline std::vector<double> hadamard(std::span<const double> a,
                                    std::span<const double> b) {
  detail::require_same_length(a.size(), b.size(), "hadamard");
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * b[i];
  return c;
}

// X ⊙ (1 − Δ) + (1 − X) ⊙ Δ. XOR on binary inputs.
inline StateVector apply_switch(const StateVector& x_prev,
                                const SwitchVector& delta) {
  detail::require_same_length(x_prev.size(), delta.size(), "apply_switch");
  std::vector<double> out(x_prev.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = x_prev[i];
    const double d = delta[i];
    // Bilinear in (x, d) on the unit square; clamp only absorbs rounding.
    out[i] = std::clamp(x * (1.0 - d) + (1.0 - x) * d, 0.0, 1.0);
  }
  return StateVector(std::move(out));
}

// Ground-truth switch vector |X_t − X_{t−1}| between two binary columns.
inline SwitchVector switch_between(const StateVector& prev,
                                   const StateVector& curr) {
  detail::require_same_length(prev.size(), curr.size(), "switch_between");
  std::vector<double> d(prev.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(curr[i] - prev[i]);
  return SwitchVector(std::move(d));
}

}  // namespace nilmdp

#endif  // NILMDP_CORE_HPP_
