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

// Per-appliance traces: CSV ingestion, binarization, mean-power estimation,
// aggregation into meter readings, and synthetic fleets with a target
// switching sparsity.
//
// CSV conventions: one header line, comma separated, '.' decimal separator,
// LF line endings. Appliance traces are `t,<name_1>,...,<name_N>` in watts;
// state files share that layout with 0/1 entries; meter files are
// `t,power`. Resampling to a uniform slot grid is the caller's job.

#ifndef NILMDP_DATA_IO_HPP_
#define NILMDP_DATA_IO_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "nilmdp/core.hpp"
#include "nilmdp/random.hpp"

namespace nilmdp {

// Shortest decimal that round-trips; always carries a '.' or exponent.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

// Samples for slots 0..T, one row per slot.
struct ApplianceTrace {
  std::vector<std::int64_t> timestamps;
  std::vector<std::vector<double>> samples;  // [slot][appliance]
  std::vector<std::string> names;

  std::size_t slots() const { return samples.size(); }
  std::size_t appliances() const { return names.size(); }

  void validate() const {
    detail::require_same_length(timestamps.size(), samples.size(),
                                "ApplianceTrace timestamps");
    for (std::size_t t = 0; t < samples.size(); ++t) {
      detail::require_same_length(samples[t].size(), names.size(),
                                  "ApplianceTrace row");
      for (double v : samples[t]) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw DataError("ApplianceTrace: negative or non-finite sample at slot " +
                          std::to_string(t));
        }
      }
    }
  }
};

struct SynthConfig {
  std::size_t n_appliances = 0;
  std::size_t horizon = 0;  // transitions; the trace has horizon + 1 slots
  std::vector<double> powers;
  double target_sparsity = 0.9;
  double consumption_jitter = 0.0;  // relative std of on-consumption
  std::optional<std::vector<double>> initial_states;
  std::uint64_t seed = 0;

  void validate() const {
    if (powers.size() != n_appliances || n_appliances == 0) {
      throw ParameterError("SynthConfig: powers must list n_appliances > 0 values");
    }
    if (!(target_sparsity >= 0.0 && target_sparsity <= 1.0)) {
      throw ParameterError("SynthConfig: target_sparsity must lie in [0,1]");
    }
    if (!(consumption_jitter >= 0.0)) {
      throw ParameterError("SynthConfig: consumption_jitter must be >= 0");
    }
    if (initial_states) {
      detail::require_same_length(initial_states->size(), n_appliances,
                                  "SynthConfig initial_states");
      for (double v : *initial_states) {
        if (v != 0.0 && v != 1.0) {
          throw ParameterError("SynthConfig: initial_states must be 0/1");
        }
      }
    }
  }
};

// state = 1 iff sample > threshold. Returns one column per slot.
inline StateMatrix binarize(const ApplianceTrace& trace,
                            std::span<const double> thresholds) {
  detail::require_same_length(thresholds.size(), trace.appliances(),
                              "binarize thresholds");
  for (double th : thresholds) {
    if (!(th >= 0.0)) throw ParameterError("binarize: thresholds must be >= 0");
  }
  std::vector<StateVector> cols;
  cols.reserve(trace.slots());
  for (const auto& row : trace.samples) {
    detail::require_same_length(row.size(), thresholds.size(), "binarize row");
    std::vector<double> x(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      x[i] = row[i] > thresholds[i] ? 1.0 : 0.0;
    }
    cols.emplace_back(std::move(x));
  }
  return StateMatrix(std::move(cols), true);
}

// 5% of each appliance's largest observed sample.
inline std::vector<double> default_thresholds(const ApplianceTrace& trace,
                                              double fraction = 0.05) {
  std::vector<double> th(trace.appliances(), 0.0);
  for (const auto& row : trace.samples) {
    for (std::size_t i = 0; i < row.size(); ++i) th[i] = std::max(th[i], row[i]);
  }
  for (double& v : th) v *= fraction;
  return th;
}

// Mean of each appliance's samples over its on-slots.
inline AppliancePowerVector estimate_powers(const ApplianceTrace& trace,
                                            const StateMatrix& states) {
  detail::require_same_length(states.horizon(), trace.slots(),
                              "estimate_powers slots");
  const std::size_t n = trace.appliances();
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t t = 0; t < trace.slots(); ++t) {
    detail::require_same_length(states[t].size(), n, "estimate_powers row");
    for (std::size_t i = 0; i < n; ++i) {
      if (states.at(t, i) == 1.0) {
        sum[i] += trace.samples[t][i];
        ++count[i];
      }
    }
  }
  std::vector<double> powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] == 0) {
      throw EstimationError("estimate_powers: appliance '" + trace.names[i] +
                            "' is never on");
    }
    powers[i] = sum[i] / static_cast<double>(count[i]);
  }
  return AppliancePowerVector(std::move(powers), trace.names);
}

// y_t = sum of on-appliance samples in slot t.
inline MeterSeries aggregate(const ApplianceTrace& trace,
                             const StateMatrix& states) {
  detail::require_same_length(states.horizon(), trace.slots(),
                              "aggregate slots");
  std::vector<double> y(trace.slots(), 0.0);
  for (std::size_t t = 0; t < trace.slots(); ++t) {
    detail::require_same_length(states[t].size(), trace.appliances(),
                                "aggregate row");
    for (std::size_t i = 0; i < trace.appliances(); ++i) {
      if (states.at(t, i) == 1.0) y[t] += trace.samples[t][i];
    }
  }
  return MeterSeries(std::move(y));
}

struct SynthResult {
  StateMatrix states;  // slots 0..T, ground truth
  ApplianceTrace trace;
  MeterSeries meter;
};

// Every state flips independently per step with probability 1 − s. On-slot
// consumption is P_i (1 + jitter · N(0,1)), floored at 0.
inline SynthResult synthesize(const SynthConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = cfg.n_appliances;
  const std::size_t slots = cfg.horizon + 1;
  const double flip = 1.0 - cfg.target_sparsity;

  std::vector<double> x(n);
  if (cfg.initial_states) {
    x = *cfg.initial_states;
  } else {
    for (double& v : x) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }

  ApplianceTrace trace;
  trace.names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    trace.names.push_back("app_" + std::to_string(i + 1));
  }
  std::vector<StateVector> cols;
  cols.reserve(slots);
  for (std::size_t t = 0; t < slots; ++t) {
    if (t > 0) {
      for (double& v : x) {
        if (rng.bernoulli(flip)) v = 1.0 - v;
      }
    }
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double z = cfg.powers[i];
      if (cfg.consumption_jitter > 0.0) {
        z = std::max(0.0, cfg.powers[i] *
                              (1.0 + cfg.consumption_jitter * rng.normal()));
      }
      if (x[i] == 1.0) row[i] = z;
    }
    trace.timestamps.push_back(static_cast<std::int64_t>(t));
    trace.samples.push_back(std::move(row));
    cols.emplace_back(x);
  }
  StateMatrix states(std::move(cols), true);
  MeterSeries meter = aggregate(trace, states);
  return {std::move(states), std::move(trace), std::move(meter)};
}

// 1 − Σ_t ||X_{t+1} − X_t||_0 / (N (T − 1)) over T columns.
inline double sparsity(const StateMatrix& states) {
  const std::size_t t_cols = states.horizon();
  if (t_cols < 2) {
    throw InsufficientDataError("sparsity: need at least two slots");
  }
  const std::size_t n = states.appliances();
  std::size_t flips = 0;
  for (std::size_t t = 0; t + 1 < t_cols; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (states.at(t + 1, i) != states.at(t, i)) ++flips;
    }
  }
  return 1.0 - static_cast<double>(flips) /
                   static_cast<double>(n * (t_cols - 1));
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos
                                         ? std::string_view::npos
                                         : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double parse_number(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError("line " + std::to_string(line_no) + ": not a number: '" +
                    std::string(field) + "'");
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_numeric_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_commas(line);
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(trim(f));
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_number(f, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw DataError("CSV: missing header");
  return table;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

}  // namespace detail

inline ApplianceTrace read_trace_csv(std::istream& in) {
  auto table = detail::read_numeric_csv(in);
  if (table.header.size() < 2 || table.header.front() != "t") {
    throw DataError("appliance CSV: header must be t,<name_1>,...");
  }
  ApplianceTrace trace;
  trace.names.assign(table.header.begin() + 1, table.header.end());
  for (auto& row : table.rows) {
    trace.timestamps.push_back(static_cast<std::int64_t>(row.front()));
    trace.samples.emplace_back(row.begin() + 1, row.end());
  }
  trace.validate();
  return trace;
}

inline ApplianceTrace read_trace_csv(const std::string& path) {
  auto in = detail::open_in(path);
  return read_trace_csv(in);
}

inline void write_trace_csv(std::ostream& out, const ApplianceTrace& trace) {
  out << "t";
  for (const auto& n : trace.names) out << ',' << n;
  out << '\n';
  for (std::size_t t = 0; t < trace.slots(); ++t) {
    out << trace.timestamps[t];
    for (double v : trace.samples[t]) out << ',' << format_double(v);
    out << '\n';
  }
}

// `names` labels the columns; app_1..app_N when empty.
inline void write_states_csv(std::ostream& out, const StateMatrix& states,
                             std::vector<std::string> names = {},
                             std::int64_t first_slot = 0) {
  if (names.empty()) {
    for (std::size_t i = 0; i < states.appliances(); ++i) {
      names.push_back("app_" + std::to_string(i + 1));
    }
  }
  detail::require_same_length(names.size(), states.appliances(),
                              "write_states_csv names");
  out << "t";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t t = 0; t < states.horizon(); ++t) {
    out << first_slot + static_cast<std::int64_t>(t);
    for (std::size_t i = 0; i < states.appliances(); ++i) {
      out << ',' << (states.at(t, i) == 1.0 ? '1' : '0');
    }
    out << '\n';
  }
}

inline StateMatrix read_states_csv(std::istream& in,
                                   std::vector<std::string>* names = nullptr) {
  auto table = detail::read_numeric_csv(in);
  if (table.header.size() < 2 || table.header.front() != "t") {
    throw DataError("states CSV: header must be t,<name_1>,...");
  }
  if (names) names->assign(table.header.begin() + 1, table.header.end());
  std::vector<StateVector> cols;
  cols.reserve(table.rows.size());
  for (auto& row : table.rows) {
    std::vector<double> x(row.begin() + 1, row.end());
    for (double v : x) {
      if (v != 0.0 && v != 1.0) throw DataError("states CSV: entries must be 0/1");
    }
    cols.emplace_back(std::move(x));
  }
  return StateMatrix(std::move(cols), true);
}

inline StateMatrix read_states_csv(const std::string& path,
                                   std::vector<std::string>* names = nullptr) {
  auto in = detail::open_in(path);
  return read_states_csv(in, names);
}

inline void write_meter_csv(std::ostream& out, const MeterSeries& meter) {
  out << "t,power\n";
  for (std::size_t t = 0; t < meter.size(); ++t) {
    out << t << ',' << format_double(meter[t]) << '\n';
  }
}

inline MeterSeries read_meter_csv(std::istream& in) {
  auto table = detail::read_numeric_csv(in);
  if (table.header.size() != 2 || table.header[0] != "t" ||
      table.header[1] != "power") {
    throw DataError("meter CSV: header must be t,power");
  }
  std::vector<double> y;
  y.reserve(table.rows.size());
  for (auto& row : table.rows) y.push_back(row[1]);
  return MeterSeries(std::move(y));
}

inline MeterSeries read_meter_csv(const std::string& path) {
  auto in = detail::open_in(path);
  return read_meter_csv(in);
}

}  // namespace nilmdp

#endif  // NILMDP_DATA_IO_HPP_
