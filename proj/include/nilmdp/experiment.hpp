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

// Monte Carlo privacy sweeps: for every epsilon on a grid, run independent
// noisy inference trials, aggregate accuracy, and attach the matching
// closed-form bounds.
//
// Trial (e, k) draws its data from hash64(seed, {1, k}), its noise from
// hash64(seed, {2, e, k}) and its rounding stream from hash64(seed, {3, e, k}).
// Data therefore does not depend on epsilon or the mechanism, and results are
// identical whatever the worker count.

#ifndef NILMDP_EXPERIMENT_HPP_
#define NILMDP_EXPERIMENT_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nilmdp/bounds.hpp"
#include "nilmdp/core.hpp"
#include "nilmdp/data_io.hpp"
#include "nilmdp/dp.hpp"
#include "nilmdp/hierarchy.hpp"
#include "nilmdp/inference.hpp"
#include "nilmdp/random.hpp"

namespace nilmdp {

enum class InferenceMode { kOneShot, kMultiShot, kHierarchical };

inline const char* to_string(InferenceMode m) {
  switch (m) {
    case InferenceMode::kOneShot:
      return "one-shot";
    case InferenceMode::kMultiShot:
      return "multi-shot";
    case InferenceMode::kHierarchical:
      return "hierarchical";
  }
  return "?";
}

inline InferenceMode parse_mode(const std::string& s) {
  if (s == "one-shot") return InferenceMode::kOneShot;
  if (s == "multi-shot") return InferenceMode::kMultiShot;
  if (s == "hierarchical") return InferenceMode::kHierarchical;
  throw ParameterError("unknown mode '" + s + "'");
}

enum class DataSource { kSynthetic, kCsv };

inline std::vector<double> log_spaced(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points == 0) {
    throw ParameterError("log_spaced: need 0 < lo <= hi and points >= 1");
  }
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) /
                            static_cast<double>(points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct SweepConfig {
  std::vector<double> epsilon_grid = log_spaced(1e-2, 1e2, 16);
  std::size_t trials = 200;
  InferenceMode mode = InferenceMode::kOneShot;
  Mechanism mechanism = Mechanism::kLaplace;
  double delta = 2.0;
  std::optional<std::size_t> u_max;  // estimated from ground truth if unset
  DataSource source = DataSource::kSynthetic;
  SynthConfig synth = default_synth();
  std::string csv_path;
  std::optional<std::vector<double>> thresholds;
  std::uint64_t seed = 1;
  std::optional<double> c_override;
  BoundVariant variant = BoundVariant::kAsStated;
  RipInterpretation interpretation = RipInterpretation::kSubsetNorm;
  std::optional<double> correction_tolerance;
  bool clamp_noise = false;
  std::size_t threads = 0;  // 0: hardware concurrency, capped by NILM_DP_THREADS

  static SynthConfig default_synth() {
    SynthConfig s;
    s.n_appliances = 8;
    s.horizon = 50;
    s.powers = {60, 65, 70, 75, 80, 85, 90, 95};
    s.target_sparsity = 0.95;
    return s;
  }

  void validate() const {
    if (epsilon_grid.empty()) throw ParameterError("sweep: empty epsilon grid");
    for (double e : epsilon_grid) {
      if (!(e > 0.0) || !std::isfinite(e)) {
        throw ParameterError("sweep: epsilon values must be finite and > 0");
      }
    }
    std::vector<double> sorted = epsilon_grid;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParameterError("sweep: duplicate epsilon values");
    }
    if (trials < 1) throw ParameterError("sweep: trials must be >= 1");
    if (!(delta > 0.0)) throw ParameterError("sweep: delta must be > 0");
    if (u_max && *u_max < 1) throw ParameterError("sweep: u_max must be >= 1");
    if (source == DataSource::kSynthetic) synth.validate();
    if (source == DataSource::kCsv && csv_path.empty()) {
      throw ParameterError("sweep: source = csv needs csv_path");
    }
  }
};

struct SweepRow {
  double epsilon = 0.0;
  double ln_inv_epsilon = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double clamped_lower = kNaN;
  double clamped_upper = kNaN;
  std::size_t trials = 0;
};

// ---------------------------------------------------------------------------
// Config files: one `key = value` per line, '#' starts a comment.

namespace detail {

inline std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  for (auto f : split_commas(v)) {
    if (trim(f).empty()) continue;
    out.push_back(parse_number(f, 0));
  }
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  try {
    return parse_number(v, 0);
  } catch (const DataError&) {
    throw ParameterError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

inline std::uint64_t parse_unsigned(const std::string& key,
                                    const std::string& v) {
  std::string_view s = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParameterError("config: '" + key + "' expects a non-negative integer, got '" +
                         v + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("config: '" + key + "' expects true/false");
}

}  // namespace detail

inline const std::vector<std::string>& sweep_config_keys() {
  static const std::vector<std::string> keys = {
      "epsilon_grid",       "epsilon_min",        "epsilon_max",
      "epsilon_points",     "trials",             "mode",
      "mechanism",          "delta",              "u_max",
      "source",             "n_appliances",       "horizon",
      "powers",             "target_sparsity",    "consumption_jitter",
      "initial_states",     "csv_path",           "thresholds",
      "seed",               "c_override",         "bound_variant",
      "rip_interpretation", "correction_tolerance", "clamp_noise",
      "threads"};
  return keys;
}

// Applies settings in a fixed key order so grid endpoints and point counts
// combine regardless of the order they were given.
inline void apply_settings(SweepConfig& cfg,
                           const std::map<std::string, std::string>& kv) {
  using namespace detail;
  for (const auto& [key, _] : kv) {
    const auto& keys = sweep_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ParameterError("config: unknown key '" + key + "'");
    }
  }
  auto get = [&](const char* k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("epsilon_grid")) cfg.epsilon_grid = parse_list(*v);
  if (get("epsilon_min") || get("epsilon_max") || get("epsilon_points")) {
    const double lo = get("epsilon_min") ? parse_real("epsilon_min", *get("epsilon_min")) : 1e-2;
    const double hi = get("epsilon_max") ? parse_real("epsilon_max", *get("epsilon_max")) : 1e2;
    const std::size_t pts =
        get("epsilon_points") ? parse_unsigned("epsilon_points", *get("epsilon_points")) : 16;
    cfg.epsilon_grid = log_spaced(lo, hi, pts);
  }
  if (auto v = get("trials")) cfg.trials = parse_unsigned("trials", *v);
  if (auto v = get("mode")) cfg.mode = parse_mode(*v);
  if (auto v = get("mechanism")) {
    cfg.mechanism = parse_mechanism(*v);
    if (cfg.mechanism == Mechanism::kNone) {
      throw ParameterError("config: sweep mechanism must be laplace or staircase");
    }
  }
  if (auto v = get("delta")) cfg.delta = parse_real("delta", *v);
  if (auto v = get("u_max")) cfg.u_max = parse_unsigned("u_max", *v);
  if (auto v = get("source")) {
    if (*v == "synthetic") {
      cfg.source = DataSource::kSynthetic;
    } else if (*v == "csv") {
      cfg.source = DataSource::kCsv;
    } else {
      throw ParameterError("config: source must be synthetic or csv");
    }
  }
  if (auto v = get("powers")) {
    cfg.synth.powers = parse_list(*v);
    cfg.synth.n_appliances = cfg.synth.powers.size();
  }
  if (auto v = get("n_appliances")) {
    cfg.synth.n_appliances = parse_unsigned("n_appliances", *v);
  }
  if (auto v = get("horizon")) cfg.synth.horizon = parse_unsigned("horizon", *v);
  if (auto v = get("target_sparsity")) {
    cfg.synth.target_sparsity = parse_real("target_sparsity", *v);
  }
  if (auto v = get("consumption_jitter")) {
    cfg.synth.consumption_jitter = parse_real("consumption_jitter", *v);
  }
  if (auto v = get("initial_states")) cfg.synth.initial_states = parse_list(*v);
  if (auto v = get("csv_path")) cfg.csv_path = *v;
  if (auto v = get("thresholds")) cfg.thresholds = parse_list(*v);
  if (auto v = get("seed")) cfg.seed = parse_unsigned("seed", *v);
  if (auto v = get("c_override")) {
    if (*v == "none" || v->empty()) {
      cfg.c_override.reset();
    } else {
      cfg.c_override = parse_real("c_override", *v);
    }
  }
  if (auto v = get("bound_variant")) cfg.variant = parse_bound_variant(*v);
  if (auto v = get("rip_interpretation")) {
    cfg.interpretation = parse_rip_interpretation(*v);
  }
  if (auto v = get("correction_tolerance")) {
    cfg.correction_tolerance = parse_real("correction_tolerance", *v);
  }
  if (auto v = get("clamp_noise")) cfg.clamp_noise = parse_bool("clamp_noise", *v);
  if (auto v = get("threads")) cfg.threads = parse_unsigned("threads", *v);
}

inline std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(line_no) +
                           ": expected key = value");
    }
    std::string key(detail::trim(body.substr(0, eq)));
    std::string value(detail::trim(body.substr(eq + 1)));
    if (key.empty()) {
      throw ParameterError("config line " + std::to_string(line_no) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

// ---------------------------------------------------------------------------
// Sweep

struct TrialData {
  StateMatrix truth;  // slots 0..T
  MeterSeries meter;
};

namespace detail {

inline std::size_t max_switches(const StateMatrix& truth) {
  std::size_t worst = 0;
  for (std::size_t t = 1; t < truth.horizon(); ++t) {
    worst = std::max(worst, switch_between(truth[t - 1], truth[t]).support());
  }
  return worst;
}

inline std::size_t worker_count(std::size_t requested, std::size_t tasks) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NILM_DP_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, tasks));
}

}  // namespace detail

// Accuracy of one noisy inference run against ground truth. One-shot mode
// averages the per-slot switch accuracy over the horizon; the other modes
// score the decoded state matrix.
inline double run_trial(InferenceMode mode, const TrialData& data,
                        const AppliancePowerVector& p,
                        const SensitivityParams& sens, const DpConfig& dp,
                        bool clamp_noise, std::optional<double> tolerance,
                        Rng& rng) {
  const MeterSeries noisy = inject_noise(data.meter, dp, {clamp_noise});
  const std::size_t horizon = noisy.horizon();
  if (horizon == 0) throw InsufficientDataError("trial: need at least two slots");
  const StateMatrix truth = data.truth.slice(1, data.truth.horizon());
  switch (mode) {
    case InferenceMode::kOneShot: {
      double acc = 0.0;
      for (std::size_t t = 1; t <= horizon; ++t) {
        OneShotResult r = one_shot_infer(p, noisy[t - 1], noisy[t], sens, rng, true);
        acc += accuracy_one_shot(
            r.delta_bar, switch_between(data.truth[t - 1], data.truth[t]));
      }
      return acc / static_cast<double>(horizon);
    }
    case InferenceMode::kMultiShot: {
      InferenceResult r =
          multi_shot_infer(data.truth[0], noisy, p, sens, rng, {tolerance});
      return accuracy_multi_shot(r.states, truth);
    }
    case InferenceMode::kHierarchical: {
      InferenceResult r =
          hierarchical_infer(data.truth[0], noisy, p, sens, rng, {tolerance});
      return accuracy_multi_shot(r.states, truth);
    }
  }
  return kNaN;
}

// Bounds matching the inference mode at one epsilon.
inline BoundReport sweep_bounds(const SweepConfig& cfg,
                                const AppliancePowerVector& p,
                                std::size_t u_max, std::size_t horizon,
                                double epsilon) {
  const double n = static_cast<double>(p.size());
  if (cfg.mode == InferenceMode::kHierarchical) {
    const auto hs = decompose(p, cfg.delta, u_max);
    std::vector<std::optional<double>> cs(hs.size(), cfg.c_override);
    return hierarchical_bounds(hs, cfg.delta, epsilon, horizon, u_max, cs,
                               cfg.variant, cfg.interpretation);
  }
  const CValue c = c_of_p(p, u_max, cfg.interpretation, cfg.c_override);
  BoundReport r;
  if (!c.defined()) {
    r.note("C(P)", kNaN);
    return r;
  }
  if (cfg.mode == InferenceMode::kMultiShot) {
    return multi_shot_bounds(cfg.delta, epsilon, n, horizon, *c.value,
                             p.l2_norm(), cfg.variant);
  }
  BoundReport lo = lower_bound_one_shot(cfg.delta, epsilon, n, *c.value);
  BoundReport hi = upper_bound_one_shot(cfg.delta, epsilon, n, p.l2_norm());
  lo.intermediates.insert(hi.intermediates.begin(), hi.intermediates.end());
  lo.undefined.insert(lo.undefined.end(), hi.undefined.begin(), hi.undefined.end());
  lo.set_upper(hi.upper);
  return lo;
}

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t n_eps = cfg.epsilon_grid.size();
  const std::size_t trials = cfg.trials;

  // CSV data is loaded once and shared by every trial.
  std::optional<TrialData> fixed;
  std::optional<AppliancePowerVector> powers;
  if (cfg.source == DataSource::kCsv) {
    ApplianceTrace trace = read_trace_csv(cfg.csv_path);
    const std::vector<double> th =
        cfg.thresholds ? *cfg.thresholds : default_thresholds(trace);
    StateMatrix states = binarize(trace, th);
    powers = estimate_powers(trace, states);
    MeterSeries meter = aggregate(trace, states);
    fixed = TrialData{std::move(states), std::move(meter)};
  } else {
    powers = AppliancePowerVector(cfg.synth.powers);
  }

  auto trial_data = [&](std::size_t k) -> TrialData {
    if (fixed) return *fixed;
    SynthConfig sc = cfg.synth;
    sc.seed = hash64(cfg.seed, {1, k});
    Rng rng(sc.seed);
    SynthResult s = synthesize(sc, rng);
    return {std::move(s.states), std::move(s.meter)};
  };

  const TrialData probe = trial_data(0);
  const std::size_t horizon = probe.meter.horizon();
  const std::size_t u_max =
      cfg.u_max ? *cfg.u_max : std::max<std::size_t>(1, detail::max_switches(probe.truth));
  const SensitivityParams sens{cfg.delta, u_max};

  std::vector<std::vector<double>> acc(n_eps, std::vector<double>(trials, 0.0));
  const std::size_t tasks = trials;
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::string error_context;

  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks) return;
      {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error) return;
      }
      std::size_t e = 0;
      try {
        const TrialData data = trial_data(k);
        for (e = 0; e < n_eps; ++e) {
          DpConfig dp{cfg.epsilon_grid[e], sens.delta_f(), cfg.mechanism,
                      hash64(cfg.seed, {2, e, k})};
          Rng rng(hash64(cfg.seed, {3, e, k}));
          acc[e][k] = run_trial(cfg.mode, data, *powers, sens, dp,
                                cfg.clamp_noise, cfg.correction_tolerance, rng);
        }
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) {
          first_error = std::current_exception();
          error_context = "epsilon=" + format_double(cfg.epsilon_grid[std::min(e, n_eps - 1)]) +
                          " trial=" + std::to_string(k) + ": " + ex.what();
        }
        return;
      }
    }
  };

  const std::size_t workers = detail::worker_count(cfg.threads, tasks);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) throw DataError("sweep aborted at " + error_context);

  std::vector<SweepRow> rows;
  rows.reserve(n_eps);
  for (std::size_t e = 0; e < n_eps; ++e) {
    SweepRow row;
    row.epsilon = cfg.epsilon_grid[e];
    row.ln_inv_epsilon = -std::log(row.epsilon);
    row.trials = trials;
    double sum = 0.0;
    for (double a : acc[e]) sum += a;
    row.mean_accuracy = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (double a : acc[e]) ss += (a - row.mean_accuracy) * (a - row.mean_accuracy);
    row.std_accuracy =
        trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
    const BoundReport b = sweep_bounds(cfg, *powers, u_max, horizon, row.epsilon);
    row.clamped_lower = b.clamped_lower;
    row.clamped_upper = b.clamped_upper;
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.ln_inv_epsilon < b.ln_inv_epsilon;
  });
  return rows;
}

inline constexpr const char* kSweepHeader =
    "epsilon,ln_inv_epsilon,mean_accuracy,std_accuracy,lower_bound,upper_bound,"
    "trials";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.ln_inv_epsilon)
        << ',' << format_double(r.mean_accuracy) << ','
        << format_double(r.std_accuracy) << ',' << format_double(r.clamped_lower)
        << ',' << format_double(r.clamped_upper) << ',' << r.trials << '\n';
  }
}

// Minimal line chart: mean accuracy with the clamped bounds, against
// ln(1/epsilon).
inline void write_sweep_svg(std::ostream& out, const std::vector<SweepRow>& rows,
                            const std::string& title = "accuracy vs ln(1/epsilon)") {
  constexpr double kW = 640, kH = 400, kPad = 50;
  double x_lo = 0, x_hi = 1;
  if (!rows.empty()) {
    x_lo = rows.front().ln_inv_epsilon;
    x_hi = rows.back().ln_inv_epsilon;
    if (x_hi == x_lo) x_hi = x_lo + 1;
  }
  auto sx = [&](double x) { return kPad + (x - x_lo) / (x_hi - x_lo) * (kW - 2 * kPad); };
  auto sy = [&](double y) { return kH - kPad - y * (kH - 2 * kPad); };
  auto polyline = [&](auto field, const char* color, const char* dash) {
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (dash) out << " stroke-dasharray=\"" << dash << "\"";
    out << " points=\"";
    for (const auto& r : rows) {
      const double v = field(r);
      if (std::isnan(v)) continue;
      out << sx(r.ln_inv_epsilon) << ',' << sy(v) << ' ';
    }
    out << "\"/>\n";
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title
      << "</text>\n";
  out << "  <line x1=\"" << kPad << "\" y1=\"" << sy(0) << "\" x2=\"" << kW - kPad
      << "\" y2=\"" << sy(0) << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << kPad << "\" y1=\"" << sy(0) << "\" x2=\"" << kPad
      << "\" y2=\"" << sy(1) << "\" stroke=\"black\"/>\n";
  out << "  <text x=\"" << kW / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\">ln(1/epsilon)</text>\n";
  polyline([](const SweepRow& r) { return r.mean_accuracy; }, "steelblue", nullptr);
  polyline([](const SweepRow& r) { return r.clamped_lower; }, "firebrick", "6,4");
  polyline([](const SweepRow& r) { return r.clamped_upper; }, "seagreen", "6,4");
  out << "</svg>\n";
}

}  // namespace nilmdp

#endif  // NILMDP_EXPERIMENT_HPP_
