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

// Command-line front end. Exit status: 0 success, 1 usage error, 2 data error.

#ifndef NILMDP_TOOLS_CLI_HPP_
#define NILMDP_TOOLS_CLI_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nilmdp/nilmdp.hpp"

namespace nilmdp::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kData = 2;

namespace detail {

inline std::vector<double> list_or_empty(const std::string& s) {
  return s.empty() ? std::vector<double>{} : nilmdp::detail::parse_list(s);
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
  auto out = nilmdp::detail::open_out(path);
  fn(out);
}

inline void print_report(std::ostream& out, const BoundReport& r) {
  if (!std::isnan(r.lower)) {
    out << "lower_raw " << format_double(r.lower) << '\n';
    out << "lower " << format_double(r.clamped_lower) << '\n';
  }
  if (!std::isnan(r.upper)) {
    out << "upper_raw " << format_double(r.upper) << '\n';
    out << "upper " << format_double(r.clamped_upper) << '\n';
  }
  for (const auto& [k, v] : r.intermediates) {
    out << k << ' ' << format_double(v) << '\n';
  }
  for (const auto& u : r.undefined) out << "undefined " << u << '\n';
}

}  // namespace detail

// `args` excludes the program name.
inline int cli_dispatch(std::vector<std::string> args, std::ostream& out,
                        std::ostream& err) {
  CLI::App app{"Privacy-aware load disaggregation experiments", "nilm_dp"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic fleet trace");
  std::string synth_powers = "60,65,70,75,80,85,90,95";
  std::size_t synth_horizon = 50;
  double synth_sparsity = 0.95;
  double synth_jitter = 0.0;
  std::uint64_t synth_seed = 1;
  std::string synth_initial;
  std::string synth_out;
  std::string synth_states_out;
  std::string synth_trace_out;
  synth->add_option("--powers", synth_powers, "mean powers, watts (comma list)");
  synth->add_option("--horizon", synth_horizon, "transitions T (T+1 slots)");
  synth->add_option("--sparsity", synth_sparsity, "target sparsity s in [0,1]");
  synth->add_option("--jitter", synth_jitter, "relative std of on-consumption");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--initial-states", synth_initial, "0/1 comma list");
  synth->add_option("--out", synth_out, "meter CSV")->required();
  synth->add_option("--states-out", synth_states_out, "ground-truth states CSV");
  synth->add_option("--trace-out", synth_trace_out, "per-appliance trace CSV");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "binarize a trace and aggregate");
  std::string ingest_trace;
  std::string ingest_thresholds;
  std::string ingest_out;
  std::string ingest_states_out;
  ingest->add_option("--trace", ingest_trace, "appliance CSV t,<names>")->required();
  ingest->add_option("--thresholds", ingest_thresholds,
                     "per-appliance on thresholds (default 5% of max)");
  ingest->add_option("--out", ingest_out, "meter CSV");
  ingest->add_option("--states-out", ingest_states_out, "states CSV");

  // infer
  auto* infer = app.add_subcommand("infer", "decode appliance states");
  std::string infer_meter;
  std::string infer_powers;
  std::string infer_states;
  std::string infer_x0;
  std::string infer_mode = "multi-shot";
  std::string infer_mechanism = "none";
  double infer_delta = 2.0;
  std::size_t infer_u_max = 1;
  double infer_epsilon = 1.0;
  std::uint64_t infer_seed = 1;
  std::optional<double> infer_tolerance;
  std::string infer_out;
  infer->add_option("--meter", infer_meter, "meter CSV t,power")->required();
  infer->add_option("--powers", infer_powers, "mean powers (comma list)")->required();
  infer->add_option("--states", infer_states,
                    "ground-truth states CSV (initial state and scoring)");
  infer->add_option("--x0", infer_x0, "initial 0/1 states when --states is absent");
  infer->add_option("--mode", infer_mode)
      ->check(CLI::IsMember({"one-shot", "multi-shot", "hierarchical"}));
  infer->add_option("--mechanism", infer_mechanism, "noise added before decoding")
      ->check(CLI::IsMember({"none", "laplace", "staircase"}));
  infer->add_option("--delta", infer_delta);
  infer->add_option("--u-max", infer_u_max);
  infer->add_option("--epsilon", infer_epsilon);
  infer->add_option("--seed", infer_seed);
  infer->add_option("--tolerance", infer_tolerance, "correction tolerance (default delta)");
  infer->add_option("--out", infer_out, "decoded states CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo epsilon sweep");
  std::string sweep_config;
  std::string sweep_out;
  std::string sweep_svg;
  std::map<std::string, std::string> sweep_flags;
  sweep->add_option("--config", sweep_config, "key = value file");
  sweep->add_option("--out", sweep_out, "output CSV (stdout if absent)");
  sweep->add_option("--svg", sweep_svg, "also render a line chart");
  for (const auto& key : sweep_config_keys()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    sweep->add_option_function<std::string>(
        flag, [&sweep_flags, key](const std::string& v) { sweep_flags[key] = v; },
        "overrides config key " + key);
  }

  // bounds
  auto* bounds = app.add_subcommand("bounds", "evaluate accuracy bounds");
  std::string bounds_mode = "one-shot";
  double bounds_delta = 2.0;
  double bounds_epsilon = 1.0;
  std::optional<std::size_t> bounds_n;
  std::optional<double> bounds_c;
  std::optional<double> bounds_p_norm;
  std::string bounds_powers;
  std::size_t bounds_t = 1;
  std::size_t bounds_u_max = 1;
  std::string bounds_variant = "as-stated";
  std::string bounds_interp = "subset-norm";
  bounds->add_option("--mode", bounds_mode)
      ->check(CLI::IsMember({"one-shot", "multi-shot", "hierarchical"}));
  bounds->add_option("--delta", bounds_delta);
  bounds->add_option("--epsilon", bounds_epsilon);
  bounds->add_option("--n", bounds_n, "appliance count");
  bounds->add_option("--c", bounds_c, "C(P) override");
  bounds->add_option("--p-norm", bounds_p_norm, "||P||_2");
  bounds->add_option("--powers", bounds_powers, "mean powers (comma list)");
  bounds->add_option("--t", bounds_t, "horizon T");
  bounds->add_option("--u-max", bounds_u_max);
  bounds->add_option("--variant", bounds_variant)
      ->check(CLI::IsMember({"as-stated", "corrected"}));
  bounds->add_option("--interpretation", bounds_interp)
      ->check(CLI::IsMember({"subset-norm", "singular-value"}));

  // sparsity
  auto* sparsity_cmd = app.add_subcommand("sparsity", "switching sparsity of a states CSV");
  std::string sparsity_states;
  sparsity_cmd->add_option("--states", sparsity_states)->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*synth) {
      SynthConfig cfg;
      cfg.powers = detail::list_or_empty(synth_powers);
      cfg.n_appliances = cfg.powers.size();
      cfg.horizon = synth_horizon;
      cfg.target_sparsity = synth_sparsity;
      cfg.consumption_jitter = synth_jitter;
      cfg.seed = synth_seed;
      if (!synth_initial.empty()) cfg.initial_states = detail::list_or_empty(synth_initial);
      Rng rng(cfg.seed);
      SynthResult s = synthesize(cfg, rng);
      detail::write_file(synth_out, [&](std::ostream& o) { write_meter_csv(o, s.meter); });
      if (!synth_states_out.empty()) {
        detail::write_file(synth_states_out, [&](std::ostream& o) {
          write_states_csv(o, s.states, s.trace.names);
        });
      }
      if (!synth_trace_out.empty()) {
        detail::write_file(synth_trace_out,
                           [&](std::ostream& o) { write_trace_csv(o, s.trace); });
      }
      out << "sparsity " << format_double(nilmdp::sparsity(s.states)) << '\n';
      return kOk;
    }

    if (*ingest) {
      ApplianceTrace trace = read_trace_csv(ingest_trace);
      std::vector<double> th = ingest_thresholds.empty()
                                   ? default_thresholds(trace)
                                   : detail::list_or_empty(ingest_thresholds);
      StateMatrix states = binarize(trace, th);
      AppliancePowerVector p = estimate_powers(trace, states);
      for (std::size_t i = 0; i < p.size(); ++i) {
        out << p.names()[i] << ' ' << format_double(p[i]) << '\n';
      }
      if (states.horizon() >= 2) {
        out << "sparsity " << format_double(nilmdp::sparsity(states)) << '\n';
      }
      if (!ingest_out.empty()) {
        MeterSeries meter = aggregate(trace, states);
        detail::write_file(ingest_out, [&](std::ostream& o) { write_meter_csv(o, meter); });
      }
      if (!ingest_states_out.empty()) {
        detail::write_file(ingest_states_out, [&](std::ostream& o) {
          write_states_csv(o, states, trace.names);
        });
      }
      return kOk;
    }

    if (*infer) {
      AppliancePowerVector p(detail::list_or_empty(infer_powers));
      MeterSeries meter = read_meter_csv(infer_meter);
      std::optional<StateMatrix> truth;
      std::vector<std::string> names;
      StateVector x0;
      if (!infer_states.empty()) {
        truth = read_states_csv(infer_states, &names);
        if (truth->horizon() != meter.size()) {
          throw DataError("infer: states and meter slot counts differ");
        }
        x0 = (*truth)[0];
      } else if (!infer_x0.empty()) {
        x0 = StateVector(detail::list_or_empty(infer_x0));
      } else {
        x0 = StateVector::zeros(p.size());
      }
      const SensitivityParams sens{infer_delta, infer_u_max};
      sens.validate();
      DpConfig dp{infer_epsilon, sens.delta_f(), parse_mechanism(infer_mechanism),
                  hash64(infer_seed, {2, 0, 0})};
      MeterSeries noisy = inject_noise(meter, dp);
      Rng rng(hash64(infer_seed, {3, 0, 0}));
      const InferenceMode mode = parse_mode(infer_mode);
      StateMatrix decoded;
      if (mode == InferenceMode::kOneShot) {
        // Chains one-shot switch estimates from x0 without correction.
        std::vector<StateVector> cols;
        StateVector x = x0;
        for (std::size_t t = 1; t < noisy.size(); ++t) {
          OneShotResult r = one_shot_infer(p, noisy[t - 1], noisy[t], sens, rng, true);
          x = apply_switch(x, r.delta_bar);
          cols.push_back(x);
        }
        decoded = StateMatrix(std::move(cols));
      } else if (mode == InferenceMode::kMultiShot) {
        decoded = multi_shot_infer(x0, noisy, p, sens, rng, {infer_tolerance}).states;
      } else {
        decoded = hierarchical_infer(x0, noisy, p, sens, rng, {infer_tolerance}).states;
      }
      if (!infer_out.empty()) {
        if (names.size() != p.size()) names = p.names();
        detail::write_file(infer_out, [&](std::ostream& o) {
          write_states_csv(o, decoded, names, 1);
        });
      }
      if (truth && decoded.horizon() > 0) {
        out << "accuracy "
            << format_double(accuracy_multi_shot(
                   decoded, truth->slice(1, truth->horizon())))
            << '\n';
      }
      return kOk;
    }

    if (*sweep) {
      SweepConfig cfg;
      std::map<std::string, std::string> kv;
      if (!sweep_config.empty()) {
        std::ifstream in(sweep_config);
        if (!in) {
          err << "error: cannot open config '" << sweep_config << "'\n";
          return kUsage;
        }
        kv = read_key_values(in);
      }
      for (const auto& [k, v] : sweep_flags) kv[k] = v;
      apply_settings(cfg, kv);
      std::vector<SweepRow> rows = run_sweep(cfg);
      if (sweep_out.empty()) {
        write_sweep_csv(out, rows);
      } else {
        detail::write_file(sweep_out, [&](std::ostream& o) { write_sweep_csv(o, rows); });
      }
      if (!sweep_svg.empty()) {
        detail::write_file(sweep_svg, [&](std::ostream& o) {
          write_sweep_svg(o, rows, std::string(to_string(cfg.mode)) +
                                       " accuracy vs ln(1/epsilon)");
        });
      }
      return kOk;
    }

    if (*bounds) {
      const RipInterpretation interp = parse_rip_interpretation(bounds_interp);
      const BoundVariant variant = parse_bound_variant(bounds_variant);
      std::optional<AppliancePowerVector> p;
      if (!bounds_powers.empty()) p = AppliancePowerVector(detail::list_or_empty(bounds_powers));
      const double n = bounds_n ? static_cast<double>(*bounds_n)
                                : p ? static_cast<double>(p->size()) : 0.0;
      std::optional<double> p_norm = bounds_p_norm;
      if (!p_norm && p) p_norm = p->l2_norm();
      std::optional<double> c = bounds_c;
      if (!c && p) {
        const CValue cv = c_of_p(*p, bounds_u_max, interp);
        c = cv.value;
        if (!c) out << "undefined C(P)\n";
      }
      const std::string mode = bounds_mode;
      if (mode == "hierarchical") {
        if (!p) {
          err << "error: --mode hierarchical needs --powers\n";
          return kUsage;
        }
        auto hs = decompose(*p, bounds_delta, bounds_u_max);
        std::vector<std::optional<double>> cs(hs.size(), bounds_c);
        detail::print_report(out, hierarchical_bounds(hs, bounds_delta, bounds_epsilon,
                                                      bounds_t, bounds_u_max, cs,
                                                      variant, interp));
        return kOk;
      }
      if (!(n >= 1.0)) {
        err << "error: need --n or --powers\n";
        return kUsage;
      }
      if (mode == "multi-shot") {
        if (!c || !p_norm) {
          err << "error: multi-shot bounds need C(P) and ||P||_2\n";
          return kUsage;
        }
        detail::print_report(out, multi_shot_bounds(bounds_delta, bounds_epsilon, n,
                                                    bounds_t, *c, *p_norm, variant));
        return kOk;
      }
      BoundReport r;
      if (c) r = lower_bound_one_shot(bounds_delta, bounds_epsilon, n, *c);
      if (p_norm) {
        BoundReport hi = upper_bound_one_shot(bounds_delta, bounds_epsilon, n, *p_norm);
        r.intermediates.insert(hi.intermediates.begin(), hi.intermediates.end());
        r.set_upper(hi.upper);
      }
      detail::print_report(out, r);
      return kOk;
    }

    if (*sparsity_cmd) {
      StateMatrix states = read_states_csv(sparsity_states);
      out << format_double(nilmdp::sparsity(states)) << '\n';
      return kOk;
    }
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace nilmdp::cli

#endif  // NILMDP_TOOLS_CLI_HPP_
