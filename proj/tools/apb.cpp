// Copyright 2026 The APB Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "apb/kernels/safe_distance_batch.hpp"
#include "apb/safety.hpp"
#include "apb/scenario_io.hpp"
#include "apb/sim.hpp"
#include "apb/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCollision = 3;
constexpr int kExitVerifyFailed = 4;

using apb::ConfigError;
using apb::format_number;

apb::RssParams resolve_params(const std::string & path)
{
  std::string file = path;
  if (file.empty()) {
    if (const char * env = std::getenv("APB_PARAMS"); env != nullptr && env[0] != '\0') file = env;
  }
  apb::RssParams p = file.empty() ? apb::RssParams{} : apb::load_params(file);
  for (const auto & w : apb::validate(p)) std::cerr << "warning: " << w << "\n";
  return p;
}

struct GridAxis
{
  std::string key;
  std::vector<double> values;
};

// "key=start:stop:step" or "key=v1,v2,..."
GridAxis parse_grid(const std::string & spec, bool allow_ranges)
{
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("grid", "expected key=values in '" + spec + "'");
  GridAxis axis{spec.substr(0, eq), {}};
  const std::string rest = spec.substr(eq + 1);
  const auto number = [&](const std::string & s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError(axis.key, "not a number: '" + s + "'");
    return v;
  };
  if (allow_ranges && rest.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(number(item));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ConfigError(axis.key, "expected start:stop:step with step > 0");
    }
    const auto count = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long long i = 0; i <= count; ++i) axis.values.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  } else {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) axis.values.push_back(number(item));
  }
  if (axis.values.empty()) throw ConfigError(axis.key, "no values");
  return axis;
}

// ---------------------------------------------------------------------------

struct SafeDistanceArgs
{
  std::string params;
  std::optional<double> v_rear;
  std::optional<double> v_front;
  double a_rear{0.0};
  std::vector<std::string> grid;
  bool classic{false};
  std::string format{"table"};
};

int cmd_safe_distance(const SafeDistanceArgs & args)
{
  const apb::RssParams p = resolve_params(args.params);
  std::vector<double> vr;
  std::vector<double> vf;
  if (args.v_rear) vr.push_back(*args.v_rear);
  if (args.v_front) vf.push_back(*args.v_front);
  std::vector<double> ar{args.a_rear};
  for (const auto & spec : args.grid) {
    const GridAxis axis = parse_grid(spec, true);
    std::vector<double> * target = nullptr;
    if (axis.key == "v_rear" || axis.key == "v-rear") target = &vr;
    else if (axis.key == "v_front" || axis.key == "v-front") target = &vf;
    else if (axis.key == "a_rear" || axis.key == "a-rear") target = &ar;
    else throw ConfigError("grid", "unknown axis '" + axis.key + "' (v_rear, v_front, a_rear)");
    *target = axis.values;
  }
  if (vr.empty()) throw ConfigError("v_rear", "required (--v-rear or --grid v_rear=...)");
  if (vf.empty()) throw ConfigError("v_front", "required (--v-front or --grid v_front=...)");

  std::vector<double> col_vr, col_vf, col_ar;
  for (const double a : ar) {
    for (const double f : vf) {
      for (const double r : vr) {
        apb::validate(apb::KinematicState{0.0, r, a}, "rear");
        apb::validate(apb::KinematicState{0.0, f, 0.0}, "front");
        col_vr.push_back(r);
        col_vf.push_back(f);
        col_ar.push_back(a);
      }
    }
  }
  std::vector<double> d(col_vr.size());
  apb::kernels::safe_distance_apb_batch(col_vr, col_ar, col_vf, p, d);

  if (args.format == "json") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
      nlohmann::ordered_json row = {
        {"v_rear", col_vr[i]}, {"v_front", col_vf[i]}, {"a_rear", col_ar[i]}, {"d_safe", d[i]}};
      if (args.classic) row["d_rss"] = apb::safe_distance_rss(col_vr[i], col_vf[i], p);
      rows.push_back(row);
    }
    std::cout << rows.dump(2) << "\n";
    return kExitOk;
  }
  const bool csv = args.format == "csv";
  if (!csv && args.format != "table") throw ConfigError("format", "expected table, csv or json");
  const char * sep = csv ? "," : "  ";
  std::cout << "v_rear" << sep << "v_front" << sep << "a_rear" << sep << "d_safe";
  if (args.classic) std::cout << sep << "d_rss";
  std::cout << "\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::cout << format_number(col_vr[i]) << sep << format_number(col_vf[i]) << sep
              << format_number(col_ar[i]) << sep << format_number(d[i]);
    if (args.classic) std::cout << sep << format_number(apb::safe_distance_rss(col_vr[i], col_vf[i], p));
    std::cout << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string & scenario_path, const std::string & out)
{
  const apb::Scenario sc = apb::load_scenario(scenario_path);
  for (const auto & w : apb::validate(sc)) std::cerr << "warning: " << w << "\n";
  const apb::Trace trace = apb::run(sc);
  if (out.empty() || out == "-") {
    apb::write_trace_csv(std::cout, trace);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write '" + out + "'");
    apb::write_trace_csv(f, trace);
    std::cout << "steps " << trace.records.size() << "\n";
    std::cout << "min_gap " << format_number(trace.min_gap) << "\n";
    if (trace.collided()) std::cout << "collision_t " << format_number(*trace.collision_time) << "\n";
  }
  return trace.collided() ? kExitCollision : kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs
{
  std::string params;
  std::size_t n{1000};
  std::uint64_t seed{0};
  std::string counterexample{"counterexample.csv"};
  double horizon{10.0};
  double dt{0.01};
  unsigned threads{0};
};

int cmd_verify(const VerifyArgs & args)
{
  if (args.n < 1) throw ConfigError("n", "must be >= 1");
  const apb::RssParams p = resolve_params(args.params);
  apb::VerifyOptions opts;
  opts.horizon = args.horizon;
  opts.dt = args.dt;
  opts.threads = args.threads;
  const apb::VerifyReport r = apb::verify_no_collision(args.n, args.seed, p, opts);

  std::cout << "scenarios " << r.n << "\n";
  std::cout << "collisions " << r.collisions << "\n";
  std::cout << "min_gap " << format_number(r.min_gap) << "\n";
  std::cout << "min_gap_histogram\n";
  double lo = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < r.histogram.size(); ++b) {
    const double hi =
      b < apb::kMinGapBins.size() ? apb::kMinGapBins[b] : std::numeric_limits<double>::infinity();
    std::cout << "  [" << format_number(lo) << ", " << format_number(hi) << ") " << r.histogram[b]
              << "\n";
    lo = hi;
  }
  if (r.passed()) {
    std::cout << "PASS\n";
    return kExitOk;
  }
  if (r.counterexample_trace) {
    std::ofstream f(args.counterexample, std::ios::binary);
    if (f) apb::write_trace_csv(f, *r.counterexample_trace);
    std::ofstream s(args.counterexample + ".json", std::ios::binary);
    if (s) s << apb::scenario_to_json(*r.counterexample);
    std::cout << "counterexample " << args.counterexample << "\n";
  }
  std::cout << "FAIL\n";
  return kExitVerifyFailed;
}

// ---------------------------------------------------------------------------

struct SweepArgs
{
  std::string scenario;
  std::string paired{"none,apb"};
  std::size_t n{1000};
  std::optional<double> p_fail;
  std::uint64_t seed{0};
  std::vector<std::string> axes;
  std::string out;
  std::size_t max_runs{10'000'000};
  unsigned threads{0};
};

nlohmann::ordered_json result_json(const apb::SweepResult & r)
{
  nlohmann::ordered_json j = {
    {"arm", r.arm},
    {"n_scenarios", r.n_scenarios},
    {"n_dangerous_episodes", r.n_dangerous_episodes},
    {"n_collisions", r.n_collisions},
    {"n_interventions", r.n_interventions},
    {"max_commanded_jerk", r.max_commanded_jerk},
    {"max_commanded_decel", r.max_commanded_decel},
  };
  if (!r.baseline.empty()) {
    j["baseline"] = r.baseline;
    j["elimination_rate"] = r.elimination_rate ? nlohmann::ordered_json(*r.elimination_rate)
                                               : nlohmann::ordered_json(nullptr);
  }
  return j;
}

int cmd_sweep(const SweepArgs & args)
{
  const apb::Scenario base = apb::load_scenario(args.scenario);
  apb::SweepOptions opts;
  opts.n = args.n;
  opts.seed = args.seed;
  opts.max_runs = args.max_runs;
  opts.threads = args.threads;
  for (const auto & spec : args.axes) {
    const GridAxis axis = parse_grid(spec, false);
    opts.axes.push_back({axis.key, axis.values});
  }
  std::stringstream ss(args.paired);
  std::string name;
  while (std::getline(ss, name, ',')) {
    apb::SweepArm arm{name, base.controller};
    if (name == "none") arm.controller.kind = apb::ControllerKind::None;
    else if (name == "apb") arm.controller.kind = apb::ControllerKind::Apb;
    else if (name == "aeb") arm.controller.kind = apb::ControllerKind::Aeb;
    else throw ConfigError("paired-controllers", "unknown controller '" + name + "'");
    if (args.p_fail) arm.controller.p_fail = arm.controller.kind == apb::ControllerKind::None ? 0.0 : *args.p_fail;
    opts.arms.push_back(arm);
  }
  if (opts.arms.empty()) throw ConfigError("paired-controllers", "no controllers given");

  const apb::SweepReport report = apb::sweep(base, opts);

  nlohmann::ordered_json j;
  j["seed"] = args.seed;
  j["n_per_point"] = args.n;
  nlohmann::ordered_json totals = nlohmann::ordered_json::array();
  for (const auto & r : report.totals) totals.push_back(result_json(r));
  j["arms"] = totals;
  if (!opts.axes.empty()) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const auto & pt : report.points) {
      nlohmann::ordered_json coords;
      for (const auto & [k, v] : pt.coordinates) coords[k] = v;
      nlohmann::ordered_json arms = nlohmann::ordered_json::array();
      for (const auto & r : pt.arms) arms.push_back(result_json(r));
      points.push_back({{"at", coords}, {"arms", arms}});
    }
    j["points"] = points;
  }
  const std::string text = j.dump(2) + "\n";
  if (args.out.empty() || args.out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(args.out, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write '" + args.out + "'");
    f << text;
    for (const auto & r : report.totals) {
      std::cout << r.arm << " scenarios=" << r.n_scenarios << " collisions=" << r.n_collisions
                << " episodes=" << r.n_dangerous_episodes << " interventions=" << r.n_interventions;
      if (r.elimination_rate) std::cout << " elimination_rate=" << format_number(*r.elimination_rate);
      std::cout << "\n";
    }
  }
  return kExitOk;
}

void add_sweep_options(CLI::App * cmd, SweepArgs & a)
{
  cmd->add_option("--scenario", a.scenario, "Base scenario file")->required();
  cmd->add_option("--paired-controllers", a.paired, "Comma-separated arms; the first is the baseline");
  cmd->add_option("--n", a.n, "Samples per grid point");
  cmd->add_option("--p-fail", a.p_fail, "Failure probability for every controller arm");
  cmd->add_option("--seed", a.seed, "Sweep seed");
  cmd->add_option("--axis", a.axes, "key=v1,v2,... (repeatable)");
  cmd->add_option("--out", a.out, "Report file (JSON)");
  cmd->add_option("--max-runs", a.max_runs, "Refuse sweeps larger than this many runs");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
}
}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Preventive braking toolkit: safe distances, simulation and verification"};
  app.require_subcommand(1);

  SafeDistanceArgs sd;
  auto * c_sd = app.add_subcommand("safe-distance", "Safe following distance for a point or grid");
  c_sd->add_option("--params", sd.params, "Parameter file (default: $APB_PARAMS or built-in)");
  c_sd->add_option("--v-rear", sd.v_rear, "Rear speed [m/s]");
  c_sd->add_option("--v-front", sd.v_front, "Front speed [m/s]");
  c_sd->add_option("--a-rear", sd.a_rear, "Rear acceleration [m/s^2]");
  c_sd->add_option("--grid", sd.grid, "axis=start:stop:step, axis in v_rear, v_front, a_rear");
  c_sd->add_flag("--classic", sd.classic, "Also print the constant-deceleration distance");
  c_sd->add_option("--format", sd.format, "table, csv or json");

  std::string scenario_path;
  std::string trace_out;
  auto * c_sim = app.add_subcommand("simulate", "Run one scenario and write its trace");
  c_sim->add_option("--scenario", scenario_path, "Scenario file")->required();
  c_sim->add_option("--out", trace_out, "Trace CSV (default: stdout)");

  VerifyArgs va;
  auto * c_ver = app.add_subcommand("verify", "Randomized no-collision check of the controller");
  c_ver->add_option("--params", va.params, "Parameter file (default: $APB_PARAMS or built-in)");
  c_ver->add_option("--n", va.n, "Number of scenarios");
  c_ver->add_option("--seed", va.seed, "Seed");
  c_ver->add_option("--counterexample", va.counterexample, "Where to write a failing trace");
  c_ver->add_option("--horizon", va.horizon, "Scenario length [s]");
  c_ver->add_option("--dt", va.dt, "Decision period [s]");
  c_ver->add_option("--threads", va.threads, "Worker threads (0 = all cores)");

  SweepArgs sw;
  auto * c_sweep = app.add_subcommand("sweep", "Monte Carlo sweep over controllers and parameters");
  add_sweep_options(c_sweep, sw);
  SweepArgs cmp;
  auto * c_cmp = app.add_subcommand("compare", "Paired sweep (same as sweep)");
  add_sweep_options(c_cmp, cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    std::string what = e.what();
    for (char & ch : what) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "error: arguments: " << what << "\n";
    return kExitConfig;
  }

  try {
    if (*c_sd) return cmd_safe_distance(sd);
    if (*c_sim) return cmd_simulate(scenario_path, trace_out);
    if (*c_ver) return cmd_verify(va);
    if (*c_sweep) return cmd_sweep(sw);
    if (*c_cmp) return cmd_sweep(cmp);
  } catch (const ConfigError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception & e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
