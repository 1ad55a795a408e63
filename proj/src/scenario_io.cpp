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

#include "apb/scenario_io.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace apb
{
namespace
{
using nlohmann::json;
using nlohmann::ordered_json;

std::string join(const std::string & path, const std::string & key)
{
  return path.empty() ? key : path + "." + key;
}

// Object reader that remembers which keys were consumed so leftovers can be rejected.
class Section
{
public:
  Section(const json & j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "scenario" : path_, "expected an object");
  }

  bool has(const std::string & key) const { return j_.contains(key); }

  const json & raw(const std::string & key)
  {
    if (!has(key)) throw ConfigError(join(path_, key), "required");
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string & key, std::optional<double> fallback = std::nullopt)
  {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(join(path_, key), "required");
    }
    const json & v = raw(key);
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    return v.get<double>();
  }

  bool boolean(const std::string & key, bool fallback)
  {
    if (!has(key)) return fallback;
    const json & v = raw(key);
    if (!v.is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
    return v.get<bool>();
  }

  std::uint64_t seed(const std::string & key, std::uint64_t fallback)
  {
    if (!has(key)) return fallback;
    const json & v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(join(path_, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const std::string & key, const std::string & fallback)
  {
    if (!has(key)) return fallback;
    const json & v = raw(key);
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  Range range(const std::string & key, Range fallback)
  {
    if (!has(key)) return fallback;
    const json & v = raw(key);
    if (v.is_number()) return {v.get<double>(), v.get<double>()};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError(join(path_, key), "expected a number or [lo, hi]");
  }

  Section child(const std::string & key) { return Section(raw(key), join(path_, key)); }

  std::string path(const std::string & key) const { return join(path_, key); }

  void finish() const
  {
    for (const auto & item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(join(path_, item.key()), "unknown key");
    }
  }

private:
  const json & j_;
  std::string path_;
  std::set<std::string> seen_;
};

RssParams read_params(Section s)
{
  RssParams p;
  p.rho = s.number("rho", p.rho);
  p.a_max_brake = s.number("a_max_brake", p.a_max_brake);
  p.a_min_brake = s.number("a_min_brake", p.a_min_brake);
  p.a_max_accel = s.number("a_max_accel", p.a_max_accel);
  p.j_max = s.number("j_max", p.j_max);
  p.latency = s.number("latency", p.latency);
  s.finish();
  return p;
}

KinematicState read_car(Section s)
{
  KinematicState k;
  k.v = s.number("v");
  k.a = s.number("a", 0.0);
  s.finish();
  return k;
}

DriverPolicy read_driver(Section s)
{
  DriverPolicy d;
  const std::string type = s.text("type", "constant_speed");
  if (type == "constant_speed") d.kind = DriverPolicy::Kind::ConstantSpeed;
  else if (type == "tailgater") d.kind = DriverPolicy::Kind::Tailgater;
  else if (type == "distracted_follower") d.kind = DriverPolicy::Kind::DistractedFollower;
  else throw ConfigError(s.path("type"), "unknown driver '" + type + "'");
  d.target_gap = s.number("target_gap", d.target_gap);
  d.reaction_delay = s.number("reaction_delay", d.reaction_delay);
  d.comfort_decel = s.number("comfort_decel", d.comfort_decel);
  s.finish();
  return d;
}

ControllerSpec read_controller(Section s)
{
  ControllerSpec c;
  const std::string type = s.text("type", "none");
  if (type == "none") c.kind = ControllerKind::None;
  else if (type == "apb") c.kind = ControllerKind::Apb;
  else if (type == "aeb") c.kind = ControllerKind::Aeb;
  else throw ConfigError(s.path("type"), "unknown controller '" + type + "'");
  c.aeb.ttc_threshold = s.number("ttc_threshold", c.aeb.ttc_threshold);
  c.aeb.brake_magnitude = s.number("brake_magnitude", c.aeb.brake_magnitude);
  c.aeb.response_time = s.number("response_time", c.aeb.response_time);
  c.p_fail = s.number("p_fail", c.p_fail);
  if (s.has("override")) {
    const json & arr = s.raw("override");
    if (!arr.is_array()) throw ConfigError(s.path("override"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section o(arr[i], s.path("override") + "[" + std::to_string(i) + "]");
      c.overrides.push_back({o.number("from"), o.number("to")});
      o.finish();
    }
  }
  s.finish();
  return c;
}

FrontSource read_front(const json & j, bool compliant, const std::string & path)
{
  FrontSource f;
  if (j.is_array()) {
    f.kind = FrontSource::Kind::Script;
    f.script.compliant = compliant;
    for (std::size_t i = 0; i < j.size(); ++i) {
      Section seg(j[i], path + "[" + std::to_string(i) + "]");
      f.script.segments.push_back({seg.number("t"), seg.number("accel")});
      seg.finish();
    }
    return f;
  }
  Section s(j, path);
  if (s.has("adversarial")) {
    Section a = s.child("adversarial");
    f.kind = FrontSource::Kind::Adversarial;
    f.seed = a.seed("seed", 0);
    f.compliant = a.boolean("compliant", true);
    a.finish();
  } else if (s.has("brake_event")) {
    Section b = s.child("brake_event");
    f.kind = FrontSource::Kind::BrakeEvent;
    f.seed = b.seed("seed", 0);
    f.brake_start = b.range("start", f.brake_start);
    f.brake_decel = b.range("decel", f.brake_decel);
    b.finish();
  } else {
    throw ConfigError(path, "expected a segment list, {adversarial: ...} or {brake_event: ...}");
  }
  s.finish();
  return f;
}

Scenario read_scenario(const json & doc)
{
  Section root(doc, "");
  Scenario sc;
  if (root.has("params")) sc.params = read_params(root.child("params"));

  {
    Section init = root.child("initial");
    sc.initial.gap = init.number("gap_m");
    sc.initial.rear = read_car(init.child("rear"));
    sc.initial.front = read_car(init.child("front"));
    init.finish();
  }

  const bool compliant = root.boolean("front_compliant", true);
  if (root.has("front_script")) {
    sc.front = read_front(root.raw("front_script"), compliant, "front_script");
  } else {
    sc.front.script.compliant = compliant;
  }
  if (root.has("driver")) sc.driver = read_driver(root.child("driver"));
  if (root.has("controller")) sc.controller = read_controller(root.child("controller"));
  if (root.has("sensor")) {
    Section s = root.child("sensor");
    sc.sensor.range_noise_sigma = s.number("range_noise_sigma", 0.0);
    sc.sensor.miss_rate = s.number("miss_rate", 0.0);
    sc.sensor.ghost_rate = s.number("ghost_rate", 0.0);
    sc.sensor.ghost_gap = s.number("ghost_gap", sc.sensor.ghost_gap);
    s.finish();
  }
  if (root.has("sim")) {
    Section s = root.child("sim");
    sc.dt = s.number("dt", sc.dt);
    sc.horizon = s.number("horizon", sc.horizon);
    sc.seed = s.seed("seed", sc.seed);
    sc.episode_window = s.number("episode_window", sc.episode_window);
    s.finish();
  }
  if (root.has("population")) {
    Section s = root.child("population");
    Population pop;
    pop.v_rear = s.range("v_rear", pop.v_rear);
    pop.v_front = s.range("v_front", pop.v_front);
    pop.gap = s.range("gap", pop.gap);
    pop.gap_above_safe = s.boolean("gap_above_safe", pop.gap_above_safe);
    if (s.has("target_gap")) pop.target_gap = s.range("target_gap", {});
    s.finish();
    sc.population = pop;
  }
  root.finish();
  validate(sc);
  return sc;
}

json parse_document(std::string_view text)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error & e) {
    std::string what = e.what();
    // keep the reason on one line
    for (char & c : what) {
      if (c == '\n') c = ' ';
    }
    throw ConfigError("document", "invalid JSON (" + what + ")");
  }
}

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("file", "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json range_json(const Range & r)
{
  if (r.lo == r.hi) return r.lo;
  return ordered_json::array({r.lo, r.hi});
}

ordered_json params_json(const RssParams & p)
{
  ordered_json j;
  j["rho"] = p.rho;
  j["a_max_brake"] = p.a_max_brake;
  j["a_min_brake"] = p.a_min_brake;
  j["a_max_accel"] = p.a_max_accel;
  j["j_max"] = p.j_max;
  j["latency"] = p.latency;
  return j;
}

const char * driver_name(DriverPolicy::Kind k)
{
  switch (k) {
    case DriverPolicy::Kind::ConstantSpeed:
      return "constant_speed";
    case DriverPolicy::Kind::Tailgater:
      return "tailgater";
    case DriverPolicy::Kind::DistractedFollower:
      return "distracted_follower";
  }
  return "constant_speed";
}

const char * controller_name(ControllerKind k)
{
  switch (k) {
    case ControllerKind::None:
      return "none";
    case ControllerKind::Apb:
      return "apb";
    case ControllerKind::Aeb:
      return "aeb";
  }
  return "none";
}
}  // namespace

Scenario scenario_from_json(std::string_view text)
{
  return read_scenario(parse_document(text));
}

std::string scenario_to_json(const Scenario & sc)
{
  ordered_json j;
  j["params"] = params_json(sc.params);
  j["initial"] = {
    {"gap_m", sc.initial.gap},
    {"rear", {{"v", sc.initial.rear.v}, {"a", sc.initial.rear.a}}},
    {"front", {{"v", sc.initial.front.v}, {"a", sc.initial.front.a}}},
  };
  switch (sc.front.kind) {
    case FrontSource::Kind::Script: {
      ordered_json segs = ordered_json::array();
      for (const auto & s : sc.front.script.segments) segs.push_back({{"t", s.t}, {"accel", s.accel}});
      j["front_script"] = segs;
      j["front_compliant"] = sc.front.script.compliant;
      break;
    }
    case FrontSource::Kind::Adversarial:
      j["front_script"] = {{"adversarial", {{"seed", sc.front.seed}, {"compliant", sc.front.compliant}}}};
      break;
    case FrontSource::Kind::BrakeEvent:
      j["front_script"] = {{"brake_event",
                            {{"seed", sc.front.seed},
                             {"start", range_json(sc.front.brake_start)},
                             {"decel", range_json(sc.front.brake_decel)}}}};
      break;
  }
  j["driver"] = {
    {"type", driver_name(sc.driver.kind)},
    {"target_gap", sc.driver.target_gap},
    {"reaction_delay", sc.driver.reaction_delay},
    {"comfort_decel", sc.driver.comfort_decel},
  };
  ordered_json ctrl = {
    {"type", controller_name(sc.controller.kind)},
    {"ttc_threshold", sc.controller.aeb.ttc_threshold},
    {"brake_magnitude", sc.controller.aeb.brake_magnitude},
    {"response_time", sc.controller.aeb.response_time},
    {"p_fail", sc.controller.p_fail},
  };
  ordered_json overrides = ordered_json::array();
  for (const auto & o : sc.controller.overrides) overrides.push_back({{"from", o.from}, {"to", o.to}});
  ctrl["override"] = overrides;
  j["controller"] = ctrl;
  j["sensor"] = {
    {"range_noise_sigma", sc.sensor.range_noise_sigma},
    {"miss_rate", sc.sensor.miss_rate},
    {"ghost_rate", sc.sensor.ghost_rate},
    {"ghost_gap", sc.sensor.ghost_gap},
  };
  j["sim"] = {
    {"dt", sc.dt},
    {"horizon", sc.horizon},
    {"seed", sc.seed},
    {"episode_window", sc.episode_window},
  };
  if (sc.population) {
    const Population & pop = *sc.population;
    ordered_json pj = {
      {"v_rear", range_json(pop.v_rear)},
      {"v_front", range_json(pop.v_front)},
      {"gap", range_json(pop.gap)},
      {"gap_above_safe", pop.gap_above_safe},
    };
    if (pop.target_gap) pj["target_gap"] = range_json(*pop.target_gap);
    j["population"] = pj;
  }
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path & path)
{
  return scenario_from_json(read_file(path));
}

RssParams params_from_json(std::string_view text)
{
  const json doc = parse_document(text);
  RssParams p;
  if (doc.is_object() && doc.contains("initial")) {
    p = read_scenario(doc).params;
  } else {
    p = read_params(Section(doc, "params"));
  }
  validate(p);
  return p;
}

std::string params_to_json(const RssParams & p)
{
  return params_json(p).dump(2) + "\n";
}

RssParams load_params(const std::filesystem::path & path)
{
  return params_from_json(read_file(path));
}

std::string format_number(double value)
{
  if (value == 0.0) value = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_trace_csv(std::ostream & os, const Trace & trace)
{
  const TraceHeader & h = trace.header;
  const RssParams & p = h.params;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, h.scenario_hash);
  os << "# scenario_hash=" << hash << "\n";
  os << "# seed=" << h.seed << " script_seed=" << h.script_seed << "\n";
  os << "# params rho=" << format_number(p.rho) << " a_max_brake=" << format_number(p.a_max_brake)
     << " a_min_brake=" << format_number(p.a_min_brake)
     << " a_max_accel=" << format_number(p.a_max_accel) << " j_max=" << format_number(p.j_max)
     << " latency=" << format_number(p.latency) << " dt=" << format_number(h.dt) << "\n";
  os << "# min_gap=" << format_number(trace.min_gap)
     << " dangerous_episodes=" << trace.dangerous_episodes
     << " interventions=" << trace.interventions << "\n";
  for (const auto & e : trace.events) {
    os << "# event t=" << format_number(e.t) << " " << to_string(e.kind) << "\n";
  }
  os << kTraceColumns << "\n";
  for (const auto & r : trace.records) {
    os << format_number(r.t) << ',' << format_number(r.rear.x) << ',' << format_number(r.rear.v)
       << ',' << format_number(r.rear.a) << ',' << format_number(r.front.x) << ','
       << format_number(r.front.v) << ',' << format_number(r.front.a) << ','
       << format_number(r.gap) << ',' << format_number(r.d_safe) << ',' << (r.dangerous ? 1 : 0)
       << ',' << to_string(r.mode) << ',' << format_number(r.cmd_accel) << '\n';
  }
}

}  // namespace apb
