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

#include "apb/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace apb
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWorstCaseProbability = 0.05;
constexpr double kMinSegment = 0.1;
constexpr double kMaxSegment = 3.0;
// overlaps smaller than this are rounding, not contact
constexpr double kContactTolerance = 1e-9;

enum SeedStream : std::uint64_t { kScriptStream = 1, kSensorStream = 2, kFailureStream = 3 };

// a(u) = a0 + jerk * (u - tb) on [tb, te], u relative to the step start
struct LinPiece
{
  double tb{0.0};
  double te{0.0};
  double a0{0.0};
  double jerk{0.0};
};

// Motion of one car on [tb, te]; x is the displacement since the step start.
struct MotionPiece
{
  double tb{0.0};
  double te{0.0};
  double x{0.0};
  double v{0.0};
  double a{0.0};
  double jerk{0.0};

  double pos(double u) const { return x + u * (v + u * (a / 2.0 + u * jerk / 6.0)); }
  double vel(double u) const { return v + u * (a + u * jerk / 2.0); }
  double acc(double u) const { return a + u * jerk; }
};

struct CarMotion
{
  std::vector<MotionPiece> pieces;
  double x{0.0};
  double v{0.0};
  double a{0.0};
};

void linearize(std::span<const CommandPiece> pieces, double dt, std::vector<LinPiece> & out)
{
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double tb = std::clamp(pieces[i].tau, 0.0, dt);
    const double te = i + 1 < pieces.size() ? std::clamp(pieces[i + 1].tau, 0.0, dt) : dt;
    if (!(te > tb)) continue;
    const AccelCommand & cmd = pieces[i].command;
    const double len = te - tb;

    std::array<double, 4> cuts{0.0, len, len, len};
    std::size_t n = 1;
    if (cmd.ramp && cmd.ramp->jerk != 0.0) {
      const double sat = cmd.ramp->saturation_time();
      const double cross = (cmd.base - cmd.ramp->start) / cmd.ramp->jerk;
      if (sat > 0.0 && sat < len) cuts[n++] = sat;
      if (cross > 0.0 && cross < len) cuts[n++] = cross;
    }
    cuts[n++] = len;
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n));

    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double u0 = cuts[k];
      const double u1 = cuts[k + 1];
      if (!(u1 > u0)) continue;
      const double mid = 0.5 * (u0 + u1);
      const bool ramping = cmd.ramp && cmd.ramp->jerk != 0.0 &&
                           mid < cmd.ramp->saturation_time() &&
                           cmd.ramp->start + cmd.ramp->jerk * mid < cmd.base;
      LinPiece lp{tb + u0, tb + u1, 0.0, 0.0};
      if (ramping) {
        lp.a0 = cmd.ramp->start + cmd.ramp->jerk * u0;
        lp.jerk = cmd.ramp->jerk;
      } else {
        lp.a0 = cmd.at(mid);
      }
      out.push_back(lp);
    }
  }
}

// Smallest root u > 0 of v + a u + j u^2 / 2 where the speed decreases through zero.
double stop_root(double v, double a, double j)
{
  if (j == 0.0) return a < 0.0 ? v / -a : kInf;
  const double disc = a * a - 2.0 * j * v;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  // stable roots of (j/2) u^2 + a u + v
  const double q = -0.5 * (a + std::copysign(sq, a));
  double best = kInf;
  if (q != 0.0) {
    const double r1 = q / (0.5 * j);
    const double r2 = v / q;
    for (const double r : {r1, r2}) {
      if (r > 0.0 && r < best) best = r;
    }
  }
  return best;
}

CarMotion integrate(const KinematicState & s0, const std::vector<LinPiece> & lin)
{
  CarMotion m;
  double x = 0.0;
  double v = std::max(s0.v, 0.0);
  double a_end = 0.0;
  for (const LinPiece & lp : lin) {
    double tb = lp.tb;
    double a0 = lp.a0;
    const double j = lp.jerk;
    while (tb < lp.te) {
      const double len = lp.te - tb;
      if (v <= 0.0) {
        v = 0.0;
        if (a0 <= 0.0) {
          // held by the brakes until the command turns positive
          const double wake = (j > 0.0) ? -a0 / j : kInf;
          if (!(wake < len) || (a0 == 0.0 && j <= 0.0)) {
            m.pieces.push_back({tb, lp.te, x, 0.0, 0.0, 0.0});
            a0 += j * len;
            tb = lp.te;
            break;
          }
          if (wake > 0.0) {
            m.pieces.push_back({tb, tb + wake, x, 0.0, 0.0, 0.0});
            tb += wake;
            a0 = 0.0;
            continue;
          }
        }
      }
      const MotionPiece mp{tb, lp.te, x, v, a0, j};
      const double u_stop = stop_root(v, a0, j);
      if (u_stop < len) {
        MotionPiece cut = mp;
        cut.te = tb + u_stop;
        m.pieces.push_back(cut);
        x = mp.pos(u_stop);
        v = 0.0;
        a0 += j * u_stop;
        tb += u_stop;
        continue;
      }
      m.pieces.push_back(mp);
      x = mp.pos(len);
      v = std::max(mp.vel(len), 0.0);
      a0 += j * len;
      tb = lp.te;
    }
    a_end = a0;
  }
  m.x = x;
  m.v = v;
  m.a = (v <= 0.0 && a_end <= 0.0) ? 0.0 : a_end;
  return m;
}

const MotionPiece & piece_at(const CarMotion & m, double t, std::size_t & hint)
{
  while (hint + 1 < m.pieces.size() && m.pieces[hint].te <= t) ++hint;
  return m.pieces[hint];
}

double cubic(double g0, double g1, double g2, double g3, double u)
{
  return g0 + u * (g1 + u * (g2 / 2.0 + u * g3 / 6.0));
}

// Real roots in (0, len) of c2 u^2 + c1 u + c0, sorted.
std::size_t interior_roots(double c2, double c1, double c0, double len, std::array<double, 2> & out)
{
  std::size_t n = 0;
  const auto keep = [&](double r) {
    if (r > 0.0 && r < len) out[n++] = r;
  };
  const double scale = std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0) return 0;
  if (std::abs(c2) <= 1e-14 * scale) {
    if (c1 != 0.0) keep(-c0 / c1);
  } else {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0) {
      const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
      keep(q / c2);
      if (q != 0.0) keep(c0 / q);
    }
  }
  if (n == 2 && out[0] > out[1]) std::swap(out[0], out[1]);
  return n;
}

std::uint64_t splitmix64(std::uint64_t x)
{
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64 & rng, const Range & r)
{
  if (!(r.hi > r.lo)) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

void check_range(const Range & r, const std::string & field, double lo = -kInf)
{
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) throw ConfigError(field, "must be finite");
  if (r.lo > r.hi) throw ConfigError(field, "lower bound exceeds upper bound");
  if (r.lo < lo) throw ConfigError(field, "out of range");
}

void check_probability(double p, const std::string & field)
{
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(field, "must be in [0, 1]");
}

class Fnv
{
public:
  void bytes(const void * data, std::size_t n)
  {
    const auto * p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void f(double d)
  {
    if (d == 0.0) d = 0.0;  // fold -0
    bytes(&d, sizeof d);
  }
  void u(std::uint64_t x) { bytes(&x, sizeof x); }
  void range(const Range & r)
  {
    f(r.lo);
    f(r.hi);
  }
  std::uint64_t value() const { return h_; }

private:
  std::uint64_t h_{0xcbf29ce484222325ULL};
};
}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double FrontScript::accel_at(double t) const
{
  double a = 0.0;
  for (const auto & s : segments) {
    if (s.t > t) break;
    a = s.accel;
  }
  return a;
}

FrontScript adversarial_front(std::uint64_t seed, const RssParams & p, double horizon, bool compliant)
{
  if (!(horizon > 0.0)) throw ConfigError("horizon", "must be > 0");
  std::mt19937_64 rng(seed);
  FrontScript script;
  script.compliant = compliant;
  if (std::bernoulli_distribution(kWorstCaseProbability)(rng)) {
    script.segments.push_back({0.0, -p.a_max_brake});
    return script;
  }
  const double lo = compliant ? -p.a_max_brake : -kPhysicalCeiling;
  const double hi = compliant ? p.a_max_accel : kPhysicalCeiling;
  std::uniform_real_distribution<double> value(lo, hi);
  std::uniform_real_distribution<double> length(kMinSegment, kMaxSegment);
  double t = 0.0;
  while (t < horizon) {
    script.segments.push_back({t, value(rng)});
    t += length(rng);
  }
  return script;
}

FrontScript worst_case_front(const RssParams & p)
{
  FrontScript script;
  script.segments.push_back({0.0, -p.a_max_brake});
  return script;
}

FrontScript resolve_front(const FrontSource & src, const RssParams & p, double horizon)
{
  switch (src.kind) {
    case FrontSource::Kind::Script:
      return src.script;
    case FrontSource::Kind::Adversarial:
      return adversarial_front(src.seed, p, horizon, src.compliant);
    case FrontSource::Kind::BrakeEvent: {
      std::mt19937_64 rng(src.seed);
      const double start = uniform(rng, src.brake_start);
      const double decel = uniform(rng, src.brake_decel);
      FrontScript script;
      script.compliant = decel <= p.a_max_brake;
      script.segments.push_back({0.0, 0.0});
      script.segments.push_back({start, -decel});
      return script;
    }
  }
  return {};
}

std::vector<std::string> validate(const Scenario & sc)
{
  std::vector<std::string> warnings = validate(sc.params);
  validate(sc.initial.rear, "initial.rear");
  validate(sc.initial.front, "initial.front");
  if (!std::isfinite(sc.initial.gap)) throw ConfigError("initial.gap_m", "must be finite");
  if (!(sc.initial.gap > 0.0)) throw ConfigError("initial.gap_m", "must be > 0 (cars already in contact)");
  if (!(sc.dt > 0.0) || !std::isfinite(sc.dt)) throw ConfigError("sim.dt", "must be > 0");
  if (!(sc.horizon >= sc.dt) || !std::isfinite(sc.horizon)) {
    throw ConfigError("sim.horizon", "must be finite and >= dt");
  }
  if (!(sc.episode_window >= 0.0)) throw ConfigError("sim.episode_window", "must be >= 0");

  const FrontSource & fs = sc.front;
  if (fs.kind == FrontSource::Kind::Script) {
    double prev = -kInf;
    for (std::size_t i = 0; i < fs.script.segments.size(); ++i) {
      const auto & s = fs.script.segments[i];
      const std::string field = "front_script[" + std::to_string(i) + "]";
      if (!std::isfinite(s.t) || s.t < 0.0) throw ConfigError(field + ".t", "must be finite and >= 0");
      if (!(s.t > prev)) throw ConfigError(field + ".t", "times must be strictly increasing");
      prev = s.t;
      if (!std::isfinite(s.accel) || std::abs(s.accel) > kPhysicalCeiling) {
        throw ConfigError(field + ".accel", "exceeds physical ceiling");
      }
      if (fs.script.compliant &&
          (s.accel < -sc.params.a_max_brake - 1e-12 || s.accel > sc.params.a_max_accel + 1e-12)) {
        throw ConfigError(field + ".accel", "outside [-a_max_brake, a_max_accel] for a compliant front");
      }
    }
  } else if (fs.kind == FrontSource::Kind::BrakeEvent) {
    check_range(fs.brake_start, "front_script.brake_event.start", 0.0);
    check_range(fs.brake_decel, "front_script.brake_event.decel", 0.0);
    if (fs.brake_decel.hi > kPhysicalCeiling) {
      throw ConfigError("front_script.brake_event.decel", "exceeds physical ceiling");
    }
  }

  validate(sc.driver);
  const ControllerSpec & c = sc.controller;
  if (c.kind == ControllerKind::Aeb) validate(c.aeb);
  check_probability(c.p_fail, "controller.p_fail");
  for (std::size_t i = 0; i < c.overrides.size(); ++i) {
    const auto & o = c.overrides[i];
    if (!(o.to >= o.from)) {
      throw ConfigError("controller.override[" + std::to_string(i) + "]", "to must be >= from");
    }
  }

  const SensorModel & s = sc.sensor;
  if (!(s.range_noise_sigma >= 0.0) || !std::isfinite(s.range_noise_sigma)) {
    throw ConfigError("sensor.range_noise_sigma", "must be finite and >= 0");
  }
  check_probability(s.miss_rate, "sensor.miss_rate");
  check_probability(s.ghost_rate, "sensor.ghost_rate");
  if (!(s.ghost_gap >= 0.0) || !std::isfinite(s.ghost_gap)) {
    throw ConfigError("sensor.ghost_gap", "must be finite and >= 0");
  }

  if (sc.population) {
    const Population & pop = *sc.population;
    check_range(pop.v_rear, "population.v_rear", 0.0);
    check_range(pop.v_front, "population.v_front", 0.0);
    check_range(pop.gap, "population.gap");
    if (pop.target_gap) check_range(*pop.target_gap, "population.target_gap", 0.0);
  }
  return warnings;
}

std::uint64_t scenario_hash(const Scenario & sc)
{
  Fnv h;
  const RssParams & p = sc.params;
  for (const double d : {p.rho, p.a_max_brake, p.a_min_brake, p.a_max_accel, p.j_max, p.latency}) h.f(d);
  for (const KinematicState * s : {&sc.initial.rear, &sc.initial.front}) {
    h.f(s->x);
    h.f(s->v);
    h.f(s->a);
  }
  h.f(sc.initial.gap);
  h.u(static_cast<std::uint64_t>(sc.front.kind));
  h.u(sc.front.script.compliant ? 1 : 0);
  h.u(sc.front.script.segments.size());
  for (const auto & s : sc.front.script.segments) {
    h.f(s.t);
    h.f(s.accel);
  }
  h.u(sc.front.seed);
  h.u(sc.front.compliant ? 1 : 0);
  h.range(sc.front.brake_start);
  h.range(sc.front.brake_decel);
  h.u(static_cast<std::uint64_t>(sc.driver.kind));
  h.f(sc.driver.target_gap);
  h.f(sc.driver.reaction_delay);
  h.f(sc.driver.comfort_decel);
  h.u(static_cast<std::uint64_t>(sc.controller.kind));
  h.f(sc.controller.aeb.ttc_threshold);
  h.f(sc.controller.aeb.brake_magnitude);
  h.f(sc.controller.aeb.response_time);
  h.f(sc.controller.p_fail);
  h.u(sc.controller.overrides.size());
  for (const auto & o : sc.controller.overrides) {
    h.f(o.from);
    h.f(o.to);
  }
  h.f(sc.sensor.range_noise_sigma);
  h.f(sc.sensor.miss_rate);
  h.f(sc.sensor.ghost_rate);
  h.f(sc.sensor.ghost_gap);
  h.f(sc.dt);
  h.f(sc.horizon);
  h.u(sc.seed);
  h.f(sc.episode_window);
  h.u(sc.population ? 1 : 0);
  if (sc.population) {
    h.range(sc.population->v_rear);
    h.range(sc.population->v_front);
    h.range(sc.population->gap);
    h.u(sc.population->gap_above_safe ? 1 : 0);
    h.u(sc.population->target_gap ? 1 : 0);
    if (sc.population->target_gap) h.range(*sc.population->target_gap);
  }
  return h.value();
}

StepResult step(
  const SceneState & scene, std::span<const CommandPiece> rear, std::span<const CommandPiece> front,
  double dt)
{
  std::vector<LinPiece> lin_r;
  std::vector<LinPiece> lin_f;
  linearize(rear, dt, lin_r);
  linearize(front, dt, lin_f);
  if (lin_r.empty()) lin_r.push_back({0.0, dt, 0.0, 0.0});
  if (lin_f.empty()) lin_f.push_back({0.0, dt, 0.0, 0.0});
  const CarMotion mr = integrate(scene.rear, lin_r);
  const CarMotion mf = integrate(scene.front, lin_f);

  std::vector<double> cuts;
  cuts.reserve(mr.pieces.size() + mf.pieces.size() + 2);
  cuts.push_back(0.0);
  for (const auto & p : mr.pieces) cuts.push_back(p.te);
  for (const auto & p : mf.pieces) cuts.push_back(p.te);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  StepResult res;
  res.min_gap = scene.gap;
  std::size_t hr = 0;
  std::size_t hf = 0;
  for (std::size_t i = 0; i + 1 < cuts.size() && !res.collision_tau; ++i) {
    const double s0 = cuts[i];
    const double len = cuts[i + 1] - s0;
    if (!(len > 0.0)) continue;
    const MotionPiece & pr = piece_at(mr, s0, hr);
    const MotionPiece & pf = piece_at(mf, s0, hf);
    const double ur = s0 - pr.tb;
    const double uf = s0 - pf.tb;
    const double gap0 = scene.gap + pf.pos(uf) - pr.pos(ur);
    const double g1 = pf.vel(uf) - pr.vel(ur);
    const double g2 = pf.acc(uf) - pr.acc(ur);
    const double g3 = pf.jerk - pr.jerk;

    std::array<double, 4> knots{0.0, len, len, len};
    std::array<double, 2> crit{};
    const std::size_t nc = interior_roots(g3 / 2.0, g2, g1, len, crit);
    std::size_t nk = 1;
    for (std::size_t k = 0; k < nc; ++k) knots[nk++] = crit[k];
    knots[nk++] = len;

    for (std::size_t k = 0; k < nk; ++k) {
      res.min_gap = std::min(res.min_gap, cubic(gap0, g1, g2, g3, knots[k]));
    }
    const double g0 = gap0 + kContactTolerance;
    for (std::size_t k = 0; k + 1 < nk; ++k) {
      double lo = knots[k];
      double hi = knots[k + 1];
      const double glo = cubic(g0, g1, g2, g3, lo);
      if (glo <= 0.0) {
        res.collision_tau = s0 + lo;
        break;
      }
      if (cubic(g0, g1, g2, g3, hi) > 0.0) continue;
      // monotone on [lo, hi]: bisect for the contact instant
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + s0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cubic(g0, g1, g2, g3, mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      res.collision_tau = s0 + hi;
      break;
    }
  }

  res.scene.rear = {scene.rear.x + mr.x, mr.v, mr.a};
  res.scene.front = {scene.front.x + mf.x, mf.v, mf.a};
  res.scene.gap = scene.gap + mf.x - mr.x;
  res.min_gap = std::min(res.min_gap, res.scene.gap);
  if (!res.collision_tau && res.scene.gap <= -kContactTolerance) res.collision_tau = dt;
  return res;
}

StepResult step(
  const SceneState & scene, const AccelCommand & rear, const AccelCommand & front, double dt)
{
  const std::array<CommandPiece, 1> r{CommandPiece{0.0, rear}};
  const std::array<CommandPiece, 1> f{CommandPiece{0.0, front}};
  return step(scene, r, f, dt);
}

Trace run(const Scenario & sc)
{
  validate(sc);
  const RssParams & p = sc.params;

  FrontSource source = sc.front;
  const std::uint64_t script_seed =
    source.kind == FrontSource::Kind::Script ? 0 : source.seed;
  const FrontScript script = resolve_front(source, p, sc.horizon);

  Trace trace;
  trace.header.scenario_hash = scenario_hash(sc);
  trace.header.seed = sc.seed;
  trace.header.script_seed = script_seed;
  trace.header.params = p;
  trace.header.dt = sc.dt;

  Controller ctrl = Controller::none();
  switch (sc.controller.kind) {
    case ControllerKind::None:
      break;
    case ControllerKind::Apb:
      ctrl = Controller::apb(p, ApbConfig{sc.dt});
      break;
    case ControllerKind::Aeb:
      ctrl = Controller::aeb(sc.controller.aeb);
      break;
  }
  if (sc.controller.kind != ControllerKind::None && sc.controller.p_fail > 0.0) {
    ctrl = with_failure(
      std::move(ctrl), sc.controller.p_fail, derive_seed(sc.seed, kFailureStream), sc.episode_window);
  }

  std::mt19937_64 sensor_rng(derive_seed(sc.seed, kSensorStream));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SceneState scene = sc.initial;
  scene.rear.x = 0.0;
  scene.front.x = scene.gap;
  trace.min_gap = scene.gap;

  DriverState driver_state;
  const auto steps = std::max<long long>(1, std::llround(sc.horizon / sc.dt));
  trace.records.reserve(static_cast<std::size_t>(std::min<long long>(steps, 1 << 16)));

  bool was_dangerous = false;
  bool episode_open = false;
  double last_dangerous = 0.0;

  for (long long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    const SafetyVerdict truth = is_dangerous(scene, p);

    SceneState observed = scene;
    if (sc.sensor.range_noise_sigma > 0.0) {
      observed.gap += sc.sensor.range_noise_sigma * noise(sensor_rng);
    }
    const bool missed = unit(sensor_rng) < sc.sensor.miss_rate;
    const bool ghost = unit(sensor_rng) < sc.sensor.ghost_rate;
    if (missed) {
      observed.gap = kInf;
      observed.front = {kInf, scene.rear.v, 0.0};
    }
    if (ghost && sc.sensor.ghost_gap < observed.gap) {
      observed.gap = sc.sensor.ghost_gap;
      observed.front = {scene.rear.x + sc.sensor.ghost_gap, 0.0, 0.0};
    }

    const double driver = driver_step(sc.driver, driver_state, scene, t);
    bool overridden = false;
    for (const auto & o : sc.controller.overrides) overridden |= (t >= o.from && t < o.to);
    const Controller::Output out = ctrl.step(observed, driver, t, overridden);

    TraceRecord rec;
    rec.t = t;
    rec.rear = scene.rear;
    rec.front = scene.front;
    rec.gap = scene.gap;
    rec.d_safe = truth.d_safe;
    rec.dangerous = truth.dangerous;
    rec.mode = out.mode;
    rec.cmd_accel = out.command.initial();
    rec.driver_accel = driver;
    rec.controller_active = out.active;
    if (out.active) {
      rec.controller_accel = out.command.ramp ? out.command.ramp->at(0.0) : out.command.initial();
    }
    trace.records.push_back(rec);

    if (truth.dangerous && !was_dangerous) {
      trace.events.push_back({t, EventKind::DangerOnset});
      if (!episode_open || t - last_dangerous > sc.episode_window) ++trace.dangerous_episodes;
      episode_open = true;
    } else if (!truth.dangerous && was_dangerous) {
      trace.events.push_back({t, EventKind::DangerExit});
    }
    if (truth.dangerous) last_dangerous = t;
    was_dangerous = truth.dangerous;
    if (out.started) {
      trace.events.push_back({t, EventKind::InterventionStart});
      ++trace.interventions;
    }
    if (out.ended) trace.events.push_back({t, EventKind::InterventionEnd});
    if (out.suppressed && (trace.events.empty() ||
                           trace.events.back().kind != EventKind::InterventionSuppressed ||
                           t - trace.events.back().t > sc.dt * 1.5)) {
      trace.events.push_back({t, EventKind::InterventionSuppressed});
    }

    // front commands: script segments starting inside this step
    std::vector<CommandPiece> front_cmd;
    front_cmd.push_back({0.0, AccelCommand{script.accel_at(t), std::nullopt}});
    for (const auto & s : script.segments) {
      if (s.t > t && s.t < t + sc.dt) {
        front_cmd.push_back({s.t - t, AccelCommand{s.accel, std::nullopt}});
      }
    }
    const std::array<CommandPiece, 1> rear_cmd{CommandPiece{0.0, out.command}};

    const StepResult res = step(scene, rear_cmd, front_cmd, sc.dt);
    trace.min_gap = std::min(trace.min_gap, res.min_gap);
    if (res.collision_tau) {
      trace.collision_time = t + *res.collision_tau;
      trace.events.push_back({*trace.collision_time, EventKind::Collision});
      break;
    }
    scene = res.scene;
    if (scene.rear.v <= 0.0 && scene.front.v <= 0.0) {
      // both parked; nothing further can change unless someone drives off
      const double t_next = t + sc.dt;
      const bool front_moves_later = std::any_of(
        script.segments.begin(), script.segments.end(),
        [&](const ScriptSegment & s) { return s.t >= t_next && s.accel > 0.0; });
      if (!front_moves_later && script.accel_at(t_next) <= 0.0) {
        trace.events.push_back({t_next, EventKind::Standstill});
        break;
      }
    }
  }
  return trace;
}

}  // namespace apb
