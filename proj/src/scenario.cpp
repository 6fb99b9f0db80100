#include "ltp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ltp/errors.hpp"
#include "ltp/rng.hpp"

namespace ltp {

namespace {

constexpr double kArcSpacing = 0.25;
constexpr double kSwerveAmplitude = 2.0;
constexpr double kSwerveLength = 20.0;
constexpr double kRightThenLeftRadius = 5.0;
constexpr double kRightThenLeftMinGap = 8.0;
constexpr double kRightThenLeftMaxGap = 12.0;
constexpr double kYieldSpeed = 0.5;
constexpr double kRushBoost = 5.0;
constexpr double kRushCap = 14.0;
constexpr double kAgentSpeedGain = 2.0;
constexpr double kAgentPreview = 0.5;
constexpr double kHoldTriggerSpeed = 0.05;
constexpr double kHoldTriggerWindow = 5.0;

// Exact quarter-turn rotation from the canonical south-arm frame.
Vec2 to_world(Vec2 p, Approach a) {
  switch (a) {
    case Approach::kSouth: return p;
    case Approach::kWest: return {p.y, -p.x};
    case Approach::kNorth: return {-p.x, -p.y};
    case Approach::kEast: return {-p.y, p.x};
  }
  return p;
}

class RouteBuilder {
 public:
  explicit RouteBuilder(Vec2 start) { pts_.push_back(start); }

  void line_to(Vec2 p) { push(p, 0.0); }

  void arc(Vec2 centre, double radius, double from, double to) {
    const auto n = static_cast<int>(std::ceil(radius * std::abs(to - from) / kArcSpacing));
    const double s0 = length_;
    for (int i = 1; i <= n; ++i) {
      const double th = from + (to - from) * i / n;
      push(centre + unit_from_angle(th) * radius, 1.0 / radius);
    }
    zones_.push_back({s0, length_, std::sqrt(kAgentLateralAccel * radius)});
  }

  // Sideways cosine bump of `amp` towards -x while travelling +y.
  void bump(double amp, double len) {
    const Vec2 base = pts_.back();
    const double w = 2.0 * std::numbers::pi / len;
    const auto n = static_cast<int>(std::ceil(len / kArcSpacing));
    const double s0 = length_;
    double kmax = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double u = len * i / n;
      const double um = len * (i - 0.5) / n;
      const double dx = -0.5 * amp * w * std::sin(w * um);
      const double ddx = -0.5 * amp * w * w * std::cos(w * um);
      const double k = std::abs(ddx) / std::pow(1.0 + dx * dx, 1.5);
      kmax = std::max(kmax, k);
      push({base.x - 0.5 * amp * (1.0 - std::cos(w * u)), base.y + u}, k);
    }
    zones_.push_back({s0, length_, std::sqrt(kAgentLateralAccel / kmax)});
  }

  Vec2 back() const { return pts_.back(); }
  double length() const { return length_; }

  RouteGeometry finish(Approach a) {
    RouteGeometry g;
    for (const Vec2& p : pts_) g.points.push_back(to_world(p, a));
    g.curvature = curv_;
    g.turn_zones = zones_;
    return g;
  }

 private:
  void push(Vec2 p, double k) {
    length_ += distance(pts_.back(), p);
    pts_.push_back(p);
    curv_.push_back(k);
  }

  std::vector<Vec2> pts_;
  std::vector<double> curv_;
  std::vector<SpeedZone> zones_;
  double length_ = 0.0;
};

Route route_for(BehaviorLabel label) {
  switch (label) {
    case BehaviorLabel::kRightTurn: return Route::kRight;
    case BehaviorLabel::kLeftTurn: return Route::kLeft;
    case BehaviorLabel::kRightThenLeft: return Route::kRightThenLeft;
    case BehaviorLabel::kSwerve: return Route::kSwerve;
    default: return Route::kStraight;
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("scenario: " + what);
  };
  require(lane_width > 0.0, "lane_width must be positive");
  require(stop_line_offset > lane_width, "stop_line_offset must exceed lane_width");
  require(approach_length > max_spawn_distance + 15.0, "approach_length too short for spawn range and history");
  require(exit_length > 0.0 && ego_exit_length > 0.0, "exit lengths must be positive");
  require(ego_spawn_s >= ego_speed * dt * static_cast<double>(history_steps), "ego_spawn_s leaves no room for history");
  require(ego_spawn_s < ego_approach_length, "ego must spawn before the stop line");
  require(ego_speed > 0.0, "ego_speed must be positive");
  require(min_agents <= max_agents && max_agents <= kMaxSurroundingAgents, "agent count range must lie in [0, 8]");
  require(min_agent_speed > 0.0 && min_agent_speed <= max_agent_speed && max_agent_speed <= kSpeedCap,
          "agent speed range invalid");
  require(min_spawn_distance >= 0.0 && min_spawn_distance <= max_spawn_distance, "spawn distance range invalid");
  require(min_spawn_gap >= 0.0, "min_spawn_gap must be non-negative");
  require(episode_length > 0.0 && dt > 0.0, "episode_length and dt must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < label_weights.size(); ++i) {
    require(label_weights[i] > 0.0, "label weights must be positive");
    require(i == 0 || label_weights[i] <= label_weights[i - 1], "label weights must be nonincreasing");
    sum += label_weights[i];
  }
  require(std::abs(sum - 1.0) < 1e-9, "label weights must sum to 1");
}

RouteGeometry build_route(const ScenarioConfig& config, Approach approach, Route route, double approach_length,
                          double exit_length, const RouteParams& params) {
  const double xl = 0.5 * config.lane_width;
  const double b = config.stop_line_offset;
  constexpr double pi = std::numbers::pi;

  RouteBuilder rb({xl, -b - approach_length});
  if (route == Route::kSwerve) {
    rb.line_to({xl, -b - 1.0 - kSwerveLength});
    rb.bump(kSwerveAmplitude, kSwerveLength);
  }
  rb.line_to({xl, -b});
  const double entry_s = rb.length();
  double exit_s = 0.0;

  switch (route) {
    case Route::kStraight:
      rb.line_to({xl, b});
      exit_s = rb.length();
      rb.line_to({xl, b + exit_length});
      break;
    case Route::kSwerve:
      rb.line_to({xl, b});
      exit_s = rb.length();
      rb.line_to({xl, b + exit_length});
      break;
    case Route::kRight:
      rb.arc({b, -b}, b - xl, pi, 0.5 * pi);
      exit_s = rb.length();
      rb.line_to({b + exit_length, -xl});
      break;
    case Route::kLeft:
      rb.arc({-b, -b}, b + xl, 0.0, 0.5 * pi);
      exit_s = rb.length();
      rb.line_to({-b - exit_length, xl});
      break;
    case Route::kRightThenLeft: {
      rb.arc({b, -b}, b - xl, pi, 0.5 * pi);
      exit_s = rb.length();
      if (params.gap > 0.0) rb.line_to({b + params.gap, -xl});
      const Vec2 p = rb.back();
      const double r = kRightThenLeftRadius;
      rb.arc({p.x, p.y + r}, r, -0.5 * pi, 0.0);
      rb.line_to({p.x + r, p.y + r + exit_length});
      break;
    }
  }
  RouteGeometry g = rb.finish(approach);
  g.entry_s = entry_s;
  g.exit_s = exit_s;
  return g;
}

double AgentScript::curvature_at(double s) const {
  if (curvature.empty()) return 0.0;
  auto it = std::upper_bound(curvature_s.begin(), curvature_s.end(), s);
  const auto idx = it == curvature_s.begin() ? 0 : static_cast<std::size_t>(it - curvature_s.begin()) - 1;
  return curvature[std::min(idx, curvature.size() - 1)];
}

double AgentScript::target_speed(double s, bool stop_active) const {
  double v = cruise_speed;
  for (const auto& z : zones) {
    if (s < z.start) {
      v = std::min(v, std::sqrt(z.speed * z.speed + 2.0 * kAgentBrakingPlan * (z.start - s)));
    } else if (s <= z.end) {
      v = std::min(v, z.speed);
    }
  }
  if (stop_active && stop_s) {
    v = std::min(v, std::sqrt(2.0 * kAgentBrakingPlan * std::max(0.0, *stop_s - s)));
  }
  return v;
}

double AgentScript::required_deceleration(double s, double v, bool stop_active) const {
  double need = 0.0;
  auto meet = [&](double at, double speed) {
    if (at > s && v > speed) need = std::max(need, (v * v - speed * speed) / (2.0 * (at - s)));
  };
  for (const auto& z : zones) meet(z.start, z.speed);
  if (stop_active && stop_s) meet(*stop_s, 0.0);
  return need;
}

void AgentScript::place(double s) {
  initial_s = s;
  initial_speed = std::min(requested_speed, target_speed(s, stop_s.has_value()));
}

AgentScript make_agent_script(const ScenarioConfig& config, AgentId id, const AgentSpawn& spawn) {
  const RouteGeometry g = build_route(config, spawn.approach, spawn.route, config.approach_length,
                                     config.exit_length, {spawn.gap});
  AgentScript a;
  a.id = id;
  a.label = spawn.label;
  a.approach = spawn.approach;
  a.route = spawn.route;
  a.path = std::make_shared<const ReferencePath>(g.points);
  a.curvature = g.curvature;
  a.curvature_s.reserve(g.curvature.size());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.points.size(); ++i) {
    a.curvature_s.push_back(s);
    s += distance(g.points[i], g.points[i + 1]);
  }
  a.zones = g.turn_zones;
  a.cruise_speed = spawn.speed;
  a.requested_speed = spawn.speed;

  switch (spawn.label) {
    case BehaviorLabel::kDecelerateYield:
      a.zones.push_back({g.entry_s - 1.0, g.entry_s + 1.0, kYieldSpeed});
      break;
    case BehaviorLabel::kAccelerateRush:
      a.cruise_speed = std::min(spawn.speed + kRushBoost, kRushCap);
      break;
    case BehaviorLabel::kStopMidIntersection:
      a.stop_s = g.entry_s + config.stop_line_offset;
      a.hold_time = spawn.hold_time;
      break;
    default:
      break;
  }
  a.place(g.entry_s - spawn.spawn_distance);
  return a;
}

AgentRuntime advance_agent(const AgentScript& script, const AgentRuntime& rt, double dt) {
  AgentRuntime next = rt;
  if (dt == 0.0) return next;
  const bool stop_active = script.stop_s.has_value() && !rt.hold_done;
  if (rt.holding) {
    next.accel = 0.0;
    next.speed = 0.0;
    next.hold_elapsed = rt.hold_elapsed + dt;
    if (next.hold_elapsed >= script.hold_time - 1e-9) {
      next.holding = false;
      next.hold_done = true;
    }
    return next;
  }
  // The preview point anticipates zones; the current point keeps the agent
  // from speeding up before it has left one.
  const double target = std::min(script.target_speed(rt.s, stop_active),
                                  script.target_speed(rt.s + kAgentPreview * rt.speed, stop_active));
  double accel = kAgentSpeedGain * (target - rt.speed);
  // Once on the braking curve, follow it exactly so zones are entered at speed.
  const double need = script.required_deceleration(rt.s, rt.speed, stop_active);
  if (need >= kAgentBrakingPlan) accel = std::min(accel, -need);
  next.accel = std::clamp(accel, -kAgentMaxDecel, kAgentMaxAccel);
  next.speed = std::max(0.0, rt.speed + next.accel * dt);
  next.s = rt.s + 0.5 * (rt.speed + next.speed) * dt;
  if (stop_active && next.speed < kHoldTriggerSpeed && next.s >= *script.stop_s - kHoldTriggerWindow) {
    next.holding = true;
    next.speed = 0.0;
    next.hold_elapsed = 0.0;
  }
  return next;
}

std::optional<ConflictPoint> find_conflict(const ScenarioConfig& config, const ReferencePath& ego_path,
                                           const AgentScript& agent) {
  constexpr double kStep = 0.5;
  constexpr double kConflictDistance = 3.0;
  std::vector<Vec2> ego_pts;
  std::vector<double> ego_s;
  const double ego_end = std::min(ego_path.length(), ego_completion_s(config) + 5.0);
  for (double s = config.ego_spawn_s; s <= ego_end; s += kStep) {
    ego_pts.push_back(ego_path.point_at(s));
    ego_s.push_back(s);
  }
  const double agent_end = std::min(agent.path->length(), agent.initial_s + config.max_spawn_distance + 60.0);
  for (double s = agent.initial_s; s <= agent_end; s += kStep) {
    const Vec2 p = agent.path->point_at(s);
    for (std::size_t i = 0; i < ego_pts.size(); ++i) {
      if (distance(p, ego_pts[i]) < kConflictDistance) return ConflictPoint{s, ego_s[i]};
    }
  }
  return std::nullopt;
}

double time_to_reach(const AgentScript& agent, double s, double dt) {
  constexpr double kMaxTime = 120.0;
  AgentRuntime rt{agent.initial_s, agent.initial_speed};
  double t = 0.0;
  while (rt.s < s && t < kMaxTime) {
    rt = advance_agent(agent, rt, dt);
    t += dt;
  }
  return t;
}

double spawn_distance_for_arrival(const ScenarioConfig& config, AgentScript agent, double entry_s,
                                  const ConflictPoint& conflict, double arrival_time) {
  // Arclength of the conflict on the agent path does not depend on the spawn point.
  auto arrival = [&](double d) {
    agent.place(entry_s - d);
    return time_to_reach(agent, conflict.agent_s, config.dt);
  };
  double lo = config.min_spawn_distance;
  double hi = config.max_spawn_distance;
  if (arrival(lo) >= arrival_time) return lo;
  if (arrival(hi) <= arrival_time) return hi;
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    (arrival(mid) < arrival_time ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EpisodeSpec sample_episode(const ScenarioConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  EpisodeSpec spec;
  spec.seed = seed;
  const std::vector<double> weights(config.label_weights.begin(), config.label_weights.end());
  const auto count = static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(config.min_agents), static_cast<std::int64_t>(config.max_agents)));
  if (count == 0) return spec;
  constexpr std::array<Approach, 3> kArms{Approach::kWest, Approach::kNorth, Approach::kEast};
  std::array<std::vector<double>, 4> taken;
  const ReferencePath ego_path = ego_reference_path(config);

  for (std::size_t i = 0; i < count; ++i) {
    AgentSpawn sp;
    sp.label = kAllBehaviorLabels[rng.categorical(weights)];
    const auto arm = static_cast<std::size_t>(rng.uniform_int(0, 2));
    sp.approach = sp.label == BehaviorLabel::kRightThenLeft ? Approach::kWest
                  : sp.label == BehaviorLabel::kSwerve      ? Approach::kWest
                                                            : kArms[arm];
    sp.route = route_for(sp.label);
    sp.speed = rng.uniform(config.min_agent_speed, config.max_agent_speed);
    sp.gap = rng.uniform(kRightThenLeftMinGap, kRightThenLeftMaxGap);
    sp.hold_time = rng.uniform(2.0, 4.0);

    sp.spawn_distance = config.max_spawn_distance;
    AgentScript probe = make_agent_script(config, static_cast<AgentId>(i + 1), sp);
    const double entry_s = probe.initial_s + sp.spawn_distance;
    const auto conflict = find_conflict(config, ego_path, probe);

    auto& used = taken[static_cast<std::size_t>(sp.approach)];
    for (int attempt = 0; attempt < 20; ++attempt) {
      const double offset = rng.uniform(-config.max_arrival_offset, config.max_arrival_offset);
      const double uniform_distance = rng.uniform(config.min_spawn_distance, config.max_spawn_distance);
      if (conflict) {
        const double ego_arrival = (conflict->ego_s - config.ego_spawn_s) / config.ego_speed;
        sp.spawn_distance =
            spawn_distance_for_arrival(config, probe, entry_s, *conflict, std::max(0.0, ego_arrival + offset));
      } else {
        sp.spawn_distance = uniform_distance;
      }
      const bool clear = std::all_of(used.begin(), used.end(), [&](double d) {
        return std::abs(d - sp.spawn_distance) >= config.min_spawn_gap;
      });
      if (clear) break;
    }
    used.push_back(sp.spawn_distance);
    probe.place(entry_s - sp.spawn_distance);
    spec.agents.push_back(std::move(probe));
  }
  return spec;
}

ReferencePath ego_reference_path(const ScenarioConfig& config) {
  const RouteGeometry g =
      build_route(config, Approach::kSouth, Route::kLeft, config.ego_approach_length, config.ego_exit_length);
  return ReferencePath(g.points);
}

double ego_completion_s(const ScenarioConfig& config) {
  return build_route(config, Approach::kSouth, Route::kLeft, config.ego_approach_length, config.ego_exit_length)
      .exit_s;
}

}  // namespace ltp
