#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ltp/behavior_label.hpp"
#include "ltp/driving_case.hpp"
#include "ltp/frenet.hpp"

namespace ltp {

/// Four-way intersection of two perpendicular two-lane roads centred on the
/// origin, with right-hand traffic. The ego approaches from the south and
/// turns left; surrounding agents approach from the other three arms.
struct ScenarioConfig {
  double lane_width = 3.5;
  /// Distance from the intersection centre to each stop line.
  double stop_line_offset = 6.0;
  /// Agent route legs before the stop line and after the intersection.
  double approach_length = 100.0;
  double exit_length = 250.0;

  double ego_approach_length = 60.0;
  double ego_exit_length = 60.0;
  double ego_spawn_s = 15.0;
  double ego_speed = 6.0;

  std::size_t min_agents = 0;
  std::size_t max_agents = 4;
  /// Head-to-tail frequencies in taxonomy order.
  std::array<double, kBehaviorLabelCount> label_weights{0.40, 0.25, 0.15, 0.08, 0.06, 0.03, 0.02, 0.01};
  double min_agent_speed = 5.0;
  double max_agent_speed = 9.0;
  /// Spawn distance before the stop line.
  double min_spawn_distance = 5.0;
  double max_spawn_distance = 80.0;
  /// Agents with a route crossing the ego's are placed so that, at free-flow
  /// speeds, they reach the crossing within this many seconds of the ego.
  double max_arrival_offset = 4.0;
  /// Minimum spacing between agents spawned on the same arm.
  double min_spawn_gap = 10.0;

  double episode_length = 20.0;
  double dt = 0.1;
  std::size_t history_steps = 10;
  std::uint64_t seed = 1;

  /// Throws ConfigError when a field is out of range or the weights are not
  /// positive, summing to 1 and nonincreasing.
  void validate() const;
};

enum class Approach { kSouth, kWest, kNorth, kEast };
enum class Route { kStraight, kRight, kLeft, kRightThenLeft, kSwerve };

struct SpeedZone {
  double start = 0.0;
  double end = 0.0;
  double speed = 0.0;
};

/// Centerline and design curvature of a route, in world coordinates.
struct RouteGeometry {
  std::vector<Vec2> points;
  /// Unsigned curvature at each point (1/m).
  std::vector<double> curvature;
  /// Arclength of the stop line and of the far edge of the intersection.
  double entry_s = 0.0;
  double exit_s = 0.0;
  /// Curvature-limited stretches.
  std::vector<SpeedZone> turn_zones;
};

struct RouteParams {
  /// Straight run between the right turn and the left turn of a right-then-left route.
  double gap = 0.0;
};

/// Builds a route for an approach arm. `approach_length` is measured before
/// the stop line, `exit_length` after the intersection.
RouteGeometry build_route(const ScenarioConfig& config, Approach approach, Route route, double approach_length,
                          double exit_length, const RouteParams& params = {});

/// Waypoint script of one surrounding agent.
struct AgentScript {
  AgentId id = 0;
  BehaviorLabel label = BehaviorLabel::kStraightThrough;
  Approach approach = Approach::kNorth;
  Route route = Route::kStraight;
  std::shared_ptr<const ReferencePath> path;
  std::vector<double> curvature_s;
  std::vector<double> curvature;
  std::vector<SpeedZone> zones;
  double cruise_speed = 0.0;
  /// Stop-and-hold point, if any.
  std::optional<double> stop_s;
  double hold_time = 0.0;
  double initial_s = 0.0;
  /// Spawn speed, capped so the first zone ahead stays reachable.
  double initial_speed = 0.0;
  double requested_speed = 0.0;

  double curvature_at(double s) const;
  /// Speed the agent aims for at s, honouring zones ahead. `stop_active`
  /// keeps the hold point in force.
  double target_speed(double s, bool stop_active) const;
  /// Deceleration needed to meet the tightest zone or hold point ahead at
  /// speed v; 0 when none constrains.
  double required_deceleration(double s, double v, bool stop_active) const;
  /// Moves the spawn point to `s` and recomputes the initial speed.
  void place(double s);
};

inline constexpr double kAgentLateralAccel = 2.5;
inline constexpr double kAgentBrakingPlan = 2.0;
inline constexpr double kAgentMaxAccel = 2.5;
inline constexpr double kAgentMaxDecel = 3.0;

struct AgentSpawn {
  BehaviorLabel label = BehaviorLabel::kStraightThrough;
  Approach approach = Approach::kNorth;
  Route route = Route::kStraight;
  double spawn_distance = 20.0;
  double speed = 7.0;
  double gap = 0.0;
  double hold_time = 3.0;
};

AgentScript make_agent_script(const ScenarioConfig& config, AgentId id, const AgentSpawn& spawn);

/// First stretch where an agent route passes within a car width of the ego route.
struct ConflictPoint {
  double agent_s = 0.0;
  double ego_s = 0.0;
};

std::optional<ConflictPoint> find_conflict(const ScenarioConfig& config, const ReferencePath& ego_path,
                                           const AgentScript& agent);

/// Seconds the agent needs from its initial state to reach arclength `s`.
double time_to_reach(const AgentScript& agent, double s, double dt);

/// Spawn distance in [min, max] that brings the agent to `conflict` closest
/// to `arrival_time`.
double spawn_distance_for_arrival(const ScenarioConfig& config, AgentScript agent, double entry_s,
                                  const ConflictPoint& conflict, double arrival_time);

struct AgentRuntime {
  double s = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double hold_elapsed = 0.0;
  bool holding = false;
  bool hold_done = false;

  bool operator==(const AgentRuntime&) const = default;
};

/// Advances an agent along its script: proportional speed tracking towards
/// the previewed target speed, then a hold at the stop point if scripted.
AgentRuntime advance_agent(const AgentScript& script, const AgentRuntime& rt, double dt);

struct EpisodeSpec {
  std::uint64_t seed = 0;
  std::vector<AgentScript> agents;
};

/// Agent count, labels, arms and spawn states drawn from `seed`.
EpisodeSpec sample_episode(const ScenarioConfig& config, std::uint64_t seed);

/// Ego route: south approach, left turn, west exit.
ReferencePath ego_reference_path(const ScenarioConfig& config);
/// Arclength at which the ego leaves the intersection.
double ego_completion_s(const ScenarioConfig& config);

}  // namespace ltp
