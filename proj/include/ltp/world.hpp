#pragma once

#include <optional>
#include <vector>

#include "ltp/collision.hpp"
#include "ltp/lattice.hpp"
#include "ltp/scenario.hpp"

namespace ltp {

/// Kinematic bicycle referenced at the centre of gravity.
struct EgoParams {
  double wheelbase = 2.7;
  double rear_to_cg = 1.35;
  double max_steer = 0.6;
  double max_accel = 4.0;
  double max_decel = 8.0;
  double speed_gain = 2.0;
};

struct EgoVehicle {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double steer = 0.0;

  bool operator==(const EgoVehicle&) const = default;
};

struct WorldState {
  double time = 0.0;
  EgoVehicle ego;
  std::vector<AgentRuntime> agents;
  /// Set once the ego and any agent footprint overlap.
  bool collision = false;
  std::optional<AgentId> colliding_agent;

  bool operator==(const WorldState&) const = default;
};

/// Ego at its spawn point at cruise speed, agents at their script starts.
WorldState initial_world(const ScenarioConfig& config, const EpisodeSpec& spec, const ReferencePath& ego_path);

AgentState agent_state(const AgentScript& script, const AgentRuntime& rt);
AgentState ego_state(const EgoVehicle& ego, const EgoParams& params = {});

/// Pure pursuit towards the trajectory point one lookahead ahead plus
/// proportional speed tracking with feed-forward, then one bicycle step.
EgoVehicle track_trajectory(const EgoVehicle& ego, const CandidateTrajectory& traj, const ReferencePath& path,
                            double ego_s, double dt, const EgoParams& params = {});

/// Advances every agent and the ego by dt and updates the collision flag
/// from body footprints. dt = 0 returns the state unchanged.
WorldState step_world(const WorldState& state, const std::vector<AgentScript>& agents,
                      const CandidateTrajectory& ego_traj, const ReferencePath& ego_path, double ego_s, double dt,
                      const VehicleFootprint& footprint, const EgoParams& params = {});

/// Id of the first agent whose body footprint overlaps the ego, if any.
std::optional<AgentId> ground_truth_collision(const EgoVehicle& ego, const std::vector<AgentScript>& agents,
                                              const std::vector<AgentRuntime>& runtimes,
                                              const VehicleFootprint& footprint);

}  // namespace ltp
