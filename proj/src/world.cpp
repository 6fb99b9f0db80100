#include "ltp/world.hpp"

#include <algorithm>
#include <cmath>

namespace ltp {

namespace {

// Lateral offset of the trajectory at arclength s; flat beyond its ends.
double offset_at(const CandidateTrajectory& traj, double s) {
  const auto& p = traj.samples;
  if (s <= p.front().s) return p.front().d;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (s <= p[i].s) {
      const double span = p[i].s - p[i - 1].s;
      const double u = span > 1e-12 ? (s - p[i - 1].s) / span : 1.0;
      return p[i - 1].d + u * (p[i].d - p[i - 1].d);
    }
  }
  return p.back().d;
}

}  // namespace

WorldState initial_world(const ScenarioConfig& config, const EpisodeSpec& spec, const ReferencePath& ego_path) {
  WorldState w;
  w.ego.position = ego_path.point_at(config.ego_spawn_s);
  w.ego.heading = ego_path.heading_at(config.ego_spawn_s);
  w.ego.speed = config.ego_speed;
  for (const auto& a : spec.agents) {
    AgentRuntime rt;
    rt.s = a.initial_s;
    rt.speed = a.initial_speed;
    w.agents.push_back(rt);
  }
  return w;
}

AgentState agent_state(const AgentScript& script, const AgentRuntime& rt) {
  const double h = script.path->heading_at(rt.s);
  return {script.path->point_at(rt.s), unit_from_angle(h) * rt.speed, normalize_angle(h), script.id};
}

AgentState ego_state(const EgoVehicle& ego, const EgoParams& params) {
  // The centre of gravity moves at the slip angle off the body axis.
  const double beta = std::atan(params.rear_to_cg / params.wheelbase * std::tan(ego.steer));
  return {ego.position, unit_from_angle(ego.heading + beta) * ego.speed, ego.heading, 0};
}

EgoVehicle track_trajectory(const EgoVehicle& ego, const CandidateTrajectory& traj, const ReferencePath& path,
                            double ego_s, double dt, const EgoParams& params) {
  EgoVehicle next = ego;
  if (dt == 0.0 || traj.samples.empty()) return next;

  // Pursuit from the rear axle follows circular paths without offset.
  const Vec2 rear = ego.position - unit_from_angle(ego.heading) * params.rear_to_cg;
  const double lookahead = std::clamp(0.5 * ego.speed + 2.0, 2.0, 8.0);
  const double s_target = std::clamp(ego_s - params.rear_to_cg + lookahead, 0.0, path.length());
  const CartesianPose target = frenet_to_cartesian(path, {s_target, offset_at(traj, s_target), 0, 0, 0, 0});
  const Vec2 to_target = target.position - rear;
  const double dist = std::max(to_target.norm(), 1e-6);
  const double alpha = normalize_angle(std::atan2(to_target.y, to_target.x) - ego.heading);
  const double steer = std::clamp(std::atan(2.0 * params.wheelbase * std::sin(alpha) / dist), -params.max_steer,
                                  params.max_steer);

  const FrenetPoint& ref = traj.samples.size() > 1 ? traj.samples[1] : traj.samples[0];
  const double accel = std::clamp(ref.s_ddot + params.speed_gain * (ref.s_dot - ego.speed), -params.max_decel,
                                  params.max_accel);

  const double beta = std::atan(params.rear_to_cg / params.wheelbase * std::tan(steer));
  next.position = ego.position + unit_from_angle(ego.heading + beta) * (ego.speed * dt);
  next.heading = normalize_angle(ego.heading + ego.speed / params.rear_to_cg * std::sin(beta) * dt);
  next.speed = std::max(0.0, ego.speed + accel * dt);
  next.accel = accel;
  next.steer = steer;
  return next;
}

std::optional<AgentId> ground_truth_collision(const EgoVehicle& ego, const std::vector<AgentScript>& agents,
                                              const std::vector<AgentRuntime>& runtimes,
                                              const VehicleFootprint& footprint) {
  const OrientedBox ego_box = make_body_box(ego.position, ego.heading, footprint);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentState st = agent_state(agents[i], runtimes[i]);
    if (boxes_overlap(ego_box, make_body_box(st.position, st.heading, footprint))) return agents[i].id;
  }
  return std::nullopt;
}

WorldState step_world(const WorldState& state, const std::vector<AgentScript>& agents,
                      const CandidateTrajectory& ego_traj, const ReferencePath& ego_path, double ego_s, double dt,
                      const VehicleFootprint& footprint, const EgoParams& params) {
  if (dt == 0.0) return state;
  WorldState next = state;
  next.time = state.time + dt;
  for (std::size_t i = 0; i < agents.size(); ++i) next.agents[i] = advance_agent(agents[i], state.agents[i], dt);
  next.ego = track_trajectory(state.ego, ego_traj, ego_path, ego_s, dt, params);
  if (!next.collision) {
    next.colliding_agent = ground_truth_collision(next.ego, agents, next.agents, footprint);
    next.collision = next.colliding_agent.has_value();
  }
  return next;
}

}  // namespace ltp
