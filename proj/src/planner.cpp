#include "ltp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltp/errors.hpp"

namespace ltp {

bool check_collision(const CandidateTrajectory& traj, const std::vector<FutureTrajectory>& futures,
                     const VehicleFootprint& ego_fp, const VehicleFootprint& agent_fp, const ReferencePath& path) {
  if (futures.empty() || traj.samples.size() < 2) return false;
  std::vector<std::vector<double>> headings;
  headings.reserve(futures.size());
  for (const auto& f : futures) headings.push_back(future_headings(f));

  const std::size_t steps = traj.samples.size() - 1;
  for (std::size_t j = 1; j <= steps; ++j) {
    std::optional<OrientedBox> ego_box;
    for (std::size_t a = 0; a < futures.size(); ++a) {
      if (j > futures[a].positions.size()) continue;
      if (!ego_box) {
        FrenetPoint fp = traj.samples[j];
        fp.s = std::clamp(fp.s, 0.0, path.length());
        const CartesianPose pose = frenet_to_cartesian(path, fp);
        ego_box = make_box(pose.position, pose.heading, ego_fp);
      }
      const OrientedBox agent_box = make_box(futures[a].positions[j - 1], headings[a][j - 1], agent_fp);
      if (boxes_overlap(*ego_box, agent_box)) return true;
    }
  }
  return false;
}

Cost member_cost(const CandidateTrajectory& traj, const std::vector<FutureTrajectory>& member_futures,
                 const CostWeights& weights, const VehicleFootprint& ego_fp, const VehicleFootprint& agent_fp,
                 const ReferencePath& path) {
  if (check_collision(traj, member_futures, ego_fp, agent_fp, path)) return Cost::infinite();
  return Cost::finite(base_cost(traj, weights));
}

WorstCase worst_case_cost(const CandidateTrajectory& traj, const PredictedFutures& predicted,
                          const CostWeights& weights, const VehicleFootprint& ego_fp,
                          const VehicleFootprint& agent_fp, const ReferencePath& path) {
  if (predicted.members.empty()) throw DomainError("worst-case cost needs at least one member");
  WorstCase worst{member_cost(traj, predicted.members[0], weights, ego_fp, agent_fp, path), 0};
  for (std::size_t m = 1; m < predicted.members.size(); ++m) {
    const Cost c = member_cost(traj, predicted.members[m], weights, ego_fp, agent_fp, path);
    if (c > worst.cost) worst = {c, m};
  }
  return worst;
}

FrenetPoint localize_ego(const DrivingCase& driving_case, const ReferencePath& path, double dt,
                         std::optional<double> hint_s) {
  if (driving_case.ego_history.empty()) throw PlanningError("driving case has no ego state");
  const AgentState& now = driving_case.ego_history.back();
  CartesianState cs{now.position, now.velocity, {0.0, 0.0}};
  if (driving_case.ego_history.size() >= 2 && dt > 0.0) {
    const AgentState& prev = driving_case.ego_history[driving_case.ego_history.size() - 2];
    const double accel = (now.velocity.norm() - prev.velocity.norm()) / dt;
    const double speed = now.velocity.norm();
    const Vec2 dir = speed > 1e-9 ? now.velocity * (1.0 / speed) : unit_from_angle(now.heading);
    cs.acceleration = dir * accel;
  }
  try {
    return cartesian_to_frenet(path, cs, hint_s);
  } catch (const OutOfCorridorError& e) {
    throw PlanningError(std::string("ego cannot be localized: ") + e.what());
  }
}

namespace {

std::vector<CandidateTrajectory> build_candidates(const FrenetPoint& ego, const ReferencePath& path,
                                                  const PlannerConfig& config) {
  return generate_candidates(ego, sample_end_states(ego, config.grid), config.dt,
                             {config.max_lateral_accel, path.length()});
}

CandidateTrajectory fallback_stop(const FrenetPoint& ego, const PlannerConfig& config) {
  const double horizon = *std::max_element(config.grid.horizon_times.begin(), config.grid.horizon_times.end());
  return make_emergency_stop(ego, config.emergency_deceleration, horizon, config.dt);
}

}  // namespace

PlanningResult plan_with_predictions(const FrenetPoint& ego, const PredictedFutures& predicted,
                                     const ReferencePath& path, const PlannerConfig& config) {
  PlanningResult result;
  result.ego = ego;
  result.candidates = build_candidates(ego, path, config);
  result.predictions = predicted;

  for (const auto& cand : result.candidates) {
    std::vector<Cost> row;
    row.reserve(predicted.member_count());
    for (const auto& member : predicted.members) {
      row.push_back(member_cost(cand, member, config.weights, config.ego_footprint, config.agent_footprint, path));
    }
    if (row.empty()) throw DomainError("planning needs at least one ensemble member");
    WorstCase wc{row[0], 0};
    for (std::size_t m = 1; m < row.size(); ++m) {
      if (row[m] > wc.cost) wc = {row[m], m};
    }
    result.per_candidate_costs.push_back(std::move(row));
    result.worst_member.push_back(wc.member);

    const std::size_t k = result.per_candidate_costs.size() - 1;
    if (wc.cost.is_infinite()) continue;
    const bool better =
        !result.chosen_index || wc.cost < result.chosen_cost ||
        (wc.cost == result.chosen_cost &&
         std::abs(cand.end_offset) < std::abs(result.candidates[*result.chosen_index].end_offset));
    if (better) {
      result.chosen_index = k;
      result.chosen_cost = wc.cost;
    }
  }

  if (result.chosen_index) {
    result.chosen = result.candidates[*result.chosen_index];
  } else {
    result.all_collided = true;
    result.chosen = fallback_stop(ego, config);
  }
  return result;
}

PlanningResult plan(const DrivingCase& driving_case, const EnsembleSet& ensemble, const ReferencePath& path,
                    const PlannerConfig& config, std::optional<double> hint_s) {
  const FrenetPoint ego = localize_ego(driving_case, path, config.dt, hint_s);
  return plan_with_predictions(ego, predict_set(ensemble, driving_case), path, config);
}

PlanningResult plan_baseline(const DrivingCase& driving_case, const PredictorModel& model,
                             const ReferencePath& path, const PlannerConfig& config,
                             std::optional<double> hint_s) {
  PlanningResult r;
  r.ego = localize_ego(driving_case, path, config.dt, hint_s);
  r.predictions.members = {predict(model, driving_case)};
  const auto& futures = r.predictions.members.front();
  r.candidates = build_candidates(r.ego, path, config);

  std::vector<Cost> costs;
  for (const auto& cand : r.candidates) {
    const bool hit = check_collision(cand, futures, config.ego_footprint, config.agent_footprint, path);
    costs.push_back(hit ? Cost::infinite() : Cost::finite(base_cost(cand, config.weights)));
    r.per_candidate_costs.push_back({costs.back()});
    r.worst_member.push_back(0);
  }

  std::vector<std::size_t> order(r.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto best = std::min_element(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (costs[a] != costs[b]) return costs[a] < costs[b];
    const double ba = std::abs(r.candidates[a].end_offset);
    const double bb = std::abs(r.candidates[b].end_offset);
    if (ba != bb) return ba < bb;
    return a < b;
  });

  if (best == order.end() || costs[*best].is_infinite()) {
    r.all_collided = true;
    const double horizon = *std::max_element(config.grid.horizon_times.begin(), config.grid.horizon_times.end());
    r.chosen = make_emergency_stop(r.ego, config.emergency_deceleration, horizon, config.dt);
  } else {
    r.chosen_index = *best;
    r.chosen_cost = costs[*best];
    r.chosen = r.candidates[*best];
  }
  return r;
}

}  // namespace ltp
