#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include "ltp/collision.hpp"
#include "ltp/ensemble.hpp"
#include "ltp/frenet.hpp"
#include "ltp/lattice.hpp"

namespace ltp {

/// Trajectory cost with an explicit infinite state. Every finite cost orders
/// below the infinite one; two infinite costs compare equal.
class Cost {
 public:
  static Cost finite(double value) { return Cost(value, false); }
  static Cost infinite() { return Cost(0.0, true); }

  bool is_infinite() const { return infinite_; }
  /// Meaningful only for finite costs.
  double value() const { return value_; }

  std::partial_ordering operator<=>(const Cost& other) const {
    if (infinite_ || other.infinite_) return infinite_ <=> other.infinite_;
    return value_ <=> other.value_;
  }
  bool operator==(const Cost& other) const {
    return infinite_ == other.infinite_ && (infinite_ || value_ == other.value_);
  }

 private:
  Cost(double value, bool infinite) : value_(value), infinite_(infinite) {}
  double value_;
  bool infinite_;
};

struct PlannerConfig {
  CostWeights weights;
  double dt = 0.1;
  SamplingGrid grid;
  double max_lateral_accel = 8.0;
  VehicleFootprint ego_footprint;
  VehicleFootprint agent_footprint;
  double emergency_deceleration = 4.0;
};

struct PlanningResult {
  /// Ego state the candidates start from.
  FrenetPoint ego;
  std::vector<CandidateTrajectory> candidates;
  /// Chosen lattice candidate, or the emergency stop when `all_collided`.
  CandidateTrajectory chosen;
  std::optional<std::size_t> chosen_index;
  Cost chosen_cost = Cost::infinite();
  /// per_candidate_costs[k][m]: cost of candidate k under member m.
  std::vector<std::vector<Cost>> per_candidate_costs;
  /// Member attaining the worst case for each candidate.
  std::vector<std::size_t> worst_member;
  bool all_collided = false;
  PredictedFutures predictions;

  bool operator==(const PlanningResult&) const = default;
};

/// True iff the inflated ego and agent rectangles overlap at any step
/// j = 1 .. min(trajectory steps, future length) compared at equal times.
bool check_collision(const CandidateTrajectory& traj, const std::vector<FutureTrajectory>& futures,
                     const VehicleFootprint& ego_fp, const VehicleFootprint& agent_fp, const ReferencePath& path);

/// base_cost plus the infinite collision penalty.
Cost member_cost(const CandidateTrajectory& traj, const std::vector<FutureTrajectory>& member_futures,
                 const CostWeights& weights, const VehicleFootprint& ego_fp, const VehicleFootprint& agent_fp,
                 const ReferencePath& path);

struct WorstCase {
  Cost cost = Cost::infinite();
  /// Lowest member index attaining the maximum.
  std::size_t member = 0;
};

/// Maximum of member_cost over members. Throws DomainError for zero members.
WorstCase worst_case_cost(const CandidateTrajectory& traj, const PredictedFutures& predicted,
                          const CostWeights& weights, const VehicleFootprint& ego_fp,
                          const VehicleFootprint& agent_fp, const ReferencePath& path);

/// Ego Frenet state from the last two history samples. Acceleration is taken
/// along the current heading from the speed change.
/// Throws PlanningError when the ego is outside the corridor.
FrenetPoint localize_ego(const DrivingCase& driving_case, const ReferencePath& path, double dt,
                         std::optional<double> hint_s = std::nullopt);

/// Min-max selection over lattice candidates against given predictions.
/// Ties go to the smaller |end offset|, then to the lower index. Falls back
/// to an emergency stop when no candidate has a finite worst-case cost.
PlanningResult plan_with_predictions(const FrenetPoint& ego, const PredictedFutures& predicted,
                                     const ReferencePath& path, const PlannerConfig& config);

/// Predicts once with every member and runs the min-max selection.
PlanningResult plan(const DrivingCase& driving_case, const EnsembleSet& ensemble, const ReferencePath& path,
                    const PlannerConfig& config, std::optional<double> hint_s = std::nullopt);

/// Single-model planner minimizing base cost plus collision penalty.
PlanningResult plan_baseline(const DrivingCase& driving_case, const PredictorModel& model,
                             const ReferencePath& path, const PlannerConfig& config,
                             std::optional<double> hint_s = std::nullopt);

}  // namespace ltp
