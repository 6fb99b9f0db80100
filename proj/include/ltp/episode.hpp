#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "ltp/dataset.hpp"
#include "ltp/ensemble.hpp"
#include "ltp/planner.hpp"
#include "ltp/scenario.hpp"
#include "ltp/world.hpp"

namespace ltp {

enum class EpisodeOutcome { kSafe, kCollision, kTimeout };

std::string_view to_string(EpisodeOutcome outcome);
std::optional<EpisodeOutcome> episode_outcome_from_string(std::string_view name);

/// One planning cycle.
struct StepRecord {
  double time = 0.0;
  EgoVehicle ego;
  double ego_s = 0.0;
  std::vector<AgentState> agents;
  TrajectoryKind chosen_kind = TrajectoryKind::kLattice;
  std::optional<std::size_t> chosen_index;
  Cost chosen_cost = Cost::infinite();
  /// Mean speed of the chosen trajectory.
  double planned_speed = 0.0;
  bool all_collided = false;
  /// Label of the agent nearest to the ego.
  std::optional<BehaviorLabel> case_label;
  std::optional<PredictedFutures> predictions;

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  std::size_t ensemble_size = 0;
  std::vector<AgentId> agent_ids;
  std::vector<BehaviorLabel> agent_labels;
  std::vector<StepRecord> steps;
  EpisodeOutcome outcome = EpisodeOutcome::kTimeout;
  double duration = 0.0;
  double mean_ego_speed = 0.0;
  double mean_planned_speed = 0.0;
  /// Colliding agent's label, else the label of the agent that came closest.
  std::optional<BehaviorLabel> episode_label;
  std::optional<AgentId> colliding_agent;
  std::optional<AgentId> closest_agent;
  /// Smallest body-to-body gap over the episode; infinite without agents.
  double min_clearance = 0.0;

  bool operator==(const EpisodeLog&) const = default;
};

struct EpisodeOptions {
  /// Plan against empty predictions instead of querying the ensemble.
  bool blind = false;
  bool record_predictions = false;
};

/// Closed loop: build the driving case, plan, track one step, repeat until
/// collision, completion of the turn, or timeout.
/// Planning errors are rethrown with the step index.
EpisodeLog run_episode(const ScenarioConfig& config, const EpisodeSpec& spec, const EnsembleSet& ensemble,
                       const PlannerConfig& planner, const EpisodeOptions& options = {});
EpisodeLog run_episode(const ScenarioConfig& config, const EnsembleSet& ensemble, const PlannerConfig& planner,
                       std::uint64_t seed, const EpisodeOptions& options = {});

struct CollectOptions {
  std::size_t horizon_steps = 30;
  /// Record every k-th step.
  std::size_t record_stride = 5;
};

/// Scripted episodes (ego at constant speed along its path, no planner)
/// recording every agent's ground-truth future. Episode e uses
/// derive_seed(seed, e).
TrainingDataset collect_dataset(const ScenarioConfig& config, std::size_t num_episodes, std::uint64_t seed,
                                const CollectOptions& options = {});

/// Seed of evaluation episode `index`; shared across ensemble sizes.
std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t index);

void write_episode_log(const std::filesystem::path& file, const EpisodeLog& log);
/// Throws ParseError carrying the line number, or IoError.
EpisodeLog read_episode_log(const std::filesystem::path& file);

}  // namespace ltp
