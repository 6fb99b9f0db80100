#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ltp/episode.hpp"
#include "ltp/planner.hpp"
#include "ltp/predictor.hpp"
#include "ltp/scenario.hpp"

namespace ltp {

struct ExperimentSettings {
  std::vector<std::size_t> ensemble_sizes{1, 2, 5, 10};
  std::size_t collect_episodes = 200;
  std::uint64_t collect_seed = 7;
  /// Held-out set for the prediction metrics, collected like the training set.
  std::size_t heldout_episodes = 100;
  std::uint64_t heldout_seed = 8;
  std::uint64_t train_seed = 100;
  std::size_t eval_episodes = 500;
  std::uint64_t eval_seed = 99;
  std::filesystem::path output_dir = "runs";
};

/// Every tunable of a run. Defaults reproduce the reference setup.
struct ExperimentConfig {
  ScenarioConfig scenario;
  PlannerConfig planner;
  PredictorArchitecture predictor;
  TrainingHyperparams training;
  CollectOptions collect;
  ExperimentSettings experiment;

  /// Section checks plus cross-section consistency (shared dt and history
  /// length). Throws ConfigError.
  void validate() const;
};

/// Sectioned `key=value` text: `[scenario]`, `[planner]`, `[predictor]`,
/// `[experiment]`. Blank lines and `#` comments are ignored; missing keys
/// keep their defaults. Unknown sections or keys and malformed values throw
/// ParseError with the line number; the merged result is validated.
ExperimentConfig parse_config(std::istream& in, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& file);

/// Full config in the same format, every key spelled out.
std::string format_config(const ExperimentConfig& config);

}  // namespace ltp
