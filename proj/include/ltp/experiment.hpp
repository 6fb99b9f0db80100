#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ltp/config.hpp"
#include "ltp/metrics.hpp"

namespace ltp {

// File layout shared by the commands.
inline constexpr const char* kDatasetFile = "dataset.jsonl";
inline constexpr const char* kHeldOutFile = "heldout.jsonl";
inline constexpr const char* kEnsembleDir = "ensemble";
inline constexpr const char* kMetricsFile = "metrics.txt";
inline constexpr const char* kEpisodeSummaryFile = "episodes.csv";
inline constexpr const char* kTableFile = "table.csv";
inline constexpr const char* kCaseTableFile = "cases.csv";

/// `<dataset>.hist.csv` next to the dataset.
std::filesystem::path histogram_path(const std::filesystem::path& dataset_file);
/// `<root>/n_<n>`.
std::filesystem::path run_dir(const std::filesystem::path& root, std::size_t n);

struct CollectResult {
  std::filesystem::path dataset_file;
  std::filesystem::path histogram_file;
  std::size_t records = 0;
  LabelCounts label_counts{};
};

/// Collects `episodes` scripted episodes from `seed` into `out_file` plus the
/// label histogram sidecar. Throws IoError naming an unwritable path.
CollectResult cmd_collect(const ExperimentConfig& config, std::size_t episodes, std::uint64_t seed,
                          const std::filesystem::path& out_file);

/// Trains `n` members with seeds seed, seed + 1, ... and writes them with a
/// manifest into `out_dir`. Returns the manifest path. Dataset parse errors
/// carry the line number.
std::filesystem::path cmd_train(const ExperimentConfig& config, const std::filesystem::path& dataset_file,
                                std::size_t n, std::uint64_t seed, const std::filesystem::path& out_dir);

struct EvalOptions {
  /// Use only the first `members` of the stored ensemble.
  std::optional<std::size_t> members;
  /// Held-out dataset for the prediction metrics; skipped when absent.
  std::optional<std::filesystem::path> heldout_file;
  bool write_episode_logs = false;
};

/// Runs `episodes` closed-loop episodes seeded episode_seed(seed, i), so
/// runs with different ensembles share their scenario draws. Writes per
/// episode logs (optional), an episode summary and the metrics report into
/// `out_dir`.
MetricsReport cmd_eval(const ExperimentConfig& config, const std::filesystem::path& ensemble_dir,
                       std::size_t episodes, std::uint64_t seed, const std::filesystem::path& out_dir,
                       const EvalOptions& options = {});

/// Reads `<root>/n_<n>/metrics.txt` for every n and writes the metric table
/// and the per-label table into `out_dir`. Throws IoError listing every
/// missing n.
std::vector<MetricsReport> cmd_report(const std::filesystem::path& root, const std::vector<std::size_t>& sizes,
                                      const std::filesystem::path& out_dir);

/// collect, held-out collect, train max(n), eval every n, report; all under
/// `out_root`.
std::vector<MetricsReport> cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out_root,
                                     bool write_episode_logs = false);

}  // namespace ltp
