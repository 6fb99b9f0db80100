#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ltp/behavior_label.hpp"
#include "ltp/dataset.hpp"
#include "ltp/driving_case.hpp"
#include "ltp/ensemble.hpp"
#include "ltp/episode.hpp"

namespace ltp {

/// Mean Euclidean distance over timesteps. Throws DomainError on a length
/// mismatch or empty trajectories.
double ade(const FutureTrajectory& pred, const FutureTrajectory& truth);
/// Distance between the final points; same preconditions as ade.
double fde(const FutureTrajectory& pred, const FutureTrajectory& truth);

struct DecreaseRates {
  double ade = 0.0;
  double fde = 0.0;

  bool operator==(const DecreaseRates&) const = default;
};

/// 1 - min(errors) / errors[0] for ADE and FDE. Member 0 is the reference.
/// Throws DomainError when the lists are empty or differ in length, and when
/// the reference error is zero.
DecreaseRates decrease_rates(const std::vector<double>& member_ade, const std::vector<double>& member_fde);

/// Prediction quality of an ensemble on a held-out dataset.
struct PredictionEvaluation {
  std::size_t ensemble_size = 0;
  std::size_t sample_count = 0;
  /// Per member, averaged over every (record, agent) sample.
  std::vector<double> member_ade;
  std::vector<double> member_fde;
  DecreaseRates rates;
  LabelCounts label_samples{};
  /// Mean over samples of the mean pairwise member ADE; empty for labels
  /// without samples or single-member ensembles.
  std::array<std::optional<double>, kBehaviorLabelCount> label_disagreement{};

  bool operator==(const PredictionEvaluation&) const = default;
};

/// Throws DomainError on a dataset without agent samples.
PredictionEvaluation evaluate_prediction(const EnsembleSet& ensemble, const TrainingDataset& held_out);

/// Same evaluation restricted to the first n members, computed from one
/// pass of the full ensemble. Result i corresponds to sizes[i].
std::vector<PredictionEvaluation> evaluate_prediction_prefixes(const EnsembleSet& ensemble,
                                                               const TrainingDataset& held_out,
                                                               const std::vector<std::size_t>& sizes);

struct LabelMetrics {
  std::size_t episodes = 0;
  std::size_t safe = 0;
  /// Empty when no episode carries the label.
  std::optional<double> p_safe;
  std::optional<double> p_ev;

  bool operator==(const LabelMetrics&) const = default;
};

struct MetricsReport {
  std::size_t n = 0;
  std::size_t episodes = 0;
  std::size_t safe = 0;
  double p_safe = 0.0;
  double p_ev = 0.0;
  std::array<LabelMetrics, kBehaviorLabelCount> per_label{};
  std::vector<BehaviorLabel> normal_labels;
  LabelMetrics normal;
  LabelCounts training_counts{};
  std::optional<PredictionEvaluation> prediction;

  bool baseline() const { return n == 1; }
  bool operator==(const MetricsReport&) const = default;
};

/// Labels with the largest training counts, max(1, round(fraction * 8)) of
/// them; ties go to the label earlier in head-to-tail order.
std::vector<BehaviorLabel> normal_case_labels(const LabelCounts& training_counts, double fraction = 0.1);

/// An episode is safe iff it never collides; timeouts count as safe.
/// Episodes are grouped by their episode label; episodes without agents
/// only enter the overall figures.
/// Throws DomainError for empty input or mixed ensemble sizes.
MetricsReport aggregate(const std::vector<EpisodeLog>& logs, const LabelCounts& training_counts);

// Persistence. Every file starts with `format_version=1`.

void write_metrics(const std::filesystem::path& file, const MetricsReport& report);
/// Throws ParseError or IoError.
MetricsReport read_metrics(const std::filesystem::path& file);

/// Metric rows by ensemble-size columns: P_safe, P_ev, P_ev on normal cases,
/// D_ADE, D_FDE. Percentages for rates, m/s for speeds.
void write_table(const std::filesystem::path& file, const std::vector<MetricsReport>& reports);
/// One row per label in head-to-tail order: training count, then episodes
/// and P_safe for every report.
void write_case_table(const std::filesystem::path& file, const std::vector<MetricsReport>& reports);

}  // namespace ltp
