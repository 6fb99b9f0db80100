#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ltp/behavior_label.hpp"
#include "ltp/predictor.hpp"

namespace ltp {

/// Predictors sharing architecture and normalizer, differing in seed.
class EnsembleSet {
 public:
  /// Throws ConstructionError when empty or when members disagree on
  /// architecture or normalizer.
  explicit EnsembleSet(std::vector<PredictorModel> members);

  std::size_t size() const { return members_.size(); }
  const std::vector<PredictorModel>& members() const { return members_; }
  const PredictorModel& member(std::size_t i) const { return members_.at(i); }
  /// First `n` members; throws RangeError unless 1 <= n <= size().
  EnsembleSet prefix(std::size_t n) const;

 private:
  std::vector<PredictorModel> members_;
};

/// Member i is trained with seed base_seed + i on the full dataset.
/// Member errors are rethrown with the member index prepended.
EnsembleSet train_ensemble(const PreparedTrainingData& data, std::size_t n, std::uint64_t base_seed,
                           const TrainingHyperparams& hp);
EnsembleSet train_ensemble(const PredictorArchitecture& arch, const TrainingDataset& dataset, std::size_t n,
                           std::uint64_t base_seed, const TrainingHyperparams& hp);

PredictedFutures predict_set(const EnsembleSet& ensemble, const DrivingCase& driving_case);

// Persistence. Every file starts with `format_version=1`.

void write_model(const std::filesystem::path& file, const PredictorModel& model);
/// Throws ParseError or IoError.
PredictorModel read_model(const std::filesystem::path& file);

struct EnsembleManifest {
  std::size_t n = 0;
  std::uint64_t base_seed = 0;
  /// Training samples per label, used to pick the high-volume labels.
  LabelCounts label_counts{};
  std::vector<std::string> member_files;
};

inline constexpr const char* kManifestFileName = "manifest.txt";

/// Writes member_<i>.model files and a manifest into `dir`; returns the manifest path.
std::filesystem::path write_ensemble(const std::filesystem::path& dir, const EnsembleSet& ensemble,
                                     std::uint64_t base_seed, const LabelCounts& label_counts);
EnsembleManifest read_manifest(const std::filesystem::path& dir);
EnsembleSet read_ensemble(const std::filesystem::path& dir);

}  // namespace ltp
