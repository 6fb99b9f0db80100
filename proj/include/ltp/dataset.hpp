#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ltp/behavior_label.hpp"
#include "ltp/driving_case.hpp"

namespace ltp {

/// One driving case with ground-truth futures for every surrounding agent.
///
/// `agent_labels[i]` is the hidden behavior of `driving_case.agents[i]`;
/// `case_label` is the label of the agent closest to the ego.
struct DatasetRecord {
  DrivingCase driving_case;
  std::vector<FutureTrajectory> futures;
  std::vector<BehaviorLabel> agent_labels;
  BehaviorLabel case_label = BehaviorLabel::kStraightThrough;

  bool operator==(const DatasetRecord&) const = default;
};

struct TrainingDataset {
  std::vector<DatasetRecord> records;

  /// Number of (record, agent) samples per behavior label.
  LabelCounts label_counts() const;
  std::size_t agent_sample_count() const;
  bool operator==(const TrainingDataset&) const = default;
};

/// Line-delimited format: a `format_version=1` header line followed by one
/// JSON object per record.
void write_dataset(std::ostream& out, const TrainingDataset& dataset);
void write_dataset(const std::filesystem::path& file, const TrainingDataset& dataset);
/// Throws ParseError carrying the offending line number.
TrainingDataset read_dataset(std::istream& in, const std::string& source_name = "<stream>");
TrainingDataset read_dataset(const std::filesystem::path& file);

/// `label,count` CSV with a version header, labels in head-to-tail order.
void write_label_histogram(const std::filesystem::path& file, const LabelCounts& counts);

}  // namespace ltp
