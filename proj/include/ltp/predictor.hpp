#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ltp/dataset.hpp"
#include "ltp/driving_case.hpp"

namespace ltp {

/// Shape of the per-agent feed-forward predictor.
struct PredictorArchitecture {
  std::size_t history_steps = 10;  // H
  std::size_t horizon_steps = 30;  // T_h
  std::vector<std::size_t> hidden{64, 64};
  double dt = 0.1;

  /// (H + 1) relative positions and velocities, plus current speed.
  std::size_t input_size() const { return (history_steps + 1) * 4 + 1; }
  /// One planar displacement per future step.
  std::size_t output_size() const { return horizon_steps * 2; }
  std::size_t parameter_count() const;
  bool operator==(const PredictorArchitecture&) const = default;
};

struct FeatureNormalizer {
  std::vector<double> mean;
  std::vector<double> scale;

  bool empty() const { return mean.empty(); }
  static FeatureNormalizer identity(std::size_t size);
  bool operator==(const FeatureNormalizer&) const = default;
};

struct TrainingHyperparams {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
};

/// Agent history expressed in the agent's current frame (rotated so the
/// current heading points along +x), followed by the current speed.
/// Throws LookupError for an unknown id and DomainError when the history
/// length does not match the architecture.
std::vector<double> extract_raw_features(const DrivingCase& driving_case, AgentId agent_id,
                                         const PredictorArchitecture& arch);

/// Future positions of `future` relative to its origin, in the origin frame.
std::vector<double> relative_targets(const FutureTrajectory& future, const PredictorArchitecture& arch);

/// Feed-forward network tanh(W x + b) ... -> W x + b over normalized features.
/// Outputs are per-step displacements in the agent frame; positions are their
/// running sum.
class PredictorModel {
 public:
  PredictorModel(PredictorArchitecture arch, FeatureNormalizer normalizer, std::uint64_t seed,
                 Eigen::VectorXd parameters);

  const PredictorArchitecture& architecture() const { return arch_; }
  const FeatureNormalizer& normalizer() const { return normalizer_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& mutable_parameters() { return params_; }
  double final_training_loss() const { return final_loss_; }
  void set_final_training_loss(double loss) { final_loss_ = loss; }
  bool trained() const { return !normalizer_.empty(); }

  std::vector<double> extract_features(const DrivingCase& driving_case, AgentId agent_id) const;

  /// Relative future positions (flattened x0 y0 x1 y1 ...) for normalized inputs.
  Eigen::MatrixXd forward_positions(const Eigen::MatrixXd& inputs) const;

  /// Mean squared position error over all outputs and columns, and its
  /// gradient with respect to the parameter vector.
  std::pair<double, Eigen::VectorXd> loss_and_gradient(const Eigen::MatrixXd& inputs,
                                                       const Eigen::MatrixXd& targets) const;
  double loss(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) const;

 private:
  PredictorArchitecture arch_;
  FeatureNormalizer normalizer_;
  std::uint64_t seed_ = 0;
  Eigen::VectorXd params_;
  double final_loss_ = 0.0;
};

/// Design matrices built once from a dataset and shared by ensemble members.
struct PreparedTrainingData {
  PredictorArchitecture arch;
  FeatureNormalizer normalizer;
  Eigen::MatrixXd inputs;   // input_size x samples, normalized
  Eigen::MatrixXd targets;  // output_size x samples
};

/// Throws DomainError on an empty dataset.
PreparedTrainingData prepare_training_data(const PredictorArchitecture& arch, const TrainingDataset& dataset);

/// Xavier-uniform weights and zero biases drawn from `seed`.
Eigen::VectorXd initial_parameters(const PredictorArchitecture& arch, std::uint64_t seed);

/// Mini-batch training with Adam on the mean squared position error. Both the
/// initialization and the per-epoch shuffling derive from `seed`.
/// Throws TrainingDivergenceError on a non-finite loss.
PredictorModel train_model(const PreparedTrainingData& data, std::uint64_t seed, const TrainingHyperparams& hp);
PredictorModel train_model(const PredictorArchitecture& arch, const TrainingDataset& dataset, std::uint64_t seed,
                           const TrainingHyperparams& hp);

/// One future per surrounding agent, in case order. Throws StateError for an
/// untrained model.
std::vector<FutureTrajectory> predict(const PredictorModel& model, const DrivingCase& driving_case);

}  // namespace ltp
