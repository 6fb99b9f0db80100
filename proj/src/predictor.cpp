#include "ltp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ltp/errors.hpp"
#include "ltp/rng.hpp"

namespace ltp {

namespace {

struct LayerShape {
  std::size_t in;
  std::size_t out;
  std::size_t offset;  // start of W in the parameter vector; b follows W
};

std::vector<LayerShape> layer_shapes(const PredictorArchitecture& arch) {
  std::vector<std::size_t> sizes{arch.input_size()};
  sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
  sizes.push_back(arch.output_size());
  std::vector<LayerShape> layers;
  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    layers.push_back({sizes[i], sizes[i + 1], offset});
    offset += sizes[i] * sizes[i + 1] + sizes[i + 1];
  }
  return layers;
}

using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstMatMap weights(const Eigen::VectorXd& p, const LayerShape& l) {
  return ConstMatMap(p.data() + l.offset, static_cast<Eigen::Index>(l.out), static_cast<Eigen::Index>(l.in));
}

ConstVecMap bias(const Eigen::VectorXd& p, const LayerShape& l) {
  return ConstVecMap(p.data() + l.offset + l.in * l.out, static_cast<Eigen::Index>(l.out));
}

// Running sum over future steps, separately for x and y rows.
Eigen::MatrixXd accumulate_steps(const Eigen::MatrixXd& deltas) {
  Eigen::MatrixXd pos = deltas;
  for (Eigen::Index r = 2; r < pos.rows(); ++r) pos.row(r) += pos.row(r - 2);
  return pos;
}

// Adjoint of accumulate_steps.
Eigen::MatrixXd accumulate_steps_adjoint(const Eigen::MatrixXd& grad_pos) {
  Eigen::MatrixXd g = grad_pos;
  for (Eigen::Index r = g.rows() - 3; r >= 0; --r) g.row(r) += g.row(r + 2);
  return g;
}

Eigen::VectorXd normalize(const std::vector<double>& raw, const FeatureNormalizer& norm) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = (raw[i] - norm.mean[i]) / norm.scale[i];
  }
  return x;
}

}  // namespace

std::size_t PredictorArchitecture::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layer_shapes(*this)) n += l.in * l.out + l.out;
  return n;
}

FeatureNormalizer FeatureNormalizer::identity(std::size_t size) {
  return {std::vector<double>(size, 0.0), std::vector<double>(size, 1.0)};
}

std::vector<double> extract_raw_features(const DrivingCase& driving_case, AgentId agent_id,
                                         const PredictorArchitecture& arch) {
  const AgentHistory& hist = driving_case.agent(agent_id);
  if (hist.states.size() != arch.history_steps + 1) {
    throw DomainError("agent history has " + std::to_string(hist.states.size()) + " states, expected " +
                      std::to_string(arch.history_steps + 1));
  }
  const AgentState& now = hist.current();
  std::vector<double> f;
  f.reserve(arch.input_size());
  for (const auto& s : hist.states) {
    const Vec2 rel = rotate(s.position - now.position, -now.heading);
    const Vec2 vel = rotate(s.velocity, -now.heading);
    f.insert(f.end(), {rel.x, rel.y, vel.x, vel.y});
  }
  f.push_back(now.velocity.norm());
  return f;
}

std::vector<double> relative_targets(const FutureTrajectory& future, const PredictorArchitecture& arch) {
  if (future.positions.size() != arch.horizon_steps) {
    throw DomainError("future has " + std::to_string(future.positions.size()) + " steps, expected " +
                      std::to_string(arch.horizon_steps));
  }
  std::vector<double> t;
  t.reserve(arch.output_size());
  for (const auto& p : future.positions) {
    const Vec2 rel = rotate(p - future.origin, -future.origin_heading);
    t.push_back(rel.x);
    t.push_back(rel.y);
  }
  return t;
}

PredictorModel::PredictorModel(PredictorArchitecture arch, FeatureNormalizer normalizer, std::uint64_t seed,
                               Eigen::VectorXd parameters)
    : arch_(std::move(arch)), normalizer_(std::move(normalizer)), seed_(seed), params_(std::move(parameters)) {
  if (static_cast<std::size_t>(params_.size()) != arch_.parameter_count()) {
    throw DomainError("parameter vector has " + std::to_string(params_.size()) + " entries, architecture needs " +
                      std::to_string(arch_.parameter_count()));
  }
  if (!normalizer_.empty() &&
      (normalizer_.mean.size() != arch_.input_size() || normalizer_.scale.size() != arch_.input_size())) {
    throw DomainError("normalizer size does not match architecture input");
  }
}

std::vector<double> PredictorModel::extract_features(const DrivingCase& driving_case, AgentId agent_id) const {
  if (!trained()) throw StateError("predictor has no normalizer; train it first");
  const Eigen::VectorXd x = normalize(extract_raw_features(driving_case, agent_id, arch_), normalizer_);
  return {x.data(), x.data() + x.size()};
}

Eigen::MatrixXd PredictorModel::forward_positions(const Eigen::MatrixXd& inputs) const {
  const auto layers = layer_shapes(arch_);
  Eigen::MatrixXd a = inputs;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Eigen::MatrixXd z = weights(params_, layers[i]) * a;
    z.colwise() += bias(params_, layers[i]);
    a = (i + 1 < layers.size()) ? Eigen::MatrixXd(z.array().tanh()) : std::move(z);
  }
  return accumulate_steps(a);
}

double PredictorModel::loss(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) const {
  const Eigen::MatrixXd diff = forward_positions(inputs) - targets;
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

std::pair<double, Eigen::VectorXd> PredictorModel::loss_and_gradient(const Eigen::MatrixXd& inputs,
                                                                      const Eigen::MatrixXd& targets) const {
  const auto layers = layer_shapes(arch_);
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(inputs);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Eigen::MatrixXd z = weights(params_, layers[i]) * acts.back();
    z.colwise() += bias(params_, layers[i]);
    acts.push_back(i + 1 < layers.size() ? Eigen::MatrixXd(z.array().tanh()) : std::move(z));
  }
  const Eigen::MatrixXd diff = accumulate_steps(acts.back()) - targets;
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd delta = accumulate_steps_adjoint(diff * (2.0 / count));
  for (std::size_t i = layers.size(); i-- > 0;) {
    const LayerShape& l = layers[i];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + l.offset, static_cast<Eigen::Index>(l.out),
                                   static_cast<Eigen::Index>(l.in));
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + l.offset + l.in * l.out, static_cast<Eigen::Index>(l.out));
    gw.noalias() = delta * acts[i].transpose();
    gb = delta.rowwise().sum();
    if (i > 0) {
      Eigen::MatrixXd back = weights(params_, l).transpose() * delta;
      delta = back.array() * (1.0 - acts[i].array().square());
    }
  }
  return {loss, std::move(grad)};
}

PreparedTrainingData prepare_training_data(const PredictorArchitecture& arch, const TrainingDataset& dataset) {
  const std::size_t n = dataset.agent_sample_count();
  if (n == 0) throw DomainError("training dataset has no agent samples");
  PreparedTrainingData data;
  data.arch = arch;
  data.inputs.resize(static_cast<Eigen::Index>(arch.input_size()), static_cast<Eigen::Index>(n));
  data.targets.resize(static_cast<Eigen::Index>(arch.output_size()), static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (const auto& r : dataset.records) {
    for (std::size_t a = 0; a < r.futures.size(); ++a) {
      const auto raw = extract_raw_features(r.driving_case, r.driving_case.agents[a].agent_id, arch);
      const auto tgt = relative_targets(r.futures[a], arch);
      data.inputs.col(col) = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
      data.targets.col(col) = Eigen::Map<const Eigen::VectorXd>(tgt.data(), static_cast<Eigen::Index>(tgt.size()));
      ++col;
    }
  }

  const Eigen::VectorXd mean = data.inputs.rowwise().mean();
  const Eigen::VectorXd var =
      (data.inputs.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(n);
  data.normalizer.mean.resize(arch.input_size());
  data.normalizer.scale.resize(arch.input_size());
  for (std::size_t i = 0; i < arch.input_size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double sd = std::sqrt(var(ii));
    data.normalizer.mean[i] = mean(ii);
    data.normalizer.scale[i] = sd > 1e-9 ? sd : 1.0;
  }
  for (std::size_t i = 0; i < arch.input_size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    data.inputs.row(ii) = (data.inputs.row(ii).array() - data.normalizer.mean[i]) / data.normalizer.scale[i];
  }
  return data;
}

Eigen::VectorXd initial_parameters(const PredictorArchitecture& arch, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(arch.parameter_count()));
  for (const auto& l : layer_shapes(arch)) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (std::size_t k = 0; k < l.in * l.out; ++k) {
      p(static_cast<Eigen::Index>(l.offset + k)) = rng.uniform(-limit, limit);
    }
  }
  return p;
}

PredictorModel train_model(const PreparedTrainingData& data, std::uint64_t seed, const TrainingHyperparams& hp) {
  if (hp.batch_size == 0) throw ConfigError("batch size must be positive");
  PredictorModel model(data.arch, data.normalizer, seed, initial_parameters(data.arch, seed));
  Rng shuffle_rng(derive_seed(seed, 1));

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  const Eigen::Index dim = model.parameters().size();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  const auto n = static_cast<std::size_t>(data.inputs.cols());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::MatrixXd xb;
  Eigen::MatrixXd yb;
  double epoch_loss = 0.0;

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += hp.batch_size) {
      const std::size_t end = std::min(n, start + hp.batch_size);
      const auto bs = static_cast<Eigen::Index>(end - start);
      xb.resize(data.inputs.rows(), bs);
      yb.resize(data.targets.rows(), bs);
      for (Eigen::Index c = 0; c < bs; ++c) {
        xb.col(c) = data.inputs.col(order[start + static_cast<std::size_t>(c)]);
        yb.col(c) = data.targets.col(order[start + static_cast<std::size_t>(c)]);
      }
      auto [loss, grad] = model.loss_and_gradient(xb, yb);
      if (!std::isfinite(loss) || !grad.allFinite()) {
        throw TrainingDivergenceError("non-finite loss in epoch " + std::to_string(epoch) + " (seed " +
                                      std::to_string(seed) + ")");
      }
      epoch_loss += loss * static_cast<double>(bs);

      beta1_pow *= kBeta1;
      beta2_pow *= kBeta2;
      m = kBeta1 * m + (1.0 - kBeta1) * grad;
      v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseAbs2();
      const double step = hp.learning_rate * std::sqrt(1.0 - beta2_pow) / (1.0 - beta1_pow);
      model.mutable_parameters().array() -= step * m.array() / (v.array().sqrt() + kEps);
    }
    epoch_loss /= static_cast<double>(n);
    if (!model.parameters().allFinite()) {
      throw TrainingDivergenceError("non-finite parameters after epoch " + std::to_string(epoch));
    }
  }
  model.set_final_training_loss(epoch_loss);
  return model;
}

PredictorModel train_model(const PredictorArchitecture& arch, const TrainingDataset& dataset, std::uint64_t seed,
                           const TrainingHyperparams& hp) {
  return train_model(prepare_training_data(arch, dataset), seed, hp);
}

std::vector<FutureTrajectory> predict(const PredictorModel& model, const DrivingCase& driving_case) {
  if (!model.trained()) throw StateError("predictor has no normalizer; train it first");
  const auto& arch = model.architecture();
  std::vector<FutureTrajectory> out;
  if (driving_case.agents.empty()) return out;

  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(arch.input_size()),
                         static_cast<Eigen::Index>(driving_case.agents.size()));
  for (std::size_t a = 0; a < driving_case.agents.size(); ++a) {
    inputs.col(static_cast<Eigen::Index>(a)) =
        normalize(extract_raw_features(driving_case, driving_case.agents[a].agent_id, arch), model.normalizer());
  }
  const Eigen::MatrixXd rel = model.forward_positions(inputs);
  const double max_step = kSpeedCap * arch.dt;

  out.reserve(driving_case.agents.size());
  for (std::size_t a = 0; a < driving_case.agents.size(); ++a) {
    const AgentState& now = driving_case.agents[a].current();
    FutureTrajectory fut;
    fut.agent_id = now.agent_id;
    fut.origin = now.position;
    fut.origin_heading = now.heading;
    fut.positions.reserve(arch.horizon_steps);
    Vec2 prev_rel{0.0, 0.0};
    Vec2 acc{0.0, 0.0};
    for (std::size_t k = 0; k < arch.horizon_steps; ++k) {
      const Vec2 cur_rel{rel(static_cast<Eigen::Index>(2 * k), static_cast<Eigen::Index>(a)),
                         rel(static_cast<Eigen::Index>(2 * k + 1), static_cast<Eigen::Index>(a))};
      Vec2 step = cur_rel - prev_rel;
      prev_rel = cur_rel;
      const double len = step.norm();
      if (len > max_step) step = step * (max_step / len);
      acc += step;
      fut.positions.push_back(now.position + rotate(acc, now.heading));
    }
    out.push_back(std::move(fut));
  }
  return out;
}

}  // namespace ltp
