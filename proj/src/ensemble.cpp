#include "ltp/ensemble.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ltp/errors.hpp"
#include "ltp/number_format.hpp"
#include "kv_file.hpp"

namespace ltp {

EnsembleSet::EnsembleSet(std::vector<PredictorModel> members) : members_(std::move(members)) {
  if (members_.empty()) throw ConstructionError("ensemble needs at least one member");
  for (std::size_t i = 1; i < members_.size(); ++i) {
    if (!(members_[i].architecture() == members_[0].architecture()) ||
        !(members_[i].normalizer() == members_[0].normalizer())) {
      throw ConstructionError("ensemble member " + std::to_string(i) + " differs in architecture or normalizer");
    }
  }
}

EnsembleSet EnsembleSet::prefix(std::size_t n) const {
  if (n == 0 || n > members_.size()) {
    throw RangeError("prefix size " + std::to_string(n) + " outside [1, " + std::to_string(members_.size()) + "]");
  }
  return EnsembleSet({members_.begin(), members_.begin() + static_cast<std::ptrdiff_t>(n)});
}

EnsembleSet train_ensemble(const PreparedTrainingData& data, std::size_t n, std::uint64_t base_seed,
                           const TrainingHyperparams& hp) {
  if (n == 0) throw ConfigError("ensemble size must be at least 1");
  std::vector<PredictorModel> members;
  members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      members.push_back(train_model(data, base_seed + i, hp));
    } catch (const TrainingDivergenceError& e) {
      throw TrainingDivergenceError("ensemble member " + std::to_string(i) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("ensemble member " + std::to_string(i) + ": " + e.what());
    }
  }
  return EnsembleSet(std::move(members));
}

EnsembleSet train_ensemble(const PredictorArchitecture& arch, const TrainingDataset& dataset, std::size_t n,
                           std::uint64_t base_seed, const TrainingHyperparams& hp) {
  if (n == 0) throw ConfigError("ensemble size must be at least 1");
  return train_ensemble(prepare_training_data(arch, dataset), n, base_seed, hp);
}

PredictedFutures predict_set(const EnsembleSet& ensemble, const DrivingCase& driving_case) {
  PredictedFutures out;
  out.members.reserve(ensemble.size());
  for (const auto& m : ensemble.members()) out.members.push_back(predict(m, driving_case));
  return out;
}

using detail::join;
using detail::KeyValueReader;
using detail::open_for_write;
using detail::split;


void write_model(const std::filesystem::path& file, const PredictorModel& model) {
  auto out = open_for_write(file);
  const auto& a = model.architecture();
  std::string hidden_s;
  for (std::size_t i = 0; i < a.hidden.size(); ++i) hidden_s += (i ? "," : "") + std::to_string(a.hidden[i]);
  out << "format_version=1\n"
      << "kind=predictor_model\n"
      << "seed=" << model.seed() << '\n'
      << "history_steps=" << a.history_steps << '\n'
      << "horizon_steps=" << a.horizon_steps << '\n'
      << "hidden=" << hidden_s << '\n'
      << "dt=" << format_double(a.dt) << '\n'
      << "final_training_loss=" << format_double(model.final_training_loss()) << '\n'
      << "normalizer_mean=" << join(model.normalizer().mean, ',') << '\n'
      << "normalizer_scale=" << join(model.normalizer().scale, ',') << '\n'
      << "parameter_count=" << model.parameters().size() << '\n';
  for (Eigen::Index i = 0; i < model.parameters().size(); ++i) out << format_double(model.parameters()(i)) << '\n';
  if (!out) throw IoError("failed writing " + file.string());
}

PredictorModel read_model(const std::filesystem::path& file) {
  KeyValueReader r(file);
  const auto kv = r.read_until("parameter_count");
  if (r.require(kv, "kind") != "predictor_model") r.fail("not a predictor model file");
  PredictorArchitecture arch;
  arch.history_steps = r.to_uint(r.require(kv, "history_steps"));
  arch.horizon_steps = r.to_uint(r.require(kv, "horizon_steps"));
  arch.hidden.clear();
  for (const auto& h : split(r.require(kv, "hidden"), ',')) arch.hidden.push_back(r.to_uint(h));
  arch.dt = r.to_double(r.require(kv, "dt"));
  FeatureNormalizer norm;
  for (const auto& v : split(r.require(kv, "normalizer_mean"), ',')) norm.mean.push_back(r.to_double(v));
  for (const auto& v : split(r.require(kv, "normalizer_scale"), ',')) norm.scale.push_back(r.to_double(v));
  const auto count = r.to_uint(r.require(kv, "parameter_count"));
  if (count != arch.parameter_count()) r.fail("parameter_count does not match architecture");
  Eigen::VectorXd params(static_cast<Eigen::Index>(count));
  std::string line;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!r.next_line(line)) r.fail("truncated parameter list");
    params(static_cast<Eigen::Index>(i)) = r.to_double(line);
  }
  try {
    PredictorModel model(arch, norm, r.to_uint(r.require(kv, "seed")), std::move(params));
    model.set_final_training_loss(r.to_double(r.require(kv, "final_training_loss")));
    return model;
  } catch (const DomainError& e) {
    r.fail(e.what());
  }
}

std::filesystem::path write_ensemble(const std::filesystem::path& dir, const EnsembleSet& ensemble,
                                     std::uint64_t base_seed, const LabelCounts& label_counts) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    names.push_back("member_" + std::to_string(i) + ".model");
    write_model(dir / names.back(), ensemble.member(i));
  }
  const auto manifest = dir / kManifestFileName;
  auto out = open_for_write(manifest);
  out << "format_version=1\n"
      << "kind=ensemble_manifest\n"
      << "n=" << ensemble.size() << '\n'
      << "base_seed=" << base_seed << '\n'
      << "label_counts=";
  for (std::size_t i = 0; i < kBehaviorLabelCount; ++i) out << (i ? "," : "") << label_counts[i];
  out << '\n';
  for (const auto& name : names) out << "member=" << name << '\n';
  if (!out) throw IoError("failed writing " + manifest.string());
  return manifest;
}

EnsembleManifest read_manifest(const std::filesystem::path& dir) {
  const auto file = dir / kManifestFileName;
  if (!std::filesystem::exists(file)) throw IoError("no ensemble manifest at " + file.string());
  KeyValueReader r(file);
  EnsembleManifest m;
  std::string line;
  std::map<std::string, std::string> kv;
  while (r.next_line(line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) r.fail("expected key=value");
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "member") {
      m.member_files.push_back(value);
    } else if (key == "label_counts") {
      const auto parts = split(value, ',');
      if (parts.size() != kBehaviorLabelCount) r.fail("label_counts needs 8 entries");
      for (std::size_t i = 0; i < kBehaviorLabelCount; ++i) m.label_counts[i] = r.to_uint(parts[i]);
    } else {
      kv[key] = value;
    }
  }
  if (r.require(kv, "kind") != "ensemble_manifest") r.fail("not an ensemble manifest");
  m.n = r.to_uint(r.require(kv, "n"));
  m.base_seed = r.to_uint(r.require(kv, "base_seed"));
  if (m.member_files.size() != m.n) r.fail("manifest lists " + std::to_string(m.member_files.size()) + " members, n=" + std::to_string(m.n));
  return m;
}

EnsembleSet read_ensemble(const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir);
  std::vector<PredictorModel> members;
  for (const auto& f : manifest.member_files) members.push_back(read_model(dir / f));
  return EnsembleSet(std::move(members));
}

}  // namespace ltp
