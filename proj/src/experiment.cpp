#include "ltp/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "ltp/dataset.hpp"
#include "ltp/ensemble.hpp"
#include "ltp/episode.hpp"
#include "ltp/errors.hpp"
#include "ltp/number_format.hpp"

namespace ltp {

namespace {

void make_dirs(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void make_parent(const std::filesystem::path& file) {
  if (file.has_parent_path()) make_dirs(file.parent_path());
}

CollectOptions collect_options(const ExperimentConfig& config) {
  CollectOptions opts = config.collect;
  opts.horizon_steps = config.predictor.horizon_steps;
  return opts;
}

std::string episode_file_name(std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return "episode_" + digits + ".jsonl";
}

void write_episode_summary(const std::filesystem::path& file, const std::vector<EpisodeLog>& logs) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << "format_version=1\nindex,seed,outcome,label,duration_s,mean_planned_speed_mps,min_clearance_m\n";
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto& log = logs[i];
    out << i << ',' << log.seed << ',' << to_string(log.outcome) << ','
        << (log.episode_label ? std::string(to_string(*log.episode_label)) : std::string("none")) << ','
        << format_fixed(log.duration, 1) << ',' << format_double(log.mean_planned_speed) << ','
        << format_double(log.min_clearance) << '\n';
  }
  if (!out) throw IoError("failed writing " + file.string());
}

}  // namespace

std::filesystem::path histogram_path(const std::filesystem::path& dataset_file) {
  auto p = dataset_file;
  p.replace_extension(".hist.csv");
  return p;
}

std::filesystem::path run_dir(const std::filesystem::path& root, std::size_t n) {
  return root / ("n_" + std::to_string(n));
}

CollectResult cmd_collect(const ExperimentConfig& config, std::size_t episodes, std::uint64_t seed,
                          const std::filesystem::path& out_file) {
  config.validate();
  make_parent(out_file);
  const TrainingDataset ds = collect_dataset(config.scenario, episodes, seed, collect_options(config));
  CollectResult r;
  r.dataset_file = out_file;
  r.histogram_file = histogram_path(out_file);
  r.records = ds.records.size();
  r.label_counts = ds.label_counts();
  write_dataset(out_file, ds);
  write_label_histogram(r.histogram_file, r.label_counts);
  return r;
}

std::filesystem::path cmd_train(const ExperimentConfig& config, const std::filesystem::path& dataset_file,
                                std::size_t n, std::uint64_t seed, const std::filesystem::path& out_dir) {
  config.validate();
  const TrainingDataset ds = read_dataset(dataset_file);
  const EnsembleSet ensemble = train_ensemble(config.predictor, ds, n, seed, config.training);
  return write_ensemble(out_dir, ensemble, seed, ds.label_counts());
}

MetricsReport cmd_eval(const ExperimentConfig& config, const std::filesystem::path& ensemble_dir,
                       std::size_t episodes, std::uint64_t seed, const std::filesystem::path& out_dir,
                       const EvalOptions& options) {
  config.validate();
  if (episodes == 0) throw ConfigError("eval needs at least one episode");
  const EnsembleManifest manifest = read_manifest(ensemble_dir);
  EnsembleSet ensemble = read_ensemble(ensemble_dir);
  if (options.members) ensemble = ensemble.prefix(*options.members);
  if (!(ensemble.member(0).architecture() == config.predictor)) {
    throw ConfigError("ensemble in " + ensemble_dir.string() + " does not match the configured predictor");
  }
  make_dirs(out_dir);

  std::vector<EpisodeLog> logs;
  logs.reserve(episodes);
  for (std::size_t i = 0; i < episodes; ++i) {
    logs.push_back(run_episode(config.scenario, ensemble, config.planner, episode_seed(seed, i)));
    if (options.write_episode_logs) {
      make_dirs(out_dir / "episodes");
      write_episode_log(out_dir / "episodes" / episode_file_name(i), logs.back());
    }
  }
  MetricsReport report = aggregate(logs, manifest.label_counts);
  if (options.heldout_file) report.prediction = evaluate_prediction(ensemble, read_dataset(*options.heldout_file));
  write_episode_summary(out_dir / kEpisodeSummaryFile, logs);
  write_metrics(out_dir / kMetricsFile, report);
  return report;
}

std::vector<MetricsReport> cmd_report(const std::filesystem::path& root, const std::vector<std::size_t>& sizes,
                                      const std::filesystem::path& out_dir) {
  if (sizes.empty()) throw ConfigError("report needs at least one ensemble size");
  std::string missing;
  for (auto n : sizes) {
    if (!std::filesystem::exists(run_dir(root, n) / kMetricsFile)) missing += (missing.empty() ? "" : ", ") + std::to_string(n);
  }
  if (!missing.empty()) throw IoError("no evaluation run under " + root.string() + " for n = " + missing);
  std::vector<MetricsReport> reports;
  for (auto n : sizes) {
    reports.push_back(read_metrics(run_dir(root, n) / kMetricsFile));
    if (reports.back().n != n) {
      throw IoError(run_dir(root, n).string() + " holds a run with n=" + std::to_string(reports.back().n));
    }
  }
  make_dirs(out_dir);
  write_table(out_dir / kTableFile, reports);
  write_case_table(out_dir / kCaseTableFile, reports);
  return reports;
}

std::vector<MetricsReport> cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out_root,
                                     bool write_episode_logs) {
  config.validate();
  const auto& ex = config.experiment;
  make_dirs(out_root);
  {
    std::ofstream out(out_root / "config.txt", std::ios::binary);
    out << format_config(config);
  }
  cmd_collect(config, ex.collect_episodes, ex.collect_seed, out_root / kDatasetFile);
  EvalOptions opts;
  opts.write_episode_logs = write_episode_logs;
  if (ex.heldout_episodes > 0) {
    cmd_collect(config, ex.heldout_episodes, ex.heldout_seed, out_root / kHeldOutFile);
    opts.heldout_file = out_root / kHeldOutFile;
  }
  const auto n_max = *std::max_element(ex.ensemble_sizes.begin(), ex.ensemble_sizes.end());
  cmd_train(config, out_root / kDatasetFile, n_max, ex.train_seed, out_root / kEnsembleDir);
  for (auto n : ex.ensemble_sizes) {
    opts.members = n;
    cmd_eval(config, out_root / kEnsembleDir, ex.eval_episodes, ex.eval_seed, run_dir(out_root, n), opts);
  }
  return cmd_report(out_root, ex.ensemble_sizes, out_root);
}

}  // namespace ltp
