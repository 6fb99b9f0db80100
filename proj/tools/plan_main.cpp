// Command-line driver: plan collect|train|eval|report|sweep.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ltp/config.hpp"
#include "ltp/errors.hpp"
#include "ltp/experiment.hpp"
#include "ltp/number_format.hpp"

namespace fs = std::filesystem;

namespace {

void print_report(const ltp::MetricsReport& r) {
  std::cout << "n=" << r.n << (r.baseline() ? " (baseline)" : "") << ": episodes=" << r.episodes
            << " P_safe=" << ltp::format_fixed(100.0 * r.p_safe, 2) << "% P_ev=" << ltp::format_fixed(r.p_ev, 3)
            << " m/s";
  if (r.prediction) {
    std::cout << " D_ADE=" << ltp::format_fixed(100.0 * r.prediction->rates.ade, 2)
              << "% D_FDE=" << ltp::format_fixed(100.0 * r.prediction->rates.fde, 2) << '%';
  }
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice planner with ensemble-based prediction uncertainty"};
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "Sectioned key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Seed override for this command");
    sub->add_option("--out", out, "Output path");
  };

  auto* collect = app.add_subcommand("collect", "Record scripted episodes as a training dataset");
  common(collect);
  std::optional<std::size_t> episodes;
  collect->add_option("--episodes", episodes, "Episode count (default: experiment.collect_episodes)");

  auto* train = app.add_subcommand("train", "Train an ensemble on a dataset");
  common(train);
  std::string dataset;
  std::optional<std::size_t> train_n;
  train->add_option("--dataset", dataset, "Dataset file")->required();
  train->add_option("--n", train_n, "Ensemble size (default: largest experiment.ensemble_sizes)");

  auto* eval = app.add_subcommand("eval", "Closed-loop evaluation of a trained ensemble");
  common(eval);
  std::string ensemble_dir;
  std::optional<std::size_t> members;
  std::string heldout;
  bool logs = false;
  eval->add_option("--ensemble", ensemble_dir, "Directory holding the manifest")->required();
  eval->add_option("--episodes", episodes, "Episode count (default: experiment.eval_episodes)");
  eval->add_option("--members", members, "Use only the first N members");
  eval->add_option("--heldout", heldout, "Held-out dataset for the prediction metrics");
  eval->add_flag("--logs", logs, "Write one log file per episode");

  auto* report = app.add_subcommand("report", "Tabulate evaluation runs over several ensemble sizes");
  std::string root;
  std::vector<std::size_t> sizes;
  report->add_option("--root", root, "Directory holding n_<n> run directories")->required();
  report->add_option("--n", sizes, "Ensemble sizes")->delimiter(',')->required();
  report->add_option("--out", out, "Output directory (default: root)");

  auto* sweep = app.add_subcommand("sweep", "collect, train, eval every n, report");
  common(sweep);
  sweep->add_flag("--logs", logs, "Write one log file per episode");

  CLI11_PARSE(app, argc, argv);

  try {
    ltp::ExperimentConfig config;
    if (!config_file.empty()) config = ltp::load_config(config_file);
    const auto& ex = config.experiment;
    const fs::path out_root = ex.output_dir;

    if (collect->parsed()) {
      const fs::path file = out.empty() ? out_root / ltp::kDatasetFile : fs::path(out);
      const auto r = ltp::cmd_collect(config, episodes.value_or(ex.collect_episodes), seed.value_or(ex.collect_seed), file);
      std::cout << "wrote " << r.records << " records to " << r.dataset_file.string() << " and "
                << r.histogram_file.string() << '\n';
    } else if (train->parsed()) {
      const auto n = train_n.value_or(*std::max_element(ex.ensemble_sizes.begin(), ex.ensemble_sizes.end()));
      const fs::path dir = out.empty() ? out_root / ltp::kEnsembleDir : fs::path(out);
      const auto manifest = ltp::cmd_train(config, dataset, n, seed.value_or(ex.train_seed), dir);
      std::cout << "wrote " << n << " members and " << manifest.string() << '\n';
    } else if (eval->parsed()) {
      ltp::EvalOptions opts;
      opts.members = members;
      if (!heldout.empty()) opts.heldout_file = heldout;
      opts.write_episode_logs = logs;
      const auto n_label = members ? *members : ltp::read_manifest(ensemble_dir).n;
      const fs::path dir = out.empty() ? ltp::run_dir(out_root, n_label) : fs::path(out);
      const auto r = ltp::cmd_eval(config, ensemble_dir, episodes.value_or(ex.eval_episodes),
                                   seed.value_or(ex.eval_seed), dir, opts);
      print_report(r);
    } else if (report->parsed()) {
      const auto reports = ltp::cmd_report(root, sizes, out.empty() ? fs::path(root) : fs::path(out));
      for (const auto& r : reports) print_report(r);
    } else if (sweep->parsed()) {
      if (seed) config.experiment.eval_seed = *seed;
      const auto reports = ltp::cmd_sweep(config, out.empty() ? out_root : fs::path(out), logs);
      for (const auto& r : reports) print_report(r);
    }
  } catch (const ltp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
