#include "ltp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "kv_file.hpp"
#include "ltp/errors.hpp"
#include "ltp/number_format.hpp"

namespace ltp {

namespace {

void check_pair(const FutureTrajectory& pred, const FutureTrajectory& truth) {
  if (pred.positions.size() != truth.positions.size()) {
    throw DomainError("trajectory lengths differ: " + std::to_string(pred.positions.size()) + " vs " +
                      std::to_string(truth.positions.size()));
  }
  if (pred.positions.empty()) throw DomainError("empty trajectories");
}

double mean_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += distance(a[i], b[i]);
  return sum / static_cast<double>(a.size());
}

const FutureTrajectory& truth_for(const DatasetRecord& r, std::size_t i, AgentId id) {
  if (i < r.futures.size() && r.futures[i].agent_id == id) return r.futures[i];
  for (const auto& f : r.futures) {
    if (f.agent_id == id) return f;
  }
  throw LookupError("no ground truth for agent " + std::to_string(id));
}

}  // namespace

double ade(const FutureTrajectory& pred, const FutureTrajectory& truth) {
  check_pair(pred, truth);
  return mean_distance(pred.positions, truth.positions);
}

double fde(const FutureTrajectory& pred, const FutureTrajectory& truth) {
  check_pair(pred, truth);
  return distance(pred.positions.back(), truth.positions.back());
}

DecreaseRates decrease_rates(const std::vector<double>& member_ade, const std::vector<double>& member_fde) {
  if (member_ade.empty() || member_ade.size() != member_fde.size()) {
    throw DomainError("decrease rates need equally long, nonempty member error lists");
  }
  if (member_ade[0] == 0.0 || member_fde[0] == 0.0) {
    throw DomainError("decrease rate undefined: reference member error is zero");
  }
  // Written as (ref - min) / ref so that n = 1 gives exactly zero.
  const double min_ade = *std::min_element(member_ade.begin(), member_ade.end());
  const double min_fde = *std::min_element(member_fde.begin(), member_fde.end());
  return {(member_ade[0] - min_ade) / member_ade[0], (member_fde[0] - min_fde) / member_fde[0]};
}

std::vector<PredictionEvaluation> evaluate_prediction_prefixes(const EnsembleSet& ensemble,
                                                               const TrainingDataset& held_out,
                                                               const std::vector<std::size_t>& sizes) {
  for (auto n : sizes) {
    if (n == 0 || n > ensemble.size()) {
      throw RangeError("prefix size " + std::to_string(n) + " outside [1, " + std::to_string(ensemble.size()) + "]");
    }
  }
  const std::size_t m = ensemble.size();
  std::vector<double> ade_sum(m, 0.0), fde_sum(m, 0.0);
  // pair_sum[k][label]: running sum of per-sample mean pairwise ADE for sizes[k].
  std::vector<std::array<double, kBehaviorLabelCount>> pair_sum(sizes.size());
  for (auto& a : pair_sum) a.fill(0.0);
  LabelCounts label_samples{};
  std::size_t samples = 0;

  std::vector<std::vector<double>> pair(m, std::vector<double>(m, 0.0));
  for (const auto& record : held_out.records) {
    const PredictedFutures pf = predict_set(ensemble, record.driving_case);
    for (std::size_t a = 0; a < record.driving_case.agents.size(); ++a) {
      const AgentId id = record.driving_case.agents[a].agent_id;
      const FutureTrajectory& truth = truth_for(record, a, id);
      const auto label = index_of(record.agent_labels.at(a));
      for (std::size_t i = 0; i < m; ++i) {
        ade_sum[i] += ade(pf.members[i][a], truth);
        fde_sum[i] += fde(pf.members[i][a], truth);
      }
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) pair[i][j] = ade(pf.members[i][a], pf.members[j][a]);
      }
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        const std::size_t n = sizes[k];
        if (n < 2) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = i + 1; j < n; ++j) s += pair[i][j];
        }
        pair_sum[k][label] += s / static_cast<double>(n * (n - 1) / 2);
      }
      ++label_samples[label];
      ++samples;
    }
  }
  if (samples == 0) throw DomainError("held-out dataset has no agent samples");

  std::vector<PredictionEvaluation> out;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const std::size_t n = sizes[k];
    PredictionEvaluation ev;
    ev.ensemble_size = n;
    ev.sample_count = samples;
    for (std::size_t i = 0; i < n; ++i) {
      ev.member_ade.push_back(ade_sum[i] / static_cast<double>(samples));
      ev.member_fde.push_back(fde_sum[i] / static_cast<double>(samples));
    }
    ev.rates = decrease_rates(ev.member_ade, ev.member_fde);
    ev.label_samples = label_samples;
    if (n >= 2) {
      for (std::size_t l = 0; l < kBehaviorLabelCount; ++l) {
        if (label_samples[l] > 0) ev.label_disagreement[l] = pair_sum[k][l] / static_cast<double>(label_samples[l]);
      }
    }
    out.push_back(std::move(ev));
  }
  return out;
}

PredictionEvaluation evaluate_prediction(const EnsembleSet& ensemble, const TrainingDataset& held_out) {
  return evaluate_prediction_prefixes(ensemble, held_out, {ensemble.size()}).front();
}

std::vector<BehaviorLabel> normal_case_labels(const LabelCounts& training_counts, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("normal-case fraction must lie in (0, 1]");
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(fraction * static_cast<double>(kBehaviorLabelCount))));
  std::vector<BehaviorLabel> labels(kAllBehaviorLabels.begin(), kAllBehaviorLabels.end());
  std::stable_sort(labels.begin(), labels.end(), [&](BehaviorLabel a, BehaviorLabel b) {
    return training_counts[index_of(a)] > training_counts[index_of(b)];
  });
  labels.resize(k);
  return labels;
}

MetricsReport aggregate(const std::vector<EpisodeLog>& logs, const LabelCounts& training_counts) {
  if (logs.empty()) throw DomainError("cannot aggregate zero episode logs");
  MetricsReport r;
  r.n = logs.front().ensemble_size;
  r.training_counts = training_counts;
  r.normal_labels = normal_case_labels(training_counts);

  // Speeds are summed in sorted order so the result does not depend on the
  // order of `logs`.
  std::array<std::vector<double>, kBehaviorLabelCount> label_speeds;
  std::vector<double> all_speeds, normal_speeds;
  for (const auto& log : logs) {
    if (log.ensemble_size != r.n) {
      throw DomainError("mixed ensemble sizes: " + std::to_string(r.n) + " and " + std::to_string(log.ensemble_size));
    }
    const bool safe = log.outcome != EpisodeOutcome::kCollision;
    ++r.episodes;
    r.safe += safe;
    all_speeds.push_back(log.mean_planned_speed);
    if (!log.episode_label) continue;
    auto& lm = r.per_label[index_of(*log.episode_label)];
    ++lm.episodes;
    lm.safe += safe;
    label_speeds[index_of(*log.episode_label)].push_back(log.mean_planned_speed);
    if (std::find(r.normal_labels.begin(), r.normal_labels.end(), *log.episode_label) != r.normal_labels.end()) {
      ++r.normal.episodes;
      r.normal.safe += safe;
      normal_speeds.push_back(log.mean_planned_speed);
    }
  }
  const auto mean = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const auto fill = [&](LabelMetrics& lm, const std::vector<double>& speeds) {
    if (lm.episodes == 0) return;
    lm.p_safe = static_cast<double>(lm.safe) / static_cast<double>(lm.episodes);
    lm.p_ev = mean(speeds);
  };
  for (std::size_t l = 0; l < kBehaviorLabelCount; ++l) fill(r.per_label[l], label_speeds[l]);
  fill(r.normal, normal_speeds);
  r.p_safe = static_cast<double>(r.safe) / static_cast<double>(r.episodes);
  r.p_ev = mean(all_speeds);
  return r;
}

namespace {

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::string label_list(const std::vector<BehaviorLabel>& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? "," : "") + std::string(to_string(labels[i]));
  return s;
}

template <typename T>
std::string csv(const T& values) {
  std::string s;
  bool first = true;
  for (const auto& v : values) {
    if (!first) s += ',';
    first = false;
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
      s += format_double(v);
    } else if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::optional<double>>) {
      s += opt_text(v);
    } else {
      s += std::to_string(v);
    }
  }
  return s;
}

void write_label_metrics(std::ofstream& out, const std::string& prefix, const LabelMetrics& lm) {
  out << prefix << ".episodes=" << lm.episodes << '\n'
      << prefix << ".safe=" << lm.safe << '\n'
      << prefix << ".p_safe=" << opt_text(lm.p_safe) << '\n'
      << prefix << ".p_ev=" << opt_text(lm.p_ev) << '\n';
}

class MetricsParser {
 public:
  explicit MetricsParser(const std::filesystem::path& file) : r_(file) {
    std::string line;
    while (r_.next_line(line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) r_.fail("expected key=value");
      kv_[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  const std::string& text(const std::string& key) { return r_.require(kv_, key); }
  double num(const std::string& key) { return r_.to_double(text(key)); }
  std::size_t count(const std::string& key) { return r_.to_uint(text(key)); }
  std::optional<double> opt(const std::string& value) {
    if (value == "NA") return std::nullopt;
    return r_.to_double(value);
  }
  std::vector<double> nums(const std::string& key) {
    std::vector<double> v;
    for (const auto& p : detail::split(text(key), ',')) v.push_back(r_.to_double(p));
    return v;
  }
  LabelCounts counts(const std::string& key) {
    const auto parts = detail::split(text(key), ',');
    if (parts.size() != kBehaviorLabelCount) r_.fail(key + " needs " + std::to_string(kBehaviorLabelCount) + " entries");
    LabelCounts c{};
    for (std::size_t i = 0; i < kBehaviorLabelCount; ++i) c[i] = r_.to_uint(parts[i]);
    return c;
  }
  LabelMetrics label_metrics(const std::string& prefix) {
    LabelMetrics lm;
    lm.episodes = count(prefix + ".episodes");
    lm.safe = count(prefix + ".safe");
    lm.p_safe = opt(text(prefix + ".p_safe"));
    lm.p_ev = opt(text(prefix + ".p_ev"));
    return lm;
  }
  [[noreturn]] void fail(const std::string& what) { r_.fail(what); }

 private:
  detail::KeyValueReader r_;
  std::map<std::string, std::string> kv_;
};

std::string percent(double v) { return format_fixed(100.0 * v, 4); }

}  // namespace

void write_metrics(const std::filesystem::path& file, const MetricsReport& report) {
  auto out = detail::open_for_write(file);
  out << "format_version=1\n"
      << "kind=metrics_report\n"
      << "n=" << report.n << '\n'
      << "planner=" << (report.baseline() ? "baseline" : "uncertainty_aware") << '\n'
      << "episodes=" << report.episodes << '\n'
      << "safe=" << report.safe << '\n'
      << "p_safe=" << format_double(report.p_safe) << '\n'
      << "p_ev=" << format_double(report.p_ev) << '\n'
      << "training_counts=" << csv(report.training_counts) << '\n'
      << "normal_labels=" << label_list(report.normal_labels) << '\n';
  write_label_metrics(out, "normal", report.normal);
  for (auto l : kAllBehaviorLabels) write_label_metrics(out, "label." + std::string(to_string(l)), report.per_label[index_of(l)]);
  out << "prediction=" << (report.prediction ? 1 : 0) << '\n';
  if (report.prediction) {
    const auto& p = *report.prediction;
    out << "prediction.ensemble_size=" << p.ensemble_size << '\n'
        << "prediction.sample_count=" << p.sample_count << '\n'
        << "prediction.member_ade=" << csv(p.member_ade) << '\n'
        << "prediction.member_fde=" << csv(p.member_fde) << '\n'
        << "prediction.d_ade=" << format_double(p.rates.ade) << '\n'
        << "prediction.d_fde=" << format_double(p.rates.fde) << '\n'
        << "prediction.label_samples=" << csv(p.label_samples) << '\n'
        << "prediction.label_disagreement=" << csv(p.label_disagreement) << '\n';
  }
  if (!out) throw IoError("failed writing " + file.string());
}

MetricsReport read_metrics(const std::filesystem::path& file) {
  MetricsParser p(file);
  if (p.text("kind") != "metrics_report") p.fail("not a metrics report");
  MetricsReport r;
  r.n = p.count("n");
  r.episodes = p.count("episodes");
  r.safe = p.count("safe");
  r.p_safe = p.num("p_safe");
  r.p_ev = p.num("p_ev");
  r.training_counts = p.counts("training_counts");
  for (const auto& name : detail::split(p.text("normal_labels"), ',')) {
    auto l = behavior_label_from_string(name);
    if (!l) p.fail("unknown label '" + name + "'");
    r.normal_labels.push_back(*l);
  }
  r.normal = p.label_metrics("normal");
  for (auto l : kAllBehaviorLabels) r.per_label[index_of(l)] = p.label_metrics("label." + std::string(to_string(l)));
  if (p.count("prediction") == 1) {
    PredictionEvaluation ev;
    ev.ensemble_size = p.count("prediction.ensemble_size");
    ev.sample_count = p.count("prediction.sample_count");
    ev.member_ade = p.nums("prediction.member_ade");
    ev.member_fde = p.nums("prediction.member_fde");
    ev.rates = {p.num("prediction.d_ade"), p.num("prediction.d_fde")};
    ev.label_samples = p.counts("prediction.label_samples");
    const auto parts = detail::split(p.text("prediction.label_disagreement"), ',');
    if (parts.size() != kBehaviorLabelCount) p.fail("label_disagreement needs 8 entries");
    for (std::size_t i = 0; i < kBehaviorLabelCount; ++i) ev.label_disagreement[i] = p.opt(parts[i]);
    r.prediction = std::move(ev);
  }
  return r;
}

void write_table(const std::filesystem::path& file, const std::vector<MetricsReport>& reports) {
  auto out = detail::open_for_write(file);
  out << "format_version=1\nmetric";
  for (const auto& r : reports) out << ",n=" << r.n;
  out << '\n';
  const auto row = [&](const char* name, auto value) {
    out << name;
    for (const auto& r : reports) out << ',' << value(r);
    out << '\n';
  };
  row("P_safe_percent", [](const MetricsReport& r) { return percent(r.p_safe); });
  row("P_ev_mps", [](const MetricsReport& r) { return format_fixed(r.p_ev, 4); });
  row("P_ev_normal_mps", [](const MetricsReport& r) {
    return r.normal.p_ev ? format_fixed(*r.normal.p_ev, 4) : std::string("NA");
  });
  row("D_ADE_percent", [](const MetricsReport& r) {
    return r.prediction ? percent(r.prediction->rates.ade) : std::string("NA");
  });
  row("D_FDE_percent", [](const MetricsReport& r) {
    return r.prediction ? percent(r.prediction->rates.fde) : std::string("NA");
  });
  if (!out) throw IoError("failed writing " + file.string());
}

void write_case_table(const std::filesystem::path& file, const std::vector<MetricsReport>& reports) {
  auto out = detail::open_for_write(file);
  out << "format_version=1\nlabel,training_count";
  for (const auto& r : reports) out << ",episodes_n=" << r.n << ",P_safe_percent_n=" << r.n;
  out << '\n';
  for (auto l : kAllBehaviorLabels) {
    const auto i = index_of(l);
    out << to_string(l) << ',' << (reports.empty() ? 0 : reports.front().training_counts[i]);
    for (const auto& r : reports) {
      const auto& lm = r.per_label[i];
      out << ',' << lm.episodes << ',' << (lm.p_safe ? percent(*lm.p_safe) : std::string("NA"));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + file.string());
}

}  // namespace ltp
