#include "ltp/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "ltp/errors.hpp"
#include "ltp/number_format.hpp"

namespace ltp {

namespace {

using Fail = std::function<void(const std::string&)>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(trim(part));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

double parse_double(const std::string& s, const Fail& fail) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail("bad number '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const Fail& fail) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) fail("bad non-negative integer '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const Fail& fail) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail("bad boolean '" + s + "'");
  return false;
}

// Value codecs keyed on the field type.
template <typename T>
struct Codec;

template <>
struct Codec<double> {
  static double parse(const std::string& s, const Fail& f) { return parse_double(s, f); }
  static std::string format(double v) { return format_double(v); }
};
template <>
struct Codec<std::size_t> {
  static std::size_t parse(const std::string& s, const Fail& f) { return static_cast<std::size_t>(parse_uint(s, f)); }
  static std::string format(std::size_t v) { return std::to_string(v); }
};
static_assert(std::is_same_v<std::size_t, std::uint64_t>, "seed fields reuse the size_t codec");
template <>
struct Codec<bool> {
  static bool parse(const std::string& s, const Fail& f) { return parse_bool(s, f); }
  static std::string format(bool v) { return v ? "true" : "false"; }
};
template <>
struct Codec<std::filesystem::path> {
  static std::filesystem::path parse(const std::string& s, const Fail& f) {
    if (s.empty()) f("empty path");
    return s;
  }
  static std::string format(const std::filesystem::path& p) { return p.string(); }
};
template <typename E>
struct Codec<std::vector<E>> {
  static std::vector<E> parse(const std::string& s, const Fail& f) {
    std::vector<E> v;
    for (const auto& part : split_list(s)) v.push_back(Codec<E>::parse(part, f));
    return v;
  }
  static std::string format(const std::vector<E>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + Codec<E>::format(v[i]);
    return s;
  }
};
template <typename E, std::size_t N>
struct Codec<std::array<E, N>> {
  static std::array<E, N> parse(const std::string& s, const Fail& f) {
    const auto parts = split_list(s);
    if (parts.size() != N) f("expected " + std::to_string(N) + " comma-separated values");
    std::array<E, N> a{};
    for (std::size_t i = 0; i < N; ++i) a[i] = Codec<E>::parse(parts[i], f);
    return a;
  }
  static std::string format(const std::array<E, N>& a) {
    std::string s;
    for (std::size_t i = 0; i < N; ++i) s += (i ? "," : "") + Codec<E>::format(a[i]);
    return s;
  }
};

struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&, const Fail&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Ref>
Field field(std::string section, std::string key, Ref ref) {
  using T = std::remove_reference_t<decltype(ref(std::declval<ExperimentConfig&>()))>;
  return {std::move(section), std::move(key),
          [ref](ExperimentConfig& c, const std::string& v, const Fail& f) { ref(c) = Codec<T>::parse(v, f); },
          [ref](const ExperimentConfig& c) { return Codec<T>::format(ref(const_cast<ExperimentConfig&>(c))); }};
}

#define LTP_FIELD(section, key, expr) field(section, key, [](ExperimentConfig& c) -> auto& { return c.expr; })

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      LTP_FIELD("scenario", "lane_width", scenario.lane_width),
      LTP_FIELD("scenario", "stop_line_offset", scenario.stop_line_offset),
      LTP_FIELD("scenario", "approach_length", scenario.approach_length),
      LTP_FIELD("scenario", "exit_length", scenario.exit_length),
      LTP_FIELD("scenario", "ego_approach_length", scenario.ego_approach_length),
      LTP_FIELD("scenario", "ego_exit_length", scenario.ego_exit_length),
      LTP_FIELD("scenario", "ego_spawn_s", scenario.ego_spawn_s),
      LTP_FIELD("scenario", "ego_speed", scenario.ego_speed),
      LTP_FIELD("scenario", "min_agents", scenario.min_agents),
      LTP_FIELD("scenario", "max_agents", scenario.max_agents),
      LTP_FIELD("scenario", "label_weights", scenario.label_weights),
      LTP_FIELD("scenario", "min_agent_speed", scenario.min_agent_speed),
      LTP_FIELD("scenario", "max_agent_speed", scenario.max_agent_speed),
      LTP_FIELD("scenario", "min_spawn_distance", scenario.min_spawn_distance),
      LTP_FIELD("scenario", "max_spawn_distance", scenario.max_spawn_distance),
      LTP_FIELD("scenario", "max_arrival_offset", scenario.max_arrival_offset),
      LTP_FIELD("scenario", "min_spawn_gap", scenario.min_spawn_gap),
      LTP_FIELD("scenario", "episode_length", scenario.episode_length),
      LTP_FIELD("scenario", "dt", scenario.dt),
      LTP_FIELD("scenario", "history_steps", scenario.history_steps),

      LTP_FIELD("planner", "k_j", planner.weights.k_j),
      LTP_FIELD("planner", "k_t", planner.weights.k_t),
      LTP_FIELD("planner", "k_p", planner.weights.k_p),
      LTP_FIELD("planner", "dt", planner.dt),
      LTP_FIELD("planner", "lateral_offsets", planner.grid.lateral_offsets),
      LTP_FIELD("planner", "speed_offsets", planner.grid.speed_offsets),
      LTP_FIELD("planner", "cruise_speed", planner.grid.cruise_speed),
      LTP_FIELD("planner", "horizon_times", planner.grid.horizon_times),
      LTP_FIELD("planner", "include_stop", planner.grid.include_stop),
      LTP_FIELD("planner", "standstill_speed", planner.grid.standstill_speed),
      LTP_FIELD("planner", "creep_speed", planner.grid.creep_speed),
      LTP_FIELD("planner", "max_lateral_accel", planner.max_lateral_accel),
      LTP_FIELD("planner", "ego_length", planner.ego_footprint.length),
      LTP_FIELD("planner", "ego_width", planner.ego_footprint.width),
      LTP_FIELD("planner", "ego_inflation", planner.ego_footprint.inflation_margin),
      LTP_FIELD("planner", "agent_length", planner.agent_footprint.length),
      LTP_FIELD("planner", "agent_width", planner.agent_footprint.width),
      LTP_FIELD("planner", "agent_inflation", planner.agent_footprint.inflation_margin),
      LTP_FIELD("planner", "emergency_deceleration", planner.emergency_deceleration),

      LTP_FIELD("predictor", "history_steps", predictor.history_steps),
      LTP_FIELD("predictor", "horizon_steps", predictor.horizon_steps),
      LTP_FIELD("predictor", "hidden", predictor.hidden),
      LTP_FIELD("predictor", "dt", predictor.dt),
      LTP_FIELD("predictor", "learning_rate", training.learning_rate),
      LTP_FIELD("predictor", "batch_size", training.batch_size),
      LTP_FIELD("predictor", "epochs", training.epochs),
      LTP_FIELD("predictor", "record_stride", collect.record_stride),

      LTP_FIELD("experiment", "ensemble_sizes", experiment.ensemble_sizes),
      LTP_FIELD("experiment", "collect_episodes", experiment.collect_episodes),
      LTP_FIELD("experiment", "collect_seed", experiment.collect_seed),
      LTP_FIELD("experiment", "heldout_episodes", experiment.heldout_episodes),
      LTP_FIELD("experiment", "heldout_seed", experiment.heldout_seed),
      LTP_FIELD("experiment", "train_seed", experiment.train_seed),
      LTP_FIELD("experiment", "eval_episodes", experiment.eval_episodes),
      LTP_FIELD("experiment", "eval_seed", experiment.eval_seed),
      LTP_FIELD("experiment", "output_dir", experiment.output_dir),
  };
  return all;
}

#undef LTP_FIELD

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  planner.ego_footprint.validate();
  planner.agent_footprint.validate();
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(planner.dt > 0.0, "planner: dt must be positive");
  require(planner.grid.sample_count() > 0, "planner: sampling grid is empty");
  require(!planner.grid.lateral_offsets.empty() && !planner.grid.speed_offsets.empty() &&
              !planner.grid.horizon_times.empty(),
          "planner: every grid dimension needs at least one value");
  require(planner.emergency_deceleration > 0.0, "planner: emergency_deceleration must be positive");
  require(planner.max_lateral_accel > 0.0, "planner: max_lateral_accel must be positive");
  require(predictor.horizon_steps > 0, "predictor: horizon_steps must be positive");
  require(!predictor.hidden.empty(), "predictor: at least one hidden layer");
  for (auto h : predictor.hidden) require(h > 0, "predictor: hidden widths must be positive");
  require(training.learning_rate > 0.0, "predictor: learning_rate must be positive");
  require(training.batch_size > 0, "predictor: batch_size must be positive");
  require(collect.record_stride > 0, "predictor: record_stride must be positive");
  require(predictor.history_steps == scenario.history_steps,
          "predictor.history_steps must equal scenario.history_steps");
  require(predictor.dt == scenario.dt && planner.dt == scenario.dt, "scenario, planner and predictor dt must agree");
  require(!experiment.ensemble_sizes.empty(), "experiment: ensemble_sizes is empty");
  for (auto n : experiment.ensemble_sizes) require(n > 0, "experiment: ensemble sizes must be positive");
  require(experiment.eval_episodes > 0, "experiment: eval_episodes must be positive");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source_name) {
  ExperimentConfig config;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  std::optional<std::pair<std::uint64_t, std::size_t>> declared_k;
  while (std::getline(in, line)) {
    ++line_no;
    const Fail fail = [&](const std::string& what) { throw ParseError(source_name, line_no, what); };
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "planner" && section != "predictor" && section != "experiment") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    if (line == "format_version=1") continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key=value");
    if (section.empty()) fail("key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "planner" && key == "k") {
      // Derived from the grid; accepted only as a consistency check.
      declared_k = {parse_uint(value, fail), line_no};
      continue;
    }
    const Field* f = find_field(section, key);
    if (!f) fail("unknown key '" + key + "' in [" + section + "]");
    f->set(config, value, fail);
  }
  if (declared_k && declared_k->first != config.planner.grid.sample_count()) {
    throw ParseError(source_name, declared_k->second,
                     "k=" + std::to_string(declared_k->first) + " does not match the sampling grid (" +
                         std::to_string(config.planner.grid.sample_count()) + " samples)");
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config " + file.string());
  return parse_config(in, file.string());
}

std::string format_config(const ExperimentConfig& config) {
  std::string out = "format_version=1\n";
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      section = f.section;
      out += "\n[" + section + "]\n";
      if (section == "planner") out += "k=" + std::to_string(config.planner.grid.sample_count()) + "\n";
    }
    out += f.key + "=" + f.get(config) + "\n";
  }
  return out;
}

}  // namespace ltp
