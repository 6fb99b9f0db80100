#include "ltp/episode.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "ltp/errors.hpp"
#include "ltp/rng.hpp"

namespace ltp {

namespace {

using nlohmann::json;

constexpr const char* kHeader = "format_version=1";

std::size_t step_total(double length, double dt) { return static_cast<std::size_t>(std::llround(length / dt)); }

// Constant-speed states before t = 0 along a path, oldest first, ending at s0.
std::vector<AgentState> back_extrapolate(const ReferencePath& path, double s0, double speed, std::size_t h,
                                         double dt, AgentId id) {
  std::vector<AgentState> out;
  for (std::size_t k = h + 1; k-- > 0;) {
    const double s = std::max(0.0, s0 - speed * dt * static_cast<double>(k));
    const double heading = normalize_angle(path.heading_at(s));
    out.push_back({path.point_at(s), unit_from_angle(heading) * speed, heading, id});
  }
  return out;
}

template <typename Buffer>
std::vector<AgentState> window(const Buffer& buf) {
  return {buf.begin(), buf.end()};
}

std::optional<std::size_t> nearest_agent(Vec2 ego, const std::vector<AgentState>& agents) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const double d = distance(ego, agents[i].position);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(EpisodeOutcome outcome) {
  switch (outcome) {
    case EpisodeOutcome::kSafe: return "safe";
    case EpisodeOutcome::kCollision: return "collision";
    case EpisodeOutcome::kTimeout: return "timeout";
  }
  return "timeout";
}

std::optional<EpisodeOutcome> episode_outcome_from_string(std::string_view name) {
  for (auto o : {EpisodeOutcome::kSafe, EpisodeOutcome::kCollision, EpisodeOutcome::kTimeout}) {
    if (to_string(o) == name) return o;
  }
  return std::nullopt;
}

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t index) { return derive_seed(base_seed, index); }

EpisodeLog run_episode(const ScenarioConfig& config, const EpisodeSpec& spec, const EnsembleSet& ensemble,
                       const PlannerConfig& planner, const EpisodeOptions& options) {
  const ReferencePath path = ego_reference_path(config);
  const double completion = ego_completion_s(config);
  const std::size_t h = config.history_steps;
  const std::size_t max_steps = step_total(config.episode_length, config.dt);
  const VehicleFootprint body = planner.ego_footprint;

  EpisodeLog log;
  log.seed = spec.seed;
  log.ensemble_size = options.blind ? 0 : ensemble.size();
  for (const auto& a : spec.agents) {
    log.agent_ids.push_back(a.id);
    log.agent_labels.push_back(a.label);
  }
  log.min_clearance = std::numeric_limits<double>::infinity();

  WorldState world = initial_world(config, spec, path);
  double ego_s = config.ego_spawn_s;
  std::deque<AgentState> ego_hist;
  for (const auto& s : back_extrapolate(path, ego_s, config.ego_speed, h, config.dt, 0)) ego_hist.push_back(s);
  std::vector<std::deque<AgentState>> agent_hist(spec.agents.size());
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    const auto& a = spec.agents[i];
    for (const auto& s : back_extrapolate(*a.path, a.initial_s, a.initial_speed, h, config.dt, a.id)) {
      agent_hist[i].push_back(s);
    }
  }

  auto update_clearance = [&] {
    const OrientedBox ego_box = make_body_box(world.ego.position, world.ego.heading, body);
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
      const AgentState st = agent_state(spec.agents[i], world.agents[i]);
      const double gap = box_distance(ego_box, make_body_box(st.position, st.heading, planner.agent_footprint));
      if (gap < log.min_clearance) {
        log.min_clearance = gap;
        log.closest_agent = spec.agents[i].id;
      }
    }
  };
  world.colliding_agent = ground_truth_collision(world.ego, spec.agents, world.agents, body);
  world.collision = world.colliding_agent.has_value();
  update_clearance();

  double ego_speed_sum = 0.0;
  double planned_speed_sum = 0.0;
  for (std::size_t step = 0;; ++step) {
    if (world.collision) {
      log.outcome = EpisodeOutcome::kCollision;
      log.colliding_agent = world.colliding_agent;
      break;
    }
    if (ego_s >= completion) {
      log.outcome = EpisodeOutcome::kSafe;
      break;
    }
    if (step >= max_steps) {
      log.outcome = EpisodeOutcome::kTimeout;
      break;
    }

    DrivingCase dc;
    dc.timestamp = world.time;
    dc.ego_history = window(ego_hist);
    for (std::size_t i = 0; i < spec.agents.size(); ++i) dc.agents.push_back({spec.agents[i].id, window(agent_hist[i])});

    PlanningResult result;
    try {
      if (options.blind) {
        const FrenetPoint ego = localize_ego(dc, path, planner.dt, ego_s);
        PredictedFutures empty;
        empty.members.assign(1, {});
        result = plan_with_predictions(ego, empty, path, planner);
      } else {
        result = plan(dc, ensemble, path, planner, ego_s);
      }
    } catch (const PlanningError& e) {
      throw PlanningError("step " + std::to_string(step) + ": " + e.what());
    }

    StepRecord rec;
    rec.time = world.time;
    rec.ego = world.ego;
    rec.ego_s = ego_s;
    for (const auto& hist : agent_hist) rec.agents.push_back(hist.back());
    rec.chosen_kind = result.chosen.kind;
    rec.chosen_index = result.chosen_index;
    rec.chosen_cost = result.chosen_cost;
    rec.planned_speed = result.chosen.mean_speed;
    rec.all_collided = result.all_collided;
    if (auto i = nearest_agent(world.ego.position, rec.agents)) rec.case_label = spec.agents[*i].label;
    if (options.record_predictions) rec.predictions = std::move(result.predictions);
    ego_speed_sum += world.ego.speed;
    planned_speed_sum += rec.planned_speed;

    world = step_world(world, spec.agents, result.chosen, path, result.ego.s, config.dt, body);
    log.steps.push_back(std::move(rec));
    try {
      ego_s = cartesian_to_frenet(path, {world.ego.position, {}, {}}, ego_s).s;
    } catch (const OutOfCorridorError& e) {
      throw PlanningError("step " + std::to_string(step) + ": ego left the corridor: " + e.what());
    }
    ego_hist.pop_front();
    ego_hist.push_back(ego_state(world.ego));
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
      agent_hist[i].pop_front();
      agent_hist[i].push_back(agent_state(spec.agents[i], world.agents[i]));
    }
    update_clearance();
  }

  log.duration = world.time;
  if (!log.steps.empty()) {
    log.mean_ego_speed = ego_speed_sum / static_cast<double>(log.steps.size());
    log.mean_planned_speed = planned_speed_sum / static_cast<double>(log.steps.size());
  }
  const std::optional<AgentId> key = log.colliding_agent ? log.colliding_agent : log.closest_agent;
  if (key) {
    for (std::size_t i = 0; i < log.agent_ids.size(); ++i) {
      if (log.agent_ids[i] == *key) log.episode_label = log.agent_labels[i];
    }
  }
  return log;
}

EpisodeLog run_episode(const ScenarioConfig& config, const EnsembleSet& ensemble, const PlannerConfig& planner,
                       std::uint64_t seed, const EpisodeOptions& options) {
  return run_episode(config, sample_episode(config, seed), ensemble, planner, options);
}

TrainingDataset collect_dataset(const ScenarioConfig& config, std::size_t num_episodes, std::uint64_t seed,
                                const CollectOptions& options) {
  if (options.record_stride == 0) throw ConfigError("record_stride must be positive");
  const ReferencePath path = ego_reference_path(config);
  const std::size_t h = config.history_steps;
  const std::size_t th = options.horizon_steps;
  const std::size_t steps = step_total(config.episode_length, config.dt);
  TrainingDataset ds;

  for (std::size_t e = 0; e < num_episodes; ++e) {
    const EpisodeSpec spec = sample_episode(config, episode_seed(seed, e));
    if (spec.agents.empty()) continue;

    // Timelines indexed by step + h; the first h entries are extrapolated history.
    std::vector<AgentState> ego_line = back_extrapolate(path, config.ego_spawn_s, config.ego_speed, h, config.dt, 0);
    std::vector<std::vector<AgentState>> lines;
    std::vector<AgentRuntime> rts;
    for (const auto& a : spec.agents) {
      lines.push_back(back_extrapolate(*a.path, a.initial_s, a.initial_speed, h, config.dt, a.id));
      rts.push_back({a.initial_s, a.initial_speed});
    }
    for (std::size_t k = 1; k <= steps + th; ++k) {
      const double s = std::min(path.length(), config.ego_spawn_s + config.ego_speed * config.dt * static_cast<double>(k));
      const double heading = normalize_angle(path.heading_at(s));
      ego_line.push_back({path.point_at(s), unit_from_angle(heading) * config.ego_speed, heading, 0});
      for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        rts[i] = advance_agent(spec.agents[i], rts[i], config.dt);
        lines[i].push_back(agent_state(spec.agents[i], rts[i]));
      }
    }

    for (std::size_t t = 0; t <= steps; t += options.record_stride) {
      DatasetRecord r;
      r.driving_case.timestamp = static_cast<double>(t) * config.dt;
      r.driving_case.ego_history.assign(ego_line.begin() + static_cast<std::ptrdiff_t>(t),
                                        ego_line.begin() + static_cast<std::ptrdiff_t>(t + h + 1));
      std::vector<AgentState> now;
      for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        const auto first = lines[i].begin() + static_cast<std::ptrdiff_t>(t);
        AgentHistory hist{spec.agents[i].id, {first, first + static_cast<std::ptrdiff_t>(h + 1)}};
        FutureTrajectory fut;
        fut.agent_id = hist.agent_id;
        fut.origin = hist.current().position;
        fut.origin_heading = hist.current().heading;
        for (std::size_t k = 1; k <= th; ++k) fut.positions.push_back(lines[i][t + h + k].position);
        now.push_back(hist.current());
        r.driving_case.agents.push_back(std::move(hist));
        r.futures.push_back(std::move(fut));
        r.agent_labels.push_back(spec.agents[i].label);
      }
      r.case_label = spec.agents[*nearest_agent(r.driving_case.ego_history.back().position, now)].label;
      ds.records.push_back(std::move(r));
    }
  }
  return ds;
}

namespace {

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }
Vec2 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json cost_json(const Cost& c) { return c.is_infinite() ? json("inf") : json(c.value()); }
Cost cost_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "inf") throw DomainError("bad cost");
    return Cost::infinite();
  }
  return Cost::finite(j.get<double>());
}

json predictions_json(const PredictedFutures& p) {
  json members = json::array();
  for (const auto& m : p.members) {
    json agents = json::array();
    for (const auto& f : m) {
      json pts = json::array();
      for (const auto& q : f.positions) pts.push_back(vec_json(q));
      agents.push_back({{"id", f.agent_id},
                        {"origin", vec_json(f.origin)},
                        {"origin_heading", f.origin_heading},
                        {"positions", std::move(pts)}});
    }
    members.push_back(std::move(agents));
  }
  return members;
}

PredictedFutures predictions_from(const json& j) {
  PredictedFutures p;
  for (const auto& m : j) {
    std::vector<FutureTrajectory> agents;
    for (const auto& a : m) {
      FutureTrajectory f;
      f.agent_id = a.at("id").get<AgentId>();
      f.origin = vec_from(a.at("origin"));
      f.origin_heading = a.at("origin_heading").get<double>();
      for (const auto& q : a.at("positions")) f.positions.push_back(vec_from(q));
      agents.push_back(std::move(f));
    }
    p.members.push_back(std::move(agents));
  }
  return p;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json step_json(const StepRecord& s) {
  json agents = json::array();
  for (const auto& a : s.agents) {
    agents.push_back(json::array({a.agent_id, a.position.x, a.position.y, a.velocity.x, a.velocity.y, a.heading}));
  }
  json j = {{"t", s.time},
            {"ego", json::array({s.ego.position.x, s.ego.position.y, s.ego.heading, s.ego.speed, s.ego.accel,
                                 s.ego.steer})},
            {"ego_s", s.ego_s},
            {"agents", std::move(agents)},
            {"kind", s.chosen_kind == TrajectoryKind::kLattice ? "lattice" : "emergency_stop"},
            {"chosen", optional_json(s.chosen_index)},
            {"cost", cost_json(s.chosen_cost)},
            {"planned_speed", s.planned_speed},
            {"all_collided", s.all_collided},
            {"case_label", s.case_label ? json(std::string(to_string(*s.case_label))) : json(nullptr)}};
  if (s.predictions) j["predictions"] = predictions_json(*s.predictions);
  return j;
}

BehaviorLabel label_from(const json& j) {
  auto l = behavior_label_from_string(j.get<std::string>());
  if (!l) throw DomainError("unknown behavior label");
  return *l;
}

StepRecord step_from(const json& j) {
  StepRecord s;
  s.time = j.at("t").get<double>();
  const auto& e = j.at("ego");
  s.ego = {{e.at(0).get<double>(), e.at(1).get<double>()}, e.at(2).get<double>(), e.at(3).get<double>(),
           e.at(4).get<double>(), e.at(5).get<double>()};
  s.ego_s = j.at("ego_s").get<double>();
  for (const auto& a : j.at("agents")) {
    s.agents.push_back({{a.at(1).get<double>(), a.at(2).get<double>()},
                        {a.at(3).get<double>(), a.at(4).get<double>()},
                        a.at(5).get<double>(),
                        a.at(0).get<AgentId>()});
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "lattice" && kind != "emergency_stop") throw DomainError("bad trajectory kind");
  s.chosen_kind = kind == "lattice" ? TrajectoryKind::kLattice : TrajectoryKind::kEmergencyStop;
  if (!j.at("chosen").is_null()) s.chosen_index = j.at("chosen").get<std::size_t>();
  s.chosen_cost = cost_from(j.at("cost"));
  s.planned_speed = j.at("planned_speed").get<double>();
  s.all_collided = j.at("all_collided").get<bool>();
  if (!j.at("case_label").is_null()) s.case_label = label_from(j.at("case_label"));
  if (j.contains("predictions")) s.predictions = predictions_from(j.at("predictions"));
  return s;
}

}  // namespace

void write_episode_log(const std::filesystem::path& file, const EpisodeLog& log) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write episode log " + file.string());
  json labels = json::array();
  for (auto l : log.agent_labels) labels.push_back(std::string(to_string(l)));
  json meta = {{"seed", log.seed},
               {"ensemble_size", log.ensemble_size},
               {"agent_ids", log.agent_ids},
               {"agent_labels", std::move(labels)},
               {"outcome", std::string(to_string(log.outcome))},
               {"duration", log.duration},
               {"mean_ego_speed", log.mean_ego_speed},
               {"mean_planned_speed", log.mean_planned_speed},
               {"episode_label",
                log.episode_label ? json(std::string(to_string(*log.episode_label))) : json(nullptr)},
               {"colliding_agent", optional_json(log.colliding_agent)},
               {"closest_agent", optional_json(log.closest_agent)},
               {"min_clearance", std::isfinite(log.min_clearance) ? json(log.min_clearance) : json("inf")},
               {"steps", log.steps.size()}};
  out << kHeader << '\n' << meta.dump() << '\n';
  for (const auto& s : log.steps) out << step_json(s).dump() << '\n';
  if (!out) throw IoError("failed writing episode log " + file.string());
}

EpisodeLog read_episode_log(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open episode log " + file.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kHeader) throw ParseError(file.string(), 1, "expected format_version=1");
  EpisodeLog log;
  std::size_t expected_steps = 0;
  try {
    ++line_no;
    if (!std::getline(in, line)) throw DomainError("missing episode metadata");
    const json m = json::parse(line);
    log.seed = m.at("seed").get<std::uint64_t>();
    log.ensemble_size = m.at("ensemble_size").get<std::size_t>();
    log.agent_ids = m.at("agent_ids").get<std::vector<AgentId>>();
    for (const auto& l : m.at("agent_labels")) log.agent_labels.push_back(label_from(l));
    auto outcome = episode_outcome_from_string(m.at("outcome").get<std::string>());
    if (!outcome) throw DomainError("unknown outcome");
    log.outcome = *outcome;
    log.duration = m.at("duration").get<double>();
    log.mean_ego_speed = m.at("mean_ego_speed").get<double>();
    log.mean_planned_speed = m.at("mean_planned_speed").get<double>();
    if (!m.at("episode_label").is_null()) log.episode_label = label_from(m.at("episode_label"));
    if (!m.at("colliding_agent").is_null()) log.colliding_agent = m.at("colliding_agent").get<AgentId>();
    if (!m.at("closest_agent").is_null()) log.closest_agent = m.at("closest_agent").get<AgentId>();
    const auto& c = m.at("min_clearance");
    log.min_clearance = c.is_string() ? std::numeric_limits<double>::infinity() : c.get<double>();
    expected_steps = m.at("steps").get<std::size_t>();
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      log.steps.push_back(step_from(json::parse(line)));
    }
  } catch (const json::exception& e) {
    throw ParseError(file.string(), line_no, e.what());
  } catch (const DomainError& e) {
    throw ParseError(file.string(), line_no, e.what());
  }
  if (log.steps.size() != expected_steps) throw ParseError(file.string(), line_no, "step count mismatch");
  return log;
}

}  // namespace ltp
