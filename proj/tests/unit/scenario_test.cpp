#include <doctest.h>

#include <cmath>
#include <map>

#include "ltp/episode.hpp"
#include "ltp/errors.hpp"
#include "ltp/rng.hpp"
#include "ltp/scenario.hpp"
#include "ltp/world.hpp"
#include "synthetic.hpp"

using namespace ltp;

namespace {

const EnsembleSet& tiny_ensemble() {
  static const EnsembleSet ens = [] {
    PredictorArchitecture arch;
    arch.hidden = {8};
    TrainingHyperparams hp;
    hp.epochs = 1;
    return train_ensemble(arch, ltp::testing::constant_velocity_dataset(20, 1, arch), 2, 1, hp);
  }();
  return ens;
}

// Oncoming straight-through agent timed to meet the ego at the crossing.
EpisodeSpec head_on_spec(const ScenarioConfig& config) {
  AgentSpawn sp;
  sp.approach = Approach::kNorth;
  sp.route = Route::kStraight;
  sp.speed = 7.0;
  sp.spawn_distance = config.max_spawn_distance;
  AgentScript agent = make_agent_script(config, 1, sp);
  const double entry_s = agent.initial_s + sp.spawn_distance;
  const auto conflict = find_conflict(config, ego_reference_path(config), agent);
  REQUIRE(conflict);
  const double ego_arrival = (conflict->ego_s - config.ego_spawn_s) / config.ego_speed;
  agent.place(entry_s - spawn_distance_for_arrival(config, agent, entry_s, *conflict, ego_arrival));
  return {5, {agent}};
}

}  // namespace

TEST_CASE("config validation") {
  ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  c.label_weights = {0.25, 0.40, 0.15, 0.08, 0.06, 0.03, 0.02, 0.01};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.label_weights[7] = 0.02;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.max_agents = 9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("label frequencies follow the weights") {
  ScenarioConfig c;
  c.min_agents = 1;
  c.max_agents = 1;
  std::array<int, kBehaviorLabelCount> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto spec = sample_episode(c, derive_seed(77, static_cast<std::uint64_t>(i)));
    REQUIRE(spec.agents.size() == 1);
    ++counts[index_of(spec.agents[0].label)];
  }
  for (std::size_t l = 0; l < kBehaviorLabelCount; ++l) {
    CHECK(std::abs(static_cast<double>(counts[l]) / draws - c.label_weights[l]) < 0.01);
  }
}

TEST_CASE("sampling is deterministic and may be empty") {
  ScenarioConfig c;
  const auto a = sample_episode(c, 42);
  const auto b = sample_episode(c, 42);
  REQUIRE(a.agents.size() == b.agents.size());
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    CHECK(a.agents[i].label == b.agents[i].label);
    CHECK(a.agents[i].initial_s == b.agents[i].initial_s);
    CHECK(a.agents[i].cruise_speed == b.agents[i].cruise_speed);
    CHECK(a.agents[i].path->waypoints() == b.agents[i].path->waypoints());
  }
  c.max_agents = 0;
  CHECK(sample_episode(c, 42).agents.empty());
}

TEST_CASE("scripted agents respect acceleration and turn radius caps") {
  ScenarioConfig c;
  c.min_agents = 4;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (const auto& agent : sample_episode(c, seed).agents) {
      for (double k : agent.curvature) CHECK(k <= 0.25 + 1e-9);
      AgentRuntime rt{agent.initial_s, agent.initial_speed};
      for (int step = 0; step < 200; ++step) {
        rt = advance_agent(agent, rt, c.dt);
        const double lat = rt.speed * rt.speed * agent.curvature_at(rt.s);
        CHECK(std::hypot(rt.accel, lat) <= 4.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("long-tail shape of collected data") {
  const auto ds = collect_dataset(ScenarioConfig{}, 500, 3);
  const auto counts = ds.label_counts();
  const double total = static_cast<double>(ds.agent_sample_count());
  for (std::size_t l = 1; l < kBehaviorLabelCount; ++l) CHECK(counts[l] <= counts[l - 1]);
  for (std::size_t l = 5; l < kBehaviorLabelCount; ++l) CHECK(counts[l] / total < 0.05);
  CHECK(ds == collect_dataset(ScenarioConfig{}, 500, 3));

  ScenarioConfig empty;
  empty.max_agents = 0;
  CHECK(collect_dataset(empty, 1, 3).records.empty());
}

TEST_CASE("straight agent advances by v dt") {
  ScenarioConfig c;
  AgentSpawn sp;
  sp.approach = Approach::kEast;
  sp.speed = 8.0;
  const auto agent = make_agent_script(c, 1, sp);
  const AgentRuntime rt{agent.initial_s, 8.0};
  const auto next = advance_agent(agent, rt, 0.1);
  CHECK(next.s == doctest::Approx(agent.initial_s + 0.8).epsilon(1e-12));
  CHECK(advance_agent(agent, rt, 0.0) == rt);
}

TEST_CASE("zero time step leaves the world unchanged") {
  ScenarioConfig c;
  const auto spec = sample_episode(c, 9);
  const auto path = ego_reference_path(c);
  const auto w = initial_world(c, spec, path);
  const auto traj = make_emergency_stop({c.ego_spawn_s, 0.0, c.ego_speed}, 4.0, 3.0, 0.1);
  CHECK(step_world(w, spec.agents, traj, path, c.ego_spawn_s, 0.0, {}) == w);
}

TEST_CASE("ego converges onto a straight trajectory") {
  const std::vector<Vec2> raw{{0, 0}, {200, 0}};
  const auto path = build_reference_path(raw);
  EgoVehicle ego;
  ego.position = {10.0, 0.05};
  ego.speed = 5.0;
  for (int i = 0; i < 10; ++i) {
    const double s = cartesian_to_frenet(path, {ego.position, {}, {}}).s;
    const auto traj = generate_candidates({s, 0.0, 5.0}, {{0.0, s + 15.0, 5.0, 3.0}}, 0.1).at(0);
    ego = track_trajectory(ego, traj, path, s, 0.1);
  }
  CHECK(std::abs(ego.position.y) < 0.1);
  CHECK(ego.speed == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("unobstructed episode completes the turn") {
  ScenarioConfig c;
  const auto log = run_episode(c, EpisodeSpec{1, {}}, tiny_ensemble(), PlannerConfig{});
  CHECK(log.outcome == EpisodeOutcome::kSafe);
  CHECK(log.steps.back().ego_s >= ego_completion_s(c) - 1.0);
  CHECK(std::isinf(log.min_clearance));
}

TEST_CASE("blind planner drives into an oncoming agent") {
  ScenarioConfig c;
  EpisodeOptions blind;
  blind.blind = true;
  const auto log = run_episode(c, head_on_spec(c), tiny_ensemble(), PlannerConfig{}, blind);
  CHECK(log.outcome == EpisodeOutcome::kCollision);
  CHECK(log.colliding_agent == 1);
  CHECK(log.episode_label == BehaviorLabel::kStraightThrough);
}

TEST_CASE("episodes are reproducible and logs round trip") {
  ScenarioConfig c;
  EpisodeOptions opts;
  opts.record_predictions = true;
  const auto a = run_episode(c, tiny_ensemble(), PlannerConfig{}, 123, opts);
  const auto b = run_episode(c, tiny_ensemble(), PlannerConfig{}, 123, opts);
  CHECK(a == b);
  CHECK(a.ensemble_size == 2);
  const auto file = std::filesystem::temp_directory_path() / "ltp_episode_test.jsonl";
  write_episode_log(file, a);
  CHECK(read_episode_log(file) == a);
  std::filesystem::remove(file);
}

TEST_CASE("episode seeds are shared across ensemble sizes") {
  ScenarioConfig c;
  const auto s = episode_seed(99, 4);
  CHECK(s == episode_seed(99, 4));
  CHECK(s != episode_seed(99, 5));
  const auto a = run_episode(c, tiny_ensemble(), PlannerConfig{}, s);
  const auto b = run_episode(c, tiny_ensemble().prefix(1), PlannerConfig{}, s);
  CHECK(a.agent_labels == b.agent_labels);
  REQUIRE(!a.steps.empty());
  CHECK(a.steps[0].agents == b.steps[0].agents);
}
