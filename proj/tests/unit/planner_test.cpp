#include <doctest.h>

#include <random>
#include <vector>

#include "ltp/collision.hpp"
#include "ltp/errors.hpp"
#include "ltp/planner.hpp"

using namespace ltp;

namespace {

ReferencePath straight_path() {
  const std::vector<Vec2> raw{{0, 0}, {200, 0}};
  return build_reference_path(raw);
}

// Agent future that follows the candidate point for point.
FutureTrajectory shadow(const CandidateTrajectory& traj, const ReferencePath& path, AgentId id) {
  FutureTrajectory f;
  f.agent_id = id;
  const auto start = frenet_to_cartesian(path, traj.samples[0]);
  f.origin = start.position;
  f.origin_heading = start.heading;
  for (std::size_t j = 1; j < traj.samples.size(); ++j) f.positions.push_back(frenet_to_cartesian(path, traj.samples[j]).position);
  return f;
}

FutureTrajectory parked(Vec2 at, std::size_t steps, AgentId id = 1) {
  FutureTrajectory f;
  f.agent_id = id;
  f.origin = at;
  f.positions.assign(steps, at);
  return f;
}

CandidateTrajectory straight_candidate(const ReferencePath& path) {
  (void)path;
  return generate_candidates({10.0, 0.0, 6.0}, {{0.0, 28.0, 6.0, 3.0}}, 0.1).at(0);
}

}  // namespace

TEST_CASE("cost sentinel ordering") {
  CHECK(Cost::finite(1e300) < Cost::infinite());
  CHECK(Cost::infinite() == Cost::infinite());
  CHECK_FALSE(Cost::infinite() < Cost::infinite());
  CHECK(Cost::finite(1.0) < Cost::finite(2.0));
  CHECK(Cost::finite(2.0) != Cost::finite(1.0));
}

TEST_CASE("separating axis test on aligned rectangles") {
  VehicleFootprint fp;
  fp.inflation_margin = 0.0;
  const auto a = make_box({0, 0}, 0.0, fp);
  CHECK_FALSE(boxes_overlap(a, make_box({4.6, 0}, 0.0, fp)));
  CHECK(boxes_overlap(a, make_box({4.4, 0}, 0.0, fp)));
  CHECK(box_distance(a, make_box({4.6, 0}, 0.0, fp)) == doctest::Approx(0.1));
  CHECK(box_distance(a, make_box({4.4, 0}, 0.0, fp)) == 0.0);
  // Inflation closes a 0.1 m gap.
  CHECK(boxes_overlap(make_box({0, 0}, 0.0, {}), make_box({4.6, 0}, 0.0, {})));
}

TEST_CASE("separating axis test is symmetric") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  const VehicleFootprint fp;
  for (int i = 0; i < 2000; ++i) {
    const auto a = make_box({u(gen), u(gen)}, u(gen), fp);
    const auto b = make_box({u(gen), u(gen)}, u(gen), fp);
    CHECK(boxes_overlap(a, b) == boxes_overlap(b, a));
    CHECK(box_distance(a, b) == doctest::Approx(box_distance(b, a)));
  }
}

TEST_CASE("footprint validation") {
  CHECK_NOTHROW(VehicleFootprint{}.validate());
  CHECK_THROWS_AS((VehicleFootprint{0.0, 2.0, 0.2}.validate()), ConfigError);
  CHECK_THROWS_AS((VehicleFootprint{4.5, 2.0, -0.1}.validate()), ConfigError);
}

TEST_CASE("collision check against far and coincident agents") {
  const auto path = straight_path();
  const auto traj = straight_candidate(path);
  const VehicleFootprint fp;
  CHECK_FALSE(check_collision(traj, {parked({30, 150}, 30)}, fp, fp, path));
  CHECK(check_collision(traj, {shadow(traj, path, 1)}, fp, fp, path));
  CHECK_FALSE(check_collision(traj, {}, fp, fp, path));
  // Comparison stops at the shorter of the two horizons.
  // The candidate reaches s = 28 only at the end of its horizon.
  CHECK_FALSE(check_collision(traj, {parked({31, 0}, 5)}, fp, fp, path));
  CHECK(check_collision(traj, {parked({31, 0}, 30)}, fp, fp, path));
}

TEST_CASE("member and worst-case cost") {
  const auto path = straight_path();
  const auto traj = straight_candidate(path);
  const VehicleFootprint fp;
  const CostWeights w;
  const auto far = parked({30, 150}, 30);
  const auto hit = shadow(traj, path, 1);
  CHECK(member_cost(traj, {far}, w, fp, fp, path) == Cost::finite(base_cost(traj, w)));
  CHECK(member_cost(traj, {hit}, w, fp, fp, path).is_infinite());

  PredictedFutures one{{{far}}};
  CHECK(worst_case_cost(traj, one, w, fp, fp, path).cost == member_cost(traj, {far}, w, fp, fp, path));

  PredictedFutures five{{{far}, {far}, {hit}, {far}, {hit}}};
  const auto wc = worst_case_cost(traj, five, w, fp, fp, path);
  CHECK(wc.cost.is_infinite());
  CHECK(wc.member == 2);

  PredictedFutures clear{{{far}, {far}, {far}, {far}, {far}}};
  CHECK(worst_case_cost(traj, clear, w, fp, fp, path).cost == Cost::finite(base_cost(traj, w)));
  CHECK_THROWS_AS(worst_case_cost(traj, PredictedFutures{}, w, fp, fp, path), DomainError);
}

TEST_CASE("no agents picks the base-cost minimizer") {
  const auto path = straight_path();
  const FrenetPoint ego{20.0, 0.4, 6.0};
  PredictedFutures none{{{}}};
  const auto r = plan_with_predictions(ego, none, path, {});
  REQUIRE(r.chosen_index);
  double best = 1e300;
  for (const auto& c : r.candidates) best = std::min(best, base_cost(c, {}));
  CHECK(r.chosen_cost == Cost::finite(best));
  CHECK_FALSE(r.all_collided);
}

TEST_CASE("all candidates blocked falls back to an emergency stop") {
  const auto path = straight_path();
  const FrenetPoint ego{20.0, 0.0, 6.0};
  // A wall of parked agents across every lateral offset just ahead.
  std::vector<FutureTrajectory> wall;
  for (int i = -2; i <= 2; ++i) wall.push_back(parked({27.0, 1.5 * i}, 30, i + 10));
  const auto r = plan_with_predictions(ego, PredictedFutures{{wall}}, path, {});
  CHECK(r.all_collided);
  CHECK_FALSE(r.chosen_index);
  CHECK(r.chosen_cost.is_infinite());
  CHECK(r.chosen.kind == TrajectoryKind::kEmergencyStop);
  for (std::size_t j = 1; j < r.chosen.samples.size(); ++j) {
    CHECK(r.chosen.samples[j].s_dot <= r.chosen.samples[j - 1].s_dot);
  }
}

TEST_CASE("min-max identity and member superset conservatism") {
  const auto path = straight_path();
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const FrenetPoint ego{20.0 + 10.0 * u(gen), -0.5 + u(gen), 3.0 + 4.0 * u(gen)};
    PredictedFutures p;
    const std::size_t n = 1 + static_cast<std::size_t>(u(gen) * 6);
    for (std::size_t m = 0; m < n; ++m) {
      std::vector<FutureTrajectory> agents;
      const Vec2 start{ego.s + 8.0 + 20.0 * u(gen), -6.0 + 12.0 * u(gen)};
      const Vec2 vel{-6.0 * u(gen), -2.0 + 4.0 * u(gen)};
      FutureTrajectory f;
      f.agent_id = 1;
      f.origin = start;
      for (int j = 1; j <= 30; ++j) f.positions.push_back(start + vel * (0.1 * j));
      agents.push_back(f);
      p.members.push_back(agents);
    }
    const auto r = plan_with_predictions(ego, p, path, {});
    Cost best = Cost::infinite();
    for (const auto& row : r.per_candidate_costs) {
      Cost worst = row[0];
      for (const auto& c : row) worst = std::max(worst, c, [](const Cost& a, const Cost& b) { return a < b; });
      if (worst < best) best = worst;
    }
    CHECK(r.chosen_cost == best);

    // Every prefix of the member list admits a superset of safe candidates.
    PredictedFutures prefix;
    prefix.members.assign(p.members.begin(), p.members.begin() + 1);
    const auto rp = plan_with_predictions(ego, prefix, path, {});
    for (std::size_t k = 0; k < r.candidates.size(); ++k) {
      bool safe_full = true;
      for (const auto& c : r.per_candidate_costs[k]) safe_full = safe_full && !c.is_infinite();
      if (safe_full) CHECK_FALSE(rp.per_candidate_costs[k][0].is_infinite());
      // Worst-case cost minus base cost is either zero or the sentinel.
      const Cost wc = worst_case_cost(r.candidates[k], p, {}, {}, {}, path).cost;
      CHECK((wc.is_infinite() || wc == Cost::finite(base_cost(r.candidates[k], {}))));
    }
  }
}

TEST_CASE("ties prefer the smaller end offset") {
  const auto path = straight_path();
  PlannerConfig cfg;
  cfg.grid.lateral_offsets = {1.0, 0.0, -1.0};
  cfg.grid.speed_offsets = {0.0};
  cfg.grid.include_stop = false;
  cfg.weights.k_p = 0.0;
  cfg.weights.k_j = 0.0;
  // With only the time term every candidate costs the same.
  const auto r = plan_with_predictions({20.0, 0.0, 6.0}, PredictedFutures{{{}}}, path, cfg);
  REQUIRE(r.chosen_index);
  CHECK(*r.chosen_index == 1);
  cfg.grid.lateral_offsets = {1.0, -1.0};
  const auto r2 = plan_with_predictions({20.0, 0.0, 6.0}, PredictedFutures{{{}}}, path, cfg);
  CHECK(*r2.chosen_index == 0);
}

TEST_CASE("ego outside the corridor is a planning error") {
  const auto path = straight_path();
  DrivingCase dc;
  dc.ego_history.push_back({{10, 40}, {5, 0}, 0.0, 0});
  CHECK_THROWS_AS(localize_ego(dc, path, 0.1), PlanningError);
}
