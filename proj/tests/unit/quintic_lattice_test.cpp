#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ltp/errors.hpp"
#include "ltp/lattice.hpp"
#include "ltp/quintic.hpp"

using namespace ltp;

namespace {

// Independent solve of the 6x6 boundary system.
Eigen::VectorXd solve_boundary(const BoundaryState& a, const BoundaryState& b, double T) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(6, 6);
  Eigen::VectorXd rhs(6);
  M(0, 0) = 1;
  M(1, 1) = 1;
  M(2, 2) = 2;
  for (int k = 0; k < 6; ++k) {
    M(3, k) = std::pow(T, k);
    if (k >= 1) M(4, k) = k * std::pow(T, k - 1);
    if (k >= 2) M(5, k) = k * (k - 1) * std::pow(T, k - 2);
  }
  rhs << a.position, a.velocity, a.acceleration, b.position, b.velocity, b.acceleration;
  return M.fullPivLu().solve(rhs);
}

}  // namespace

TEST_CASE("rest to rest with no displacement is the zero polynomial") {
  const auto q = fit_quintic({0, 0, 0}, {0, 0, 0}, 1.0);
  for (double c : q.coefficients()) CHECK(c == doctest::Approx(0.0));
}

TEST_CASE("constant velocity is its own quintic") {
  const auto q = fit_quintic({0, 1, 0}, {1, 1, 0}, 1.0);
  const auto& c = q.coefficients();
  CHECK(c[0] == doctest::Approx(0.0));
  CHECK(c[1] == doctest::Approx(1.0));
  for (int k = 2; k < 6; ++k) CHECK(std::abs(c[k]) < 1e-12);
}

TEST_CASE("coefficients match an independent linear solve") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const BoundaryState a{u(gen), u(gen), u(gen)};
    const BoundaryState b{u(gen), u(gen), u(gen)};
    const double T = 0.5 + std::abs(u(gen));
    const auto q = fit_quintic(a, b, T);
    const auto ref = solve_boundary(a, b, T);
    for (int k = 0; k < 6; ++k) CHECK(q.coefficients()[k] == doctest::Approx(ref(k)).epsilon(1e-9));
  }
  const auto q = fit_quintic({0, 0, 0}, {1, 0, 0}, 1.0);
  CHECK(std::abs(q.value(1.0) - 1.0) < 1e-9);
  CHECK(std::abs(q.velocity(1.0)) < 1e-9);
  CHECK(std::abs(q.acceleration(1.0)) < 1e-9);
}

TEST_CASE("non-positive duration is rejected") {
  CHECK_THROWS_AS(fit_quintic({0, 0, 0}, {1, 0, 0}, 0.0), DomainError);
  CHECK_THROWS_AS(fit_quintic({0, 0, 0}, {1, 0, 0}, -1.0), DomainError);
}

TEST_CASE("default grid yields ten end states") {
  FrenetPoint ego{10.0, 0.0, 6.0};
  SamplingGrid grid;
  const auto es = sample_end_states(ego, grid);
  REQUIRE(es.size() == 10);
  CHECK(grid.sample_count() == 10);
  CHECK(es.back().v_end == 0.0);
  for (const auto& e : es) {
    CHECK(e.t_end > 0.0);
    CHECK(e.v_end >= 0.0);
  }
  CHECK(es == sample_end_states(ego, grid));

  // Standstill swaps the stop sample for a creep sample.
  ego.s_dot = 0.0;
  CHECK(sample_end_states(ego, grid).back().v_end == grid.creep_speed);
}

TEST_CASE("singleton grid extrapolates the ego state") {
  const FrenetPoint ego{10.0, 0.0, 6.0};
  SamplingGrid grid;
  grid.lateral_offsets = {0.0};
  grid.speed_offsets = {0.0};
  grid.include_stop = false;
  const auto es = sample_end_states(ego, grid);
  REQUIRE(es.size() == 1);
  CHECK(es[0] == EndStateSample{0.0, 28.0, 6.0, 3.0});
}

TEST_CASE("empty grid is a configuration error") {
  SamplingGrid grid;
  grid.lateral_offsets.clear();
  CHECK_THROWS_AS(sample_end_states({}, grid), ConfigError);
  grid = {};
  grid.horizon_times = {0.0};
  CHECK_THROWS_AS(sample_end_states({}, grid), ConfigError);
}

TEST_CASE("constant speed candidate has no jerk and the base cost") {
  const FrenetPoint ego{0.0, 0.0, 6.0};
  const auto c = generate_candidates(ego, {{0.0, 18.0, 6.0, 3.0}}, 0.1);
  REQUIRE(c.size() == 1);
  CHECK(c[0].jerk_integral < 1e-9);
  CHECK(base_cost(c[0], {}) == doctest::Approx(0.3));

  auto shifted = c[0];
  shifted.end_offset = 1.0;
  CHECK(base_cost(shifted, {}) == doctest::Approx(1.3));
}

TEST_CASE("lateral shift jerk matches the closed form") {
  // Rest-to-rest shift D over T: integral of jerk^2 is 720 D^2 / T^5.
  const FrenetPoint ego{5.0, 0.0, 0.0};
  const auto c = generate_candidates(ego, {{1.0, 5.0, 0.0, 2.0}}, 0.1);
  REQUIRE(c.size() == 1);
  const double analytic = 720.0 / std::pow(2.0, 5);
  CHECK(std::abs(c[0].jerk_integral - analytic) < 0.01 * analytic);
}

TEST_CASE("candidate invariants over the default grid") {
  const FrenetPoint ego{10.0, 0.3, 5.0, 0.1, 0.2, 0.0};
  const auto es = sample_end_states(ego, SamplingGrid{});
  const auto cands = generate_candidates(ego, es, 0.1);
  CHECK(cands.size() == 10);
  for (const auto& c : cands) {
    CHECK(c.samples.size() == static_cast<std::size_t>(std::lround(c.duration / 0.1)) + 1);
    CHECK(c.jerk_integral >= 0.0);
    CHECK(std::abs(c.mean_speed - (c.samples.back().s - c.samples.front().s) / c.duration) < 1e-9);
    const auto& e = es[c.source_index];
    CHECK(std::abs(c.lateral_poly->value(c.duration) - e.d_end) < 1e-9);
    CHECK(std::abs(c.longitudinal_poly->velocity(c.duration) - e.v_end) < 1e-9);
    CHECK(std::abs(c.lateral_poly->value(0.0) - ego.d) < 1e-9);
    CHECK(std::abs(c.longitudinal_poly->acceleration(0.0) - ego.s_ddot) < 1e-9);
    CHECK(std::abs(base_cost(c, {}) - (0.1 * c.jerk_integral + 0.1 * c.duration + c.end_offset * c.end_offset)) <
          1e-12);
  }
}

TEST_CASE("infeasible candidates are dropped") {
  const FrenetPoint ego{10.0, 0.0, 6.0};
  // A 10 m lateral jump in 1 s needs far more than 8 m/s^2.
  CHECK(generate_candidates(ego, {{10.0, 16.0, 6.0, 1.0}}, 0.1).empty());
  // Ending far behind the start forces reverse motion.
  CHECK(generate_candidates(ego, {{0.0, 5.0, 0.0, 3.0}}, 0.1).empty());
  CHECK_THROWS_AS(generate_candidates(ego, {{0.0, 28.0, 6.0, 3.0}}, 0.0), DomainError);
}

TEST_CASE("zero-offset constant speed candidate is cheapest for its horizon") {
  const FrenetPoint ego{0.0, 0.0, 6.0};
  SamplingGrid grid;
  grid.include_stop = false;
  const auto cands = generate_candidates(ego, sample_end_states(ego, grid), 0.1);
  double best = 1e300;
  double straight = 0.0;
  for (const auto& c : cands) {
    best = std::min(best, base_cost(c, {}));
    if (c.end_offset == 0.0 && std::abs(c.mean_speed - 6.0) < 1e-9) straight = base_cost(c, {});
  }
  CHECK(straight == best);
}

TEST_CASE("base cost strictly increases with the end offset") {
  CandidateTrajectory t;
  t.jerk_integral = 2.0;
  t.duration = 3.0;
  double last = -1.0;
  for (double b = 0.0; b <= 3.0; b += 0.25) {
    t.end_offset = -b;
    const double c = base_cost(t, {});
    CHECK(c > last);
    last = c;
  }
}

TEST_CASE("emergency stop decelerates monotonically to rest") {
  const auto stop = make_emergency_stop({10.0, 0.5, 6.0}, 4.0, 3.0, 0.1);
  CHECK(stop.kind == TrajectoryKind::kEmergencyStop);
  CHECK(stop.samples.size() == 31);
  for (std::size_t j = 1; j < stop.samples.size(); ++j) {
    CHECK(stop.samples[j].s_dot <= stop.samples[j - 1].s_dot);
    CHECK(stop.samples[j].d == 0.5);
  }
  CHECK(stop.samples.back().s_dot == 0.0);
  CHECK(stop.samples.back().s == doctest::Approx(10.0 + 36.0 / 8.0));
}
