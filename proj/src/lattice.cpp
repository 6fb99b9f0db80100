#include "ltp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltp/errors.hpp"

namespace ltp {

namespace {

std::size_t step_count(double duration, double dt) {
  const double ratio = duration / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-6 || rounded < 1.0) {
    throw DomainError("duration " + std::to_string(duration) + " s is not a positive multiple of dt " +
                      std::to_string(dt));
  }
  return static_cast<std::size_t>(rounded);
}

// Composite Simpson weights over steps + 1 samples, with a 3/8 panel at the
// end for odd step counts. Exact for the degree-4 squared jerk of a quintic.
std::vector<double> quadrature_weights(std::size_t steps) {
  std::vector<double> w(steps + 1, 0.0);
  if (steps == 1) {
    w[0] = w[1] = 0.5;
    return w;
  }
  const std::size_t simpson = steps % 2 == 0 ? steps : steps - 3;
  for (std::size_t j = 0; j < simpson; j += 2) {
    w[j] += 1.0 / 3.0;
    w[j + 1] += 4.0 / 3.0;
    w[j + 2] += 1.0 / 3.0;
  }
  if (simpson != steps) {
    const std::size_t j = simpson;
    w[j] += 3.0 / 8.0;
    w[j + 1] += 9.0 / 8.0;
    w[j + 2] += 9.0 / 8.0;
    w[j + 3] += 3.0 / 8.0;
  }
  return w;
}

}  // namespace

std::vector<EndStateSample> sample_end_states(const FrenetPoint& ego, const SamplingGrid& grid) {
  if (grid.horizon_times.empty() || grid.lateral_offsets.empty() || grid.speed_offsets.empty()) {
    throw ConfigError("sampling grid has an empty dimension");
  }
  for (double t : grid.horizon_times) {
    if (!(t > 0.0)) throw ConfigError("horizon times must be positive");
  }

  std::vector<EndStateSample> out;
  out.reserve(grid.sample_count());
  for (double t : grid.horizon_times) {
    for (double d : grid.lateral_offsets) {
      for (double dv : grid.speed_offsets) {
        const double v = std::max(0.0, grid.cruise_speed + dv);
        out.push_back({d, ego.s + 0.5 * (ego.s_dot + v) * t, v, t});
      }
    }
  }
  if (grid.include_stop) {
    const double t = *std::max_element(grid.horizon_times.begin(), grid.horizon_times.end());
    const double v = ego.s_dot >= grid.standstill_speed ? 0.0 : grid.creep_speed;
    out.push_back({0.0, ego.s + 0.5 * (ego.s_dot + v) * t, v, t});
  }
  return out;
}

std::vector<CandidateTrajectory> generate_candidates(const FrenetPoint& ego,
                                                     const std::vector<EndStateSample>& end_states,
                                                     double dt, const FeasibilityLimits& limits) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  std::vector<CandidateTrajectory> out;
  out.reserve(end_states.size());

  for (std::size_t idx = 0; idx < end_states.size(); ++idx) {
    const EndStateSample& es = end_states[idx];
    const std::size_t steps = step_count(es.t_end, dt);
    auto lat = fit_quintic({ego.d, ego.d_dot, ego.d_ddot}, {es.d_end, 0.0, 0.0}, es.t_end);
    auto lon = fit_quintic({ego.s, ego.s_dot, ego.s_ddot}, {es.s_end, es.v_end, 0.0}, es.t_end);

    CandidateTrajectory traj;
    traj.source_index = idx;
    traj.duration = es.t_end;
    traj.samples.reserve(steps + 1);
    bool feasible = true;
    double jerk_sum = 0.0;
    const std::vector<double> weights = quadrature_weights(steps);
    for (std::size_t j = 0; j <= steps; ++j) {
      const double t = static_cast<double>(j) * dt;
      FrenetPoint p{lon.value(t), lat.value(t), lon.velocity(t), lat.velocity(t),
                    lon.acceleration(t), lat.acceleration(t)};
      if (std::abs(p.d_ddot) > limits.max_lateral_accel || p.s_dot < -1e-9 || p.s < 0.0 ||
          p.s > limits.max_s) {
        feasible = false;
        break;
      }
      const double w = weights[j];
      const double jl = lat.jerk(t);
      const double js = lon.jerk(t);
      jerk_sum += w * (jl * jl + js * js) * dt;
      traj.samples.push_back(p);
    }
    if (!feasible) continue;

    traj.jerk_integral = jerk_sum;
    traj.end_offset = traj.samples.back().d;
    traj.mean_speed = (traj.samples.back().s - traj.samples.front().s) / traj.duration;
    traj.lateral_poly = std::move(lat);
    traj.longitudinal_poly = std::move(lon);
    out.push_back(std::move(traj));
  }
  return out;
}

CandidateTrajectory make_emergency_stop(const FrenetPoint& ego, double deceleration, double horizon,
                                        double dt) {
  if (!(deceleration > 0.0)) throw DomainError("deceleration must be positive");
  const std::size_t steps = step_count(horizon, dt);
  const double v0 = std::max(0.0, ego.s_dot);
  const double t_stop = v0 / deceleration;

  CandidateTrajectory traj;
  traj.kind = TrajectoryKind::kEmergencyStop;
  traj.duration = horizon;
  traj.end_offset = ego.d;
  traj.samples.reserve(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double t = static_cast<double>(j) * dt;
    const double tm = std::min(t, t_stop);
    FrenetPoint p;
    p.s = ego.s + v0 * tm - 0.5 * deceleration * tm * tm;
    p.s_dot = t < t_stop ? v0 - deceleration * t : 0.0;
    p.s_ddot = t < t_stop ? -deceleration : 0.0;
    p.d = ego.d;
    traj.samples.push_back(p);
  }
  traj.mean_speed = (traj.samples.back().s - traj.samples.front().s) / horizon;
  return traj;
}

double base_cost(const CandidateTrajectory& traj, const CostWeights& weights) {
  const double b = traj.end_offset;
  return weights.k_j * traj.jerk_integral + weights.k_t * traj.duration + weights.k_p * b * b;
}

}  // namespace ltp
