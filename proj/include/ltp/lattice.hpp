#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "ltp/frenet.hpp"
#include "ltp/quintic.hpp"

namespace ltp {

/// Terminal condition of one lattice candidate.
struct EndStateSample {
  double d_end = 0.0;
  double s_end = 0.0;
  double v_end = 0.0;
  double t_end = 0.0;

  bool operator==(const EndStateSample&) const = default;
};

/// End-state grid: lateral offsets x target speeds x horizon times, plus an
/// optional stop sample.
///
/// Target speeds are `cruise_speed + speed_offsets[i]`, clamped at zero. The
/// stop sample brakes to rest while the ego is moving; at standstill (speed
/// below `standstill_speed`) it targets `creep_speed` instead, so the lattice
/// never offers a zero-cost hold. Holding is left to the planner's
/// emergency-stop fallback.
struct SamplingGrid {
  std::vector<double> lateral_offsets{-1.0, 0.0, 1.0};
  std::vector<double> speed_offsets{-2.0, 0.0, 2.0};
  double cruise_speed = 6.0;
  std::vector<double> horizon_times{3.0};
  bool include_stop = true;
  double standstill_speed = 0.5;
  double creep_speed = 2.0;

  std::size_t sample_count() const {
    return lateral_offsets.size() * speed_offsets.size() * horizon_times.size() + (include_stop ? 1 : 0);
  }
};

/// Deterministic grid enumeration: for each horizon time, for each lateral
/// offset, for each speed; the stop sample comes last.
/// Throws ConfigError on an empty grid or a non-positive horizon time.
std::vector<EndStateSample> sample_end_states(const FrenetPoint& ego, const SamplingGrid& grid);

enum class TrajectoryKind { kLattice, kEmergencyStop };

struct CandidateTrajectory {
  TrajectoryKind kind = TrajectoryKind::kLattice;
  /// Position of the generating end state in the sampled list.
  std::size_t source_index = 0;
  std::optional<QuinticPolynomial> lateral_poly;
  std::optional<QuinticPolynomial> longitudinal_poly;
  std::vector<FrenetPoint> samples;
  double jerk_integral = 0.0;
  double duration = 0.0;
  double end_offset = 0.0;
  double mean_speed = 0.0;

  bool operator==(const CandidateTrajectory&) const = default;
};

struct FeasibilityLimits {
  double max_lateral_accel = 8.0;
  /// Candidates whose samples leave [0, max_s] are rejected.
  double max_s = std::numeric_limits<double>::infinity();
};

/// One quintic pair per end state, sampled every `dt`. Candidates exceeding
/// the lateral acceleration limit or moving backwards are dropped, so the
/// result may be shorter than `end_states` (possibly empty).
/// Throws DomainError when dt <= 0 or a horizon is not a multiple of dt.
std::vector<CandidateTrajectory> generate_candidates(const FrenetPoint& ego,
                                                     const std::vector<EndStateSample>& end_states,
                                                     double dt, const FeasibilityLimits& limits = {});

/// Constant-deceleration stop holding the current lateral offset, padded to
/// `horizon` at rest.
CandidateTrajectory make_emergency_stop(const FrenetPoint& ego, double deceleration, double horizon,
                                        double dt);

struct CostWeights {
  double k_j = 0.1;
  double k_t = 0.1;
  double k_p = 1.0;
};

/// k_j * J_t + k_t * T + k_p * b^2.
double base_cost(const CandidateTrajectory& traj, const CostWeights& weights);

}  // namespace ltp
