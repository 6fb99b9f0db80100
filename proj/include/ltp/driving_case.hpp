#pragma once

#include <cstddef>
#include <vector>

#include "ltp/vec2.hpp"

namespace ltp {

using AgentId = int;

/// Snapshot of one agent at one timestep.
struct AgentState {
  Vec2 position;
  Vec2 velocity;
  double heading = 0.0;
  AgentId agent_id = 0;

  bool operator==(const AgentState&) const = default;
};

/// States of one agent over the last H steps plus the current one, oldest first.
struct AgentHistory {
  AgentId agent_id = 0;
  std::vector<AgentState> states;

  const AgentState& current() const { return states.back(); }
  bool operator==(const AgentHistory&) const = default;
};

/// Ego and surrounding-agent histories at one planning instant.
struct DrivingCase {
  std::vector<AgentState> ego_history;
  std::vector<AgentHistory> agents;
  double timestamp = 0.0;

  /// Throws LookupError for an unknown id.
  const AgentHistory& agent(AgentId id) const;
  bool operator==(const DrivingCase&) const = default;
};

inline constexpr std::size_t kMaxSurroundingAgents = 8;
inline constexpr double kSpeedCap = 30.0;

/// Future positions of one agent at t + dt, ..., t + T_h * dt.
///
/// `origin` and `origin_heading` give the agent pose at t; they anchor the
/// heading of the first predicted step and of stationary stretches.
struct FutureTrajectory {
  AgentId agent_id = 0;
  Vec2 origin;
  double origin_heading = 0.0;
  std::vector<Vec2> positions;

  bool operator==(const FutureTrajectory&) const = default;
};

/// Per-member, per-agent predictions: members[m][a].
struct PredictedFutures {
  std::vector<std::vector<FutureTrajectory>> members;

  std::size_t member_count() const { return members.size(); }
  bool operator==(const PredictedFutures&) const = default;
};

}  // namespace ltp
