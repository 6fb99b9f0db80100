#include "ltp/driving_case.hpp"

#include <string>

#include "ltp/errors.hpp"

namespace ltp {

const AgentHistory& DrivingCase::agent(AgentId id) const {
  for (const auto& a : agents) {
    if (a.agent_id == id) return a;
  }
  throw LookupError("agent " + std::to_string(id) + " not present in driving case");
}

}  // namespace ltp
