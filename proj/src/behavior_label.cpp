#include "ltp/behavior_label.hpp"

namespace ltp {

namespace {

constexpr std::array<std::string_view, kBehaviorLabelCount> kNames{
    "straight-through", "right-turn",      "left-turn",
    "decelerate-yield", "accelerate-rush", "right-then-left",
    "stop-mid-intersection", "swerve",
};

}  // namespace

std::string_view to_string(BehaviorLabel label) { return kNames.at(index_of(label)); }

std::optional<BehaviorLabel> behavior_label_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllBehaviorLabels[i];
  }
  return std::nullopt;
}

}  // namespace ltp
