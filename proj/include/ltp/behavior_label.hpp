#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace ltp {

/// Surrounding-agent maneuver classes, in head-to-tail order.
enum class BehaviorLabel : int {
  kStraightThrough = 0,
  kRightTurn,
  kLeftTurn,
  kDecelerateYield,
  kAccelerateRush,
  kRightThenLeft,
  kStopMidIntersection,
  kSwerve,
};

inline constexpr std::size_t kBehaviorLabelCount = 8;

inline constexpr std::array<BehaviorLabel, kBehaviorLabelCount> kAllBehaviorLabels{
    BehaviorLabel::kStraightThrough, BehaviorLabel::kRightTurn,      BehaviorLabel::kLeftTurn,
    BehaviorLabel::kDecelerateYield, BehaviorLabel::kAccelerateRush, BehaviorLabel::kRightThenLeft,
    BehaviorLabel::kStopMidIntersection, BehaviorLabel::kSwerve,
};

std::string_view to_string(BehaviorLabel label);
std::optional<BehaviorLabel> behavior_label_from_string(std::string_view name);

inline constexpr std::size_t index_of(BehaviorLabel label) { return static_cast<std::size_t>(label); }

using LabelCounts = std::array<std::size_t, kBehaviorLabelCount>;

}  // namespace ltp
