#pragma once

#include <array>
#include <vector>

#include "ltp/driving_case.hpp"
#include "ltp/vec2.hpp"

namespace ltp {

struct VehicleFootprint {
  double length = 4.5;
  double width = 2.0;
  /// Added to every side of the rectangle.
  double inflation_margin = 0.2;

  /// Throws ConfigError unless length, width > 0 and margin >= 0.
  void validate() const;
  bool operator==(const VehicleFootprint&) const = default;
};

struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;

  std::array<Vec2, 4> corners() const;
};

/// Inflated footprint rectangle at a pose.
OrientedBox make_box(Vec2 center, double heading, const VehicleFootprint& footprint);
/// Footprint rectangle without inflation.
OrientedBox make_body_box(Vec2 center, double heading, const VehicleFootprint& footprint);

/// Separating-axis test; boxes that only touch do not overlap. Symmetric.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

/// Euclidean gap between two boxes, 0 when they overlap.
double box_distance(const OrientedBox& a, const OrientedBox& b);

/// Heading at each future step from consecutive displacements. Steps shorter
/// than 1 mm keep the previous heading, starting from the origin heading.
std::vector<double> future_headings(const FutureTrajectory& future);

}  // namespace ltp
