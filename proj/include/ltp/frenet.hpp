#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "ltp/vec2.hpp"

namespace ltp {

/// Lateral distance beyond which a point is not considered to belong to a path.
inline constexpr double kCorridorHalfWidth = 20.0;
/// Maximum spacing between consecutive waypoints after densification.
inline constexpr double kMaxWaypointSpacing = 1.0;

/// Polyline reference path with arclength and a continuous heading field.
///
/// Vertex headings are the bisectors of adjacent segment directions and are
/// linearly interpolated inside each segment, so the tangent/normal frame is
/// continuous along s. Immutable after construction.
class ReferencePath {
 public:
  /// Densifies `raw_points` so every segment is at most kMaxWaypointSpacing
  /// long (each raw segment is split uniformly). Throws ConstructionError on
  /// fewer than 2 points or duplicate consecutive points.
  explicit ReferencePath(std::span<const Vec2> raw_points);

  const std::vector<Vec2>& waypoints() const { return points_; }
  const std::vector<double>& cumulative_arclength() const { return arclength_; }
  /// Unwrapped vertex headings (radians).
  const std::vector<double>& headings() const { return headings_; }
  double length() const { return arclength_.back(); }
  std::size_t segment_count() const { return points_.size() - 1; }

  /// Position on the centerline; s is clamped to [0, length].
  Vec2 point_at(double s) const;
  /// Interpolated tangent heading at s; s is clamped to [0, length].
  double heading_at(double s) const;

  /// Segment index and local parameter in [0, 1] for arclength s (clamped).
  std::pair<std::size_t, double> locate(double s) const;
  Vec2 point_on_segment(std::size_t seg, double u) const;
  double heading_on_segment(std::size_t seg, double u) const;

 private:
  std::vector<Vec2> points_;
  std::vector<double> arclength_;
  std::vector<double> headings_;
};

ReferencePath build_reference_path(std::span<const Vec2> raw_points);

/// Reads a reference path from a text file with one `x y` pair per line.
/// Blank lines and lines starting with '#' are skipped.
ReferencePath load_reference_path(const std::filesystem::path& file);

struct FrenetPoint {
  double s = 0.0;
  double d = 0.0;
  double s_dot = 0.0;
  double d_dot = 0.0;
  double s_ddot = 0.0;
  double d_ddot = 0.0;

  bool operator==(const FrenetPoint&) const = default;
};

struct CartesianState {
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
};

struct CartesianPose {
  Vec2 position;
  double heading = 0.0;
  Vec2 velocity;
};

/// Projects a Cartesian state onto the path. Derivatives are rotated into the
/// local tangent/normal frame without curvature coupling terms.
///
/// `hint_s` warm-starts the search around a previous match; a full scan is
/// used when the local window yields nothing inside the corridor.
/// Throws OutOfCorridorError when |d| exceeds kCorridorHalfWidth.
FrenetPoint cartesian_to_frenet(const ReferencePath& path, const CartesianState& state,
                                std::optional<double> hint_s = std::nullopt);

/// Inverse of cartesian_to_frenet. Throws RangeError when s is outside
/// [0, length].
CartesianPose frenet_to_cartesian(const ReferencePath& path, const FrenetPoint& fp);

}  // namespace ltp
