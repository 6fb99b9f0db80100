#include "ltp/frenet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "ltp/errors.hpp"

namespace ltp {

namespace {

constexpr double kDuplicateEps = 1e-9;
constexpr int kBisectionIterations = 80;
constexpr double kWarmStartBehind = 10.0;
constexpr double kWarmStartAhead = 30.0;

}  // namespace

ReferencePath::ReferencePath(std::span<const Vec2> raw_points) {
  if (raw_points.size() < 2) {
    throw ConstructionError("reference path needs at least 2 points");
  }
  points_.push_back(raw_points.front());
  for (std::size_t i = 1; i < raw_points.size(); ++i) {
    const Vec2 a = raw_points[i - 1];
    const Vec2 b = raw_points[i];
    const double len = distance(a, b);
    if (len < kDuplicateEps) {
      throw ConstructionError("duplicate consecutive points at index " + std::to_string(i));
    }
    const auto pieces = static_cast<std::size_t>(std::ceil(len / kMaxWaypointSpacing - 1e-12));
    for (std::size_t k = 1; k <= pieces; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(pieces);
      points_.push_back(k == pieces ? b : a + (b - a) * u);
    }
  }

  arclength_.resize(points_.size());
  arclength_[0] = 0.0;
  std::vector<double> seg_heading(points_.size() - 1);
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 delta = points_[i + 1] - points_[i];
    arclength_[i + 1] = arclength_[i] + delta.norm();
    seg_heading[i] = std::atan2(delta.y, delta.x);
  }
  // Unwrap so consecutive segment headings differ by less than pi.
  for (std::size_t i = 1; i < seg_heading.size(); ++i) {
    seg_heading[i] = seg_heading[i - 1] + normalize_angle(seg_heading[i] - seg_heading[i - 1]);
  }

  headings_.resize(points_.size());
  headings_.front() = seg_heading.front();
  headings_.back() = seg_heading.back();
  for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
    headings_[i] = 0.5 * (seg_heading[i - 1] + seg_heading[i]);
  }
}

std::pair<std::size_t, double> ReferencePath::locate(double s) const {
  s = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  std::size_t seg = it == arclength_.begin() ? 0 : static_cast<std::size_t>(it - arclength_.begin()) - 1;
  seg = std::min(seg, segment_count() - 1);
  const double len = arclength_[seg + 1] - arclength_[seg];
  const double u = std::clamp((s - arclength_[seg]) / len, 0.0, 1.0);
  return {seg, u};
}

Vec2 ReferencePath::point_on_segment(std::size_t seg, double u) const {
  return points_[seg] + (points_[seg + 1] - points_[seg]) * u;
}

double ReferencePath::heading_on_segment(std::size_t seg, double u) const {
  return headings_[seg] + (headings_[seg + 1] - headings_[seg]) * u;
}

Vec2 ReferencePath::point_at(double s) const {
  const auto [seg, u] = locate(s);
  return point_on_segment(seg, u);
}

double ReferencePath::heading_at(double s) const {
  const auto [seg, u] = locate(s);
  return heading_on_segment(seg, u);
}

ReferencePath build_reference_path(std::span<const Vec2> raw_points) {
  return ReferencePath(raw_points);
}

ReferencePath load_reference_path(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open reference path file " + file.string());
  std::vector<Vec2> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Vec2 p;
    if (!(ss >> p.x >> p.y)) throw ParseError(file.string(), line_no, "expected `x y`");
    pts.push_back(p);
  }
  return ReferencePath(pts);
}

namespace {

struct Projection {
  double s = 0.0;
  double d = 0.0;
  std::size_t seg = 0;
  double u = 0.0;
};

// Tangential residual of `p` against the path frame at (seg, u). The foot of
// the projection is where this changes sign from positive to negative.
double residual(const ReferencePath& path, Vec2 p, std::size_t seg, double u) {
  return (p - path.point_on_segment(seg, u)).dot(unit_from_angle(path.heading_on_segment(seg, u)));
}

std::optional<Projection> project_on_segment(const ReferencePath& path, Vec2 p, std::size_t seg) {
  double lo = 0.0;
  double hi = 1.0;
  const double f_lo = residual(path, p, seg, lo);
  const double f_hi = residual(path, p, seg, hi);
  if (!(f_lo >= 0.0 && f_hi <= 0.0)) return std::nullopt;
  double u = 0.0;
  if (f_lo == 0.0) {
    u = 0.0;
  } else if (f_hi == 0.0) {
    u = 1.0;
  } else {
    for (int it = 0; it < kBisectionIterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (residual(path, p, seg, mid) > 0.0) lo = mid; else hi = mid;
    }
    u = 0.5 * (lo + hi);
  }
  const Vec2 foot = path.point_on_segment(seg, u);
  const Vec2 normal = unit_from_angle(path.heading_on_segment(seg, u)).left_normal();
  const auto& arc = path.cumulative_arclength();
  return Projection{arc[seg] + u * (arc[seg + 1] - arc[seg]), (p - foot).dot(normal), seg, u};
}

std::optional<Projection> scan(const ReferencePath& path, Vec2 p, std::size_t first, std::size_t last) {
  std::optional<Projection> best;
  for (std::size_t seg = first; seg <= last; ++seg) {
    auto pr = project_on_segment(path, p, seg);
    if (pr && (!best || std::abs(pr->d) < std::abs(best->d))) best = pr;
  }
  return best;
}

Projection project(const ReferencePath& path, Vec2 p, std::optional<double> hint_s) {
  const std::size_t last_seg = path.segment_count() - 1;
  if (hint_s) {
    const std::size_t first = path.locate(*hint_s - kWarmStartBehind).first;
    const std::size_t last = path.locate(*hint_s + kWarmStartAhead).first;
    auto local = scan(path, p, first, last);
    if (local && std::abs(local->d) <= kCorridorHalfWidth) return *local;
  }
  if (auto full = scan(path, p, 0, last_seg)) return *full;

  // No interior foot point: the point lies before the start or past the end.
  const bool before_start = residual(path, p, 0, 0.0) < 0.0;
  const std::size_t seg = before_start ? 0 : last_seg;
  const double u = before_start ? 0.0 : 1.0;
  const double overshoot = std::abs(residual(path, p, seg, u));
  if (overshoot > kCorridorHalfWidth) {
    throw OutOfCorridorError("point lies beyond the path ends");
  }
  const Vec2 normal = unit_from_angle(path.heading_on_segment(seg, u)).left_normal();
  return Projection{before_start ? 0.0 : path.length(),
                    (p - path.point_on_segment(seg, u)).dot(normal), seg, u};
}

}  // namespace

FrenetPoint cartesian_to_frenet(const ReferencePath& path, const CartesianState& state,
                                std::optional<double> hint_s) {
  const Projection pr = project(path, state.position, hint_s);
  if (std::abs(pr.d) > kCorridorHalfWidth) {
    throw OutOfCorridorError("lateral offset " + std::to_string(pr.d) + " m exceeds corridor");
  }
  const Vec2 t = unit_from_angle(path.heading_on_segment(pr.seg, pr.u));
  const Vec2 n = t.left_normal();
  FrenetPoint fp;
  fp.s = pr.s;
  fp.d = pr.d;
  fp.s_dot = state.velocity.dot(t);
  fp.d_dot = state.velocity.dot(n);
  fp.s_ddot = state.acceleration.dot(t);
  fp.d_ddot = state.acceleration.dot(n);
  return fp;
}

CartesianPose frenet_to_cartesian(const ReferencePath& path, const FrenetPoint& fp) {
  constexpr double kTol = 1e-9;
  if (!(fp.s >= -kTol && fp.s <= path.length() + kTol)) {
    throw RangeError("s = " + std::to_string(fp.s) + " outside [0, " + std::to_string(path.length()) + "]");
  }
  const auto [seg, u] = path.locate(fp.s);
  const double path_heading = path.heading_on_segment(seg, u);
  const Vec2 t = unit_from_angle(path_heading);
  const Vec2 n = t.left_normal();
  CartesianPose pose;
  pose.position = path.point_on_segment(seg, u) + n * fp.d;
  pose.velocity = t * fp.s_dot + n * fp.d_dot;
  pose.heading = path_heading;
  if (std::hypot(fp.s_dot, fp.d_dot) > 1e-6) {
    pose.heading = normalize_angle(path_heading + std::atan2(fp.d_dot, fp.s_dot));
  } else {
    pose.heading = normalize_angle(path_heading);
  }
  return pose;
}

}  // namespace ltp
