#include "ltp/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltp/errors.hpp"

namespace ltp {

void VehicleFootprint::validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !(inflation_margin >= 0.0)) {
    throw ConfigError("footprint needs positive length and width and a non-negative margin");
  }
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 f = unit_from_angle(heading) * half_length;
  const Vec2 l = unit_from_angle(heading).left_normal() * half_width;
  return {center + f + l, center - f + l, center - f - l, center + f - l};
}

OrientedBox make_box(Vec2 center, double heading, const VehicleFootprint& fp) {
  return {center, heading, 0.5 * fp.length + fp.inflation_margin, 0.5 * fp.width + fp.inflation_margin};
}

OrientedBox make_body_box(Vec2 center, double heading, const VehicleFootprint& fp) {
  return {center, heading, 0.5 * fp.length, 0.5 * fp.width};
}

namespace {

// Half-extent of a box projected on unit axis `n`.
double projected_radius(const OrientedBox& b, Vec2 n) {
  const Vec2 u = unit_from_angle(b.heading);
  return b.half_length * std::abs(u.dot(n)) + b.half_width * std::abs(u.left_normal().dot(n));
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + ab * t);
}

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 delta = b.center - a.center;
  const double ra = std::hypot(a.half_length, a.half_width);
  const double rb = std::hypot(b.half_length, b.half_width);
  if (delta.dot(delta) >= (ra + rb) * (ra + rb)) return false;

  const Vec2 ua = unit_from_angle(a.heading);
  const Vec2 ub = unit_from_angle(b.heading);
  for (const Vec2 axis : {ua, ua.left_normal(), ub, ub.left_normal()}) {
    if (std::abs(delta.dot(axis)) >= projected_radius(a, axis) + projected_radius(b, axis)) return false;
  }
  return true;
}

double box_distance(const OrientedBox& a, const OrientedBox& b) {
  if (boxes_overlap(a, b)) return 0.0;
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

std::vector<double> future_headings(const FutureTrajectory& future) {
  std::vector<double> out;
  out.reserve(future.positions.size());
  double heading = future.origin_heading;
  Vec2 prev = future.origin;
  for (const Vec2& p : future.positions) {
    const Vec2 step = p - prev;
    if (step.norm() >= 1e-3) heading = std::atan2(step.y, step.x);
    out.push_back(heading);
    prev = p;
  }
  return out;
}

}  // namespace ltp
