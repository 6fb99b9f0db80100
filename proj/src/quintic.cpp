#include "ltp/quintic.hpp"

#include <cmath>
#include <string>

#include "ltp/errors.hpp"

namespace ltp {

QuinticPolynomial::QuinticPolynomial(const std::array<double, 6>& coefficients, double duration)
    : c_(coefficients), duration_(duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DomainError("quintic duration must be positive, got " + std::to_string(duration));
  }
}

double QuinticPolynomial::value(double t) const {
  return c_[0] + t * (c_[1] + t * (c_[2] + t * (c_[3] + t * (c_[4] + t * c_[5]))));
}

double QuinticPolynomial::velocity(double t) const {
  return c_[1] + t * (2.0 * c_[2] + t * (3.0 * c_[3] + t * (4.0 * c_[4] + t * 5.0 * c_[5])));
}

double QuinticPolynomial::acceleration(double t) const {
  return 2.0 * c_[2] + t * (6.0 * c_[3] + t * (12.0 * c_[4] + t * 20.0 * c_[5]));
}

double QuinticPolynomial::jerk(double t) const {
  return 6.0 * c_[3] + t * (24.0 * c_[4] + t * 60.0 * c_[5]);
}

QuinticPolynomial fit_quintic(const BoundaryState& start, const BoundaryState& end, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DomainError("quintic duration must be positive, got " + std::to_string(duration));
  }
  const double T = duration;
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double h = end.position - start.position;
  const double v0 = start.velocity;
  const double v1 = end.velocity;
  const double a0 = start.acceleration;
  const double a1 = end.acceleration;

  // Closed-form solution of the 3x3 system left after the t = 0 conditions
  // fix c0..c2.
  std::array<double, 6> c{};
  c[0] = start.position;
  c[1] = v0;
  c[2] = 0.5 * a0;
  c[3] = (20.0 * h - (8.0 * v1 + 12.0 * v0) * T - (3.0 * a0 - a1) * T2) / (2.0 * T3);
  c[4] = (-30.0 * h + (14.0 * v1 + 16.0 * v0) * T + (3.0 * a0 - 2.0 * a1) * T2) / (2.0 * T3 * T);
  c[5] = (12.0 * h - 6.0 * (v1 + v0) * T + (a1 - a0) * T2) / (2.0 * T3 * T2);
  return QuinticPolynomial(c, T);
}

}  // namespace ltp
