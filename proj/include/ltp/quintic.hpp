#pragma once

#include <array>

namespace ltp {

/// Position, velocity and acceleration of a 1-D coordinate at one instant.
struct BoundaryState {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

/// p(t) = c0 + c1 t + ... + c5 t^5 on [0, duration].
class QuinticPolynomial {
 public:
  QuinticPolynomial(const std::array<double, 6>& coefficients, double duration);

  const std::array<double, 6>& coefficients() const { return c_; }
  double duration() const { return duration_; }

  double value(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  double jerk(double t) const;

  bool operator==(const QuinticPolynomial&) const = default;

 private:
  std::array<double, 6> c_;
  double duration_;
};

/// Unique quintic matching position/velocity/acceleration at t = 0 and
/// t = duration. This is the minimum squared-jerk interpolant for those six
/// conditions. Throws DomainError when duration <= 0.
QuinticPolynomial fit_quintic(const BoundaryState& start, const BoundaryState& end, double duration);

}  // namespace ltp
