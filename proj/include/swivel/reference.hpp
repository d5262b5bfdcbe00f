#pragma once

#include "swivel/controller.hpp"

#include <numbers>

namespace swivel {

/// theta(t) = A sin(2 pi f t) about the fixed unit axis n: R_d = exp(theta n^),
/// omega_d = theta' n, domega_d = theta'' n. Throws InvalidArgument for a
/// zero axis.
ReferenceSample reference_fixed_axis_sinusoid(double t, double amplitude, double freq_hz,
                                              const Vec3& axis);

/// Reference from 312 angles and their first two time derivatives, using
/// R_d^T dR_d/dt = hat(omega_d). Angles, rates and accelerations are packed
/// as (yaw, roll, pitch).
ReferenceSample reference_from_euler312(const Euler312& angles, const Vec3& rates,
                                        const Vec3& accels);

/// Commanded roll must stay this far inside the 312 chart singularity.
inline constexpr double kRollMargin = 5.0 * std::numbers::pi / 180.0;

struct SmoothingFilter {
  double natural_freq = 4.0;  // rad/s
  double damping = 1.0;
};

/// Pilot-stick reference: each 312 angle command (yaw, roll, pitch stick plus
/// the transition trim on pitch) passes through a second-order smoothing
/// filter; rates and accelerations come from the filter states, not from
/// numerical differentiation.
class Euler312StickReference {
 public:
  explicit Euler312StickReference(SmoothingFilter filter, const Euler312& initial = {});

  /// Advances the filters by dt with the command held constant.
  /// command.pitch is the total desired pitch (stick + trim).
  void advance(const Euler312& command, double dt);

  /// Throws GimbalLock when the filtered roll leaves the allowed range.
  ReferenceSample sample() const;

  Euler312 angles() const;
  Vec3 rates() const { return rate_; }
  Vec3 accels() const;

 private:
  SmoothingFilter filter_;
  Vec3 command_ = Vec3::Zero();
  Vec3 value_ = Vec3::Zero();
  Vec3 rate_ = Vec3::Zero();
};

}  // namespace swivel
