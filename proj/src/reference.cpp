#include "swivel/reference.hpp"

#include "swivel/errors.hpp"

#include <algorithm>
#include <cmath>

namespace swivel {

ReferenceSample reference_fixed_axis_sinusoid(double t, double amplitude, double freq_hz,
                                              const Vec3& axis) {
  const double norm = axis.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "reference axis must be nonzero");
  const Vec3 n = axis / norm;
  const double w = 2.0 * std::numbers::pi * freq_hz;
  const double theta = amplitude * std::sin(w * t);
  const double theta_dot = amplitude * w * std::cos(w * t);
  const double theta_ddot = -amplitude * w * w * std::sin(w * t);
  const double theta_d3 = -amplitude * w * w * w * std::cos(w * t);
  const double theta_d4 = amplitude * w * w * w * w * std::sin(w * t);
  return {exp_so3(theta * n), theta_dot * n, theta_ddot * n, theta_d3 * n, theta_d4 * n};
}

namespace {

Mat3 rot_x(double a) { return exp_so3(a * Vec3::UnitX()); }
Mat3 rot_y(double a) { return exp_so3(a * Vec3::UnitY()); }

}  // namespace

ReferenceSample reference_from_euler312(const Euler312& e, const Vec3& rates,
                                        const Vec3& accels) {
  // R = Rz(yaw) Rx(roll) Ry(pitch), so the body rate is
  //   w = Ry^T (Rx^T e_z yaw' + e_x roll') + e_y pitch'.
  const Mat3 rx_t = rot_x(e.roll).transpose();
  const Mat3 ry_t = rot_y(e.pitch).transpose();
  const Vec3 ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  const double yaw_d = rates(0), roll_d = rates(1), pitch_d = rates(2);

  const Vec3 q = rx_t * ez * yaw_d + ex * roll_d;
  const Vec3 q_dot = -roll_d * ex.cross(rx_t * ez) * yaw_d + rx_t * ez * accels(0) +
                     ex * accels(1);

  ReferenceSample out;
  out.attitude = euler312_to_rotation(e);
  out.omega = ry_t * q + ey * pitch_d;
  out.omega_dot = -pitch_d * ey.cross(ry_t * q) + ry_t * q_dot + ey * accels(2);
  return out;
}

Euler312StickReference::Euler312StickReference(SmoothingFilter filter, const Euler312& initial)
    : filter_(filter) {
  if (!(filter.natural_freq > 0.0) || !(filter.damping > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "smoothing filter parameters must be positive");
  }
  value_ = Vec3(initial.yaw, initial.roll, initial.pitch);
  command_ = value_;
}

void Euler312StickReference::advance(const Euler312& command, double dt) {
  command_ = Vec3(command.yaw, command.roll, command.pitch);
  const double w = filter_.natural_freq;
  const double z = filter_.damping;
  auto acc = [&](const Vec3& x, const Vec3& v) -> Vec3 {
    return w * w * (command_ - x) - 2.0 * z * w * v;
  };
  // Substep so that w * dt stays small regardless of the caller's step.
  const int n = std::max(1, static_cast<int>(std::ceil(dt * w / 0.05)));
  const double h = dt / n;
  for (int i = 0; i < n; ++i) {
    const Vec3 x = value_, v = rate_;
    const Vec3 k1x = v, k1v = acc(x, v);
    const Vec3 k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, k2x);
    const Vec3 k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, k3x);
    const Vec3 k4x = v + h * k3v, k4v = acc(x + h * k3x, k4x);
    value_ = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    rate_ = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
}

Euler312 Euler312StickReference::angles() const { return {value_(0), value_(1), value_(2)}; }

Vec3 Euler312StickReference::accels() const {
  const double w = filter_.natural_freq;
  return w * w * (command_ - value_) - 2.0 * filter_.damping * w * rate_;
}

ReferenceSample Euler312StickReference::sample() const {
  if (!(std::abs(value_(1)) < std::numbers::pi / 2.0 - kRollMargin)) {
    throw Error(ErrorCode::GimbalLock, "reference roll too close to +-90 deg");
  }
  ReferenceSample out = reference_from_euler312(angles(), rate_, accels());

  // Higher body-rate derivatives: central differences of domega_d along the
  // filter's own Taylor expansion (command held), which is noise free.
  const double w = filter_.natural_freq;
  const double z = filter_.damping;
  const Vec3 a2 = accels();
  const Vec3 a3 = -w * w * rate_ - 2.0 * z * w * a2;
  const Vec3 a4 = -w * w * a2 - 2.0 * z * w * a3;
  const Vec3 a5 = -w * w * a3 - 2.0 * z * w * a4;
  auto omega_dot_at = [&](double s) {
    const Vec3 x = value_ + s * rate_ + s * s / 2.0 * a2 + s * s * s / 6.0 * a3 +
                   s * s * s * s / 24.0 * a4;
    const Vec3 v = rate_ + s * a2 + s * s / 2.0 * a3 + s * s * s / 6.0 * a4 +
                   s * s * s * s / 24.0 * a5;
    const Vec3 acc = w * w * (command_ - x) - 2.0 * z * w * v;
    return reference_from_euler312({x(0), x(1), x(2)}, v, acc).omega_dot;
  };
  const double eps = 1e-3;
  const Vec3 fp = omega_dot_at(eps), fm = omega_dot_at(-eps);
  out.omega_ddot = (fp - fm) / (2.0 * eps);
  out.omega_dddot = (fp - 2.0 * out.omega_dot + fm) / (eps * eps);
  return out;
}

}  // namespace swivel
