#include "swivel/vehicle.hpp"

#include "swivel/errors.hpp"

#include <algorithm>
#include <cmath>

namespace swivel {

void VehicleParams::validate() const {
  const double fields[] = {j_xx, j_yy, j_zz, arm, motor_separation, mass,
                           motor_time_constant, max_motor_force, max_swivel, gravity};
  for (double f : fields) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error(ErrorCode::InvalidArgument, "vehicle parameters must be positive and finite");
    }
  }
  if (max_swivel >= std::numbers::pi / 2.0) {
    throw Error(ErrorCode::InvalidArgument, "max_swivel must be below pi/2");
  }
}

StateDerivative& StateDerivative::operator+=(const StateDerivative& o) {
  attitude += o.attitude;
  omega += o.omega;
  delta += o.delta;
  delta_rate += o.delta_rate;
  for (std::size_t i = 0; i < motor_thrust.size(); ++i) motor_thrust[i] += o.motor_thrust[i];
  return *this;
}

StateDerivative& StateDerivative::operator*=(double k) {
  attitude *= k;
  omega *= k;
  delta *= k;
  delta_rate *= k;
  for (double& f : motor_thrust) f *= k;
  return *this;
}

StateDerivative operator+(StateDerivative a, const StateDerivative& b) { return a += b; }
StateDerivative operator*(double k, StateDerivative d) { return d *= k; }

VehicleState advance(const VehicleState& s, const StateDerivative& d, double h) {
  VehicleState out = s;
  out.attitude += h * d.attitude;
  out.omega += h * d.omega;
  out.delta += h * d.delta;
  out.delta_rate += h * d.delta_rate;
  for (std::size_t i = 0; i < out.motor_thrust.size(); ++i) {
    out.motor_thrust[i] += h * d.motor_thrust[i];
  }
  return out;
}

namespace {

bool finite(const VehicleState& s) {
  bool ok = s.attitude.allFinite() && s.omega.allFinite() && std::isfinite(s.delta) &&
            std::isfinite(s.delta_rate);
  for (double f : s.motor_thrust) ok = ok && std::isfinite(f);
  return ok;
}

void check_swivel(double delta, double limit) {
  if (!(std::abs(delta) < limit)) {
    throw Error(ErrorCode::SwivelSingularity,
                "|delta| = " + std::to_string(std::abs(delta)) + " rad at or beyond " +
                    std::to_string(limit));
  }
}

}  // namespace

VehicleState renormalize(const VehicleState& s) {
  if (!finite(s)) throw Error(ErrorCode::NonFiniteState, "state has non-finite components");
  VehicleState out = s;
  out.attitude = orthonormalize(s.attitude);
  return out;
}

MeanDiffInputs mean_diff_from_wing(const WingInputs& w) {
  return {0.5 * (w.thrust1 + w.thrust2), 0.5 * (w.thrust1 - w.thrust2),
          0.5 * (w.torque1 + w.torque2), 0.5 * (w.torque2 - w.torque1)};
}

WingInputs wing_from_mean_diff(const MeanDiffInputs& md) {
  return {md.thrust_mean + md.thrust_diff, md.thrust_mean - md.thrust_diff,
          md.torque_mean - md.torque_diff, md.torque_mean + md.torque_diff};
}

Mat3 swivel_rotation(double delta) {
  const double c = std::cos(delta), s = std::sin(delta);
  Mat3 r;
  r << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return r;
}

std::array<Mat3, 2> wing_attitudes(const Mat3& attitude, double delta) {
  const Mat3 rd = swivel_rotation(delta);
  return {attitude * rd.transpose(), attitude * rd};
}

Mat3 inertia_of_delta(double delta, const VehicleParams& p) {
  check_swivel(delta, std::numbers::pi / 2.0);
  const double c2 = std::cos(delta) * std::cos(delta);
  const double s2 = std::sin(delta) * std::sin(delta);
  return Vec3(2.0 * p.j_xx, 2.0 * (c2 * p.j_yy + s2 * p.j_zz), 2.0 * (c2 * p.j_zz + s2 * p.j_yy))
      .asDiagonal();
}

Mat3 inertia_rate(double delta, double delta_rate, const VehicleParams& p) {
  check_swivel(delta, std::numbers::pi / 2.0);
  const double k = 2.0 * delta_rate * std::sin(2.0 * delta);
  return Vec3(0.0, k * (p.j_zz - p.j_yy), k * (p.j_yy - p.j_zz)).asDiagonal();
}

Vec3 control_moment(const MeanDiffInputs& md, double delta, const VehicleParams& p) {
  check_swivel(delta, std::numbers::pi / 2.0);
  return {2.0 * md.torque_mean, 2.0 * p.arm * md.thrust_diff * std::cos(delta),
          -2.0 * p.arm * md.thrust_mean * std::sin(delta)};
}

StateDerivative dynamics_deriv(const VehicleState& s, const WingInputs& w, const VehicleParams& p) {
  if (!finite(s)) throw Error(ErrorCode::NonFiniteState, "state has non-finite components");
  check_swivel(s.delta, kSwivelGuard);

  const MeanDiffInputs md = mean_diff_from_wing(w);
  const Vec3 moment = control_moment(md, s.delta, p);
  const Vec3 jdiag = inertia_of_delta(s.delta, p).diagonal();
  const Vec3 jdot = inertia_rate(s.delta, s.delta_rate, p).diagonal();
  const Vec3& om = s.omega;

  StateDerivative d;
  d.attitude = s.attitude * hat(om);
  d.omega = (moment - jdot.cwiseProduct(om) - om.cross(jdiag.cwiseProduct(om)))
                .cwiseQuotient(jdiag);
  d.delta = s.delta_rate;
  d.delta_rate = (2.0 * md.torque_diff - std::sin(2.0 * s.delta) * (p.j_yy - p.j_zz) *
                                             (om.y() * om.y() - om.z() * om.z())) /
                 (2.0 * p.j_xx);
  return d;
}

MotorAllocation motor_allocation(double thrust, double torque, const VehicleParams& p) {
  MotorAllocation m;
  m.demanded_a = 0.5 * thrust + torque / p.motor_separation;
  m.demanded_b = 0.5 * thrust - torque / p.motor_separation;
  m.a = std::clamp(m.demanded_a, 0.0, p.max_motor_force);
  m.b = std::clamp(m.demanded_b, 0.0, p.max_motor_force);
  m.saturated = m.a != m.demanded_a || m.b != m.demanded_b;
  return m;
}

WingInputs wing_inputs_from_motors(const MotorThrusts& f, const VehicleParams& p) {
  const double half_sep = 0.5 * p.motor_separation;
  return {f[0] + f[1], f[2] + f[3], half_sep * (f[0] - f[1]), half_sep * (f[2] - f[3])};
}

double motor_lag_deriv(double f_act, double f_cmd, double time_constant, double max_force) {
  return (std::clamp(f_cmd, 0.0, max_force) - f_act) / time_constant;
}

StateDerivative plant_deriv(const VehicleState& s, const MotorThrusts& command,
                            const VehicleParams& p, ActuatorModel model) {
  if (model == ActuatorModel::Ideal) {
    MotorThrusts clipped{};
    for (std::size_t i = 0; i < clipped.size(); ++i) {
      clipped[i] = std::clamp(command[i], 0.0, p.max_motor_force);
    }
    return dynamics_deriv(s, wing_inputs_from_motors(clipped, p), p);
  }
  StateDerivative d = dynamics_deriv(s, wing_inputs_from_motors(s.motor_thrust, p), p);
  for (std::size_t i = 0; i < command.size(); ++i) {
    d.motor_thrust[i] =
        motor_lag_deriv(s.motor_thrust[i], command[i], p.motor_time_constant, p.max_motor_force);
  }
  return d;
}

Vec3 total_angular_momentum(const VehicleState& s, const VehicleParams& p) {
  return s.attitude * (inertia_of_delta(s.delta, p) * s.omega);
}

double rotational_energy(const VehicleState& s, const VehicleParams& p) {
  return 0.5 * s.omega.dot(inertia_of_delta(s.delta, p) * s.omega) +
         p.j_xx * s.delta_rate * s.delta_rate;
}

}  // namespace swivel
