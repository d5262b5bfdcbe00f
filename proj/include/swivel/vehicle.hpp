#pragma once

#include "swivel/so3.hpp"

#include <array>
#include <numbers>

namespace swivel {

/// Per-wing physical parameters. Defaults are the flight vehicle's values;
/// inertias are per wing, about the combined centre of mass.
struct VehicleParams {
  double j_xx = 1.111e-2;  // kg m^2
  double j_yy = 1.36e-2;
  double j_zz = 2.275e-2;
  double arm = 0.21;                 // m, thrust-line moment arm from C to each wing
  double motor_separation = 0.61;    // m, between the two motors of a wing
  double mass = 0.8;                 // kg, whole vehicle
  double motor_time_constant = 0.015;  // s
  double max_motor_force = 6.74;     // N per motor
  double max_swivel = 30.0 * std::numbers::pi / 180.0;  // rad, operating bound on delta
  double gravity = 9.81;

  /// Throws InvalidArgument unless every field is positive and max_swivel < pi/2.
  void validate() const;
  /// Hover thrust per wing, m g / 2.
  double hover_thrust() const { return 0.5 * mass * gravity; }
};

/// Beyond this |delta| the bisector frame is treated as singular.
inline constexpr double kSwivelGuard = std::numbers::pi / 2.0 - 0.01;

/// Motor order: wing 1 (a, b), wing 2 (a, b).
using MotorThrusts = std::array<double, 4>;

struct VehicleState {
  Mat3 attitude = Mat3::Identity();  // Frame-0 -> inertial
  Vec3 omega = Vec3::Zero();         // rad/s, Frame-0 components
  double delta = 0.0;                // rad, half the swivel angle
  double delta_rate = 0.0;           // rad/s
  MotorThrusts motor_thrust{};       // N, lag filter states
};

struct StateDerivative {
  Mat3 attitude = Mat3::Zero();
  Vec3 omega = Vec3::Zero();
  double delta = 0.0;
  double delta_rate = 0.0;
  MotorThrusts motor_thrust{};

  StateDerivative& operator+=(const StateDerivative& o);
  StateDerivative& operator*=(double k);
};

StateDerivative operator+(StateDerivative a, const StateDerivative& b);
StateDerivative operator*(double k, StateDerivative d);

/// s + h * d, without re-projecting the attitude.
VehicleState advance(const VehicleState& s, const StateDerivative& d, double h);
/// Re-orthonormalizes the attitude and checks finiteness.
VehicleState renormalize(const VehicleState& s);

/// Per-wing resultant thrusts (N) and torques about e_X (N m).
struct WingInputs {
  double thrust1 = 0.0;
  double thrust2 = 0.0;
  double torque1 = 0.0;
  double torque2 = 0.0;
};

struct MeanDiffInputs {
  double thrust_mean = 0.0;
  double thrust_diff = 0.0;
  double torque_mean = 0.0;
  double torque_diff = 0.0;
};

MeanDiffInputs mean_diff_from_wing(const WingInputs& w);
WingInputs wing_from_mean_diff(const MeanDiffInputs& md);

/// Rotation by +delta about e_X; maps Frame-0 components to Frame-1 components
/// (and Frame-2 components to Frame-0 components).
Mat3 swivel_rotation(double delta);

/// Wing attitudes (Frame-1 -> inertial, Frame-2 -> inertial).
std::array<Mat3, 2> wing_attitudes(const Mat3& attitude, double delta);

/// Equivalent inertia J(delta) of the two wings in Frame-0.
Mat3 inertia_of_delta(double delta, const VehicleParams& p);
/// Time derivative of inertia_of_delta along delta(t).
Mat3 inertia_rate(double delta, double delta_rate, const VehicleParams& p);

/// M = (2 tau_m, 2 l T_diff cos(delta), -2 l T_mean sin(delta)).
Vec3 control_moment(const MeanDiffInputs& md, double delta, const VehicleParams& p);

/// Frame-0 rotational dynamics driven directly by wing inputs. Motor-state
/// derivatives are zero.
StateDerivative dynamics_deriv(const VehicleState& s, const WingInputs& w, const VehicleParams& p);

struct MotorAllocation {
  double a = 0.0;  // clipped to [0, F_max]
  double b = 0.0;
  double demanded_a = 0.0;  // exact inversion before clipping
  double demanded_b = 0.0;
  bool saturated = false;
};

/// Solves f_a + f_b = T, (L/2)(f_a - f_b) = tau.
MotorAllocation motor_allocation(double thrust, double torque, const VehicleParams& p);

WingInputs wing_inputs_from_motors(const MotorThrusts& f, const VehicleParams& p);

/// (clip(f_cmd) - f_act) / time_constant, clip to [0, max_force].
double motor_lag_deriv(double f_act, double f_cmd, double time_constant, double max_force);

enum class ActuatorModel { Ideal, FirstOrderLag };

/// Full plant right-hand side for a zero-order-held motor command. With the
/// ideal model the clipped command acts instantly and motor states track it.
StateDerivative plant_deriv(const VehicleState& s, const MotorThrusts& command,
                            const VehicleParams& p, ActuatorModel model);

/// Inertial-frame angular momentum R J(delta) omega.
Vec3 total_angular_momentum(const VehicleState& s, const VehicleParams& p);

/// 1/2 w^T J(delta) w + J_xx delta_rate^2 (sum of both wings' kinetic energy).
double rotational_energy(const VehicleState& s, const VehicleParams& p);

}  // namespace swivel
