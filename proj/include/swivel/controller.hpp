#pragma once

#include "swivel/so3.hpp"
#include "swivel/vehicle.hpp"

#include <array>
#include <span>

namespace swivel {

/// Tuning of the cascaded attitude controller.
struct ControlGains {
  double k_R = 4.0;
  double k_omega = 1.2;
  ErrorGainMatrix P = ErrorGainMatrix::diagonal(1.0, 1.1, 1.2);
  Vec3 zeta{1.1, 1.1, 1.1};            // moment-loop damping ratios
  Vec3 natural_freq{40.0, 40.0, 25.0}; // moment-loop natural frequencies, rad/s

  /// Throws InvalidArgument unless every gain is strictly positive.
  void validate() const;

  Mat3 damping() const;    // D = diag(2 zeta_i Omega_i)
  Mat3 stiffness() const;  // K = diag(Omega_i^2)
};

/// diag(2 J_xx, 2 J_yy, 2 J_zz): inertia at delta = 0, used by the controller.
Mat3 nominal_inertia(const VehicleParams& p);

struct ReferenceSample {
  Mat3 attitude = Mat3::Identity();
  Vec3 omega = Vec3::Zero();      // body rate of the reference frame
  Vec3 omega_dot = Vec3::Zero();
  Vec3 omega_ddot = Vec3::Zero();   // used by the model-based M_d derivatives
  Vec3 omega_dddot = Vec3::Zero();
};

struct TrackingError {
  Mat3 r_e = Mat3::Identity();  // R_d^T R
  Vec3 e_R = Vec3::Zero();
  Vec3 e_omega = Vec3::Zero();  // omega - R_e^T omega_d
};

TrackingError tracking_error(const Mat3& r, const Vec3& omega, const ReferenceSample& ref,
                             const ErrorGainMatrix& p);

/// Rigid-body tracking moment
///   M_d = -k_R e_R - k_w e_w + w x J w - J (e_w^ R_e^T w_d - R_e^T dw_d).
Vec3 desired_moment(const Mat3& r, const Vec3& omega, const ReferenceSample& ref,
                    const ControlGains& g, const Mat3& j_nominal);

struct MomentJet {
  Vec3 value = Vec3::Zero();
  Vec3 rate = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// M_d with its first two time derivatives along the nominal model
///   J w' = M - w x J w,  J w'' = M' - w' x J w - w x J w',
/// where M and M' are the controller's own moment states. Only the measured
/// (R, w) and the reference derivatives enter; nothing is differenced.
MomentJet desired_moment_jet(const Mat3& r, const Vec3& omega, const Vec3& moment,
                             const Vec3& moment_rate, const ReferenceSample& ref,
                             const ControlGains& g, const Mat3& j_nominal);

/// u = ddM_d - D dM_e - K M_e.
Vec3 moment_tracking_u(const Vec3& m_e, const Vec3& m_e_rate, const Vec3& m_d_accel,
                       const ControlGains& g);

/// M_z = -2 l T0 tan(delta). Throws SwivelSingularity for |delta| >= pi/2.
double mz_from_delta(double delta, double thrust_t0, double arm);
/// delta = -atan(M_z / (2 l T0)).
double delta_from_mz(double mz, double thrust_t0, double arm);

struct MzRates {
  double rate = 0.0;
  double accel = 0.0;
};

MzRates mz_derivatives(double delta, double delta_rate, double delta_accel, double thrust_t0,
                       double arm);

/// Differential wing torque that makes the plant's swivel dynamics produce
/// ddM_z = u_z. Throws SwivelSingularity, or DegenerateThrust for T0 <= 1e-9.
double tau_delta_from_uz(double u_z, double delta, double delta_rate, double omega_y,
                         double omega_z, double thrust_t0, const VehicleParams& p);

/// (M[k] - 2 M[k-1] + M[k-2]) / h^2; history is oldest first.
Vec3 estimate_md_second_derivative(std::span<const Vec3, 3> history, double h);

enum class DerivativeEstimator {
  Difference,  // backward differences of the last three M_d samples
  Model,       // desired_moment_jet on the nominal model
};

struct ControllerState {
  double thrust_t0 = 3.924;  // N, exogenous per-wing collective thrust
  DerivativeEstimator estimator = DerivativeEstimator::Model;

  Eigen::Vector2d extension_moment = Eigen::Vector2d::Zero();  // M_x, M_y
  Eigen::Vector2d extension_rate = Eigen::Vector2d::Zero();    // dM_x, dM_y

  std::array<Vec3, 3> md_history{};  // oldest first
  int history_count = 0;
};

struct ControllerOutput {
  WingInputs wings;
  MeanDiffInputs mean_diff;
  TrackingError error;
  Vec3 moment = Vec3::Zero();          // M (extension states, z from delta)
  Vec3 moment_rate = Vec3::Zero();
  Vec3 moment_desired = Vec3::Zero();  // M_d
  Vec3 moment_desired_rate = Vec3::Zero();
  Vec3 moment_desired_accel = Vec3::Zero();
  Vec3 u = Vec3::Zero();
};

struct ControllerStep {
  ControllerOutput output;
  ControllerState state;
};

/// One controller tick at period h on the measured state. Pure: the returned
/// state is the only carrier of memory.
ControllerStep controller_step(const VehicleState& measured, const ReferenceSample& ref,
                               const ControllerState& cs, const ControlGains& g,
                               const VehicleParams& p, double h);

}  // namespace swivel
