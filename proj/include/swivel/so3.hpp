#pragma once

#include "swivel/linalg.hpp"

#include <array>

namespace swivel {

/// 312 Euler angles (yaw about inertial Z, then roll about the new X, then
/// pitch about Y): R = Rz(yaw) * Rx(roll) * Ry(pitch). Radians.
struct Euler312 {
  double yaw = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
};

/// Symmetric positive-definite weight of the configuration error function.
/// Construction validates symmetry (1e-12) and positivity; distinct
/// eigenvalues are only required where the four-critical-point structure is
/// used (critical_points, equilibrium classification).
class ErrorGainMatrix {
 public:
  explicit ErrorGainMatrix(const Mat3& p);
  static ErrorGainMatrix diagonal(double p1, double p2, double p3);

  const Mat3& matrix() const noexcept { return p_; }
  const SymmetricEigen3& eigen() const noexcept { return eig_; }
  /// Minimum gap between consecutive eigenvalues.
  double eigenvalue_separation() const noexcept;

 private:
  Mat3 p_;
  SymmetricEigen3 eig_;
};

Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NonSkewInput when ||S + S^T||_F >= 1e-9.
Vec3 vee(const Mat3& s);

/// Rodrigues formula.
Mat3 exp_so3(const Vec3& rotation_vector);

/// Principal logarithm, norm in [0, pi]. For half-turns the axis is chosen so
/// that its first non-negligible component is positive.
Vec3 log_so3(const Mat3& r);

/// Rotation angle in [0, pi] (geodesic distance from the identity).
double rotation_angle(const Mat3& r);

bool is_rotation(const Mat3& r, double tol = 1e-9);

Mat3 euler312_to_rotation(const Euler312& e);

/// Throws GimbalLock when |R(2,1)| >= 1 - 1e-9.
Euler312 rotation_to_euler312(const Mat3& r);

/// Telemetry variant: never throws; on the gimbal set the yaw/pitch split is
/// arbitrary (pitch is reported as zero).
Euler312 rotation_to_euler312_unchecked(const Mat3& r) noexcept;

/// psi = 1/2 tr(P (I - R_e)).
double config_error_psi(const Mat3& r_e, const ErrorGainMatrix& p);

/// e_R = 1/2 vee(P R_e - R_e^T P), the left-trivialized gradient of psi.
Vec3 attitude_error_eR(const Mat3& r_e, const ErrorGainMatrix& p);

/// Derivative of e_R(R_e exp(t hat(eta))) at t = 0 with respect to eta.
Mat3 attitude_error_jacobian(const Mat3& r_e, const ErrorGainMatrix& p);

/// {I, exp(pi v1^), exp(pi v2^), exp(pi v3^)} with v_i the eigenvectors of P
/// in ascending eigenvalue order. Throws DegenerateP when two eigenvalues
/// are within 1e-9.
std::array<Mat3, 4> critical_points(const ErrorGainMatrix& p);

/// Nearest rotation (polar factor). Throws TooFarFromSO3 when
/// ||R^T R - I||_F >= 0.1 or det R <= 0.
Mat3 orthonormalize(const Mat3& r);

}  // namespace swivel
