#include "swivel/so3.hpp"

#include "swivel/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace swivel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSkewInput: return "NonSkewInput";
    case ErrorCode::GimbalLock: return "GimbalLock";
    case ErrorCode::DegenerateP: return "DegenerateP";
    case ErrorCode::TooFarFromSO3: return "TooFarFromSO3";
    case ErrorCode::SwivelSingularity: return "SwivelSingularity";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::DegenerateThrust: return "DegenerateThrust";
    case ErrorCode::NotCriticalPoint: return "NotCriticalPoint";
    case ErrorCode::NonHyperbolic: return "NonHyperbolic";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
  }
  return "Unknown";
}

ErrorGainMatrix::ErrorGainMatrix(const Mat3& p) : p_(p) {
  if (!p.allFinite()) throw Error(ErrorCode::InvalidArgument, "P has non-finite entries");
  if ((p - p.transpose()).norm() > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "P must be symmetric");
  }
  eig_ = symmetric_eigen(p);
  if (!(eig_.values(0) > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "P must be positive definite");
  }
}

ErrorGainMatrix ErrorGainMatrix::diagonal(double p1, double p2, double p3) {
  return ErrorGainMatrix(Vec3(p1, p2, p3).asDiagonal().toDenseMatrix());
}

double ErrorGainMatrix::eigenvalue_separation() const noexcept {
  return std::min(eig_.values(1) - eig_.values(0), eig_.values(2) - eig_.values(1));
}

Mat3 hat(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& s) {
  if ((s + s.transpose()).norm() >= 1e-9) {
    throw Error(ErrorCode::NonSkewInput, "matrix is not skew-symmetric");
  }
  // Average both triangles so the result is the vee of the skew part.
  return 0.5 * Vec3(s(2, 1) - s(1, 2), s(0, 2) - s(2, 0), s(1, 0) - s(0, 1));
}

namespace {

Vec3 vee_of_skew_part(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

}  // namespace

Mat3 exp_so3(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 k = hat(w);
  double a, b;
  if (theta < 1e-4) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log_so3(const Mat3& r) {
  const Vec3 s = vee_of_skew_part(r);  // sin(theta) * axis
  const double sin_t = s.norm();
  const double cos_t = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(sin_t, cos_t);

  if (cos_t > -0.9) {
    if (theta < 1e-6) return s * (1.0 + theta * theta / 6.0);
    return s * (theta / sin_t);
  }

  // Near a half-turn the skew part loses the axis; read it from the symmetric
  // part instead: (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) n n^T.
  const Mat3 nn = (0.5 * (r + r.transpose()) - cos_t * Mat3::Identity()) / (1.0 - cos_t);
  int k = 0;
  nn.diagonal().maxCoeff(&k);
  Vec3 axis = nn.col(k) / std::sqrt(std::max(nn(k, k), 0.0));
  axis.normalize();

  if (sin_t > 1e-12) {
    if (axis.dot(s) < 0.0) axis = -axis;
  } else {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis(i)) > 1e-12) {
        if (axis(i) < 0.0) axis = -axis;
        break;
      }
    }
  }
  return theta * axis;
}

double rotation_angle(const Mat3& r) {
  const double sin_t = vee_of_skew_part(r).norm();
  const double cos_t = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  return std::atan2(sin_t, cos_t);
}

bool is_rotation(const Mat3& r, double tol) {
  return r.allFinite() && (r.transpose() * r - Mat3::Identity()).norm() < tol &&
         std::abs(r.determinant() - 1.0) < tol;
}

Mat3 euler312_to_rotation(const Euler312& e) {
  const double cps = std::cos(e.yaw), sps = std::sin(e.yaw);
  const double cph = std::cos(e.roll), sph = std::sin(e.roll);
  const double cth = std::cos(e.pitch), sth = std::sin(e.pitch);
  Mat3 r;
  r << cth * cps - sph * sth * sps, -cph * sps, sth * cps + sph * cth * sps,
       cth * sps + sph * sth * cps, cph * cps, sth * sps - sph * cth * cps,
       -cph * sth, sph, cph * cth;
  return r;
}

Euler312 rotation_to_euler312_unchecked(const Mat3& r) noexcept {
  Euler312 e;
  const double c_roll = std::hypot(r(0, 1), r(1, 1));
  e.roll = std::atan2(r(2, 1), c_roll);
  if (c_roll > 1e-12) {
    e.yaw = std::atan2(-r(0, 1), r(1, 1));
    e.pitch = std::atan2(-r(2, 0), r(2, 2));
  } else {
    // Only yaw + pitch (or yaw - pitch) is observable here.
    e.pitch = 0.0;
    e.yaw = std::atan2(r(1, 0), r(0, 0));
  }
  return e;
}

Euler312 rotation_to_euler312(const Mat3& r) {
  if (std::abs(r(2, 1)) >= 1.0 - 1e-9) {
    throw Error(ErrorCode::GimbalLock, "312 roll angle at +-90 deg");
  }
  return rotation_to_euler312_unchecked(r);
}

double config_error_psi(const Mat3& r_e, const ErrorGainMatrix& p) {
  return 0.5 * (p.matrix() * (Mat3::Identity() - r_e)).trace();
}

Vec3 attitude_error_eR(const Mat3& r_e, const ErrorGainMatrix& p) {
  const Mat3& pm = p.matrix();
  return 0.5 * vee_of_skew_part(pm * r_e - r_e.transpose() * pm);
}

Mat3 attitude_error_jacobian(const Mat3& r_e, const ErrorGainMatrix& p) {
  const Mat3 a = p.matrix() * r_e;
  return 0.5 * (a.trace() * Mat3::Identity() - a.transpose());
}

std::array<Mat3, 4> critical_points(const ErrorGainMatrix& p) {
  if (p.eigenvalue_separation() <= 1e-9) {
    throw Error(ErrorCode::DegenerateP, "P eigenvalues are not distinct");
  }
  std::array<Mat3, 4> out;
  out[0] = Mat3::Identity();
  for (int i = 0; i < 3; ++i) {
    const Vec3 v = p.eigen().vectors.col(i).normalized();
    // exp(pi v^) for unit v.
    out[static_cast<std::size_t>(i + 1)] = 2.0 * v * v.transpose() - Mat3::Identity();
  }
  return out;
}

Mat3 orthonormalize(const Mat3& r) {
  if (!r.allFinite()) throw Error(ErrorCode::NonFiniteState, "orthonormalize: non-finite input");
  const double defect = (r.transpose() * r - Mat3::Identity()).norm();
  if (defect >= 0.1 || r.determinant() <= 0.0) {
    throw Error(ErrorCode::TooFarFromSO3, "matrix too far from SO(3) to project");
  }
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace swivel
