#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's dynamics or controller code.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>()(engine_); }
  Vec3 vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Vec3 unit() {
    Vec3 v(normal(), normal(), normal());
    return v.normalized();
  }
  Mat3 rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    return q.normalized().toRotationMatrix();
  }
  Mat3 spd(double lo, double hi) {
    const Mat3 q = rotation();
    return q * vec3(lo, hi).asDiagonal() * q.transpose();
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Componentwise cross product, written out.
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v(2), v(1), v(2), 0, -v(0), -v(1), v(0), 0;
  return s;
}

inline Mat3 axis_angle(const Vec3& v) {
  const double a = v.norm();
  if (a == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(a, v / a).toRotationMatrix();
}

inline Mat3 rot_x(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }

inline Mat3 polar(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// Central difference of a scalar function of the right-trivialized
// perturbation R exp(t e_i).
inline Vec3 fd_gradient(const std::function<double(const Mat3&)>& f, const Mat3& r,
                        double h = 1e-6) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i);
    g(i) = (f(r * axis_angle(h * e)) - f(r * axis_angle(-h * e))) / (2.0 * h);
  }
  return g;
}

// Two independent rigid wings coupled through a rod that transmits no moment
// about its own axis. Per-wing angular momentum balance about the common
// centre of mass C, each in its own body frame:
//   J w1' + w1 x J w1 =  M_C + tau1 eX + l eX x (-T1 eZ + m g eD)
//   J w2' + w2 x J w2 = -M_C + tau2 eX - l eX x (-T2 eZ + m g eD)
// with R2 = R1 Rx(phi), w2 = Rx(phi)^T w1 + phi' eX and M_C perpendicular to
// eX. Unknowns per evaluation: w1', phi'', M_C (two components).
struct TwoBodyParams {
  Vec3 inertia{1.111e-2, 1.36e-2, 2.275e-2};
  double arm = 0.21;
  double wing_mass = 0.4;
  double gravity = 9.81;
};

struct TwoBodyInputs {
  double thrust1 = 0.0, thrust2 = 0.0, torque1 = 0.0, torque2 = 0.0;
};

struct TwoBodyState {
  Mat3 r1 = Mat3::Identity();
  Vec3 w1 = Vec3::Zero();
  double phi = 0.0;
  double phi_rate = 0.0;
};

struct TwoBodyDeriv {
  Mat3 r1;
  Vec3 w1;
  double phi, phi_rate;
};

inline TwoBodyDeriv two_body_deriv(const TwoBodyState& s, const TwoBodyInputs& u,
                                   const TwoBodyParams& p) {
  const Mat3 j = p.inertia.asDiagonal();
  const Mat3 rphi = rot_x(s.phi);
  const Mat3 r2 = s.r1 * rphi;
  const Vec3 ex = Vec3::UnitX(), ez = Vec3::UnitZ();
  const Vec3 down = Vec3::UnitZ();  // inertial
  const Vec3 ed1 = s.r1.transpose() * down;
  const Vec3 ed2 = r2.transpose() * down;
  const Vec3 w2 = rphi.transpose() * s.w1 + s.phi_rate * ex;
  const double mg = p.wing_mass * p.gravity;

  const Vec3 rhs1 = u.torque1 * ex + p.arm * cross(ex, -u.thrust1 * ez + mg * ed1) -
                    cross(s.w1, j * s.w1);
  const Vec3 rhs2 = u.torque2 * ex - p.arm * cross(ex, -u.thrust2 * ez + mg * ed2) -
                    cross(w2, j * w2);
  // w2' = Rphi^T w1' - phi' eX x (Rphi^T w1) + phi'' eX
  const Vec3 coriolis = -s.phi_rate * cross(ex, rphi.transpose() * s.w1);

  // x = (w1', phi'', a, b), M_C = a e_Y + b e_Z in Frame-1 components.
  Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> rhs;
  a.block<3, 3>(0, 0) = j;
  a(1, 4) = -1.0;
  a(2, 5) = -1.0;
  rhs.head<3>() = rhs1;

  a.block<3, 3>(3, 0) = j * rphi.transpose();
  a.block<3, 1>(3, 3) = j * ex;
  const Vec3 ey1_in2 = rphi.transpose() * Vec3::UnitY();
  const Vec3 ez1_in2 = rphi.transpose() * Vec3::UnitZ();
  a.block<3, 1>(3, 4) = ey1_in2;  // +M_C moved to the left-hand side
  a.block<3, 1>(3, 5) = ez1_in2;
  rhs.tail<3>() = rhs2 - j * coriolis;

  const Eigen::Matrix<double, 6, 1> x = a.fullPivLu().solve(rhs);
  return {s.r1 * skew(s.w1), x.head<3>(), s.phi_rate, x(3)};
}

inline TwoBodyState two_body_rk4(const TwoBodyState& s, const TwoBodyInputs& u,
                                 const TwoBodyParams& p, double h) {
  auto add = [](const TwoBodyState& x, const TwoBodyDeriv& d, double k) {
    return TwoBodyState{x.r1 + k * d.r1, x.w1 + k * d.w1, x.phi + k * d.phi,
                        x.phi_rate + k * d.phi_rate};
  };
  const TwoBodyDeriv k1 = two_body_deriv(s, u, p);
  const TwoBodyDeriv k2 = two_body_deriv(add(s, k1, h / 2), u, p);
  const TwoBodyDeriv k3 = two_body_deriv(add(s, k2, h / 2), u, p);
  const TwoBodyDeriv k4 = two_body_deriv(add(s, k3, h), u, p);
  TwoBodyState out;
  out.r1 = polar(s.r1 + h / 6 * (k1.r1 + 2 * k2.r1 + 2 * k3.r1 + k4.r1));
  out.w1 = s.w1 + h / 6 * (k1.w1 + 2 * k2.w1 + 2 * k3.w1 + k4.w1);
  out.phi = s.phi + h / 6 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
  out.phi_rate = s.phi_rate + h / 6 * (k1.phi_rate + 2 * k2.phi_rate + 2 * k3.phi_rate + k4.phi_rate);
  return out;
}

// Total inertial angular momentum of the two wings about C.
inline Vec3 two_body_momentum(const TwoBodyState& s, const TwoBodyParams& p) {
  const Mat3 j = p.inertia.asDiagonal();
  const Mat3 rphi = rot_x(s.phi);
  const Vec3 w2 = rphi.transpose() * s.w1 + s.phi_rate * Vec3::UnitX();
  return s.r1 * (j * s.w1) + s.r1 * rphi * (j * w2);
}

}  // namespace oracle
