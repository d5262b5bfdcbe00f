#include "swivel/controller.hpp"

#include "swivel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swivel {

void ControlGains::validate() const {
  const bool ok = k_R > 0.0 && k_omega > 0.0 && (zeta.array() > 0.0).all() &&
                  (natural_freq.array() > 0.0).all() && std::isfinite(k_R) &&
                  std::isfinite(k_omega) && zeta.allFinite() && natural_freq.allFinite();
  if (!ok) throw Error(ErrorCode::InvalidArgument, "controller gains must be positive and finite");
}

Mat3 ControlGains::damping() const {
  return (2.0 * zeta.cwiseProduct(natural_freq)).asDiagonal();
}

Mat3 ControlGains::stiffness() const { return natural_freq.cwiseAbs2().asDiagonal(); }

Mat3 nominal_inertia(const VehicleParams& p) {
  return Vec3(2.0 * p.j_xx, 2.0 * p.j_yy, 2.0 * p.j_zz).asDiagonal();
}

TrackingError tracking_error(const Mat3& r, const Vec3& omega, const ReferenceSample& ref,
                             const ErrorGainMatrix& p) {
  TrackingError e;
  e.r_e = ref.attitude.transpose() * r;
  e.e_R = attitude_error_eR(e.r_e, p);
  e.e_omega = omega - e.r_e.transpose() * ref.omega;
  return e;
}

Vec3 desired_moment(const Mat3& r, const Vec3& omega, const ReferenceSample& ref,
                    const ControlGains& g, const Mat3& j) {
  const TrackingError e = tracking_error(r, omega, ref, g.P);
  const Mat3 rt = e.r_e.transpose();
  return -g.k_R * e.e_R - g.k_omega * e.e_omega + omega.cross(j * omega) -
         j * (e.e_omega.cross(rt * ref.omega) - rt * ref.omega_dot);
}

Vec3 moment_tracking_u(const Vec3& m_e, const Vec3& m_e_rate, const Vec3& m_d_accel,
                       const ControlGains& g) {
  return m_d_accel - g.damping() * m_e_rate - g.stiffness() * m_e;
}

namespace {

void check_delta(double delta) {
  if (!(std::abs(delta) < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::SwivelSingularity, "|delta| must be below pi/2");
  }
}

}  // namespace

double mz_from_delta(double delta, double t0, double arm) {
  check_delta(delta);
  return -2.0 * arm * t0 * std::tan(delta);
}

double delta_from_mz(double mz, double t0, double arm) {
  if (!(t0 > 0.0) || !(arm > 0.0)) {
    throw Error(ErrorCode::DegenerateThrust, "T0 and arm must be positive");
  }
  return -std::atan(mz / (2.0 * arm * t0));
}

MzRates mz_derivatives(double delta, double delta_rate, double delta_accel, double t0,
                       double arm) {
  check_delta(delta);
  const double c = std::cos(delta);
  const double sec2 = 1.0 / (c * c);
  const double k = 2.0 * arm * t0 * sec2;
  return {-k * delta_rate,
          -2.0 * k * std::tan(delta) * delta_rate * delta_rate - k * delta_accel};
}

double tau_delta_from_uz(double u_z, double delta, double delta_rate, double omega_y,
                         double omega_z, double t0, const VehicleParams& p) {
  check_delta(delta);
  if (!(t0 > 1e-9)) throw Error(ErrorCode::DegenerateThrust, "T0 too small to steer M_z");
  const double c = std::cos(delta);
  const double k = 2.0 * p.arm * t0 / (c * c);
  // u_z = -2 k tan(d) dd^2 - k v_z  solved for the swivel acceleration v_z.
  const double v_z = -(u_z + 2.0 * k * std::tan(delta) * delta_rate * delta_rate) / k;
  return p.j_xx * v_z + 0.5 * (p.j_yy - p.j_zz) * std::sin(2.0 * delta) *
                            (omega_y * omega_y - omega_z * omega_z);
}

Vec3 estimate_md_second_derivative(std::span<const Vec3, 3> history, double h) {
  return (history[2] - 2.0 * history[1] + history[0]) / (h * h);
}

namespace {

// Second-order Taylor jet: value, first and second time derivative.
template <class T>
struct Jet {
  T v, d, dd;
};

using JM = Jet<Mat3>;
using JV = Jet<Vec3>;

template <class A, class B, class Op>
auto product(const Jet<A>& a, const Jet<B>& b, Op op) {
  using T = decltype(op(a.v, b.v));
  return Jet<T>{op(a.v, b.v), T(op(a.d, b.v) + op(a.v, b.d)),
                T(op(a.dd, b.v) + 2.0 * op(a.d, b.d) + op(a.v, b.dd))};
}

JM operator*(const JM& a, const JM& b) {
  return product(a, b, [](const Mat3& x, const Mat3& y) -> Mat3 { return x * y; });
}
JV operator*(const JM& a, const JV& b) {
  return product(a, b, [](const Mat3& x, const Vec3& y) -> Vec3 { return x * y; });
}
JV cross(const JV& a, const JV& b) {
  return product(a, b, [](const Vec3& x, const Vec3& y) -> Vec3 { return x.cross(y); });
}
template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.v + b.v, a.d + b.d, a.dd + b.dd};
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.v - b.v, a.d - b.d, a.dd - b.dd};
}
template <class T>
Jet<T> operator*(double k, const Jet<T>& a) {
  return {k * a.v, k * a.d, k * a.dd};
}
JM transpose(const JM& a) { return {a.v.transpose(), a.d.transpose(), a.dd.transpose()}; }
JM constant(const Mat3& m) { return {m, Mat3::Zero(), Mat3::Zero()}; }
JV skew_vee(const JM& a) {
  auto f = [](const Mat3& m) { return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)); };
  return {0.5 * f(a.v), 0.5 * f(a.d), 0.5 * f(a.dd)};
}

// Attitude jet from R' = R w^: R'' = R (w^ w^ + w'^).
JM attitude_jet(const Mat3& r, const Vec3& w, const Vec3& w_dot) {
  const Mat3 wh = hat(w);
  return {r, r * wh, r * (wh * wh + hat(w_dot))};
}

}  // namespace

MomentJet desired_moment_jet(const Mat3& r, const Vec3& omega, const Vec3& moment,
                             const Vec3& moment_rate, const ReferenceSample& ref,
                             const ControlGains& g, const Mat3& j) {
  const Mat3 j_inv = j.inverse();
  const Vec3 w_dot = j_inv * (moment - omega.cross(j * omega));
  const Vec3 w_ddot =
      j_inv * (moment_rate - w_dot.cross(j * omega) - omega.cross(j * w_dot));

  const JV w{omega, w_dot, w_ddot};
  const JM rj = attitude_jet(r, omega, w_dot);
  const JM rdj = attitude_jet(ref.attitude, ref.omega, ref.omega_dot);
  const JV wd{ref.omega, ref.omega_dot, ref.omega_ddot};
  const JV wd_dot{ref.omega_dot, ref.omega_ddot, ref.omega_dddot};
  const JM jj = constant(j);
  const JM pj = constant(g.P.matrix());

  const JM re = transpose(rdj) * rj;
  const JM ret = transpose(re);
  // e_R = vee of the skew part of P R_e; the skew part of P R_e - R_e^T P is
  // twice that, so e_R = skew_vee(P R_e).
  const JV e_r = skew_vee(pj * re);
  const JV e_w = w - ret * wd;
  const JV md = (-g.k_R) * e_r - g.k_omega * e_w + cross(w, jj * w) -
                jj * (cross(e_w, ret * wd) - ret * wd_dot);
  return {md.v, md.d, md.dd};
}

namespace {

struct Derivatives {
  Vec3 rate = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

// Feeds the new M_d sample to the difference estimator.
Derivatives update_history(ControllerState& cs, const Vec3& md, double h) {
  cs.md_history[0] = cs.md_history[1];
  cs.md_history[1] = cs.md_history[2];
  cs.md_history[2] = md;
  cs.history_count = std::min(cs.history_count + 1, 3);

  Derivatives d;
  if (cs.history_count >= 2) d.rate = (cs.md_history[2] - cs.md_history[1]) / h;
  if (cs.history_count >= 3) {
    d.accel = estimate_md_second_derivative(std::span<const Vec3, 3>(cs.md_history), h);
  }
  return d;
}

}  // namespace

ControllerStep controller_step(const VehicleState& measured, const ReferenceSample& ref,
                               const ControllerState& cs_in, const ControlGains& g,
                               const VehicleParams& p, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "controller period must be positive");
  ControllerStep step{{}, cs_in};
  ControllerState& cs = step.state;
  ControllerOutput& out = step.output;

  const double delta = measured.delta;
  const double t0 = cs.thrust_t0;
  const Mat3 j = nominal_inertia(p);

  out.error = tracking_error(measured.attitude, measured.omega, ref, g.P);
  out.moment = Vec3(cs.extension_moment.x(), cs.extension_moment.y(),
                    mz_from_delta(delta, t0, p.arm));
  out.moment_rate = Vec3(cs.extension_rate.x(), cs.extension_rate.y(),
                         mz_derivatives(delta, measured.delta_rate, 0.0, t0, p.arm).rate);

  if (cs.estimator == DerivativeEstimator::Model) {
    const MomentJet mj = desired_moment_jet(measured.attitude, measured.omega, out.moment,
                                            out.moment_rate, ref, g, j);
    out.moment_desired = mj.value;
    out.moment_desired_rate = mj.rate;
    out.moment_desired_accel = mj.accel;
  } else {
    out.moment_desired = desired_moment(measured.attitude, measured.omega, ref, g, j);
    const Derivatives md = update_history(cs, out.moment_desired, h);
    out.moment_desired_rate = md.rate;
    out.moment_desired_accel = md.accel;
  }

  const Vec3 m_e = out.moment - out.moment_desired;
  const Vec3 m_e_rate = out.moment_rate - out.moment_desired_rate;
  out.u = moment_tracking_u(m_e, m_e_rate, out.moment_desired_accel, g);

  const double cos_d = std::cos(delta);
  out.mean_diff.thrust_mean = t0 / cos_d;
  out.mean_diff.thrust_diff = out.moment.y() / (2.0 * p.arm * cos_d);
  out.mean_diff.torque_mean = 0.5 * out.moment.x();
  out.mean_diff.torque_diff = tau_delta_from_uz(out.u.z(), delta, measured.delta_rate,
                                                measured.omega.y(), measured.omega.z(), t0, p);
  out.wings = wing_from_mean_diff(out.mean_diff);

  // Dynamic extension ddM_{x,y} = u_{x,y}, semi-implicit Euler.
  cs.extension_rate += h * out.u.head<2>();
  cs.extension_moment += h * cs.extension_rate;
  return step;
}

}  // namespace swivel
