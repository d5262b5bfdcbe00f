#pragma once

#include "swivel/controller.hpp"
#include "swivel/integrator.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <string_view>
#include <vector>

namespace swivel {

/// Error coordinates of the dynamically extended closed loop.
struct ErrorState {
  Mat3 r_e = Mat3::Identity();
  Vec3 e_omega = Vec3::Zero();
  Vec3 m_e = Vec3::Zero();
  Vec3 m_e_rate = Vec3::Zero();
};

struct ErrorStateDerivative {
  Mat3 r_e = Mat3::Zero();
  Vec3 e_omega = Vec3::Zero();
  Vec3 m_e = Vec3::Zero();
  Vec3 m_e_rate = Vec3::Zero();
};

ErrorStateDerivative operator+(const ErrorStateDerivative& a, const ErrorStateDerivative& b);
ErrorStateDerivative operator*(double k, const ErrorStateDerivative& d);
ErrorState advance(const ErrorState& e, const ErrorStateDerivative& d, double h);
ErrorState renormalize(const ErrorState& e);

/// Nominal closed-loop error dynamics:
///   R_e' = R_e e_w^,  J e_w' = -k_R e_R - k_w e_w + M_e,  M_e'' = -D M_e' - K M_e.
ErrorStateDerivative error_dynamics_deriv(const ErrorState& e, const ControlGains& g,
                                          const Mat3& j);

/// V = k_R psi + 1/2 e_w^T J e_w + 1/2 M_e^T K M_e + 1/2 M_e'^T M_e'.
double lyapunov_value(const ErrorState& e, const ControlGains& g, const Mat3& j);
/// V' = -e_w^T (k_w e_w - M_e) - M_e'^T D M_e'.
double lyapunov_rate(const ErrorState& e, const ControlGains& g, const Mat3& j);

/// 12-vector (eta, e_w, M_e, M_e') with eta = log(R_eq^T R_e).
Eigen::Matrix<double, 12, 1> error_coordinates(const ErrorState& e, const Mat3& r_eq);

/// B = -1/2 sum_i e_i^ P R_eq e_i^. Throws NotCriticalPoint when
/// ||e_R(R_eq)|| > 1e-6.
Mat3 b_matrix(const Mat3& r_eq, const ErrorGainMatrix& p);

using LinearSystem = Eigen::Matrix<double, 12, 12>;

/// Linearization of the error dynamics at (R_eq, 0, 0, 0):
///   [0 I 0 0; -J^-1 k_R B, -J^-1 k_w, J^-1, 0; 0 0 0 I; 0 0 -K -D].
LinearSystem linearized_system(const Mat3& r_eq, const ControlGains& g, const Mat3& j);

enum class EquilibriumKind { Stable, Saddle, Unstable };
std::string_view to_string(EquilibriumKind kind);

inline constexpr double kHyperbolicMargin = 1e-9;

struct EquilibriumReport {
  Mat3 r_eq = Mat3::Identity();
  std::vector<std::complex<double>> eigenvalues;  // sorted by descending real part
  int n_stable = 0;
  bool hyperbolic = false;
  EquilibriumKind kind = EquilibriumKind::Stable;
};

/// Reports for {I, exp(pi v1^), exp(pi v2^), exp(pi v3^)} in that order.
/// Throws InvalidArgument for non-positive gains, DegenerateP for repeated P
/// eigenvalues, NonHyperbolic if any eigenvalue has |Re| <= 1e-9.
std::array<EquilibriumReport, 4> classify_equilibria(const ControlGains& g, const Mat3& j);

struct GainRuleReport {
  bool overdamped_inner = false;      // zeta_i >= 1
  bool inner_stiffer = false;         // min Omega_i^2 > max eig(J^-1 k_R B(I))
  bool outer_non_oscillatory = false; // rigid-body block of S(I) has real spectrum
  double inner_stiffness_min = 0.0;
  double outer_stiffness_max = 0.0;
  double outer_max_imag = 0.0;

  bool all_pass() const { return overdamped_inner && inner_stiffer && outer_non_oscillatory; }
};

GainRuleReport check_gain_rules(const ControlGains& g, const Mat3& j);

/// Fixed-step RK4 integration of error_dynamics_deriv; the callback receives
/// (t, state) at t = 0 and after every step.
template <class Callback>
ErrorState integrate_error_dynamics(ErrorState e, const ControlGains& g, const Mat3& j, double h,
                                    double duration, Callback&& cb) {
  const long steps = static_cast<long>(std::llround(duration / h));
  cb(0.0, e);
  auto f = [&](const ErrorState& s) { return error_dynamics_deriv(s, g, j); };
  for (long k = 1; k <= steps; ++k) {
    e = rk4_step(e, f, h);
    cb(static_cast<double>(k) * h, e);
  }
  return e;
}

}  // namespace swivel
