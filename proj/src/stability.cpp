#include "swivel/stability.hpp"

#include "swivel/errors.hpp"

#include <algorithm>
#include <cmath>

namespace swivel {

ErrorStateDerivative operator+(const ErrorStateDerivative& a, const ErrorStateDerivative& b) {
  return {a.r_e + b.r_e, a.e_omega + b.e_omega, a.m_e + b.m_e, a.m_e_rate + b.m_e_rate};
}

ErrorStateDerivative operator*(double k, const ErrorStateDerivative& d) {
  return {k * d.r_e, k * d.e_omega, k * d.m_e, k * d.m_e_rate};
}

ErrorState advance(const ErrorState& e, const ErrorStateDerivative& d, double h) {
  return {e.r_e + h * d.r_e, e.e_omega + h * d.e_omega, e.m_e + h * d.m_e,
          e.m_e_rate + h * d.m_e_rate};
}

ErrorState renormalize(const ErrorState& e) {
  ErrorState out = e;
  out.r_e = orthonormalize(e.r_e);
  return out;
}

ErrorStateDerivative error_dynamics_deriv(const ErrorState& e, const ControlGains& g,
                                          const Mat3& j) {
  const Vec3 e_r = attitude_error_eR(e.r_e, g.P);
  ErrorStateDerivative d;
  d.r_e = e.r_e * hat(e.e_omega);
  d.e_omega = j.inverse() * (-g.k_R * e_r - g.k_omega * e.e_omega + e.m_e);
  d.m_e = e.m_e_rate;
  d.m_e_rate = -g.damping() * e.m_e_rate - g.stiffness() * e.m_e;
  return d;
}

double lyapunov_value(const ErrorState& e, const ControlGains& g, const Mat3& j) {
  return g.k_R * config_error_psi(e.r_e, g.P) + 0.5 * e.e_omega.dot(j * e.e_omega) +
         0.5 * e.m_e.dot(g.stiffness() * e.m_e) + 0.5 * e.m_e_rate.squaredNorm();
}

double lyapunov_rate(const ErrorState& e, const ControlGains& g, const Mat3&) {
  return -e.e_omega.dot(g.k_omega * e.e_omega - e.m_e) -
         e.m_e_rate.dot(g.damping() * e.m_e_rate);
}

Eigen::Matrix<double, 12, 1> error_coordinates(const ErrorState& e, const Mat3& r_eq) {
  Eigen::Matrix<double, 12, 1> x;
  x << log_so3(r_eq.transpose() * e.r_e), e.e_omega, e.m_e, e.m_e_rate;
  return x;
}

Mat3 b_matrix(const Mat3& r_eq, const ErrorGainMatrix& p) {
  if (attitude_error_eR(r_eq, p).norm() > 1e-6) {
    throw Error(ErrorCode::NotCriticalPoint, "R_eq is not a critical point of psi");
  }
  Mat3 sum = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    const Mat3 ei = hat(Vec3::Unit(i));
    sum += ei * p.matrix() * r_eq * ei;
  }
  return -0.5 * sum;
}

LinearSystem linearized_system(const Mat3& r_eq, const ControlGains& g, const Mat3& j) {
  const Mat3 b = b_matrix(r_eq, g.P);
  const Mat3 j_inv = j.inverse();
  LinearSystem s = LinearSystem::Zero();
  s.block<3, 3>(0, 3) = Mat3::Identity();
  s.block<3, 3>(3, 0) = -g.k_R * j_inv * b;
  s.block<3, 3>(3, 3) = -g.k_omega * j_inv;
  s.block<3, 3>(3, 6) = j_inv;
  s.block<3, 3>(6, 9) = Mat3::Identity();
  s.block<3, 3>(9, 6) = -g.stiffness();
  s.block<3, 3>(9, 9) = -g.damping();
  return s;
}

std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Stable: return "stable";
    case EquilibriumKind::Saddle: return "saddle";
    case EquilibriumKind::Unstable: return "unstable";
  }
  return "unknown";
}

std::array<EquilibriumReport, 4> classify_equilibria(const ControlGains& g, const Mat3& j) {
  g.validate();
  const auto points = critical_points(g.P);
  std::array<EquilibriumReport, 4> reports;
  for (std::size_t i = 0; i < points.size(); ++i) {
    EquilibriumReport& r = reports[i];
    r.r_eq = points[i];
    r.eigenvalues = eigenvalues(linearized_system(points[i], g, j));
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
              [](const auto& a, const auto& b) {
                return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
              });
    r.hyperbolic = true;
    for (const auto& lambda : r.eigenvalues) {
      if (lambda.real() < 0.0) ++r.n_stable;
      if (std::abs(lambda.real()) <= kHyperbolicMargin) r.hyperbolic = false;
    }
    const int n = static_cast<int>(r.eigenvalues.size());
    r.kind = r.n_stable == n ? EquilibriumKind::Stable
             : r.n_stable == 0 ? EquilibriumKind::Unstable
                               : EquilibriumKind::Saddle;
    if (!r.hyperbolic) {
      throw Error(ErrorCode::NonHyperbolic,
                  "equilibrium " + std::to_string(i) + " has an eigenvalue on the imaginary axis");
    }
  }
  return reports;
}

GainRuleReport check_gain_rules(const ControlGains& g, const Mat3& j) {
  GainRuleReport rep;
  rep.overdamped_inner = (g.zeta.array() >= 1.0).all();

  // J^-1 k_R B(I) is similar to the symmetric J^-1/2 k_R B J^-1/2.
  const Mat3 b = b_matrix(Mat3::Identity(), g.P);
  const Mat3 j_isqrt = j.diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
  const SymmetricEigen3 outer = symmetric_eigen(j_isqrt * (g.k_R * b) * j_isqrt);
  rep.outer_stiffness_max = outer.values.maxCoeff();
  rep.inner_stiffness_min = g.natural_freq.cwiseAbs2().minCoeff();
  rep.inner_stiffer = rep.inner_stiffness_min > rep.outer_stiffness_max;

  const LinearSystem s = linearized_system(Mat3::Identity(), g, j);
  const auto lambda = eigenvalues(s.topLeftCorner<6, 6>());
  double scale = 0.0;
  for (const auto& l : lambda) {
    rep.outer_max_imag = std::max(rep.outer_max_imag, std::abs(l.imag()));
    scale = std::max(scale, std::abs(l));
  }
  rep.outer_non_oscillatory = rep.outer_max_imag <= 1e-6 * std::max(scale, 1.0);
  return rep;
}

}  // namespace swivel
