#pragma once

#include <Eigen/Core>

#include <utility>

namespace swivel {

// Euclidean states integrate as plain vectors.
inline Eigen::VectorXd advance(const Eigen::VectorXd& x, const Eigen::VectorXd& dx, double h) {
  return x + h * dx;
}
inline Eigen::VectorXd renormalize(const Eigen::VectorXd& x) { return x; }

/// Classical fourth-order Runge-Kutta step. State types provide
/// advance(state, deriv, h) and renormalize(state) (found by ADL); derivative
/// types provide + and scalar *. renormalize runs once, after the full step,
/// and is where manifold components are projected back.
template <class State, class Deriv>
State rk4_step(const State& x, Deriv&& f, double h) {
  const auto k1 = f(x);
  const auto k2 = f(advance(x, k1, 0.5 * h));
  const auto k3 = f(advance(x, k2, 0.5 * h));
  const auto k4 = f(advance(x, k3, h));
  const auto slope = (1.0 / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return renormalize(advance(x, slope, h));
}

}  // namespace swivel
