// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "oracles.hpp"
#include "swivel/batch.hpp"
#include "swivel/errors.hpp"
#include "swivel/simulation.hpp"
#include "swivel/stability.hpp"

#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

using namespace swivel;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criteria 1 and 2 share one run of the shipped tracking scenario.
const RunResult& tracking_run() {
  static const RunResult r = [] {
    const Scenario sc = load_scenario(SWIVEL_SCENARIO_DIR "/paper_tracking.scn");
    return run_scenario(sc, {.record_telemetry = true});
  }();
  return r;
}

Verdict tracking_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult& r = tracking_run();
  const double wall = seconds_since(t0);
  const MetricsSummary& m = r.metrics;
  if (m.halt) return {false, "run halted: " + m.halt->message};
  // settling_time is the start of the final stretch with psi < 0.01
  const bool settled = m.settling_time && *m.settling_time <= 2.5;
  bool stays = true;
  for (const TelemetryRecord& rec : r.telemetry) {
    if (m.settling_time && rec.t >= *m.settling_time && !(rec.psi_err < kSettleThreshold)) stays = false;
  }
  const double duration = r.telemetry.back().t;
  return {settled && stays && duration >= 10.0 - 1e-9 && wall < 5.0,
          fmt("psi < 0.01 from t = %.3f s to the end of a %.1f s run (limit 2.5 s), wall %.2f s",
              m.settling_time.value_or(-1.0), duration, wall)};
}

Verdict actuator_feasibility() {
  const MetricsSummary& m = tracking_run().metrics;
  const bool peak_ok = m.peak_motor_command_after_transient <= 6.74;
  const bool duty_ok = m.saturation_duty < 0.02;
  return {peak_ok && duty_ok && !m.halt,
          fmt("peak demanded motor thrust after 0.1 s %.3f N (limit 6.74), saturation duty %.2f%% "
              "(limit 2%%)",
              m.peak_motor_command_after_transient, 100.0 * m.saturation_duty)};
}

Verdict equilibrium_classification() {
  const Mat3 j = nominal_inertia(VehicleParams{});
  const auto reports = classify_equilibria(ControlGains{}, j);
  bool ok = reports[0].n_stable == 12;
  UnstableCounts base{};
  for (std::size_t k = 0; k < 4; ++k) {
    base[k] = 12 - reports[k].n_stable;
    if (k > 0) ok = ok && reports[k].eigenvalues.front().real() > 1e-6;
  }
  const auto gains = random_gain_sets(100, 2024, j);
  const auto counts = classify_batch(gains, j, Execution::Parallel);
  int same = 0;
  for (const UnstableCounts& c : counts) same += c == base ? 1 : 0;
  ok = ok && same == 100;
  return {ok, fmt("default: unstable eigenvalue counts (%d, %d, %d, %d); %d/100 random gain sets match",
                  base[0], base[1], base[2], base[3], same)};
}

Verdict exact_linearization() {
  const VehicleParams p;
  oracle::Random rng(4);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    VehicleState s;
    s.attitude = rng.rotation();
    s.omega = rng.vec3(-4, 4);
    s.delta = rng.uniform(-pi / 6, pi / 6);
    s.delta_rate = rng.uniform(-3, 3);
    const double t0 = rng.uniform(1.0, 6.0);
    const double u_z = (rng.uniform(0, 1) < 0.5 ? -1 : 1) * std::pow(10.0, rng.uniform(-2, 3));
    const double tau = tau_delta_from_uz(u_z, s.delta, s.delta_rate, s.omega.y(), s.omega.z(), t0, p);
    MeanDiffInputs md;
    md.thrust_mean = t0 / std::cos(s.delta);
    md.thrust_diff = rng.uniform(-1, 1);
    md.torque_mean = rng.uniform(-0.2, 0.2);
    md.torque_diff = tau;
    const double dd = dynamics_deriv(s, wing_from_mean_diff(md), p).delta_rate;
    const double mzdd = mz_derivatives(s.delta, s.delta_rate, dd, t0, p.arm).accel;
    worst = std::max(worst, std::abs(mzdd - u_z) / std::abs(u_z));
  }
  return {worst < 1e-9, fmt("max relative error of the realized M_z acceleration %.2e over 10^4 states", worst)};
}

Verdict lyapunov_monotonicity() {
  const ControlGains g;
  const Mat3 j = nominal_inertia(VehicleParams{});
  oracle::Random rng(5);
  int good = 0;
  double worst_rise = 0.0, worst_final = 0.0, latest_t0 = 0.0;
  for (int run = 0; run < 50; ++run) {
    ErrorState e;
    e.r_e = exp_so3(rng.unit() * rng.uniform(0.0, 170.0 * pi / 180.0));
    e.e_omega = rng.unit() * rng.uniform(0.0, 2.0);
    e.m_e = rng.unit() * rng.uniform(0.0, 0.5);
    e.m_e_rate = rng.unit() * rng.uniform(0.0, 5.0);

    std::vector<double> t, v;
    std::vector<bool> dissipative;
    integrate_error_dynamics(e, g, j, 1e-3, 10.0, [&](double time, const ErrorState& s) {
      t.push_back(time);
      v.push_back(lyapunov_value(s, g, j));
      // |M_e| <= k_w |e_w| makes every term of V' non-positive
      dissipative.push_back(s.m_e.norm() <= g.k_omega * s.e_omega.norm());
    });
    std::size_t start = dissipative.size();
    while (start > 0 && dissipative[start - 1]) --start;
    // the last sample always qualifies once M_e has died out faster than e_w
    const double t_start = start < t.size() ? t[start] : t.back();
    latest_t0 = std::max(latest_t0, t_start);

    double rise = 0.0;
    for (std::size_t k = std::max<std::size_t>(start, 1); k < v.size(); ++k) {
      rise = std::max(rise, v[k] - v[k - 1]);
    }
    worst_rise = std::max(worst_rise, rise);
    worst_final = std::max(worst_final, v.back());
    if (rise <= 1e-9 && v.back() < 1e-6 && start < t.size()) ++good;
  }
  return {good == 50, fmt("%d/50 runs: latest t0 %.3f s, largest per-step rise after t0 %.1e, "
                          "largest V(10 s) %.1e",
                          good, latest_t0, worst_rise, worst_final)};
}

Verdict two_body_equivalence() {
  const VehicleParams p;
  oracle::TwoBodyParams tp;
  tp.inertia = Vec3(p.j_xx, p.j_yy, p.j_zz);
  tp.arm = p.arm;
  tp.wing_mass = 0.5 * p.mass;
  tp.gravity = p.gravity;
  oracle::Random rng(6);
  double worst = 0.0;
  for (int run = 0; run < 20; ++run) {
    VehicleState s;
    s.attitude = rng.rotation();
    s.omega = rng.vec3(-1.5, 1.5);
    s.delta = rng.uniform(-0.4, 0.4);
    s.delta_rate = rng.uniform(-0.3, 0.3);
    oracle::TwoBodyState tb;
    tb.r1 = s.attitude * swivel_rotation(s.delta).transpose();
    tb.w1 = swivel_rotation(s.delta) * s.omega - s.delta_rate * Vec3::UnitX();
    tb.phi = 2 * s.delta;
    tb.phi_rate = 2 * s.delta_rate;

    // smooth open-loop script per run
    double a[4], w[4], ph[4];
    for (int i = 0; i < 4; ++i) {
      a[i] = rng.uniform(0.2, 1.0);
      w[i] = rng.uniform(1.0, 10.0);
      ph[i] = rng.uniform(0, 2 * pi);
    }
    const double t_mean = rng.uniform(3.0, 5.0);
    const double h = 1e-3;
    for (int k = 0; k < 2000; ++k) {
      const double t = k * h;
      const WingInputs in{t_mean + a[0] * std::sin(w[0] * t + ph[0]),
                          t_mean + a[1] * std::sin(w[1] * t + ph[1]),
                          0.01 * a[2] * std::sin(w[2] * t + ph[2]),
                          0.01 * a[3] * std::sin(w[3] * t + ph[3])};
      s = rk4_step(s, [&](const VehicleState& x) { return dynamics_deriv(x, in, p); }, h);
      tb = oracle::two_body_rk4(tb, {in.thrust1, in.thrust2, in.torque1, in.torque2}, tp, h);
    }
    worst = std::max(worst, (wing_attitudes(s.attitude, s.delta)[0] - tb.r1).norm());
  }
  return {worst < 1e-5, fmt("max ||R1 - R1_oracle||_F after 2 s over 20 runs: %.2e", worst)};
}

Verdict conservation() {
  const VehicleParams p;
  oracle::Random rng(7);
  double worst_h = 0.0, worst_e = 0.0;
  for (int run = 0; run < 10; ++run) {
    VehicleState s;
    s.attitude = rng.rotation();
    // rates kept small enough that the free swivel motion stays inside the guard
    s.omega = rng.vec3(-0.5, 0.5);
    s.delta = rng.uniform(-0.2, 0.2);
    s.delta_rate = rng.uniform(-0.1, 0.1);
    const Vec3 h0 = total_angular_momentum(s, p);
    const double e0 = rotational_energy(s, p);
    for (int k = 0; k < 5000; ++k) {
      s = rk4_step(s, [&](const VehicleState& x) { return dynamics_deriv(x, {}, p); }, 1e-3);
      worst_h = std::max(worst_h, (total_angular_momentum(s, p) - h0).norm() / h0.norm());
      worst_e = std::max(worst_e, std::abs(rotational_energy(s, p) - e0) / e0);
    }
  }
  return {worst_h < 1e-6 && worst_e < 1e-6,
          fmt("max relative drift over 5 s, 10 runs: momentum %.2e, energy %.2e", worst_h, worst_e)};
}

// Largest deviation between the nonlinear error flow and the linear flow of S
// over 0.1 s from the same initial perturbation eps * d.
double flow_deviation(const Mat3& r_eq, const ControlGains& g, const Mat3& j,
                      const Eigen::Matrix<double, 12, 1>& d, double eps) {
  const LinearSystem s = linearized_system(r_eq, g, j);
  const double h = 1e-4;
  ErrorState e;
  e.r_e = r_eq * exp_so3(eps * d.head<3>());
  e.e_omega = eps * d.segment<3>(3);
  e.m_e = eps * d.segment<3>(6);
  e.m_e_rate = eps * d.segment<3>(9);
  Eigen::Matrix<double, 12, 1> x = eps * d;
  double dev = 0.0;
  integrate_error_dynamics(e, g, j, h, 0.1, [&](double t, const ErrorState& st) {
    if (t > 0.0) {
      const auto k1 = s * x;
      const auto k2 = s * (x + 0.5 * h * k1);
      const auto k3 = s * (x + 0.5 * h * k2);
      const auto k4 = s * (x + h * k3);
      x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    dev = std::max(dev, (error_coordinates(st, r_eq) - x).norm());
  });
  return dev;
}

Verdict linearization_validity() {
  const ControlGains g;
  const Mat3 j = nominal_inertia(VehicleParams{});
  oracle::Random rng(8);
  bool ok = true;
  std::string detail = "ratios dev(eps)/dev(eps/2) at eps = 1e-3, 1e-4:";
  for (const Mat3& r_eq : critical_points(g.P)) {
    Eigen::Matrix<double, 12, 1> d;
    for (int i = 0; i < 12; ++i) d(i) = rng.normal();
    d.normalize();
    const double r3 = flow_deviation(r_eq, g, j, d, 1e-3) / flow_deviation(r_eq, g, j, d, 5e-4);
    const double r4 = flow_deviation(r_eq, g, j, d, 1e-4) / flow_deviation(r_eq, g, j, d, 5e-5);
    ok = ok && std::abs(r3 - 4.0) <= 0.5 && std::abs(r4 - 4.0) <= 0.5;
    detail += fmt(" (%.3f, %.3f)", r3, r4);
  }
  return {ok, detail};
}

Verdict kernel_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Random rng(9);
  double log_err = 0.0, euler_err = 0.0, grad_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Mat3 r = rng.rotation();
    log_err = std::max(log_err, (exp_so3(log_so3(r)) - r).norm());
    const Vec3 v = rng.unit() * rng.uniform(0.0, pi - 0.1);
    log_err = std::max(log_err, (log_so3(exp_so3(v)) - v).norm());

    const Euler312 e{rng.uniform(-pi, pi), rng.uniform(-80, 80) * pi / 180, rng.uniform(-pi, pi)};
    const Euler312 b = rotation_to_euler312(euler312_to_rotation(e));
    euler_err = std::max({euler_err, std::abs(b.yaw - e.yaw), std::abs(b.roll - e.roll),
                          std::abs(b.pitch - e.pitch)});
  }
  for (int i = 0; i < 2000; ++i) {
    const ErrorGainMatrix p(rng.spd(0.5, 3.0));
    const Mat3 r = rng.rotation();
    const Vec3 fd = oracle::fd_gradient([&](const Mat3& x) { return config_error_psi(x, p); }, r);
    grad_err = std::max(grad_err, (attitude_error_eR(r, p) - fd).norm());
  }

  ErrorGainMatrix p(Mat3::Identity());
  do {
    p = ErrorGainMatrix(rng.spd(0.5, 3.0));
  } while (p.eigenvalue_separation() < 0.05);
  const CriticalPointSearch cps = critical_point_search(p, 100000, 99, Execution::Parallel);
  bool four = cps.unmatched == 0 && cps.not_converged == 0;
  for (const auto& c : cps.clusters) four = four && c.count > 0;
  const double wall = seconds_since(t0);

  const bool ok = log_err < 1e-9 && euler_err < 1e-9 && grad_err < 1e-5 && four && wall < 60.0;
  return {ok, fmt("exp/log %.1e, Euler %.1e, gradient %.1e; 10^5 Newton starts -> clusters "
                  "%ld/%ld/%ld/%ld, %ld elsewhere, %ld unconverged; %.1f s",
                  log_err, euler_err, grad_err, cps.clusters[0].count, cps.clusters[1].count,
                  cps.clusters[2].count, cps.clusters[3].count, cps.unmatched, cps.not_converged, wall)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*check)();
  };
  const Criterion criteria[] = {
      {"tracking reproduction", tracking_reproduction},
      {"actuator feasibility", actuator_feasibility},
      {"equilibrium classification", equilibrium_classification},
      {"exact inner-loop linearization", exact_linearization},
      {"Lyapunov monotonicity", lyapunov_monotonicity},
      {"two-body equivalence", two_body_equivalence},
      {"conservation", conservation},
      {"linearization validity", linearization_validity},
      {"kernel properties", kernel_properties},
  };
  int failed = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", index, c.name,
                v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
    ++index;
  }
  return failed == 0 ? 0 : 1;
}
