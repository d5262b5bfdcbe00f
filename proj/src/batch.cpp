#include "swivel/batch.hpp"

#include "swivel/errors.hpp"

#include <Eigen/Geometry>
#include <Eigen/Cholesky>

#include <cmath>
#include <ostream>

namespace swivel {

namespace {

// Runs body(i) for i in [0, n). Items are independent, so the parallel loop
// only changes who computes each slot.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  const long count = static_cast<long>(n);
  if (exec == Execution::Serial) {
    for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace

std::vector<MetricsSummary> run_batch(std::span<const Scenario> scenarios, Execution exec) {
  std::vector<MetricsSummary> out(scenarios.size());
  RunOptions opts;
  opts.record_telemetry = false;
  for_each_index(scenarios.size(), exec,
                 [&](std::size_t i) { out[i] = run_scenario(scenarios[i], opts).metrics; });
  return out;
}

std::vector<SweepRow> sweep(const Scenario& sc, std::string_view path,
                            std::span<const double> values, Execution exec) {
  std::vector<Scenario> runs;
  runs.reserve(values.size());
  std::vector<SweepRow> rows(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    Scenario s = with_parameter(sc, path, values[i]);
    s.seed = sc.seed + i;
    rows[i].value = values[i];
    rows[i].seed = s.seed;
    runs.push_back(std::move(s));
  }
  const auto metrics = run_batch(runs, exec);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].metrics = metrics[i];
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "value,seed,settling_time,peak_motor_command,peak_motor_command_after_transient,"
         "saturation_duty,final_psi,final_angle_error,halted\n";
  for (const SweepRow& r : rows) {
    const MetricsSummary& m = r.metrics;
    out << format_double(r.value) << ',' << r.seed << ','
        << (m.settling_time ? format_double(*m.settling_time) : std::string("nan")) << ','
        << format_double(m.peak_motor_command) << ','
        << format_double(m.peak_motor_command_after_transient) << ','
        << format_double(m.saturation_duty) << ',' << format_double(m.final_psi) << ','
        << format_double(m.final_angle_error) << ',' << (m.halt ? 1 : 0) << '\n';
  }
}

Mat3 random_rotation(GaussianNoise& rng) {
  Eigen::Quaterniond q(rng.next(), rng.next(), rng.next(), rng.next());
  q.normalize();
  return q.toRotationMatrix();
}

std::vector<ControlGains> random_gain_sets(std::size_t n, std::uint64_t seed, const Mat3& j) {
  GaussianNoise rng(seed);
  auto uniform = [&](double lo, double hi) {
    // Map a standard normal through its CDF to get a uniform draw.
    const double u = 0.5 * std::erfc(-rng.next() / std::sqrt(2.0));
    return lo + (hi - lo) * u;
  };
  std::vector<ControlGains> out;
  while (out.size() < n) {
    ControlGains g;
    g.k_R = uniform(0.5, 8.0);
    g.k_omega = uniform(0.3, 3.0);
    const double p1 = uniform(0.5, 2.0);
    const double p2 = p1 + uniform(0.05, 1.0);
    const double p3 = p2 + uniform(0.05, 1.0);
    const Mat3 rot = random_rotation(rng);
    g.P = ErrorGainMatrix(rot * Vec3(p1, p2, p3).asDiagonal() * rot.transpose());
    for (int i = 0; i < 3; ++i) {
      g.zeta(i) = uniform(1.0, 2.0);
      g.natural_freq(i) = uniform(10.0, 60.0);
    }
    if (check_gain_rules(g, j).all_pass()) out.push_back(g);
  }
  return out;
}

std::vector<UnstableCounts> classify_batch(std::span<const ControlGains> gains, const Mat3& j,
                                           Execution exec) {
  std::vector<UnstableCounts> out(gains.size());
  for_each_index(gains.size(), exec, [&](std::size_t i) {
    const auto reports = classify_equilibria(gains[i], j);
    for (std::size_t k = 0; k < 4; ++k) {
      out[i][k] = static_cast<int>(reports[k].eigenvalues.size()) - reports[k].n_stable;
    }
  });
  return out;
}

bool newton_critical_point(Mat3& r, const ErrorGainMatrix& p, double tol, int max_iter) {
  // Levenberg-Marquardt damping on ||e_R||^2: a plain Newton step where it
  // helps, a shorter gradient-like step near singular Jacobians.
  constexpr double kMaxStep = 0.5;  // rad per iteration
  double mu = 1e-6 * p.matrix().norm();
  Vec3 e = attitude_error_eR(r, p);
  for (int it = 0; it < max_iter && e.norm() >= tol; ++it) {
    const Mat3 a = attitude_error_jacobian(r, p);
    for (int tries = 0; tries < 30; ++tries) {
      const Mat3 normal = a.transpose() * a + mu * Mat3::Identity();
      Vec3 step = -normal.ldlt().solve(a.transpose() * e);
      if (!step.allFinite()) return false;
      if (step.norm() > kMaxStep) step *= kMaxStep / step.norm();
      const Mat3 candidate = orthonormalize(r * exp_so3(step));
      const Vec3 e_new = attitude_error_eR(candidate, p);
      if (e_new.norm() < e.norm()) {
        r = candidate;
        e = e_new;
        mu = std::max(mu * 0.1, 1e-15);
        break;
      }
      mu *= 10.0;
    }
  }
  return e.norm() < tol;
}

CriticalPointSearch critical_point_search(const ErrorGainMatrix& p, std::size_t n,
                                          std::uint64_t seed, Execution exec) {
  const auto points = critical_points(p);
  // -2: not converged, -1: converged elsewhere, else cluster index.
  std::vector<int> label(n, -2);
  for_each_index(n, exec, [&](std::size_t i) {
    GaussianNoise rng(seed + i);
    Mat3 r = random_rotation(rng);
    if (!newton_critical_point(r, p)) return;
    label[i] = -1;
    for (int k = 0; k < 4; ++k) {
      if ((r - points[static_cast<std::size_t>(k)]).norm() < 1e-6) label[i] = k;
    }
  });

  CriticalPointSearch out;
  for (std::size_t k = 0; k < 4; ++k) out.clusters[k].point = points[k];
  for (int l : label) {
    if (l == -2) ++out.not_converged;
    else if (l == -1) ++out.unmatched;
    else ++out.clusters[static_cast<std::size_t>(l)].count;
  }
  return out;
}

}  // namespace swivel
