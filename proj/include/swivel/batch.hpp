#pragma once

#include "swivel/simulation.hpp"
#include "swivel/stability.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace swivel {

/// Batch kernels come in a serial reference form and an OpenMP form; both
/// produce identical results because every item owns its inputs and RNG.
enum class Execution { Serial, Parallel };

std::vector<MetricsSummary> run_batch(std::span<const Scenario> scenarios, Execution exec);

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  MetricsSummary metrics;
};

/// One run per value with the parameter replaced and seed = base seed + index.
/// Throws UnknownParameter before running anything.
std::vector<SweepRow> sweep(const Scenario& sc, std::string_view path,
                            std::span<const double> values, Execution exec = Execution::Parallel);

/// CSV: value, seed, settling_time, peak_motor_command,
/// peak_motor_command_after_transient, saturation_duty, final_psi,
/// final_angle_error, halted.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Uniformly distributed rotation (normalized Gaussian quaternion).
Mat3 random_rotation(GaussianNoise& rng);

/// Random gains with distinct P eigenvalues that satisfy check_gain_rules.
std::vector<ControlGains> random_gain_sets(std::size_t n, std::uint64_t seed, const Mat3& j);

/// Number of eigenvalues with Re > 0 at each of the four equilibria, per gain set.
using UnstableCounts = std::array<int, 4>;
std::vector<UnstableCounts> classify_batch(std::span<const ControlGains> gains, const Mat3& j,
                                           Execution exec);

struct CriticalPointCluster {
  Mat3 point = Mat3::Identity();
  long count = 0;
};

struct CriticalPointSearch {
  std::array<CriticalPointCluster, 4> clusters;  // same order as critical_points(P)
  long unmatched = 0;                            // converged elsewhere
  long not_converged = 0;
};

/// Newton iteration on e_R(R) = 0 from n random rotations; each limit is
/// matched to the nearest analytic critical point within 1e-6.
CriticalPointSearch critical_point_search(const ErrorGainMatrix& p, std::size_t n,
                                          std::uint64_t seed, Execution exec);

/// Damped Newton solve of e_R(R) = 0 on SO(3). Returns false if it fails to reach
/// ||e_R|| < tol within max_iter steps.
bool newton_critical_point(Mat3& r, const ErrorGainMatrix& p, double tol = 1e-12,
                           int max_iter = 300);

}  // namespace swivel
