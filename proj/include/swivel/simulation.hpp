#pragma once

#include "swivel/errors.hpp"
#include "swivel/scenario.hpp"
#include "swivel/stability.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace swivel {

/// Standard normal draws from std::mt19937_64 via Box-Muller. The stdlib
/// distributions are implementation-defined, this sequence is not.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();  // (0, 1], 53 bits

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Adds independent N(0, sigma^2) draws to omega (x, y, z) and then to
/// delta_rate. Attitude, delta and motor states are copied untouched.
VehicleState inject_measurement_noise(const VehicleState& s, const DisturbanceSpec& spec,
                                      GaussianNoise& rng);

/// Produces reference samples at increasing times for one scenario.
class ReferenceGenerator {
 public:
  explicit ReferenceGenerator(const ReferenceSpec& spec);
  /// t must be non-decreasing across calls.
  ReferenceSample at(double t);

 private:
  ReferenceSpec spec_;
  Euler312StickReference stick_;
  double t_ = 0.0;
};

enum SaturationFlag : unsigned {
  kSatMotor1 = 1u << 0,
  kSatMotor2 = 1u << 1,
  kSatMotor3 = 1u << 2,
  kSatMotor4 = 1u << 3,
  kSatSwivel = 1u << 4,  // |delta| beyond the operating bound
};

struct TelemetryRecord {
  double t = 0.0;
  Euler312 attitude;
  Euler312 attitude_desired;
  Vec3 omega = Vec3::Zero();
  double delta = 0.0;
  double delta_rate = 0.0;
  Vec3 moment = Vec3::Zero();
  Vec3 moment_desired = Vec3::Zero();
  MotorThrusts motor_cmd{};  // demanded, before clipping
  MotorThrusts motor_act{};
  double psi_err = 0.0;
  double lyapunov = 0.0;
  double lyapunov_rate = 0.0;
  unsigned sat_flags = 0;
};

struct HaltInfo {
  double t = 0.0;
  ErrorCode code = ErrorCode::NonFiniteState;
  std::string message;
};

struct MetricsSummary {
  std::optional<double> settling_time;  // first t after which psi < 0.01 for good
  double peak_motor_command = 0.0;       // N, whole run
  double peak_motor_command_after_transient = 0.0;  // N, t > 0.1 s
  double saturation_duty = 0.0;          // fraction of ticks with any motor clipped
  double final_psi = 0.0;
  double final_angle_error = 0.0;        // rad, geodesic
  Vec3 final_omega_error = Vec3::Zero();
  std::optional<HaltInfo> halt;
  double wall_clock = 0.0;               // s
  long ticks = 0;
};

inline constexpr double kSettleThreshold = 0.01;
inline constexpr double kTransientWindow = 0.1;

struct RunResult {
  std::vector<TelemetryRecord> telemetry;
  MetricsSummary metrics;
  VehicleState final_state;
};

struct RunOptions {
  bool record_telemetry = true;
};

/// Closed-loop run: the controller ticks every controller_period on the noisy
/// measurement, its motor commands are held while the plant takes RK4 steps
/// with the scaled inertia. Divergence halts the run and is reported in
/// metrics.halt instead of being thrown.
RunResult run_scenario(const Scenario& sc, const RunOptions& options = {});

/// CSV with the fixed column order
///   t, eul_psi, eul_phi, eul_theta, eul_psi_d, eul_phi_d, eul_theta_d,
///   wx, wy, wz, delta, ddelta, Mx, My, Mz, Mdx, Mdy, Mdz,
///   f1_cmd..f4_cmd, f1_act..f4_act, psi_err, V, Vdot, sat_flags
/// (psi = yaw, phi = roll, theta = pitch, radians).
void write_telemetry(std::ostream& out, std::span<const TelemetryRecord> records);
/// Throws IoError when the file cannot be written.
void write_telemetry(const std::string& path, std::span<const TelemetryRecord> records);

std::string telemetry_header();
std::string metrics_json(const MetricsSummary& m);

}  // namespace swivel
