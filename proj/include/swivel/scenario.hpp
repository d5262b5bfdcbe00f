#pragma once

#include "swivel/controller.hpp"
#include "swivel/reference.hpp"
#include "swivel/vehicle.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swivel {

/// Identifier of the only supported noise generator: std::mt19937_64 words,
/// 53-bit uniforms, Box-Muller pairs (cosine branch first).
inline constexpr std::string_view kRngAlgorithm = "mt19937_64-box-muller";

struct DisturbanceSpec {
  Vec3 inertia_scale = Vec3::Ones();  // plant-side multipliers on J_xx, J_yy, J_zz
  double gyro_noise_sigma = 0.0;      // rad/s, on omega and delta_rate
  bool motor_lag = true;
  std::optional<double> motor_cutoff_time;  // s; all motor commands zero afterwards
};

enum class ReferenceType { Hold, FixedAxisSinusoid, Euler312Stick };

struct ReferenceSpec {
  ReferenceType type = ReferenceType::Hold;
  Euler312 hold_attitude;  // Hold
  double amplitude = 0.0;  // rad, FixedAxisSinusoid
  double frequency_hz = 1.0;
  Vec3 axis = Vec3::Ones();
  Euler312 stick;          // Euler312Stick: yaw, roll, pitch stick commands
  double trim_start = 0.0;  // rad, pitch trim before the ramp
  double trim_end = 0.0;    // rad, pitch trim after the ramp
  double trim_ramp_start = 0.0;     // s
  double trim_ramp_duration = 0.0;  // s; 0 means a step
  SmoothingFilter filter;

  /// Pitch trim at time t.
  double trim_at(double t) const;
};

struct InitialCondition {
  Euler312 attitude;
  Vec3 omega = Vec3::Zero();
  double delta = 0.0;
  double delta_rate = 0.0;
};

struct ControllerSettings {
  double thrust_t0 = VehicleParams{}.hover_thrust();
  DerivativeEstimator estimator = DerivativeEstimator::Model;
};

struct Scenario {
  double duration = 10.0;
  double plant_step = 1e-3;
  double controller_period = 4e-3;
  std::uint64_t seed = 1;
  InitialCondition initial;
  ReferenceSpec reference;
  ControlGains gains;
  ControllerSettings controller;
  VehicleParams vehicle;
  DisturbanceSpec disturbance;

  /// Cross-field checks; throws ParseError naming the field (line 0).
  void validate() const;
  /// Number of plant steps per controller tick.
  int substeps() const;
};

/// Strict parser for the key = value scenario document. Unknown or duplicate
/// keys, malformed values and constraint violations raise ParseError with the
/// field and line.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Canonical document: every key, fixed order, shortest round-trip numbers.
std::string serialize_scenario(const Scenario& sc);

/// Returns a copy with one field replaced. Vector fields take a scalar that is
/// broadcast to all three components. Throws UnknownParameter for keys that
/// are not numeric, ParseError if the new value violates a constraint.
Scenario with_parameter(const Scenario& sc, std::string_view path, double value);

/// Keys accepted by with_parameter.
std::vector<std::string> numeric_parameter_paths();

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace swivel
