#include "swivel/simulation.hpp"

#include "swivel/errors.hpp"
#include "swivel/integrator.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

namespace swivel {

double GaussianNoise::uniform() {
  // 53 random bits mapped to (0, 1]; never zero so log() is finite.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianNoise::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  return r * std::cos(a);
}

VehicleState inject_measurement_noise(const VehicleState& s, const DisturbanceSpec& spec,
                                      GaussianNoise& rng) {
  VehicleState m = s;
  if (spec.gyro_noise_sigma == 0.0) return m;
  const double sigma = spec.gyro_noise_sigma;
  for (int i = 0; i < 3; ++i) m.omega(i) += sigma * rng.next();
  m.delta_rate += sigma * rng.next();
  return m;
}

ReferenceGenerator::ReferenceGenerator(const ReferenceSpec& spec)
    : spec_(spec), stick_(spec.filter, [&] {
        Euler312 e = spec.stick;
        e.pitch += spec.trim_at(0.0);
        return e;
      }()) {}

ReferenceSample ReferenceGenerator::at(double t) {
  switch (spec_.type) {
    case ReferenceType::Hold: {
      ReferenceSample r;
      r.attitude = euler312_to_rotation(spec_.hold_attitude);
      return r;
    }
    case ReferenceType::FixedAxisSinusoid:
      return reference_fixed_axis_sinusoid(t, spec_.amplitude, spec_.frequency_hz, spec_.axis);
    case ReferenceType::Euler312Stick: {
      if (t > t_) {
        Euler312 cmd = spec_.stick;
        cmd.pitch += spec_.trim_at(t);
        stick_.advance(cmd, t - t_);
        t_ = t;
      }
      return stick_.sample();
    }
  }
  return {};
}

namespace {

VehicleParams plant_params(const Scenario& sc) {
  VehicleParams p = sc.vehicle;
  p.j_xx *= sc.disturbance.inertia_scale(0);
  p.j_yy *= sc.disturbance.inertia_scale(1);
  p.j_zz *= sc.disturbance.inertia_scale(2);
  return p;
}

struct Command {
  MotorThrusts demanded{};
  MotorThrusts clipped{};
  unsigned flags = 0;
};

Command allocate(const WingInputs& w, const VehicleParams& p) {
  const MotorAllocation a1 = motor_allocation(w.thrust1, w.torque1, p);
  const MotorAllocation a2 = motor_allocation(w.thrust2, w.torque2, p);
  Command c;
  c.demanded = {a1.demanded_a, a1.demanded_b, a2.demanded_a, a2.demanded_b};
  c.clipped = {a1.a, a1.b, a2.a, a2.b};
  for (std::size_t i = 0; i < 4; ++i) {
    if (c.clipped[i] != c.demanded[i]) c.flags |= 1u << i;
  }
  return c;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
  sc.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  const VehicleParams plant = plant_params(sc);
  const VehicleParams& nominal = sc.vehicle;
  const Mat3 j_nom = nominal_inertia(nominal);
  const ActuatorModel model =
      sc.disturbance.motor_lag ? ActuatorModel::FirstOrderLag : ActuatorModel::Ideal;

  VehicleState state;
  state.attitude = euler312_to_rotation(sc.initial.attitude);
  state.omega = sc.initial.omega;
  state.delta = sc.initial.delta;
  state.delta_rate = sc.initial.delta_rate;
  // Motors start at the steady hover split.
  {
    const double tm = sc.controller.thrust_t0 / std::cos(state.delta);
    const MotorAllocation hover = motor_allocation(tm, 0.0, plant);
    state.motor_thrust = {hover.a, hover.b, hover.a, hover.b};
  }

  ControllerState cs;
  cs.thrust_t0 = sc.controller.thrust_t0;
  cs.estimator = sc.controller.estimator;

  ReferenceGenerator reference(sc.reference);
  GaussianNoise rng(sc.seed);

  const double tc = sc.controller_period;
  const int substeps = sc.substeps();
  const double h = tc / substeps;
  const long n_ticks = std::llround(sc.duration / tc);

  RunResult result;
  MetricsSummary& m = result.metrics;
  if (options.record_telemetry) result.telemetry.reserve(static_cast<std::size_t>(n_ticks) + 1);

  long saturated_ticks = 0;
  double last_unsettled = 0.0;
  bool ever_unsettled = false;
  double t = 0.0;

  try {
    for (long k = 0; k <= n_ticks; ++k) {
      t = static_cast<double>(k) * tc;
      const ReferenceSample ref = reference.at(t);
      const VehicleState measured = inject_measurement_noise(state, sc.disturbance, rng);
      const ControllerStep step = controller_step(measured, ref, cs, sc.gains, nominal, tc);
      cs = step.state;
      const ControllerOutput& out = step.output;

      Command cmd = allocate(out.wings, nominal);
      if (sc.disturbance.motor_cutoff_time && t >= *sc.disturbance.motor_cutoff_time) {
        cmd = Command{};
      }

      const TrackingError truth = tracking_error(state.attitude, state.omega, ref, sc.gains.P);
      const double psi = config_error_psi(truth.r_e, sc.gains.P);
      if (!(psi < kSettleThreshold)) {
        ever_unsettled = true;
        last_unsettled = t;
      }

      const ErrorState err{out.error.r_e, out.error.e_omega, out.moment - out.moment_desired,
                           out.moment_rate - out.moment_desired_rate};
      const double peak = *std::max_element(cmd.demanded.begin(), cmd.demanded.end());
      m.peak_motor_command = std::max(m.peak_motor_command, peak);
      if (t > kTransientWindow) {
        m.peak_motor_command_after_transient = std::max(m.peak_motor_command_after_transient, peak);
      }
      if (cmd.flags) ++saturated_ticks;
      ++m.ticks;
      m.final_psi = psi;
      m.final_angle_error = rotation_angle(truth.r_e);
      m.final_omega_error = truth.e_omega;

      if (options.record_telemetry) {
        TelemetryRecord rec;
        rec.t = t;
        rec.attitude = rotation_to_euler312_unchecked(state.attitude);
        rec.attitude_desired = rotation_to_euler312_unchecked(ref.attitude);
        rec.omega = state.omega;
        rec.delta = state.delta;
        rec.delta_rate = state.delta_rate;
        rec.moment = out.moment;
        rec.moment_desired = out.moment_desired;
        rec.motor_cmd = cmd.demanded;
        rec.motor_act = model == ActuatorModel::Ideal ? cmd.clipped : state.motor_thrust;
        rec.psi_err = psi;
        rec.lyapunov = lyapunov_value(err, sc.gains, j_nom);
        rec.lyapunov_rate = lyapunov_rate(err, sc.gains, j_nom);
        rec.sat_flags = cmd.flags;
        if (std::abs(state.delta) > nominal.max_swivel) rec.sat_flags |= kSatSwivel;
        result.telemetry.push_back(rec);
      }

      if (k == n_ticks) break;
      auto f = [&](const VehicleState& s) {
        if (std::abs(s.delta) >= kSwivelGuard) {
          throw Error(ErrorCode::SwivelSingularity, "swivel angle reached the Frame-0 singularity");
        }
        return plant_deriv(s, cmd.clipped, plant, model);
      };
      for (int i = 0; i < substeps; ++i) {
        state = rk4_step(state, f, h);
      }
      if (model == ActuatorModel::Ideal) state.motor_thrust = cmd.clipped;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SwivelSingularity && e.code() != ErrorCode::NonFiniteState &&
        e.code() != ErrorCode::TooFarFromSO3 && e.code() != ErrorCode::GimbalLock &&
        e.code() != ErrorCode::DegenerateThrust) {
      throw;
    }
    m.halt = HaltInfo{t, e.code(), e.what()};
  }

  if (!m.halt) {
    if (!ever_unsettled) m.settling_time = 0.0;
    else if (last_unsettled < t) m.settling_time = last_unsettled + tc;
  }
  m.saturation_duty = m.ticks ? static_cast<double>(saturated_ticks) / m.ticks : 0.0;
  m.wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  result.final_state = state;
  return result;
}

std::string telemetry_header() {
  return "t,eul_psi,eul_phi,eul_theta,eul_psi_d,eul_phi_d,eul_theta_d,wx,wy,wz,delta,ddelta,"
         "Mx,My,Mz,Mdx,Mdy,Mdz,f1_cmd,f2_cmd,f3_cmd,f4_cmd,f1_act,f2_act,f3_act,f4_act,"
         "psi_err,V,Vdot,sat_flags";
}

void write_telemetry(std::ostream& out, std::span<const TelemetryRecord> records) {
  out << telemetry_header() << '\n';
  std::string line;
  auto put = [&line](double v) {
    line += format_double(v);
    line += ',';
  };
  for (const TelemetryRecord& r : records) {
    line.clear();
    put(r.t);
    put(r.attitude.yaw);
    put(r.attitude.roll);
    put(r.attitude.pitch);
    put(r.attitude_desired.yaw);
    put(r.attitude_desired.roll);
    put(r.attitude_desired.pitch);
    for (int i = 0; i < 3; ++i) put(r.omega(i));
    put(r.delta);
    put(r.delta_rate);
    for (int i = 0; i < 3; ++i) put(r.moment(i));
    for (int i = 0; i < 3; ++i) put(r.moment_desired(i));
    for (double f : r.motor_cmd) put(f);
    for (double f : r.motor_act) put(f);
    put(r.psi_err);
    put(r.lyapunov);
    put(r.lyapunov_rate);
    line += std::to_string(r.sat_flags);
    out << line << '\n';
  }
}

void write_telemetry(const std::string& path, std::span<const TelemetryRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_telemetry(out, records);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

std::string metrics_json(const MetricsSummary& m) {
  nlohmann::ordered_json j;
  j["settling_time"] = m.settling_time ? nlohmann::ordered_json(*m.settling_time) : nullptr;
  j["peak_motor_command"] = m.peak_motor_command;
  j["peak_motor_command_after_transient"] = m.peak_motor_command_after_transient;
  j["saturation_duty"] = m.saturation_duty;
  j["final_psi"] = m.final_psi;
  j["final_angle_error"] = m.final_angle_error;
  j["final_omega_error"] = {m.final_omega_error(0), m.final_omega_error(1), m.final_omega_error(2)};
  j["ticks"] = m.ticks;
  if (m.halt) {
    j["halt"] = {{"t", m.halt->t},
                 {"code", std::string(to_string(m.halt->code))},
                 {"message", m.halt->message}};
  } else {
    j["halt"] = nullptr;
  }
  j["wall_clock"] = m.wall_clock;
  return j.dump(2);
}

}  // namespace swivel
