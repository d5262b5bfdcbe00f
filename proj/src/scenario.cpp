#include "swivel/scenario.hpp"

#include "swivel/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace swivel {

double ReferenceSpec::trim_at(double t) const {
  if (t <= trim_ramp_start) return trim_start;
  if (trim_ramp_duration <= 0.0 || t >= trim_ramp_start + trim_ramp_duration) return trim_end;
  return trim_start + (trim_end - trim_start) * (t - trim_ramp_start) / trim_ramp_duration;
}

int Scenario::substeps() const {
  return static_cast<int>(std::llround(controller_period / plant_step));
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double deg_to_rad(double d) { return d * kDeg; }

// Degrees text for an angle stored in radians, chosen so that reading it
// back reproduces the radian value exactly whenever such a decimal exists
// near the naive conversion.
std::string format_angle_deg(double rad) {
  const double d0 = rad / kDeg;
  std::string best;
  double cand_lo = d0, cand_hi = d0;
  for (int k = 0; k <= 8; ++k) {
    for (double cand : {cand_lo, cand_hi}) {
      if (deg_to_rad(cand) == rad) {
        std::string s = format_double(cand);
        if (best.empty() || s.size() < best.size()) best = s;
      }
    }
    cand_lo = std::nextafter(cand_lo, -INFINITY);
    cand_hi = std::nextafter(cand_hi, INFINITY);
  }
  return best.empty() ? format_double(d0) : best;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text, const std::string& field, int line) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError(field, line, "expected a number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(field, line, "value must be finite");
  return v;
}

std::vector<double> parse_list(std::string_view text, const std::string& field, int line) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma), field, line));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

Vec3 parse_vec3(std::string_view text, const std::string& field, int line) {
  const auto v = parse_list(text, field, line);
  if (v.size() != 3) throw ParseError(field, line, "expected 3 comma-separated numbers");
  return {v[0], v[1], v[2]};
}

std::string format_vec3(const Vec3& v) {
  return format_double(v(0)) + ", " + format_double(v(1)) + ", " + format_double(v(2));
}

std::string format_euler_deg(const Euler312& e) {
  return format_angle_deg(e.yaw) + ", " + format_angle_deg(e.roll) + ", " +
         format_angle_deg(e.pitch);
}

Euler312 parse_euler_deg(std::string_view text, const std::string& field, int line) {
  const Vec3 d = parse_vec3(text, field, line);
  return {deg_to_rad(d(0)), deg_to_rad(d(1)), deg_to_rad(d(2))};
}

bool parse_bool(std::string_view text, const std::string& field, int line) {
  text = trim(text);
  if (text == "true") return true;
  if (text == "false") return false;
  throw ParseError(field, line, "expected true or false");
}

enum class Kind { Scalar, Vector, Other };

struct Field {
  std::string key;
  Kind kind;
  std::function<std::string(const Scenario&)> write;
  std::function<void(Scenario&, std::string_view, int)> read;
  std::function<void(Scenario&, double)> set;  // numeric fields only
};

// Helpers building table entries for the common field shapes.
Field scalar(std::string key, std::function<double&(Scenario&)> ref) {
  auto get = [ref](const Scenario& s) { return ref(const_cast<Scenario&>(s)); };
  return {key, Kind::Scalar, [get](const Scenario& s) { return format_double(get(s)); },
          [ref, key](Scenario& s, std::string_view v, int line) {
            ref(s) = parse_number(v, key, line);
          },
          [ref](Scenario& s, double v) { ref(s) = v; }};
}

Field angle(std::string key, std::function<double&(Scenario&)> ref) {
  auto get = [ref](const Scenario& s) { return ref(const_cast<Scenario&>(s)); };
  return {key, Kind::Scalar, [get](const Scenario& s) { return format_angle_deg(get(s)); },
          [ref, key](Scenario& s, std::string_view v, int line) {
            ref(s) = deg_to_rad(parse_number(v, key, line));
          },
          [ref](Scenario& s, double v) { ref(s) = deg_to_rad(v); }};
}

Field vector(std::string key, std::function<Vec3&(Scenario&)> ref) {
  auto get = [ref](const Scenario& s) { return ref(const_cast<Scenario&>(s)); };
  return {key, Kind::Vector, [get](const Scenario& s) { return format_vec3(get(s)); },
          [ref, key](Scenario& s, std::string_view v, int line) {
            ref(s) = parse_vec3(v, key, line);
          },
          [ref](Scenario& s, double v) { ref(s) = Vec3::Constant(v); }};
}

Field euler(std::string key, std::function<Euler312&(Scenario&)> ref) {
  auto get = [ref](const Scenario& s) { return ref(const_cast<Scenario&>(s)); };
  return {key, Kind::Vector, [get](const Scenario& s) { return format_euler_deg(get(s)); },
          [ref, key](Scenario& s, std::string_view v, int line) {
            ref(s) = parse_euler_deg(v, key, line);
          },
          [ref](Scenario& s, double v) {
            ref(s) = {deg_to_rad(v), deg_to_rad(v), deg_to_rad(v)};
          }};
}

std::string reference_type_name(ReferenceType t) {
  switch (t) {
    case ReferenceType::Hold: return "hold";
    case ReferenceType::FixedAxisSinusoid: return "fixed_axis_sinusoid";
    case ReferenceType::Euler312Stick: return "euler312_stick";
  }
  return "hold";
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(scalar("duration", [](Scenario& s) -> double& { return s.duration; }));
    f.push_back(scalar("plant_step", [](Scenario& s) -> double& { return s.plant_step; }));
    f.push_back(scalar("controller_period",
                       [](Scenario& s) -> double& { return s.controller_period; }));
    f.push_back({"seed", Kind::Other,
                 [](const Scenario& s) { return std::to_string(s.seed); },
                 [](Scenario& s, std::string_view v, int line) {
                   v = trim(v);
                   std::uint64_t seed = 0;
                   const auto res = std::from_chars(v.data(), v.data() + v.size(), seed);
                   if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
                     throw ParseError("seed", line, "expected a non-negative integer");
                   }
                   s.seed = seed;
                 },
                 nullptr});
    f.push_back({"rng", Kind::Other, [](const Scenario&) { return std::string(kRngAlgorithm); },
                 [](Scenario&, std::string_view v, int line) {
                   if (trim(v) != kRngAlgorithm) {
                     throw ParseError("rng", line,
                                      "unsupported generator; expected " +
                                          std::string(kRngAlgorithm));
                   }
                 },
                 nullptr});

    f.push_back(euler("initial.euler312_deg",
                      [](Scenario& s) -> Euler312& { return s.initial.attitude; }));
    f.push_back(vector("initial.omega", [](Scenario& s) -> Vec3& { return s.initial.omega; }));
    f.push_back(angle("initial.delta_deg", [](Scenario& s) -> double& { return s.initial.delta; }));
    f.push_back(scalar("initial.delta_rate",
                       [](Scenario& s) -> double& { return s.initial.delta_rate; }));

    f.push_back({"reference.type", Kind::Other,
                 [](const Scenario& s) { return reference_type_name(s.reference.type); },
                 [](Scenario& s, std::string_view v, int line) {
                   v = trim(v);
                   if (v == "hold") s.reference.type = ReferenceType::Hold;
                   else if (v == "fixed_axis_sinusoid")
                     s.reference.type = ReferenceType::FixedAxisSinusoid;
                   else if (v == "euler312_stick") s.reference.type = ReferenceType::Euler312Stick;
                   else
                     throw ParseError("reference.type", line,
                                      "expected hold, fixed_axis_sinusoid or euler312_stick");
                 },
                 nullptr});
    f.push_back(euler("reference.hold_euler312_deg",
                      [](Scenario& s) -> Euler312& { return s.reference.hold_attitude; }));
    f.push_back(angle("reference.amplitude_deg",
                      [](Scenario& s) -> double& { return s.reference.amplitude; }));
    f.push_back(scalar("reference.frequency_hz",
                       [](Scenario& s) -> double& { return s.reference.frequency_hz; }));
    f.push_back(vector("reference.axis", [](Scenario& s) -> Vec3& { return s.reference.axis; }));
    f.push_back(euler("reference.stick_euler312_deg",
                      [](Scenario& s) -> Euler312& { return s.reference.stick; }));
    f.push_back(angle("reference.trim_start_deg",
                      [](Scenario& s) -> double& { return s.reference.trim_start; }));
    f.push_back(angle("reference.trim_end_deg",
                      [](Scenario& s) -> double& { return s.reference.trim_end; }));
    f.push_back(scalar("reference.trim_ramp_start",
                       [](Scenario& s) -> double& { return s.reference.trim_ramp_start; }));
    f.push_back(scalar("reference.trim_ramp_duration",
                       [](Scenario& s) -> double& { return s.reference.trim_ramp_duration; }));
    f.push_back(scalar("reference.filter_natural_freq",
                       [](Scenario& s) -> double& { return s.reference.filter.natural_freq; }));
    f.push_back(scalar("reference.filter_damping",
                       [](Scenario& s) -> double& { return s.reference.filter.damping; }));

    f.push_back(scalar("gains.k_R", [](Scenario& s) -> double& { return s.gains.k_R; }));
    f.push_back(scalar("gains.k_omega", [](Scenario& s) -> double& { return s.gains.k_omega; }));
    f.push_back({"gains.P", Kind::Other,
                 [](const Scenario& s) {
                   const Mat3& p = s.gains.P.matrix();
                   if (p.isDiagonal(0.0)) return format_vec3(p.diagonal());
                   std::string out;
                   for (int i = 0; i < 9; ++i) {
                     if (i) out += ", ";
                     out += format_double(p(i / 3, i % 3));
                   }
                   return out;
                 },
                 [](Scenario& s, std::string_view v, int line) {
                   const auto vals = parse_list(v, "gains.P", line);
                   Mat3 p = Mat3::Zero();
                   if (vals.size() == 3) {
                     p.diagonal() << vals[0], vals[1], vals[2];
                   } else if (vals.size() == 9) {
                     for (int i = 0; i < 9; ++i) p(i / 3, i % 3) = vals[static_cast<size_t>(i)];
                   } else {
                     throw ParseError("gains.P", line, "expected 3 (diagonal) or 9 numbers");
                   }
                   try {
                     s.gains.P = ErrorGainMatrix(p);
                   } catch (const Error& e) {
                     throw ParseError("gains.P", line, e.what());
                   }
                 },
                 nullptr});
    f.push_back(vector("gains.zeta", [](Scenario& s) -> Vec3& { return s.gains.zeta; }));
    f.push_back(vector("gains.Omega", [](Scenario& s) -> Vec3& { return s.gains.natural_freq; }));

    f.push_back(scalar("controller.T0",
                       [](Scenario& s) -> double& { return s.controller.thrust_t0; }));
    f.push_back({"controller.md_estimator", Kind::Other,
                 [](const Scenario& s) {
                   return std::string(s.controller.estimator == DerivativeEstimator::Difference
                                          ? "difference"
                                          : "model");
                 },
                 [](Scenario& s, std::string_view v, int line) {
                   v = trim(v);
                   if (v == "difference") s.controller.estimator = DerivativeEstimator::Difference;
                   else if (v == "model") s.controller.estimator = DerivativeEstimator::Model;
                   else throw ParseError("controller.md_estimator", line,
                                         "expected difference or model");
                 },
                 nullptr});

    f.push_back({"vehicle.inertia", Kind::Vector,
                 [](const Scenario& s) {
                   return format_vec3(Vec3(s.vehicle.j_xx, s.vehicle.j_yy, s.vehicle.j_zz));
                 },
                 [](Scenario& s, std::string_view v, int line) {
                   const Vec3 j = parse_vec3(v, "vehicle.inertia", line);
                   s.vehicle.j_xx = j(0);
                   s.vehicle.j_yy = j(1);
                   s.vehicle.j_zz = j(2);
                 },
                 [](Scenario& s, double v) { s.vehicle.j_xx = s.vehicle.j_yy = s.vehicle.j_zz = v; }});
    f.push_back(scalar("vehicle.arm", [](Scenario& s) -> double& { return s.vehicle.arm; }));
    f.push_back(scalar("vehicle.motor_separation",
                       [](Scenario& s) -> double& { return s.vehicle.motor_separation; }));
    f.push_back(scalar("vehicle.mass", [](Scenario& s) -> double& { return s.vehicle.mass; }));
    f.push_back(scalar("vehicle.motor_time_constant",
                       [](Scenario& s) -> double& { return s.vehicle.motor_time_constant; }));
    f.push_back(scalar("vehicle.max_motor_force",
                       [](Scenario& s) -> double& { return s.vehicle.max_motor_force; }));
    f.push_back(angle("vehicle.max_swivel_deg",
                      [](Scenario& s) -> double& { return s.vehicle.max_swivel; }));
    f.push_back(scalar("vehicle.gravity", [](Scenario& s) -> double& { return s.vehicle.gravity; }));

    f.push_back(vector("disturbance.inertia_scale",
                       [](Scenario& s) -> Vec3& { return s.disturbance.inertia_scale; }));
    f.push_back(scalar("disturbance.gyro_noise_sigma",
                       [](Scenario& s) -> double& { return s.disturbance.gyro_noise_sigma; }));
    f.push_back({"disturbance.motor_lag", Kind::Other,
                 [](const Scenario& s) {
                   return std::string(s.disturbance.motor_lag ? "true" : "false");
                 },
                 [](Scenario& s, std::string_view v, int line) {
                   s.disturbance.motor_lag = parse_bool(v, "disturbance.motor_lag", line);
                 },
                 nullptr});
    f.push_back({"disturbance.motor_cutoff_time", Kind::Scalar,
                 [](const Scenario& s) {
                   return s.disturbance.motor_cutoff_time
                              ? format_double(*s.disturbance.motor_cutoff_time)
                              : std::string("none");
                 },
                 [](Scenario& s, std::string_view v, int line) {
                   if (trim(v) == "none") {
                     s.disturbance.motor_cutoff_time.reset();
                   } else {
                     s.disturbance.motor_cutoff_time =
                         parse_number(v, "disturbance.motor_cutoff_time", line);
                   }
                 },
                 [](Scenario& s, double v) { s.disturbance.motor_cutoff_time = v; }});
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

void Scenario::validate() const {
  auto require = [](bool ok, const char* field, const std::string& reason) {
    if (!ok) throw ParseError(field, 0, reason);
  };
  require(duration > 0.0, "duration", "must be positive");
  require(plant_step > 0.0, "plant_step", "must be positive");
  require(controller_period > 0.0, "controller_period", "must be positive");
  const double ratio = controller_period / plant_step;
  require(std::llround(ratio) >= 1 && std::abs(ratio - std::llround(ratio)) < 1e-9 * ratio,
          "controller_period", "must be an integer multiple of plant_step");

  require(std::abs(initial.delta) < kSwivelGuard, "initial.delta_deg",
          "must be inside the swivel guard");
  require(initial.omega.allFinite(), "initial.omega", "must be finite");

  require(reference.frequency_hz >= 0.0, "reference.frequency_hz", "must be non-negative");
  if (reference.type == ReferenceType::FixedAxisSinusoid) {
    require(reference.axis.norm() > 0.0, "reference.axis", "must be nonzero");
  }
  require(std::abs(reference.stick.roll) < std::numbers::pi / 2.0 - kRollMargin,
          "reference.stick_euler312_deg", "roll command too close to the 312 singularity");
  require(reference.trim_ramp_duration >= 0.0, "reference.trim_ramp_duration",
          "must be non-negative");
  require(reference.filter.natural_freq > 0.0, "reference.filter_natural_freq", "must be positive");
  require(reference.filter.damping > 0.0, "reference.filter_damping", "must be positive");

  try {
    gains.validate();
  } catch (const Error& e) {
    throw ParseError("gains", 0, e.what());
  }
  require(controller.thrust_t0 > 0.0, "controller.T0", "must be positive");

  try {
    vehicle.validate();
  } catch (const Error& e) {
    throw ParseError("vehicle", 0, e.what());
  }

  require((disturbance.inertia_scale.array() >= 0.9).all() &&
              (disturbance.inertia_scale.array() <= 1.1).all(),
          "disturbance.inertia_scale", "factors must lie in [0.9, 1.1]");
  require(disturbance.gyro_noise_sigma >= 0.0, "disturbance.gyro_noise_sigma",
          "must be non-negative");
  if (disturbance.motor_cutoff_time) {
    require(*disturbance.motor_cutoff_time >= 0.0, "disturbance.motor_cutoff_time",
            "must be non-negative");
  }
}

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::set<std::string> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(std::string(line), line_no, "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const Field* field = find_field(key);
    if (!field) throw ParseError(key, line_no, "unknown key");
    if (!seen.insert(key).second) throw ParseError(key, line_no, "duplicate key");
    if (value.empty()) throw ParseError(key, line_no, "missing value");
    field->read(sc, value, line_no);
  }
  if (!seen.count("controller.T0")) sc.controller.thrust_t0 = sc.vehicle.hover_thrust();
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& sc) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.write(sc);
    out += '\n';
  }
  return out;
}

std::vector<std::string> numeric_parameter_paths() {
  std::vector<std::string> out;
  for (const Field& f : fields()) {
    if (f.set) out.push_back(f.key);
  }
  return out;
}

Scenario with_parameter(const Scenario& sc, std::string_view path, double value) {
  const Field* field = find_field(path);
  if (!field || !field->set) {
    throw Error(ErrorCode::UnknownParameter,
                "'" + std::string(path) + "' is not a numeric scenario parameter");
  }
  Scenario out = sc;
  field->set(out, value);
  out.validate();
  return out;
}

}  // namespace swivel
