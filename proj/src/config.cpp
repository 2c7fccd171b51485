#include "ehsim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ehsim/error.hpp"

namespace ehsim::config {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads one JSON object, remembers which keys were consumed and rejects the rest.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "must be an object");
  }
  ~ObjectReader() = default;

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw ValidationError(field(key), "must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ValidationError(field(key), "must be finite");
    }
  }

  // Accepts a number or the string "inf".
  void number_or_inf(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (v->is_string() && v->get<std::string>() == "inf") {
        out = std::numeric_limits<double>::infinity();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        throw ValidationError(field(key), "must be a number or \"inf\"");
      }
    }
  }

  void integer(const std::string& key, int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) throw ValidationError(field(key), "must be an integer");
      out = v->get<int>();
    }
  }

  void uint64(const std::string& key, std::uint64_t& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_unsigned()) throw ValidationError(field(key), "must be an unsigned integer");
      out = v->get<std::uint64_t>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ValidationError(field(key), "must be a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) throw ValidationError(field(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

actuator::DisplacementConvention parse_convention(const std::string& field, const std::string& s) {
  if (s == "total_as_delta_h") return actuator::DisplacementConvention::TotalAsDeltaH;
  if (s == "per_actuator_share") return actuator::DisplacementConvention::PerActuatorShare;
  throw ValidationError(field, "expected total_as_delta_h or per_actuator_share");
}

dynamics::TargetShape parse_shape(const std::string& field, const std::string& s) {
  if (s == "constant") return dynamics::TargetShape::Constant;
  if (s == "sine") return dynamics::TargetShape::Sine;
  if (s == "square") return dynamics::TargetShape::Square;
  if (s == "triangle") return dynamics::TargetShape::Triangle;
  throw ValidationError(field, "expected constant, sine, square or triangle");
}

dynamics::PlantIntegrator parse_integrator(const std::string& field, const std::string& s) {
  if (s == "exact") return dynamics::PlantIntegrator::ExactExponential;
  if (s == "euler") return dynamics::PlantIntegrator::ForwardEuler;
  throw ValidationError(field, "expected exact or euler");
}

void parse_actuator(const json& j, ActuatorSection& s) {
  ObjectReader r(j, "actuator");
  r.number("oil_volume", s.geometry.oil_volume);
  r.number("bladder_width", s.geometry.bladder_width);
  r.number("bladder_length", s.geometry.bladder_length);
  r.number("mixing_parameter", s.calibration.mixing_parameter);
  r.number("calibration_voltage", s.calibration.calibration_voltage);
  r.integer("stack_count", s.stack.actuator_count);
  std::string conv = to_string(s.stack.convention);
  r.string("convention", conv);
  s.stack.convention = parse_convention(r.field("convention"), conv);
  r.number("preload", s.stack.preload_displacement);
  r.finish();
}

void parse_mechanism(const json& j, MechanismSection& s) {
  ObjectReader r(j, "mechanism");
  r.number("rod_length", s.geometry.rod_length);
  r.number("vertical_offset", s.geometry.vertical_offset);
  r.number("max_pinch_stroke", s.geometry.max_pinch_stroke);
  r.integer("actuators_per_side", s.actuators_per_side);
  std::string conv = to_string(s.sweep_convention);
  r.string("sweep_convention", conv);
  s.sweep_convention = parse_convention(r.field("sweep_convention"), conv);
  r.number("sweep_voltage", s.sweep_voltage);
  r.number("sweep_step", s.sweep_step);
  r.number("operating_displacement", s.operating_displacement);
  r.finish();
}

void parse_plant(const json& j, PlantSection& s) {
  ObjectReader r(j, "plant");
  r.number("time_constant", s.params.time_constant);
  r.number("sample_period", s.params.sample_period);
  std::string integ = to_string(s.params.integrator);
  r.string("integrator", integ);
  s.params.integrator = parse_integrator(r.field("integrator"), integ);
  r.number("step_voltage", s.step_voltage);
  r.finish();
}

void parse_controller(const json& j, ControllerSection& s) {
  ObjectReader r(j, "controller");
  r.number("kp", s.gains.kp);
  r.number("ki", s.gains.ki);
  r.number("output_min", s.gains.output_min);
  r.number("output_max", s.gains.output_max);
  if (const auto* t = r.find("target")) {
    ObjectReader tr(*t, "controller.target");
    std::string shape = to_string(s.target.shape);
    tr.string("shape", shape);
    s.target.shape = parse_shape(tr.field("shape"), shape);
    tr.number("frequency", s.target.frequency);
    tr.number("amplitude", s.target.amplitude);
    tr.number("offset", s.target.offset);
    tr.finish();
  }
  r.finish();
}

void parse_waveform(const json& j, WaveformSection& s) {
  ObjectReader r(j, "waveform");
  if (const auto* sq = r.find("square")) {
    ObjectReader sr(*sq, "waveform.square");
    sr.number("frequency", s.drive.square.frequency);
    sr.number("amplitude", s.drive.square.amplitude);
    sr.number_or_inf("slew_rate", s.drive.square.slew_rate);
    sr.finish();
  }
  if (const auto* ov = r.find("overlay")) {
    if (ov->is_null()) {
      s.drive.overlay.reset();
    } else {
      waveform::SineOverlay o = s.drive.overlay.value_or(waveform::SineOverlay{});
      ObjectReader orr(*ov, "waveform.overlay");
      orr.number("frequency", o.frequency);
      orr.number("amplitude", o.amplitude);
      orr.number("phase", o.phase);
      orr.finish();
      s.drive.overlay = o;
    }
  }
  r.number("breakdown_limit", s.drive.breakdown_limit);
  if (const auto* band = r.find("ripple_band")) {
    if (!band->is_array() || band->size() != 2 || !(*band)[0].is_number() ||
        !(*band)[1].is_number()) {
      throw ValidationError("waveform.ripple_band", "must be [low_hz, high_hz]");
    }
    s.band_low = (*band)[0].get<double>();
    s.band_high = (*band)[1].get<double>();
  }
  r.finish();
}

void parse_teleop(const json& j, TeleopSection& s) {
  ObjectReader r(j, "teleop");
  r.number("base_latency", s.channel.base_latency_ms);
  r.number("jitter", s.channel.jitter_ms);
  r.number("stale_timeout", s.stale_timeout);
  r.number("contact_threshold", s.slave.contact_threshold);
  r.number("max_speed", s.slave.max_speed);
  r.number("position_step", s.slave.position_step);
  if (const auto* objs = r.find("objects")) {
    if (!objs->is_array() || objs->empty()) {
      throw ValidationError("teleop.objects", "must be a non-empty array");
    }
    s.objects.clear();
    for (std::size_t i = 0; i < objs->size(); ++i) {
      teleop::VirtualObject o;
      o.label = "object-" + std::to_string(i);
      ObjectReader orr((*objs)[i], "teleop.objects[" + std::to_string(i) + "]");
      orr.string("label", o.label);
      orr.number("contact_position", o.contact_position);
      orr.number("linear_stiffness", o.linear_stiffness);
      orr.number("cubic_stiffness", o.cubic_stiffness);
      orr.finish();
      s.objects.push_back(o);
    }
    if (!j.contains("object")) s.object = s.objects.front().label;
  }
  r.string("object", s.object);
  if (const auto* prof = r.find("profile")) {
    if (!prof->is_array()) throw ValidationError("teleop.profile", "must be an array of [t_ms, mm]");
    s.profile.keyframes.clear();
    for (const auto& kf : *prof) {
      if (!kf.is_array() || kf.size() != 2 || !kf[0].is_number() || !kf[1].is_number()) {
        throw ValidationError("teleop.profile", "keyframes must be [t_ms, mm]");
      }
      s.profile.keyframes.emplace_back(kf[0].get<double>(), kf[1].get<double>());
    }
  }
  r.finish();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

template <typename F>
void validated(const std::string& section, F&& check) {
  try {
    check();
  } catch (const ValidationError& e) {
    // Module validators name bare keys; prefix the config section.
    if (e.field().find('.') == std::string::npos) {
      throw ValidationError(section + "." + e.field(), e.what());
    }
    throw;
  } catch (const InvalidGeometry& e) {
    const std::string msg = e.what();
    throw ValidationError(section + "." + msg.substr(0, msg.find(' ')), msg);
  }
}

}  // namespace

std::string to_string(dynamics::PlantIntegrator i) {
  return i == dynamics::PlantIntegrator::ForwardEuler ? "euler" : "exact";
}

std::string to_string(actuator::DisplacementConvention c) {
  return c == actuator::DisplacementConvention::TotalAsDeltaH ? "total_as_delta_h"
                                                               : "per_actuator_share";
}

std::string to_string(dynamics::TargetShape s) {
  switch (s) {
    case dynamics::TargetShape::Constant:
      return "constant";
    case dynamics::TargetShape::Sine:
      return "sine";
    case dynamics::TargetShape::Square:
      return "square";
    case dynamics::TargetShape::Triangle:
      return "triangle";
  }
  return "sine";
}

std::vector<teleop::VirtualObject> TeleopSection::default_objects() {
  // Stand-ins for the two springs and two hoses; stiffnesses are demo values.
  return {
      {0.5, 0.3, 0.0, "spring-0.5mm-wire"},
      {0.5, 0.5, 0.0, "spring-0.6mm-wire"},
      {0.5, 0.1, 0.0, "soft-hose"},
      {0.5, 0.1, 0.02, "semi-rigid-hose"},
  };
}

const teleop::VirtualObject& TeleopSection::selected_object() const {
  for (const auto& o : objects) {
    if (o.label == object) return o;
  }
  throw ValidationError("teleop.object", "no object labelled '" + object + "'");
}

mechanism::DeviceConfig ExperimentConfig::device() const {
  mechanism::DeviceConfig d;
  d.geometry = mechanism.geometry;
  d.stack = actuator.stack;
  d.actuator = actuator.geometry;
  d.calibration = actuator.calibration;
  return d;
}

mechanism::DeviceConfig ExperimentConfig::sweep_device() const {
  auto d = device();
  d.stack.actuator_count = mechanism.actuators_per_side;
  d.stack.convention = mechanism.sweep_convention;
  return d;
}

teleop::SessionConfig ExperimentConfig::session(const teleop::VirtualObject& object) const {
  teleop::SessionConfig s;
  s.device = device();
  s.master.gains = controller.gains;
  s.master.plant = plant.params;
  s.master.contact_threshold = teleop.slave.contact_threshold;
  s.master.stale_timeout_ms = teleop.stale_timeout;
  s.slave = teleop.slave;
  s.object = object;
  s.channel = teleop.channel;
  s.profile = teleop.profile;
  s.seed = seed;
  return s;
}

void ExperimentConfig::validate() const {
  validated("actuator", [&] {
    actuator.geometry.validate();
    actuator.stack.validate();
    if (!(actuator.calibration.mixing_parameter > 0.0)) {
      throw ValidationError("mixing_parameter", "must be > 0");
    }
    if (!(actuator.calibration.calibration_voltage > 0.0)) {
      throw ValidationError("calibration_voltage", "must be > 0");
    }
  });
  validated("mechanism", [&] {
    mechanism.geometry.validate();
    if (mechanism.actuators_per_side < 1) throw ValidationError("actuators_per_side", "must be >= 1");
    if (!(mechanism.sweep_voltage >= 0.0)) throw ValidationError("sweep_voltage", "must be >= 0");
    if (!(mechanism.sweep_step > 0.0)) throw ValidationError("sweep_step", "must be > 0");
    if (!(mechanism.operating_displacement >= 0.0 &&
          mechanism.operating_displacement <= mechanism.geometry.max_pinch_stroke)) {
      throw ValidationError("operating_displacement", "must lie within the pinch stroke");
    }
  });
  validated("plant", [&] {
    plant.params.validate();
    if (!std::isfinite(plant.step_voltage)) throw ValidationError("step_voltage", "must be finite");
  });
  validated("controller", [&] {
    controller.gains.validate();
    if (!(controller.target.amplitude >= 0.0)) throw ValidationError("target.amplitude", "must be >= 0");
    if (controller.target.shape != dynamics::TargetShape::Constant &&
        !(controller.target.frequency > 0.0)) {
      throw ValidationError("target.frequency", "must be > 0");
    }
  });
  validated("waveform", [&] {
    waveform::check_parameters(waveform.drive);
    if (!(waveform.band_low > 0.0 && waveform.band_high > waveform.band_low)) {
      throw ValidationError("ripple_band", "need 0 < low < high");
    }
  });
  validated("teleop", [&] {
    teleop.channel.validate();
    teleop.slave.validate();
    if (!(teleop.stale_timeout > 0.0)) throw ValidationError("stale_timeout", "must be > 0");
    for (const auto& o : teleop.objects) o.validate();
    teleop.profile.validate();
    teleop.selected_object();
  });
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(line, col, e.what());
  }

  ExperimentConfig cfg;
  ObjectReader root(j, "");
  root.uint64("seed", cfg.seed);
  if (const auto* s = root.find("actuator")) parse_actuator(*s, cfg.actuator);
  if (const auto* s = root.find("mechanism")) parse_mechanism(*s, cfg.mechanism);
  if (const auto* s = root.find("plant")) parse_plant(*s, cfg.plant);
  if (const auto* s = root.find("controller")) parse_controller(*s, cfg.controller);
  if (const auto* s = root.find("waveform")) parse_waveform(*s, cfg.waveform);
  if (const auto* s = root.find("teleop")) parse_teleop(*s, cfg.teleop);
  root.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;

  const auto& a = cfg.actuator;
  j["actuator"] = {{"oil_volume", a.geometry.oil_volume},
                   {"bladder_width", a.geometry.bladder_width},
                   {"bladder_length", a.geometry.bladder_length},
                   {"mixing_parameter", a.calibration.mixing_parameter},
                   {"calibration_voltage", a.calibration.calibration_voltage},
                   {"stack_count", a.stack.actuator_count},
                   {"convention", to_string(a.stack.convention)},
                   {"preload", a.stack.preload_displacement}};

  const auto& m = cfg.mechanism;
  j["mechanism"] = {{"rod_length", m.geometry.rod_length},
                    {"vertical_offset", m.geometry.vertical_offset},
                    {"max_pinch_stroke", m.geometry.max_pinch_stroke},
                    {"actuators_per_side", m.actuators_per_side},
                    {"sweep_convention", to_string(m.sweep_convention)},
                    {"sweep_voltage", m.sweep_voltage},
                    {"sweep_step", m.sweep_step},
                    {"operating_displacement", m.operating_displacement}};

  const auto& p = cfg.plant;
  j["plant"] = {{"time_constant", p.params.time_constant},
                {"sample_period", p.params.sample_period},
                {"integrator", to_string(p.params.integrator)},
                {"step_voltage", p.step_voltage}};

  const auto& c = cfg.controller;
  j["controller"] = {{"kp", c.gains.kp},
                     {"ki", c.gains.ki},
                     {"output_min", c.gains.output_min},
                     {"output_max", c.gains.output_max},
                     {"target",
                      {{"shape", to_string(c.target.shape)},
                       {"frequency", c.target.frequency},
                       {"amplitude", c.target.amplitude},
                       {"offset", c.target.offset}}}};

  const auto& w = cfg.waveform;
  ordered_json square = {{"frequency", w.drive.square.frequency},
                         {"amplitude", w.drive.square.amplitude}};
  if (std::isfinite(w.drive.square.slew_rate)) {
    square["slew_rate"] = w.drive.square.slew_rate;
  } else {
    square["slew_rate"] = "inf";
  }
  ordered_json overlay = nullptr;
  if (w.drive.overlay) {
    overlay = {{"frequency", w.drive.overlay->frequency},
               {"amplitude", w.drive.overlay->amplitude},
               {"phase", w.drive.overlay->phase}};
  }
  j["waveform"] = {{"square", square},
                   {"overlay", overlay},
                   {"breakdown_limit", w.drive.breakdown_limit},
                   {"ripple_band", {w.band_low, w.band_high}}};

  const auto& t = cfg.teleop;
  ordered_json objects = ordered_json::array();
  for (const auto& o : t.objects) {
    objects.push_back({{"label", o.label},
                       {"contact_position", o.contact_position},
                       {"linear_stiffness", o.linear_stiffness},
                       {"cubic_stiffness", o.cubic_stiffness}});
  }
  ordered_json profile = ordered_json::array();
  for (const auto& [tm, x] : t.profile.keyframes) profile.push_back({tm, x});
  j["teleop"] = {{"base_latency", t.channel.base_latency_ms},
                 {"jitter", t.channel.jitter_ms},
                 {"stale_timeout", t.stale_timeout},
                 {"contact_threshold", t.slave.contact_threshold},
                 {"max_speed", t.slave.max_speed},
                 {"position_step", t.slave.position_step},
                 {"objects", objects},
                 {"object", t.object},
                 {"profile", profile}};
  return j.dump(2);
}

}  // namespace ehsim::config
