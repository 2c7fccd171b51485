#include "ehsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ehsim/error.hpp"

namespace ehsim::experiments {

using nlohmann::ordered_json;

namespace {

constexpr double kForceCurveMaxMm = 0.5;
constexpr double kForceCurveStepMm = 0.005;
constexpr double kForceCurveVoltages[] = {3.0, 4.0, 5.0, 6.0};

std::string trace_csv(const dynamics::SimTrace& t) {
  std::ostringstream out;
  trace_io::write_trace(out, t);
  return out.str();
}

std::string table_csv(const trace_io::Table& t) {
  std::ostringstream out;
  trace_io::write_table(out, t);
  return out.str();
}

std::string session_csv(const teleop::SessionTrace& t) {
  std::ostringstream out;
  trace_io::write_session(out, t);
  return out.str();
}

bool nondecreasing(const std::vector<double>& v) {
  return std::is_sorted(v.begin(), v.end());
}

std::vector<double> column(const trace_io::Table& t, std::size_t c) {
  std::vector<double> out;
  for (const auto& row : t.rows) out.push_back(row[c]);
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"calibrate",     "force-curve", "max-force",
                                                 "step-response", "track",       "vibrate",
                                                 "teleop-demo"};
  return names;
}

double default_duration_ms(const std::string& name, const config::ExperimentConfig& cfg) {
  if (name == "step-response") return std::ceil(20.0 * cfg.plant.params.time_constant);
  if (name == "track") {
    // Two full target periods.
    const auto& t = cfg.controller.target;
    return t.shape == dynamics::TargetShape::Constant ? 10000.0 : std::round(2000.0 / t.frequency);
  }
  if (name == "vibrate") return 4000.0;
  if (name == "teleop-demo") return 4000.0;
  return 0.0;
}

actuator::CalibrationParams calibrate(const config::ExperimentConfig& cfg) {
  const auto points = actuator::reference_squeeze_table();
  return actuator::calibrate_k(points, cfg.actuator.calibration.calibration_voltage,
                               cfg.actuator.geometry, cfg.actuator.stack);
}

trace_io::Table force_curve(const config::ExperimentConfig& cfg) {
  trace_io::Table t;
  t.columns.push_back("displacement_mm");
  for (double u : kForceCurveVoltages) {
    t.columns.push_back("force_" + trace_io::format_number(u) + "kV_N");
  }
  const auto n = static_cast<std::size_t>(std::llround(kForceCurveMaxMm / kForceCurveStepMm));
  for (std::size_t i = 0; i <= n; ++i) {
    const double d = static_cast<double>(i) * kForceCurveStepMm;
    std::vector<double> row{d};
    for (double u : kForceCurveVoltages) {
      row.push_back(actuator::stack_force(cfg.actuator.stack, cfg.actuator.geometry,
                                          cfg.actuator.calibration, d, u));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

trace_io::Table max_force_sweep(const config::ExperimentConfig& cfg) {
  const auto dev = cfg.sweep_device();
  dev.validate();
  const double stroke = cfg.mechanism.geometry.max_pinch_stroke;
  const double step = cfg.mechanism.sweep_step;
  const auto n = static_cast<std::size_t>(std::llround(stroke / step));

  trace_io::Table t;
  t.columns = {"pinch_displacement_mm", "plate_displacement_mm", "stack_displacement_mm",
               "rod_angle_rad",         "actuator_force_N",      "user_force_N"};
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = std::min(stroke, static_cast<double>(i) * step);
    const auto b = mechanism::device_static_breakdown(dev, x, cfg.mechanism.sweep_voltage);
    t.rows.push_back({b.pinch_displacement, b.plate_displacement, b.stack_displacement,
                      b.rod_angle, b.actuator_force, b.user_force});
  }
  return t;
}

dynamics::SimTrace step_response(const config::ExperimentConfig& cfg, double duration_ms) {
  return dynamics::simulate_step_response(cfg.device(), cfg.plant.params, cfg.plant.step_voltage,
                                          cfg.mechanism.operating_displacement, duration_ms,
                                          cfg.waveform.drive.breakdown_limit);
}

dynamics::SimTrace tracking(const config::ExperimentConfig& cfg, double duration_ms) {
  return dynamics::simulate_tracking(cfg.device(), cfg.plant.params, cfg.controller.gains,
                                     cfg.controller.target, cfg.mechanism.operating_displacement,
                                     duration_ms);
}

dynamics::SimTrace vibration(const config::ExperimentConfig& cfg, double duration_ms) {
  return dynamics::simulate_vibration(cfg.device(), cfg.plant.params, cfg.waveform.drive,
                                      cfg.mechanism.operating_displacement, duration_ms);
}

teleop::SessionTrace teleop_session(const config::ExperimentConfig& cfg,
                                    const teleop::VirtualObject& object, double duration_ms) {
  return teleop::run_session(cfg.session(object), duration_ms);
}

ordered_json summarize_step_response(const dynamics::SimTrace& trace) {
  ordered_json s;
  s["rise_time_ms"] = dynamics::measure_rise_time(trace);
  s["final_force_N"] = trace.records.back().actual_force;
  s["static_force_N"] = trace.records.back().target_force;
  return s;
}

ordered_json summarize_tracking(const dynamics::SimTrace& trace) {
  ordered_json s;
  s["rms_error_N"] = dynamics::rms_tracking_error(trace, kTrackingSteadyFromMs);
  double max_err = 0.0;
  double max_voltage = 0.0;
  for (const auto& r : trace.records) {
    if (r.t_ms >= kTrackingSteadyFromMs) {
      max_err = std::max(max_err, std::abs(r.target_force - r.actual_force));
    }
    max_voltage = std::max(max_voltage, r.voltage);
  }
  s["max_abs_error_N"] = max_err;
  s["max_voltage_kV"] = max_voltage;

  const auto edges = dynamics::edge_settling_times(trace);
  // A continuous target changes every sample; only a few discrete edges mean a square.
  if (!edges.empty() && edges.size() * 100 < trace.records.size()) {
    std::vector<double> rising;
    std::vector<double> falling;
    // Edges that never hold the band (e.g. cut off by the end of the run) are left out.
    for (const auto& e : edges) {
      if (e.settled) (e.rising ? rising : falling).push_back(e.settle_ms);
    }
    s["rising_settle_ms"] = mean_of(rising);
    s["falling_settle_ms"] = mean_of(falling);
    s["edges"] = edges.size();
    s["settled_edges"] = rising.size() + falling.size();
  }
  return s;
}

ordered_json summarize_vibration(const dynamics::SimTrace& trace, double band_low,
                                 double band_high) {
  const auto r = dynamics::ripple_analysis(trace, band_low, band_high);
  ordered_json s;
  s["ripple_has_peak"] = r.has_peak;
  s["ripple_frequency_Hz"] = r.dominant_frequency;
  s["ripple_amplitude_N"] = r.amplitude;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const auto skip = trace.records.size() / 5;
  for (std::size_t i = skip; i < trace.records.size(); ++i) {
    lo = std::min(lo, trace.records[i].actual_force);
    hi = std::max(hi, trace.records[i].actual_force);
  }
  s["steady_peak_to_peak_N"] = hi - lo;
  return s;
}

ordered_json summarize_session(const teleop::SessionTrace& trace, double window_ms) {
  const double end = trace.records.back().t_ms;
  std::vector<double> master;
  std::vector<double> slave;
  double max_master = 0.0;
  double max_latency = 0.0;
  for (const auto& r : trace.records) {
    max_master = std::max(max_master, std::abs(r.master_force));
    max_latency = std::max(max_latency, r.latency_ms);
    if (r.t_ms >= end - window_ms) {
      master.push_back(r.master_force);
      slave.push_back(r.slave_force);
    }
  }
  ordered_json s;
  const double m = mean_of(master);
  const double sl = mean_of(slave);
  s["steady_master_force_N"] = m;
  s["steady_slave_force_N"] = sl;
  s["steady_force_error_N"] = m - sl;
  s["steady_force_error_fraction"] = sl != 0.0 ? (m - sl) / sl : 0.0;
  s["max_master_force_N"] = max_master;
  s["max_latency_ms"] = max_latency;
  return s;
}

ExperimentResult run_experiment(const std::string& name, const config::ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir,
                                std::optional<double> duration_ms) {
  cfg.validate();
  ExperimentResult res;
  res.name = name;
  const double duration = duration_ms.value_or(default_duration_ms(name, cfg));
  ordered_json summary;
  summary["experiment"] = name;
  summary["seed"] = cfg.seed;

  auto emit = [&](const std::string& file, const std::string& contents) {
    const auto path = out_dir / file;
    trace_io::write_file(path, contents);
    res.files.push_back(path);
  };

  {
    if (name == "calibrate") {
      const auto fitted = calibrate(cfg);
      trace_io::Table t;
      t.columns = {"displacement_mm", "measured_force_N", "fitted_model_force_N",
                   "configured_model_force_N"};
      double sq = 0.0;
      ordered_json gaps = ordered_json::array();
      for (const auto& p : actuator::reference_squeeze_table()) {
        const double dh = cfg.actuator.stack.effective_delta_h(p.displacement);
        const double u = fitted.calibration_voltage;
        const double f_fit = actuator::single_actuator_force(cfg.actuator.geometry, fitted, dh, u);
        const double f_cfg =
            actuator::single_actuator_force(cfg.actuator.geometry, cfg.actuator.calibration, dh, u);
        t.rows.push_back({p.displacement, p.force, f_fit, f_cfg});
        sq += (f_fit - p.force) * (f_fit - p.force);
        gaps.push_back((f_cfg - p.force) / p.force);
      }
      emit(name + ".csv", table_csv(t));
      summary["K"] = fitted.mixing_parameter;
      summary["configured_K"] = cfg.actuator.calibration.mixing_parameter;
      summary["calibration_voltage_kV"] = fitted.calibration_voltage;
      summary["convention"] = config::to_string(cfg.actuator.stack.convention);
      summary["fit_rms_residual_N"] = std::sqrt(sq / static_cast<double>(t.rows.size()));
      summary["configured_K_relative_gaps"] = gaps;
    } else if (name == "force-curve") {
      const auto t = force_curve(cfg);
      emit(name + ".csv", table_csv(t));
      ordered_json mono = ordered_json::object();
      for (std::size_t c = 1; c < t.columns.size(); ++c) {
        mono[t.columns[c]] = nondecreasing(column(t, c));
      }
      summary["monotone_nondecreasing"] = mono;
      summary["max_force_N"] = t.rows.back().back();
    } else if (name == "max-force") {
      const auto t = max_force_sweep(cfg);
      emit(name + ".csv", table_csv(t));
      const auto user = column(t, 5);
      const auto peak = std::max_element(user.begin(), user.end());
      summary["sweep_voltage_kV"] = cfg.mechanism.sweep_voltage;
      summary["actuators_per_side"] = cfg.mechanism.actuators_per_side;
      summary["convention"] = config::to_string(cfg.mechanism.sweep_convention);
      summary["preload_mm"] = cfg.actuator.stack.preload_displacement;
      summary["force_at_zero_N"] = user.front();
      summary["peak_force_N"] = *peak;
      summary["peak_at_mm"] = t.rows[static_cast<std::size_t>(peak - user.begin())][0];
      // Reported measurement envelope, kept for side-by-side reading only.
      summary["reference_envelope_N"] = {2.0, 5.0};
    } else if (name == "step-response") {
      const auto trace = step_response(cfg, duration);
      emit(name + ".csv", trace_csv(trace));
      summary["metrics"] = summarize_step_response(trace);
      summary["rise_time_oracle_ms"] = cfg.plant.params.time_constant * std::log(9.0);
      summary["step_voltage_kV"] = cfg.plant.step_voltage;
      summary["displacement_mm"] = cfg.mechanism.operating_displacement;
    } else if (name == "track") {
      const auto trace = tracking(cfg, duration);
      emit(name + ".csv", trace_csv(trace));
      summary["target_shape"] = config::to_string(cfg.controller.target.shape);
      summary["metrics"] = summarize_tracking(trace);
    } else if (name == "vibrate") {
      const auto report = waveform::validate_waveform(cfg.waveform.drive);
      const auto trace = vibration(cfg, duration);
      emit(name + ".csv", trace_csv(trace));
      summary["waveform_peak_kV"] = report.peak;
      summary["common_period_ms"] = report.common_period * 1e3;
      summary["metrics"] =
          summarize_vibration(trace, cfg.waveform.band_low, cfg.waveform.band_high);
    } else if (name == "teleop-demo") {
      ordered_json objects = ordered_json::array();
      for (const auto& obj : cfg.teleop.objects) {
        const auto trace = teleop_session(cfg, obj, duration);
        emit(name + "_" + obj.label + ".csv", session_csv(trace));
        ordered_json o = summarize_session(trace);
        o["label"] = obj.label;
        objects.push_back(o);
      }
      summary["objects"] = objects;
    } else {
      throw ValidationError("experiment", "unknown experiment '" + name + "'");
    }
  }

  if (duration > 0.0 && name != "calibrate" && name != "force-curve" && name != "max-force") {
    summary["duration_ms"] = duration;
  }
  res.summary = summary;
  emit(name + "_summary.json", summary.dump(2) + "\n");
  return res;
}

}  // namespace ehsim::experiments
