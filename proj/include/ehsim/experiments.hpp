#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehsim/config.hpp"
#include "ehsim/trace_io.hpp"

namespace ehsim::experiments {

struct ExperimentResult {
  std::string name;
  nlohmann::ordered_json summary;
  std::vector<std::filesystem::path> files;
};

/// Names accepted by run_experiment, in the order the CLI lists them.
const std::vector<std::string>& experiment_names();

/// Runs one named experiment and writes <out_dir>/<name>.csv (one CSV per
/// object for teleop-demo) plus <out_dir>/<name>_summary.json.
ExperimentResult run_experiment(const std::string& name, const config::ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir,
                                std::optional<double> duration_ms = std::nullopt);

// In-memory pipelines behind the runners.

double default_duration_ms(const std::string& name, const config::ExperimentConfig& cfg);

actuator::CalibrationParams calibrate(const config::ExperimentConfig& cfg);
trace_io::Table force_curve(const config::ExperimentConfig& cfg);
trace_io::Table max_force_sweep(const config::ExperimentConfig& cfg);
dynamics::SimTrace step_response(const config::ExperimentConfig& cfg, double duration_ms);
dynamics::SimTrace tracking(const config::ExperimentConfig& cfg, double duration_ms);
dynamics::SimTrace vibration(const config::ExperimentConfig& cfg, double duration_ms);
teleop::SessionTrace teleop_session(const config::ExperimentConfig& cfg,
                                    const teleop::VirtualObject& object, double duration_ms);

// Summary metrics, computed from traces so they can be recomputed from CSV.

nlohmann::ordered_json summarize_step_response(const dynamics::SimTrace& trace);
nlohmann::ordered_json summarize_tracking(const dynamics::SimTrace& trace);
nlohmann::ordered_json summarize_vibration(const dynamics::SimTrace& trace, double band_low,
                                           double band_high);
/// Steady-state values averaged over the last `window_ms` of the session.
nlohmann::ordered_json summarize_session(const teleop::SessionTrace& trace, double window_ms = 500.0);

/// Start of the steady-state window used for tracking RMS.
inline constexpr double kTrackingSteadyFromMs = 2000.0;

}  // namespace ehsim::experiments
