// Command-line front end: one subcommand per experiment plus `teleop`.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehsim/config.hpp"
#include "ehsim/error.hpp"
#include "ehsim/experiments.hpp"
#include "ehsim/teleop/frame.hpp"
#include "ehsim/teleop/socket_transport.hpp"
#include "ehsim/trace_io.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<double> duration_ms;
  std::optional<std::uint64_t> seed;
};

std::string error_kind(const std::exception& e) {
  using namespace ehsim;
  if (dynamic_cast<const config::ParseError*>(&e)) return "parse_error";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation_error";
  if (dynamic_cast<const InvalidGeometry*>(&e)) return "invalid_geometry";
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  if (dynamic_cast<const BreakdownRisk*>(&e)) return "breakdown_risk";
  if (dynamic_cast<const CapabilityError*>(&e)) return "capability_error";
  if (dynamic_cast<const teleop::FrameError*>(&e)) return "frame_error";
  if (dynamic_cast<const teleop::SessionError*>(&e)) return "session_error";
  if (dynamic_cast<const TraceError*>(&e)) return "trace_error";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal_error";
}

ehsim::config::ExperimentConfig resolve_config(const CommonOptions& opts) {
  std::string path = opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("EHSIM_CONFIG"); env != nullptr) path = env;
  }
  auto cfg = path.empty() ? ehsim::config::ExperimentConfig{} : ehsim::config::load_config(path);
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config_path, "JSON config (default: $EHSIM_CONFIG or built-in)");
  sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--duration", opts.duration_ms, "Simulated duration in ms");
  sub->add_option("--seed", opts.seed, "Override the config seed");
}

int run_teleop(const CommonOptions& opts, const std::string& role, const std::string& listen,
               const std::string& connect, bool unpaced) {
  using namespace ehsim;
  const auto cfg = resolve_config(opts);
  const auto session = cfg.session(cfg.teleop.selected_object());
  const double duration = opts.duration_ms.value_or(
      experiments::default_duration_ms("teleop-demo", cfg));

  teleop::SessionTrace trace;
  if (role == "demo") {
    trace = teleop::run_session(session, duration);
  } else {
    teleop::LiveOptions live{duration, !unpaced};
    std::optional<teleop::TcpStream> stream;
    if (!listen.empty()) {
      stream.emplace(teleop::TcpStream::accept_one(
          teleop::parse_endpoint(listen),
          [](std::uint16_t port) { std::cerr << "listening on port " << port << std::endl; }));
    } else if (!connect.empty()) {
      stream.emplace(teleop::TcpStream::connect(teleop::parse_endpoint(connect),
                                                std::chrono::seconds(10)));
    } else {
      throw ValidationError("teleop", "role " + role + " needs --listen or --connect");
    }
    trace = role == "master" ? teleop::run_master_live(session, *stream, live)
                             : teleop::run_slave_live(session, *stream, live);
  }

  std::ostringstream csv;
  trace_io::write_session(csv, trace);
  const auto path = std::filesystem::path(opts.out_dir) / ("teleop_" + role + ".csv");
  trace_io::write_file(path, csv.str());
  auto summary = experiments::summarize_session(trace);
  summary["role"] = role;
  summary["object"] = session.object.label;
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electrohydraulic haptic device simulator"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string experiment;
  for (const auto& name : ehsim::experiments::experiment_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    add_common(sub, opts);
    sub->callback([&experiment, name] { experiment = name; });
  }

  std::string role = "demo";
  std::string listen;
  std::string connect;
  bool unpaced = false;
  auto* tele = app.add_subcommand("teleop", "Teleoperation session (demo, master or slave)");
  add_common(tele, opts);
  tele->add_option("--role", role, "master | slave | demo")
      ->check(CLI::IsMember({"master", "slave", "demo"}))
      ->capture_default_str();
  auto* listen_opt = tele->add_option("--listen", listen, "Accept one peer at host:port");
  tele->add_option("--connect", connect, "Connect to host:port")->excludes(listen_opt);
  tele->add_flag("--unpaced", unpaced, "Do not hold 1 kHz wall-clock ticks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tele->parsed()) return run_teleop(opts, role, listen, connect, unpaced);
    const auto cfg = resolve_config(opts);
    const auto result = ehsim::experiments::run_experiment(experiment, cfg, opts.out_dir,
                                                           opts.duration_ms);
    std::cout << result.summary.dump(2) << std::endl;
    return 0;
  } catch (const std::exception& e) {
    nlohmann::ordered_json line;
    line["error"] = error_kind(e);
    line["message"] = e.what();
    std::cerr << line.dump() << std::endl;
    return 2;
  }
}
