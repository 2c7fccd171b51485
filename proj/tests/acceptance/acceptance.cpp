// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehsim/actuator.hpp"
#include "ehsim/config.hpp"
#include "ehsim/dynamics.hpp"
#include "ehsim/error.hpp"
#include "ehsim/experiments.hpp"
#include "ehsim/mechanism.hpp"
#include "ehsim/teleop/frame.hpp"
#include "ehsim/teleop/session.hpp"
#include "ehsim/waveform.hpp"

using namespace ehsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

fs::path out_dir(const std::string& tag) {
  const auto d = fs::temp_directory_path() / ("ehsim_acceptance_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::vector<std::vector<double>> read_csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

// Hand-written model pieces used as oracles.
constexpr double kH = 2.0;
constexpr double kTan = 0.32;

double oracle_area(double dh) { return (2.0 * dh / kTan + dh * dh / (kTan * (kH - dh))) * 50.0; }
double oracle_force(double k, double dh, double u) { return 2.0 * k * u * u * oracle_area(dh); }

// 1
Outcome calibration_reproduction() {
  Outcome o;
  const auto dir = out_dir("calibrate");
  experiments::run_experiment("calibrate", {}, dir);
  const double k = read_json(dir / "calibrate_summary.json")["K"].get<double>();
  double fs = 0.0;
  double ss = 0.0;
  const double d[] = {0.125, 0.25, 0.375};
  const double f[] = {0.2788, 0.5261, 0.8566};
  for (int i = 0; i < 3; ++i) {
    fs += f[i] * oracle_area(d[i]);
    ss += oracle_area(d[i]) * oracle_area(d[i]);
  }
  const double oracle = fs / (2.0 * 36.0 * ss);
  o.require(k >= 8.0e-5 && k <= 1.1e-4, "K " + num(k) + " outside [8e-5, 1.1e-4]");
  o.require(std::abs(k - oracle) <= 1e-9 * oracle, "K differs from least-squares oracle " + num(oracle));
  o.require(std::abs(oracle - 9.03e-5) < 0.005e-5, "oracle " + num(oracle) + " is not 9.03e-5");
  o.require(9.828e-5 >= 8.0e-5 && 9.828e-5 <= 1.1e-4, "reference K outside band");
  o.note("K=" + num(k) + " oracle=" + num(oracle));
  return o;
}

// 2
Outcome model_vs_measurement() {
  Outcome o;
  const actuator::CalibrationParams cal{9.828e-5, 6.0};
  const actuator::StackConfig stack;  // TotalAsDeltaH
  const auto table = actuator::reference_squeeze_table();
  const double expect_model[] = {0.2857, 0.5923, 0.9250};
  const double expect_meas[] = {0.2788, 0.5261, 0.8566};
  o.require(table.size() == 3, "reference table must hold three points");
  for (std::size_t i = 0; i < table.size() && i < 3; ++i) {
    const double model = actuator::stack_force(stack, {}, cal, table[i].displacement, 6.0);
    const double oracle = oracle_force(9.828e-5, table[i].displacement, 6.0);
    const double gap = std::abs(model - table[i].force) / table[i].force;
    o.require(std::abs(model - oracle) <= 1e-12, "model differs from hand oracle at " + num(table[i].displacement));
    o.require(std::abs(model - expect_model[i]) < 1e-4, "model " + num(model) + " != " + num(expect_model[i]));
    o.require(table[i].force == expect_meas[i], "measured average mismatch");
    o.require(gap <= 0.15, "gap " + num(gap) + " > 15% at " + num(table[i].displacement));
    o.note("D=" + num(table[i].displacement) + " gap=" + num(100 * gap) + "%");
  }
  return o;
}

// 3
Outcome response_time() {
  Outcome o;
  const auto dir = out_dir("step");
  experiments::run_experiment("step-response", {}, dir);
  const double rise = read_json(dir / "step-response_summary.json")["metrics"]["rise_time_ms"].get<double>();
  const double oracle = 24.1 * std::log(9.0);
  o.require(std::abs(rise - 53.0) <= 1.0, "rise " + num(rise) + " ms outside 53 +/- 1");
  o.require(std::abs(rise - oracle) <= 0.5, "rise " + num(rise) + " far from tau ln 9 = " + num(oracle));
  o.note("rise=" + num(rise) + " ms, tau ln 9=" + num(oracle) + " ms");
  return o;
}

// 4
Outcome pi_tracking() {
  Outcome o;
  const config::ExperimentConfig cfg;
  const auto sine = experiments::tracking(cfg, 25000.0);
  const double rms = dynamics::rms_tracking_error(sine, experiments::kTrackingSteadyFromMs);
  o.require(cfg.controller.target.amplitude == 0.5 && cfg.controller.target.offset == 0.6 &&
                cfg.controller.target.frequency == 0.08,
            "default target is not 0.08 Hz / 0.5 N / 0.6 N");
  o.require(rms < 0.05 * 0.5, "rms " + num(rms) + " N >= 5% of amplitude");

  auto sq_cfg = cfg;
  sq_cfg.controller.target.shape = dynamics::TargetShape::Square;
  const auto sq = experiments::tracking(sq_cfg, 25000.0);
  const double half_ms = 0.5 / 0.08 * 1e3;
  double rise = 0.0;
  double fall = 0.0;
  int nr = 0;
  int nf = 0;
  for (const auto& e : dynamics::edge_settling_times(sq, 0.02)) {
    if (e.edge_ms + half_ms > sq.records.back().t_ms) continue;
    o.require(e.settled, "edge at " + num(e.edge_ms) + " ms never settled");
    (e.rising ? rise : fall) = std::max(e.rising ? rise : fall, e.settle_ms);
    (e.rising ? nr : nf) += 1;
  }
  o.require(nr > 0 && nf > 0, "square target produced no complete rising and falling edge");
  o.require(fall >= rise, "falling settle " + num(fall) + " < rising settle " + num(rise));
  o.note("rms/amp=" + num(rms / 0.5) + ", settle rise=" + num(rise) + " fall=" + num(fall) + " ms");
  return o;
}

// 5
Outcome vibration() {
  Outcome o;
  config::ExperimentConfig cfg;
  auto ripple_for = [&](const config::ExperimentConfig& c) {
    return dynamics::ripple_analysis(experiments::vibration(c, 4000.0), c.waveform.band_low,
                                     c.waveform.band_high);
  };
  o.require(cfg.waveform.drive.square.frequency == 20.0 && cfg.waveform.drive.square.amplitude == 3.5 &&
                cfg.waveform.drive.overlay && cfg.waveform.drive.overlay->frequency == 5.0 &&
                cfg.waveform.drive.overlay->amplitude == 2.5,
            "default drive is not 20 Hz/3.5 kV + 5 Hz/2.5 kV");
  const auto base = ripple_for(cfg);
  o.require(base.has_peak && base.amplitude > 1e-6, "no steady-state ripple");

  double prev = -1.0;
  std::string amps;
  for (double a : {0.5, 1.5, 2.5}) {
    auto c = cfg;
    c.waveform.drive.overlay->amplitude = a;
    const double amp = ripple_for(c).amplitude;
    o.require(amp > prev, "ripple not increasing at overlay " + num(a) + " kV");
    prev = amp;
    amps += (amps.empty() ? "" : "/") + num(amp);
  }

  auto ideal = cfg;
  ideal.waveform.drive.overlay.reset();
  ideal.waveform.drive.square.slew_rate = std::numeric_limits<double>::infinity();
  const auto t = experiments::vibration(ideal, 4000.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = t.records.size() / 2; i < t.records.size(); ++i) {
    lo = std::min(lo, t.records[i].actual_force);
    hi = std::max(hi, t.records[i].actual_force);
  }
  const double ideal_amp = ripple_for(ideal).amplitude;
  o.require(hi - lo < 1e-9, "ideal-square steady peak-to-peak " + num(hi - lo) + " N");
  o.require(ideal_amp < 1e-9, "ideal-square ripple " + num(ideal_amp) + " N");
  o.note("ripple " + num(base.amplitude) + " N at " + num(base.dominant_frequency) + " Hz; by overlay " +
         amps + " N; ideal p2p " + num(hi - lo));
  return o;
}

// 6
Outcome actuator_properties() {
  Outcome o;
  const actuator::ActuatorGeometry g;
  const actuator::CalibrationParams cal;
  const double h = actuator::expanded_half_height(g);
  const double t = std::tan(actuator::wedge_angle(g));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dh(0.0, h);
  std::uniform_real_distribution<double> uu(-6.0, 6.0);
  std::uniform_real_distribution<double> cc(-3.0, 3.0);

  int vol_bad = 0;
  int quad_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    double d = dh(rng);
    if (d >= h) d = std::nextafter(h, 0.0);
    const double dx = actuator::lateral_advance(g, d);
    const double s1 = d * d / t;
    const double s2 = dx * (h - d);
    if (std::abs(s1 - s2) > 1e-12 * std::max(std::abs(s1), 1e-300)) ++vol_bad;
  }
  for (int i = 0; i < 1000; ++i) {
    const double d = std::min(dh(rng), 1.999);
    const double u = uu(rng);
    const double c = cc(rng);
    const double f = actuator::single_actuator_force(g, cal, d, u);
    const double fc = actuator::single_actuator_force(g, cal, d, c * u);
    if (std::abs(fc - c * c * f) > 1e-13 * std::abs(fc)) ++quad_bad;
  }
  o.require(vol_bad == 0, std::to_string(vol_bad) + " volume-conservation violations");
  o.require(quad_bad == 0, std::to_string(quad_bad) + " quadratic-law violations");

  bool mono = true;
  double prev = 0.0;
  for (int i = 1; i < 1999; ++i) {
    const double f = actuator::single_actuator_force(g, cal, i * 1e-3, 6.0);
    mono = mono && f > prev;
    prev = f;
  }
  prev = 0.0;
  for (int i = 1; i <= 600; ++i) {
    const double f = actuator::single_actuator_force(g, cal, 0.3, -0.01 * i);
    mono = mono && f > prev;
    prev = f;
  }
  o.require(mono, "force not strictly monotone in dh or |u|");

  auto rejects = [](auto fn) {
    try {
      fn();
    } catch (const DomainError&) {
      return true;
    }
    return false;
  };
  const mechanism::MechanismGeometry mg;
  o.require(rejects([&] { actuator::lateral_advance(g, h); }), "dh = h accepted");
  o.require(rejects([&] { actuator::lateral_advance(g, h + 0.5); }), "dh > h accepted");
  o.require(rejects([&] { mechanism::plate_displacement(mg, mg.vertical_offset + 1e-9); }),
            "pinch beyond L accepted");
  o.require(rejects([&] { mechanism::device_static_force({}, 15.5, 6.0); }), "device pinch beyond L accepted");
  o.note("1000 volume, 1000 quadratic samples clean");
  return o;
}

// 7
Outcome protocol() {
  using namespace teleop;
  Outcome o;
  FrameBytes hello{};
  hello[0] = 0xa7;
  hello[1] = 0x03;
  o.require(encode_frame({MsgType::Hello, 0, 0, 0.0, 0.0}) == hello, "HELLO vector mismatch");
  const auto mp = encode_frame({MsgType::MasterPos, 1, 1000, 1.0, 0.0});
  const std::uint8_t one[8] = {0, 0, 0, 0, 0, 0, 0xf0, 0x3f};
  o.require(std::memcmp(mp.data() + 12, one, 8) == 0, "MASTER_POS payload_a bytes mismatch");

  std::mt19937_64 rng(7);
  auto finite = [&] {
    for (;;) {
      const double d = std::bit_cast<double>(rng());
      if (std::isfinite(d)) return d;
    }
  };
  const MsgType types[] = {MsgType::MasterPos, MsgType::SlaveState, MsgType::Hello, MsgType::Shutdown};
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const TeleopFrame f{types[rng() % 4], static_cast<std::uint16_t>(rng()), rng(), finite(), finite()};
    const auto b = encode_frame(f);
    const auto g = decode_frame(b);
    if (encode_frame(g) != b || std::bit_cast<std::uint64_t>(g.payload_a) != std::bit_cast<std::uint64_t>(f.payload_a) ||
        std::bit_cast<std::uint64_t>(g.payload_b) != std::bit_cast<std::uint64_t>(f.payload_b) ||
        g.seq != f.seq || g.timestamp_us != f.timestamp_us || g.msg_type != f.msg_type) {
      ++mismatches;
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " round-trip mismatches");

  auto code_of = [](std::span<const std::uint8_t> b) -> int {
    try {
      decode_frame(b);
    } catch (const FrameError& e) {
      return static_cast<int>(e.code());
    } catch (...) {
      return -2;
    }
    return -1;
  };
  auto bad_magic = mp;
  bad_magic[0] = 0;
  auto bad_type = mp;
  bad_type[1] = 0x09;
  auto nan_payload = mp;
  std::memset(nan_payload.data() + 12, 0xff, 8);
  o.require(code_of(std::span(mp).first(27)) == static_cast<int>(FrameErrorCode::BadLength), "27 bytes");
  o.require(code_of(bad_magic) == static_cast<int>(FrameErrorCode::BadMagic), "bad magic");
  o.require(code_of(bad_type) == static_cast<int>(FrameErrorCode::BadType), "bad type");
  o.require(code_of(nan_payload) == static_cast<int>(FrameErrorCode::NonFinitePayload), "NaN payload");

  int untyped = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint8_t> b(rng() % 40);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    if (code_of(b) == -2) ++untyped;
  }
  o.require(untyped == 0, std::to_string(untyped) + " malformed inputs raised untyped errors");
  o.note("10000 fuzzed frames bit-exact; both layout vectors match");
  return o;
}

// 8
Outcome teleop_session() {
  using namespace teleop;
  Outcome o;
  SessionConfig c;
  c.object = VirtualObject{0.5, 0.3, 0.0, "spring"};
  c.profile.keyframes = {{0.0, 0.0}, {1000.0, 3.5}};  // 3 mm past contact, held from 1 s
  const auto t = run_session(c, 3000.0);

  const double slave = t.records.back().slave_force;
  o.require(std::abs(slave - 0.3 * 3.0) <= 1e-12, "slave force " + num(slave) + " != 0.9");
  double worst = 0.0;
  for (const auto& r : t.records) {
    if (r.t_ms >= 3000.0) worst = std::max(worst, std::abs(r.master_force - 0.9) / 0.9);
  }
  o.require(worst <= 0.02, "master force error " + num(100 * worst) + "% after 2 s hold");

  double mirror = 0.0;
  for (const auto& r : t.records) {
    if (r.t_ms >= 2.0) mirror = std::max(mirror, std::abs(r.slave_position - r.master_position));
  }
  o.require(mirror <= c.slave.position_step + 1e-12, "mirroring error " + num(mirror) + " mm");

  auto jittery = c;
  jittery.channel = {10.0, 5.0};
  jittery.seed = 77;
  const auto a = run_session(jittery, 2000.0);
  const auto b = run_session(jittery, 2000.0);
  o.require(a.records.size() == b.records.size() &&
                std::memcmp(a.records.data(), b.records.data(), a.records.size() * sizeof(SessionRecord)) == 0,
            "same seed gave different traces");

  auto delayed = c;
  delayed.channel = {50.0, 0.0};
  const auto d = run_session(delayed, 10000.0);
  const double cap = dynamics::static_force_map(delayed.device, 3.5, 6.0);
  double e_lo = 1e9, e_hi = -1e9, l_lo = 1e9, l_hi = -1e9;
  bool in_bounds = true;
  for (const auto& r : d.records) {
    in_bounds = in_bounds && std::isfinite(r.master_force) && r.master_force >= 0.0 && r.master_force <= cap;
    if (r.t_ms >= 3000.0 && r.t_ms < 5000.0) {
      e_lo = std::min(e_lo, r.master_force);
      e_hi = std::max(e_hi, r.master_force);
    }
    if (r.t_ms >= 8000.0) {
      l_lo = std::min(l_lo, r.master_force);
      l_hi = std::max(l_hi, r.master_force);
    }
  }
  const double early = e_hi - e_lo;
  const double late = l_hi - l_lo;
  o.require(in_bounds, "50 ms session left [0, capability]");
  o.require(late <= early + 1e-9, "50 ms session swing grows: " + num(early) + " -> " + num(late));
  o.note("slave " + num(slave) + " N, master err " + num(100 * worst) + "%, mirror " + num(mirror) +
         " mm, 50 ms late swing " + num(late) + " N");
  return o;
}

// 9
Outcome max_force() {
  Outcome o;
  const config::ExperimentConfig cfg;
  const auto dir = out_dir("maxforce");
  experiments::run_experiment("max-force", cfg, dir);
  const auto rows = read_csv_rows(dir / "max-force.csv");
  const auto s = read_json(dir / "max-force_summary.json");
  o.require(!rows.empty(), "empty curve");
  o.require(cfg.mechanism.sweep_voltage == 6.0, "sweep voltage is not 6 kV");
  o.require(std::abs(rows.back()[0] - 15.0) < 1e-9, "sweep does not reach the 15 mm stroke");
  bool ok = true;
  for (const auto& r : rows) ok = ok && std::isfinite(r.back()) && r.back() >= 0.0;
  o.require(ok, "non-finite or negative force");
  o.require(cfg.actuator.stack.preload_displacement > 0.0 && rows.front().back() > 0.0,
            "no force at zero pinch with preload");
  o.require(s.contains("reference_envelope_N") && s["reference_envelope_N"].size() == 2,
            "reference envelope missing from summary");
  o.note("F(0)=" + num(rows.front().back()) + " N, peak " + num(s["peak_force_N"].get<double>()) + " N");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 calibration reproduction", calibration_reproduction},
      {"2 model vs measurement", model_vs_measurement},
      {"3 response time", response_time},
      {"4 PI tracking", pi_tracking},
      {"5 vibration", vibration},
      {"6 actuator math properties", actuator_properties},
      {"7 protocol", protocol},
      {"8 teleop session", teleop_session},
      {"9 max-force experiment", max_force},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu/%zu criteria passed in %.2f s\n", criteria.size() - failed, criteria.size(), secs);
  return failed == 0 ? 0 : 1;
}
