#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ehsim/dynamics.hpp"
#include "ehsim/teleop/session.hpp"

namespace ehsim::trace_io {

inline constexpr const char* kTraceHeader =
    "t_ms,target_force_N,actual_force_N,voltage_kV,displacement_mm";
inline constexpr const char* kSessionHeader =
    "t_ms,target_force_N,actual_force_N,voltage_kV,displacement_mm,slave_force_N,"
    "slave_position_mm,latency_ms";

/// Shortest decimal that parses back to the same double (17 significant digits max).
std::string format_number(double v);

void write_trace(std::ostream& out, const dynamics::SimTrace& trace);
void write_session(std::ostream& out, const teleop::SessionTrace& trace);

// Generic table for static sweeps: header row then rows of numbers.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
void write_table(std::ostream& out, const Table& table);

/// Writes via a temporary file in the same directory, then renames.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace ehsim::trace_io
