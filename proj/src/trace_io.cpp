#include "ehsim/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ehsim/error.hpp"

namespace ehsim::trace_io {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace(std::ostream& out, const dynamics::SimTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << format_number(r.t_ms) << ',' << format_number(r.target_force) << ','
        << format_number(r.actual_force) << ',' << format_number(r.voltage) << ','
        << format_number(r.displacement) << '\n';
  }
}

void write_session(std::ostream& out, const teleop::SessionTrace& trace) {
  out << kSessionHeader << '\n';
  for (const auto& r : trace.records) {
    out << format_number(r.t_ms) << ',' << format_number(r.target_force) << ','
        << format_number(r.master_force) << ',' << format_number(r.voltage) << ','
        << format_number(r.master_position) << ',' << format_number(r.slave_force) << ','
        << format_number(r.slave_position) << ',' << format_number(r.latency_ms) << '\n';
  }
}

void write_table(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ehsim::trace_io
