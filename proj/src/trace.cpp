#include "asyncopt/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "asyncopt/errors.hpp"

namespace asyncopt {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "k,objective_error,stationarity_sq,running_best,gamma,tau\n";
  for (const auto& row : trace.rows) {
    out << row.k << ',' << format_double(row.objective_error) << ','
        << format_double(row.stationarity_sq) << ',' << format_double(row.running_best) << ','
        << format_double(row.gamma) << ',' << row.tau << '\n';
  }
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  write_trace_csv(trace, out);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty trace file: " + path);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    TraceRow row;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ','))
        throw ConfigError(std::string("trace missing field ") + what);
      return field;
    };
    row.k = std::stoll(next("k"));
    row.objective_error = std::stod(next("objective_error"));
    row.stationarity_sq = std::stod(next("stationarity_sq"));
    row.running_best = std::stod(next("running_best"));
    row.gamma = std::stod(next("gamma"));
    row.tau = std::stoll(next("tau"));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace asyncopt
