#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asyncopt/delays.hpp"

namespace asyncopt {

/// Metrics of iterate x_k. stationarity_sq is ||grad f(x_k) + xi_k||^2 for
/// PIAG and ||prox-gradient mapping||^2 for Async-BCD; running_best is the
/// minimum of stationarity_sq over t <= k. objective_error is NaN when P*
/// is unknown.
struct TraceRow {
  std::int64_t k = 0;
  double objective_error = 0.0;
  double stationarity_sq = 0.0;
  double running_best = 0.0;
  double gamma = 0.0;
  std::int64_t tau = 0;
};

struct RunMeta {
  std::string engine;  // "piag" or "bcd"
  double h = 0.0;
  double smoothness = 0.0;  // L or Lhat, matching the policy
  DelayParams delay_params;
  DelayKind delay_kind = DelayKind::user_supplied;
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  int n_components = 1;
  int n_blocks = 1;
  std::optional<double> p_star;
};

struct RunSummary {
  double final_objective_error = 0.0;
  double best_stationarity_sq = 0.0;
  std::int64_t max_delay = 0;
};

struct RunTrace {
  RunMeta meta;
  std::vector<TraceRow> rows;  // one row per k = 0..horizon
  RunSummary summary;
};

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

/// Columns: k,objective_error,stationarity_sq,running_best,gamma,tau.
/// Header mandatory; floats in round-trip precision.
void write_trace_csv(const RunTrace& trace, std::ostream& out);
void write_trace_csv(const RunTrace& trace, const std::string& path);

/// Reads back a trace CSV (rows only; meta is not serialized).
std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace asyncopt
