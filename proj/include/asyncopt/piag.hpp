#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "asyncopt/history.hpp"
#include "asyncopt/problem.hpp"
#include "asyncopt/schedule.hpp"
#include "asyncopt/trace.hpp"

namespace asyncopt {

/// Mutable state of one aggregated-gradient run: the current iterate, the
/// per-component gradient table, their read times, and enough history to
/// serve every delayed read.
struct PiagState {
  std::int64_t k = 0;
  Vec x;
  std::vector<Vec> gradient_table;     // slot i holds grad f^(i)(x_{read_time[i]})
  std::vector<std::int64_t> read_times;
  Vec g_aggregate;                     // (1/n) sum of table slots
  HistoryRing history;
  Vec last_pre_prox;                   // inputs of the prox step that produced x
  double last_gamma = 0.0;

  PiagState(const CompositeProblem& p, Vec x0, std::int64_t history_capacity);
};

struct Arrival {
  int component = 0;
  std::int64_t delay = 0;  // slot refreshed from x_{k - delay}
};

/// One master step: refresh arriving slots from history, recompute the
/// aggregate, prox-update the iterate, advance the counter.
void piag_step(PiagState& state, const CompositeProblem& p, double gamma,
               const std::vector<Arrival>& arrivals);

struct PiagOptions {
  bool override_admissibility = false;
  /// Called after each step with (k, state); for tests and instrumentation.
  std::function<void(std::int64_t, const PiagState&)> observer;
};

/// Runs K iterations of the aggregated-gradient update driven by a
/// per-component delay table (a single-row table serves n = 1). The policy
/// must pass check_admissibility against the max-delay row unless
/// override_admissibility is set. Deterministic: identical inputs produce
/// bit-identical traces.
RunTrace piag_run(const CompositeProblem& p, const StepSizePolicy& policy,
                  const DelaySequence& delays, const Vec& x0, std::int64_t horizon,
                  const PiagOptions& options = {});

}  // namespace asyncopt
