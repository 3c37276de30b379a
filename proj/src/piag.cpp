#include "asyncopt/piag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asyncopt/errors.hpp"

namespace asyncopt {

PiagState::PiagState(const CompositeProblem& p, Vec x0, std::int64_t history_capacity)
    : x(std::move(x0)), history(history_capacity) {
  if (x.size() != p.dimension()) throw ConfigError("x0 dimension mismatch");
  const int n = p.n_components();
  gradient_table.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) gradient_table.push_back(component_gradient(p, i, x));
  read_times.assign(static_cast<std::size_t>(n), 0);
  g_aggregate = Vec::Zero(p.dimension());
  for (const auto& g : gradient_table) g_aggregate += g;
  g_aggregate /= static_cast<double>(n);
  history.push(x);
  last_pre_prox = x;
}

void piag_step(PiagState& state, const CompositeProblem& p, double gamma,
               const std::vector<Arrival>& arrivals) {
  const int n = p.n_components();
  for (const auto& arr : arrivals) {
    if (arr.component < 0 || arr.component >= n)
      throw ConfigError("arrival component out of range");
    if (arr.delay < 0 || arr.delay > state.k)
      throw ConfigError("arrival delay out of range");
    const std::int64_t read_time = state.k - arr.delay;
    state.gradient_table[static_cast<std::size_t>(arr.component)] =
        component_gradient(p, arr.component, state.history.at(read_time));
    state.read_times[static_cast<std::size_t>(arr.component)] = read_time;
  }
  // full recomputation keeps the aggregate exactly the table mean
  state.g_aggregate.setZero();
  for (const auto& g : state.gradient_table) state.g_aggregate += g;
  state.g_aggregate /= static_cast<double>(n);

  state.last_pre_prox = state.x - gamma * state.g_aggregate;
  state.x = prox(p.regularizer, gamma, state.last_pre_prox);
  state.last_gamma = gamma;
  state.history.push(state.x);
  state.k += 1;
}

namespace {

const std::vector<std::int64_t>& component_row(const DelaySequence& delays, int i) {
  return delays.per_component.empty() ? delays.values
                                      : delays.per_component[static_cast<std::size_t>(i)];
}

}  // namespace

RunTrace piag_run(const CompositeProblem& p, const StepSizePolicy& policy,
                  const DelaySequence& delays, const Vec& x0, std::int64_t horizon,
                  const PiagOptions& options) {
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (delays.horizon() < horizon) throw ConfigError("delay table shorter than horizon");
  const int n = p.n_components();
  if (!delays.per_component.empty() && delays.n_components() != n)
    throw ConfigError("delay table component count does not match the problem");
  if (auto bad = validate_assumption1(delays))
    throw ConfigError("delay sequence violates its bound at k = " + std::to_string(*bad));
  if (!options.override_admissibility) {
    if (auto bad = check_admissibility(policy, delays, horizon))
      throw AdmissibilityError("step-size window sum exceeds the budget at k = " +
                               std::to_string(*bad));
  }

  std::int64_t max_delay = 0;
  for (int i = 0; i < n; ++i) {
    const auto& row = component_row(delays, i);
    for (std::int64_t k = 0; k <= horizon; ++k)
      max_delay = std::max(max_delay, row[static_cast<std::size_t>(k)]);
  }

  PiagState state(p, x0, max_delay + 1);

  RunTrace trace;
  trace.meta.engine = "piag";
  trace.meta.h = policy.h;
  trace.meta.smoothness = policy.smoothness;
  trace.meta.delay_params = delays.params;
  trace.meta.delay_kind = delays.kind;
  trace.meta.seed = delays.seed;
  trace.meta.horizon = horizon;
  trace.meta.n_components = n;
  trace.meta.n_blocks = p.n_blocks();
  trace.meta.p_star = p.optimal_value;
  trace.rows.reserve(static_cast<std::size_t>(horizon) + 1);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double running_best = std::numeric_limits<double>::infinity();

  for (std::int64_t k = 0; k <= horizon; ++k) {
    TraceRow row;
    row.k = k;
    row.gamma = step_size(policy, k);
    row.tau = delays.values[static_cast<std::size_t>(k)];
    row.objective_error =
        p.optimal_value ? eval_objective(p, state.x) - *p.optimal_value : nan;
    // stationarity uses the subgradient of the prox step that produced x_k;
    // x_0 predates any step, so the min-norm element stands in
    const Vec grad_now = full_gradient(p, state.x);
    if (k == 0) {
      row.stationarity_sq =
          min_norm_stationarity(p.regularizer, state.x, grad_now).squaredNorm();
    } else {
      const Vec xi = recover_subgradient(state.last_gamma, state.last_pre_prox, state.x);
      row.stationarity_sq = (grad_now + xi).squaredNorm();
    }
    running_best = std::min(running_best, row.stationarity_sq);
    row.running_best = running_best;
    trace.rows.push_back(row);

    if (k == horizon) break;

    // step k consumes the tau_k row: slot i must read x_{k - tau_k^(i)};
    // a slot arrives exactly when its read time moves
    std::vector<Arrival> arrivals;
    for (int i = 0; i < n; ++i) {
      const auto& taus = component_row(delays, i);
      const std::int64_t tau_k = taus[static_cast<std::size_t>(k)];
      if (k - tau_k != state.read_times[static_cast<std::size_t>(i)])
        arrivals.push_back(Arrival{i, tau_k});
    }
    piag_step(state, p, row.gamma, arrivals);
    if (options.observer) options.observer(state.k, state);
  }

  trace.summary.final_objective_error = trace.rows.back().objective_error;
  trace.summary.best_stationarity_sq = running_best;
  trace.summary.max_delay = max_delay;
  return trace;
}

}  // namespace asyncopt
