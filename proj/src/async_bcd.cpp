#include "asyncopt/async_bcd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asyncopt/errors.hpp"
#include "asyncopt/history.hpp"
#include "asyncopt/rng.hpp"

namespace asyncopt {

Vec prox_gradient_mapping(const CompositeProblem& p, const VecView& x) {
  const double lhat = p.blockwise_smoothness;
  if (!(lhat > 0)) throw ConfigError("prox_gradient_mapping requires Lhat > 0");
  const Vec g = full_gradient(p, x);
  const Vec y = prox(p.regularizer, 1.0 / lhat, x - g / lhat);
  return lhat * (y - x);
}

namespace {

RunTrace run_single_trial(const CompositeProblem& p, const StepSizePolicy& policy,
                          const DelaySequence& delays, const Vec& x0, std::int64_t horizon,
                          std::uint64_t trial_seed, int trial_index,
                          const BcdOptions& options) {
  const int m = p.n_blocks();
  // one uniform block draw per read time; step k consumes the draw made at
  // time k - tau_k
  std::mt19937_64 rng(trial_seed);
  std::vector<int> block_draws(static_cast<std::size_t>(horizon) + 1);
  for (auto& d : block_draws)
    d = static_cast<int>(draw_bounded(rng, static_cast<std::uint64_t>(m)));

  std::int64_t max_delay = 0;
  for (std::int64_t k = 0; k <= horizon; ++k)
    max_delay = std::max(max_delay, delays.values[static_cast<std::size_t>(k)]);

  HistoryRing history(max_delay + 1);
  Vec x = x0;
  history.push(x);

  RunTrace trace;
  trace.meta.engine = "bcd";
  trace.meta.h = policy.h;
  trace.meta.smoothness = policy.smoothness;
  trace.meta.delay_params = delays.params;
  trace.meta.delay_kind = delays.kind;
  trace.meta.seed = trial_seed;
  trace.meta.horizon = horizon;
  trace.meta.n_components = p.n_components();
  trace.meta.n_blocks = m;
  trace.meta.p_star = p.optimal_value;
  trace.rows.reserve(static_cast<std::size_t>(horizon) + 1);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double running_best = std::numeric_limits<double>::infinity();

  for (std::int64_t k = 0; k <= horizon; ++k) {
    TraceRow row;
    row.k = k;
    row.gamma = step_size(policy, k);
    row.tau = delays.values[static_cast<std::size_t>(k)];
    row.objective_error = p.optimal_value ? eval_objective(p, x) - *p.optimal_value : nan;
    row.stationarity_sq = prox_gradient_mapping(p, x).squaredNorm();
    running_best = std::min(running_best, row.stationarity_sq);
    row.running_best = running_best;
    trace.rows.push_back(row);

    if (k == horizon) break;

    const std::int64_t read_time = k - row.tau;
    const int j = block_draws[static_cast<std::size_t>(read_time)];
    const auto jj = static_cast<std::size_t>(j);
    const Vec gj = block_partial_gradient(p, j, history.at(read_time));
    const Vec before = options.observer ? x : Vec();
    auto block = x.segment(p.partition.offsets[jj], p.partition.sizes[jj]);
    block = prox_block(p.regularizer, p.partition, row.gamma, j, block - row.gamma * gj);
    history.push(x);
    if (options.observer) options.observer(trial_index, k, j, before, x);
  }

  trace.summary.final_objective_error = trace.rows.back().objective_error;
  trace.summary.best_stationarity_sq = running_best;
  trace.summary.max_delay = max_delay;
  return trace;
}

}  // namespace

BcdResult bcd_run(const CompositeProblem& p, const StepSizePolicy& policy,
                  const DelaySequence& delays, const Vec& x0, std::int64_t horizon,
                  std::uint64_t seed, const BcdOptions& options) {
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (options.n_trials < 1) throw ConfigError("need at least one trial");
  if (delays.horizon() < horizon) throw ConfigError("delay sequence shorter than horizon");
  if (x0.size() != p.dimension()) throw ConfigError("x0 dimension mismatch");
  if (!p.regularizer.separable_under(p.partition))
    throw ConfigError("Async-BCD requires a regularizer separable under the partition");
  if (auto bad = validate_assumption1(delays))
    throw ConfigError("delay sequence violates its bound at k = " + std::to_string(*bad));
  if (!options.override_admissibility) {
    if (auto bad = check_admissibility(policy, delays, horizon))
      throw AdmissibilityError("step-size window sum exceeds the budget at k = " +
                               std::to_string(*bad));
  }

  BcdResult result;
  result.trials.reserve(static_cast<std::size_t>(options.n_trials));
  for (int t = 0; t < options.n_trials; ++t)
    result.trials.push_back(run_single_trial(p, policy, delays, x0, horizon,
                                             substream_seed(seed, static_cast<std::uint64_t>(t)),
                                             t, options));

  RunTrace avg = result.trials.front();
  avg.meta.seed = seed;
  const double nt = static_cast<double>(options.n_trials);
  for (std::size_t r = 0; r < avg.rows.size(); ++r) {
    double obj = 0.0, stat = 0.0, best = 0.0;
    for (const auto& trial : result.trials) {
      obj += trial.rows[r].objective_error;
      stat += trial.rows[r].stationarity_sq;
      best += trial.rows[r].running_best;
    }
    avg.rows[r].objective_error = obj / nt;
    avg.rows[r].stationarity_sq = stat / nt;
    avg.rows[r].running_best = best / nt;
  }
  avg.summary.final_objective_error = avg.rows.back().objective_error;
  avg.summary.best_stationarity_sq = avg.rows.back().running_best;
  result.averaged = std::move(avg);
  return result;
}

}  // namespace asyncopt
