#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "asyncopt/problem.hpp"
#include "asyncopt/schedule.hpp"
#include "asyncopt/trace.hpp"

namespace asyncopt {

/// Lhat-scaled displacement of one prox-gradient step:
///   Lhat * (prox_{r/Lhat}(x - grad f(x)/Lhat) - x).
/// Zero exactly at stationary points.
Vec prox_gradient_mapping(const CompositeProblem& p, const VecView& x);

struct BcdOptions {
  int n_trials = 32;
  bool override_admissibility = false;
  /// Called after every step with (trial, k, block, state before, state after).
  std::function<void(int, std::int64_t, int, const Vec&, const Vec&)> observer;
};

struct BcdResult {
  std::vector<RunTrace> trials;
  /// Row-wise mean of the trial traces; running_best is the mean of the
  /// per-trial running minima (the Monte-Carlo estimate of the expected
  /// running best).
  RunTrace averaged;
};

/// Runs n_trials independent block-coordinate runs against one global delay
/// sequence. At step k the updated block is drawn uniformly by a stream
/// keyed on (trial seed, k - tau_k), matching the read-time draw of the
/// shared-memory model. Requires a regularizer separable under the problem
/// partition and a policy admissible for Lhat.
BcdResult bcd_run(const CompositeProblem& p, const StepSizePolicy& policy,
                  const DelaySequence& delays, const Vec& x0, std::int64_t horizon,
                  std::uint64_t seed, const BcdOptions& options = {});

}  // namespace asyncopt
