#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "asyncopt/delays.hpp"

namespace asyncopt {

enum class ScheduleKind { piag, bcd, constant, user_table };

/// Step-size policy. The delay-matched schedules evaluate
///   gamma_k = h / (S * (a ((k+c)/(1-a))^b + c + 1))
/// with S the aggregate smoothness L (PIAG) or the block-wise constant Lhat
/// (BCD). h in (0,1) strictly; the pair (h, S) also defines the window-sum
/// budget h/S checked by admissibility.
struct StepSizePolicy {
  ScheduleKind kind = ScheduleKind::constant;
  double h = 0.5;
  double smoothness = 1.0;  // L or Lhat
  DelayParams params;
  double constant_gamma = 0.0;
  std::vector<double> table;

  void validate() const;  // throws ConfigError
};

StepSizePolicy piag_schedule(double h, double aggregate_smoothness, const DelayParams& params);
StepSizePolicy bcd_schedule(double h, double blockwise_smoothness, const DelayParams& params);
StepSizePolicy constant_policy(double gamma, double h, double smoothness);
StepSizePolicy user_policy(std::vector<double> table, double h, double smoothness);

double step_size(const StepSizePolicy& policy, std::int64_t k);

/// Prefix sums S[k] = sum_{t<k} gamma_t for k = 0..horizon (S[0] = 0).
std::vector<double> step_size_prefix_sums(const StepSizePolicy& policy, std::int64_t horizon);

/// Rate clock: k^(1-b) for b in [0,1), ln k for b = 1. k >= 1.
double phi(double b, std::int64_t k);

/// Verifies sum_{t=k-tau_k}^{k} gamma_t <= h/S at every k <= horizon.
/// Returns the first violating k or nullopt. The window is summed directly
/// (never by prefix-sum subtraction); a monotonicity shortcut skips the sum
/// where (tau_k+1) * gamma_{k-tau_k} is clearly within budget.
std::optional<std::int64_t> check_admissibility(const StepSizePolicy& policy,
                                                const DelaySequence& seq, std::int64_t horizon);

/// Closed-form lower bound on sum_{t=0}^{k-1} gamma_t for the delay-matched
/// schedules: gamma_0 plus the integral bound, which grows like k^(1-b)
/// (b < 1) or ln k (b = 1). k >= 1.
double stepsum_lower_bound(const StepSizePolicy& policy, std::int64_t k);

}  // namespace asyncopt
