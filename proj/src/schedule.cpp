#include "asyncopt/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "asyncopt/errors.hpp"

namespace asyncopt {

void StepSizePolicy::validate() const {
  switch (kind) {
    case ScheduleKind::piag:
    case ScheduleKind::bcd:
      params.validate();
      if (!(h > 0.0 && h < 1.0)) throw ConfigError("h must lie strictly in (0,1)");
      if (!(smoothness > 0.0)) throw ConfigError("smoothness constant must be positive");
      return;
    case ScheduleKind::constant:
      if (!(constant_gamma > 0.0)) throw ConfigError("constant step size must be positive");
      break;
    case ScheduleKind::user_table:
      if (table.empty()) throw ConfigError("user step-size table must not be empty");
      for (double g : table)
        if (!(g > 0.0)) throw ConfigError("step sizes must be positive");
      break;
  }
  if (!(h > 0.0 && h < 1.0)) throw ConfigError("h must lie strictly in (0,1)");
  if (!(smoothness > 0.0)) throw ConfigError("smoothness constant must be positive");
}

StepSizePolicy piag_schedule(double h, double aggregate_smoothness, const DelayParams& params) {
  StepSizePolicy p;
  p.kind = ScheduleKind::piag;
  p.h = h;
  p.smoothness = aggregate_smoothness;
  p.params = params;
  p.validate();
  return p;
}

StepSizePolicy bcd_schedule(double h, double blockwise_smoothness, const DelayParams& params) {
  StepSizePolicy p;
  p.kind = ScheduleKind::bcd;
  p.h = h;
  p.smoothness = blockwise_smoothness;
  p.params = params;
  p.validate();
  return p;
}

StepSizePolicy constant_policy(double gamma, double h, double smoothness) {
  StepSizePolicy p;
  p.kind = ScheduleKind::constant;
  p.constant_gamma = gamma;
  p.h = h;
  p.smoothness = smoothness;
  p.validate();
  return p;
}

StepSizePolicy user_policy(std::vector<double> table, double h, double smoothness) {
  StepSizePolicy p;
  p.kind = ScheduleKind::user_table;
  p.table = std::move(table);
  p.h = h;
  p.smoothness = smoothness;
  p.validate();
  return p;
}

double step_size(const StepSizePolicy& policy, std::int64_t k) {
  if (k < 0) throw ConfigError("step index must be nonnegative");
  switch (policy.kind) {
    case ScheduleKind::piag:
    case ScheduleKind::bcd: {
      const auto& d = policy.params;
      // pow(0, 0) == 1 gives the constant b = 0 schedule for free
      const double grown =
          d.a * std::pow((static_cast<double>(k) + d.c) / (1.0 - d.a), d.b) + d.c + 1.0;
      return policy.h / (policy.smoothness * grown);
    }
    case ScheduleKind::constant:
      return policy.constant_gamma;
    case ScheduleKind::user_table:
      if (k >= static_cast<std::int64_t>(policy.table.size()))
        throw ConfigError("step index beyond user table");
      return policy.table[static_cast<std::size_t>(k)];
  }
  throw ConfigError("unknown schedule kind");
}

std::vector<double> step_size_prefix_sums(const StepSizePolicy& policy, std::int64_t horizon) {
  if (horizon < 0) throw ConfigError("horizon must be nonnegative");
  std::vector<double> prefix(static_cast<std::size_t>(horizon) + 1, 0.0);
  double acc = 0.0;
  for (std::int64_t k = 0; k < horizon; ++k) {
    acc += step_size(policy, k);
    prefix[static_cast<std::size_t>(k) + 1] = acc;
  }
  return prefix;
}

double phi(double b, std::int64_t k) {
  if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("b must lie in [0,1]");
  if (k < 1) throw ConfigError("phi is defined for k >= 1");
  if (b == 1.0) return std::log(static_cast<double>(k));
  return std::pow(static_cast<double>(k), 1.0 - b);
}

namespace {

// Direct summation of gamma[lo..hi]; unrolled accumulators so the loop is
// throughput-bound rather than serialized on add latency.
double window_sum(const std::vector<double>& gamma, std::int64_t lo, std::int64_t hi) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::int64_t t = lo;
  for (; t + 3 <= hi; t += 4) {
    const auto u = static_cast<std::size_t>(t);
    s0 += gamma[u];
    s1 += gamma[u + 1];
    s2 += gamma[u + 2];
    s3 += gamma[u + 3];
  }
  for (; t <= hi; ++t) s0 += gamma[static_cast<std::size_t>(t)];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

std::optional<std::int64_t> check_admissibility(const StepSizePolicy& policy,
                                                const DelaySequence& seq,
                                                std::int64_t horizon) {
  policy.validate();
  if (horizon < 0) throw ConfigError("horizon must be nonnegative");
  if (seq.horizon() < horizon) throw ConfigError("delay sequence shorter than horizon");

  std::vector<double> gamma(static_cast<std::size_t>(horizon) + 1);
  for (std::int64_t k = 0; k <= horizon; ++k)
    gamma[static_cast<std::size_t>(k)] = step_size(policy, k);

  bool nonincreasing = true;
  if (policy.kind == ScheduleKind::user_table) {
    for (std::int64_t k = 1; k <= horizon && nonincreasing; ++k)
      nonincreasing = gamma[static_cast<std::size_t>(k)] <= gamma[static_cast<std::size_t>(k - 1)];
  }

  const double budget = policy.h / policy.smoothness;
  const double shortcut_budget = budget * (1.0 - 1e-9);
  for (std::int64_t k = 0; k <= horizon; ++k) {
    const std::int64_t tau = seq.values[static_cast<std::size_t>(k)];
    if (tau < 0 || tau > k) return k;  // malformed delay, window undefined
    const std::int64_t lo = k - tau;
    // largest term bounds the whole window when the schedule is monotone
    if (nonincreasing &&
        static_cast<double>(tau + 1) * gamma[static_cast<std::size_t>(lo)] <= shortcut_budget)
      continue;
    if (window_sum(gamma, lo, k) > budget) return k;
  }
  return std::nullopt;
}

double stepsum_lower_bound(const StepSizePolicy& policy, std::int64_t k) {
  if (policy.kind != ScheduleKind::piag && policy.kind != ScheduleKind::bcd)
    throw ConfigError("step-sum bound applies to the delay-matched schedules only");
  if (k < 1) throw ConfigError("step-sum bound is defined for k >= 1");
  const auto& d = policy.params;
  const double h = policy.h;
  const double s = policy.smoothness;
  const double gamma0 = h / (s * (d.a * std::pow(d.c / (1.0 - d.a), d.b) + d.c + 1.0));
  if (d.b == 1.0) {
    return gamma0 + h * std::log((static_cast<double>(k) + d.c) / (1.0 + d.c)) /
                        (s * (d.a / (1.0 - d.a) + 1.0));
  }
  const double one_minus_b = 1.0 - d.b;
  const double denom =
      s * (d.a * std::pow(1.0 - d.a, -d.b) + std::pow(d.c + 1.0, one_minus_b)) * one_minus_b;
  const double numer = h * (std::pow(static_cast<double>(k) + d.c, one_minus_b) -
                            std::pow(1.0 + d.c, one_minus_b));
  return gamma0 + numer / denom;
}

}  // namespace asyncopt
