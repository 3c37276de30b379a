#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "asyncopt/types.hpp"

namespace asyncopt {

/// Parameters of the delay growth bound tau_k <= min(k, a k^b + c).
struct DelayParams {
  double a = 0.1;  // in (0,1)
  double b = 0.0;  // in [0,1]
  double c = 0.0;  // >= 0

  /// min(k, a k^b + c) as a real number.
  double bound(std::int64_t k) const;
  void validate() const;  // throws ConfigError on out-of-range fields
};

enum class DelayKind { stochastic, adversarial, user_supplied };

/// A realized delay sequence tau_0..tau_K, optionally with one row per
/// component (PIAG), in which case values[k] = max_i per_component[i][k].
/// Immutable once built.
struct DelaySequence {
  DelayKind kind = DelayKind::user_supplied;
  DelayParams params;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> values;                       // tau_k, k = 0..K
  std::vector<std::vector<std::int64_t>> per_component;   // optional, n rows of K+1
  std::vector<std::int64_t> epochs;                       // adversarial T_t, T_0 = 0

  std::int64_t horizon() const { return static_cast<std::int64_t>(values.size()) - 1; }
  int n_components() const { return static_cast<int>(per_component.size()); }
};

/// Increment-or-resample model: tau_0 = 0; tau_k = tau_{k-1}+1 while that
/// stays within the bound, otherwise a uniform draw from {1,...,floor(bound)}
/// (empty range gives 0). One independent stream per component; values holds
/// the component-wise max.
DelaySequence sample_stochastic_delays(const DelayParams& params, std::int64_t horizon,
                                       int n_components, std::uint64_t seed);

/// Worst-case sequence: epochs T_0 = 0, T_{t+1} = max{kappa: kappa -
/// (a kappa^b + c) <= T_t} + 1, and tau_k = k - T_t on [T_t, T_{t+1}).
DelaySequence build_adversarial_delays(const DelayParams& params, std::int64_t horizon);

DelaySequence make_user_delays(std::vector<std::int64_t> values, const DelayParams& params);

/// Checks tau_k <= k and tau_k <= a k^b + c at every k (componentwise rows
/// included, plus values[k] = max_i row_i[k]). Returns the first violating k,
/// or nullopt when the sequence conforms.
std::optional<std::int64_t> validate_assumption1(const DelaySequence& seq,
                                                 const DelayParams& params);
std::optional<std::int64_t> validate_assumption1(const DelaySequence& seq);

/// Number of effective gradient-descent steps encoded by an adversarial
/// sequence at iteration k: max{t : T_t <= k-1} + 1.
std::int64_t count_effective_gd_steps(const DelaySequence& seq, std::int64_t k);

/// Two-column (k, tau) CSV, or k plus one column per component when a
/// per-component table is present.
void write_delays_csv(const DelaySequence& seq, std::ostream& out);
void write_delays_csv(const DelaySequence& seq, const std::string& path);

}  // namespace asyncopt
