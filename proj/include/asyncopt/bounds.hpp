#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asyncopt/schedule.hpp"
#include "asyncopt/trace.hpp"

namespace asyncopt {

enum class BoundKind { piag_nonconvex, piag_convex, piag_pl, bcd_nonconvex };

enum class StepSumSource { exact, closed_form };

/// Inputs of the theorem bound formulas. delta0 = P(x_0) - P*.
struct BoundConstants {
  double h = 0.0;
  double smoothness = 0.0;               // L or Lhat, matching the policy
  double delta0 = 0.0;
  std::optional<double> x0_dist_sq;      // ||x_0 - x*||^2 (convex curve)
  std::optional<double> sigma;           // PL constant (pl curve)
  int m_blocks = 1;                      // bcd curve
};

/// Evaluable theoretical upper-bound curve. With the exact source, partial
/// step sums are precomputed up to max_k; the closed-form source evaluates
/// the integral lower bound on the step sum instead (conservative, O(1) at
/// any k).
struct BoundCurve {
  BoundKind kind = BoundKind::piag_convex;
  BoundConstants constants;
  StepSizePolicy policy;
  StepSumSource sum_source = StepSumSource::exact;
  std::vector<double> prefix_sums;  // filled for the exact source

  // derived factors, filled by make_bound_curve
  double a0 = 0.0;        // h(h+1)/(L(1-h))
  double pl_rate = 0.0;   // 3 beta sigma (1-ht) / (4(ht^2-ht+1))
};

BoundCurve make_bound_curve(BoundKind kind, const BoundConstants& constants,
                            const StepSizePolicy& policy, StepSumSource source,
                            std::int64_t max_k);

/// Step-sum value the curve plugs in at k.
double bound_step_sum(const BoundCurve& curve, std::int64_t k);

/// Bound value at k. The running-best kinds diverge at k = 0 (empty step
/// sum); convex and PL kinds are finite everywhere.
double eval_bound(const BoundCurve& curve, std::int64_t k);

/// Diagnostic base of the geometric PL rate: exp(-pl_rate * lim sum/phi).
/// Implementation-defined surrogate for the unnamed theorem constant.
double pl_lambda_diagnostic(const BoundCurve& curve);

struct DominanceReport {
  std::vector<std::int64_t> violations;  // ks where the empirical metric exceeds the bound
  std::int64_t checked = 0;
  bool clean() const { return violations.empty(); }
};

/// Compares a trace against the curve: objective_error for convex/PL kinds,
/// running_best for the nonconvex kinds. Curve and trace must come from the
/// same configuration (engine, h, smoothness); mismatch throws ConfigError.
DominanceReport dominance_report(const BoundCurve& curve, const RunTrace& trace);

/// (k, bound) CSV aligned with trace ks, starting at the first finite k.
void write_bound_csv(const BoundCurve& curve, std::int64_t horizon, const std::string& path);

}  // namespace asyncopt
