#include "asyncopt/bounds.hpp"

#include <cmath>
#include <fstream>

#include "asyncopt/errors.hpp"

namespace asyncopt {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

BoundCurve make_bound_curve(BoundKind kind, const BoundConstants& constants,
                            const StepSizePolicy& policy, StepSumSource source,
                            std::int64_t max_k) {
  require(constants.h > 0.0 && constants.h < 1.0, "bound curve needs h in (0,1)");
  require(constants.smoothness > 0.0, "bound curve needs a positive smoothness constant");
  require(constants.delta0 >= 0.0, "bound curve needs delta0 >= 0");
  if (kind == BoundKind::piag_convex)
    require(constants.x0_dist_sq.has_value(), "convex curve needs ||x0 - x*||^2");
  if (kind == BoundKind::piag_pl)
    require(constants.sigma.has_value() && *constants.sigma > 0.0,
            "PL curve needs sigma > 0");
  if (kind == BoundKind::bcd_nonconvex)
    require(constants.m_blocks >= 1, "bcd curve needs the block count");
  if (source == StepSumSource::closed_form)
    require(policy.kind == ScheduleKind::piag || policy.kind == ScheduleKind::bcd,
            "closed-form step sums exist for the delay-matched schedules only");

  BoundCurve curve;
  curve.kind = kind;
  curve.constants = constants;
  curve.policy = policy;
  curve.sum_source = source;
  if (source == StepSumSource::exact) {
    require(max_k >= 1, "exact step sums need a horizon");
    curve.prefix_sums = step_size_prefix_sums(policy, max_k);
  }

  const double h = constants.h;
  const double l = constants.smoothness;
  curve.a0 = h * (h + 1.0) / (l * (1.0 - h));
  if (constants.sigma) {
    const double sigma = *constants.sigma;
    const double ht = 0.5 * (1.0 + h);
    const double beta = std::min(1.0, (1.0 - h) / (2.0 * h) * l / sigma);
    curve.pl_rate = 3.0 * beta * sigma * (1.0 - ht) / (4.0 * (ht * ht - ht + 1.0));
  }
  return curve;
}

double bound_step_sum(const BoundCurve& curve, std::int64_t k) {
  require(k >= 0, "bound evaluation needs k >= 0");
  if (k == 0) return 0.0;
  if (curve.sum_source == StepSumSource::exact) {
    require(k < static_cast<std::int64_t>(curve.prefix_sums.size()),
            "k beyond the precomputed step sums");
    return curve.prefix_sums[static_cast<std::size_t>(k)];
  }
  return stepsum_lower_bound(curve.policy, k);
}

double eval_bound(const BoundCurve& curve, std::int64_t k) {
  const double sum = bound_step_sum(curve, k);
  const auto& c = curve.constants;
  switch (curve.kind) {
    case BoundKind::piag_nonconvex: {
      const double rhs = 2.0 * (c.h * c.h - c.h + 1.0) * c.delta0 / (1.0 - c.h);
      return rhs / sum;  // +inf at k = 0
    }
    case BoundKind::piag_convex:
      return (c.delta0 + *c.x0_dist_sq / (2.0 * curve.a0)) / (1.0 + sum / curve.a0);
    case BoundKind::piag_pl:
      return c.delta0 * std::exp(-curve.pl_rate * sum);
    case BoundKind::bcd_nonconvex:
      return 4.0 * static_cast<double>(c.m_blocks) * c.delta0 / ((1.0 - c.h) * sum);
  }
  throw ConfigError("unknown bound kind");
}

double pl_lambda_diagnostic(const BoundCurve& curve) {
  require(curve.kind == BoundKind::piag_pl, "lambda diagnostic applies to the PL curve");
  const auto& d = curve.policy.params;
  const double h = curve.policy.h;
  const double s = curve.policy.smoothness;
  // limit of (step sum)/phi(k)
  double slope = 0.0;
  if (d.b == 1.0)
    slope = h / (s * (d.a / (1.0 - d.a) + 1.0));
  else
    slope = h / (s * (d.a * std::pow(1.0 - d.a, -d.b) + std::pow(d.c + 1.0, 1.0 - d.b)) *
                 (1.0 - d.b));
  return std::exp(-curve.pl_rate * slope);
}

DominanceReport dominance_report(const BoundCurve& curve, const RunTrace& trace) {
  const bool bcd_curve = curve.kind == BoundKind::bcd_nonconvex;
  if (bcd_curve != (trace.meta.engine == "bcd"))
    throw ConfigError("bound curve engine does not match the trace");
  if (trace.meta.h != curve.constants.h || trace.meta.smoothness != curve.constants.smoothness)
    throw ConfigError("bound curve constants do not match the trace");
  const bool against_objective =
      curve.kind == BoundKind::piag_convex || curve.kind == BoundKind::piag_pl;

  DominanceReport report;
  for (const auto& row : trace.rows) {
    const bool running_best_kind = !against_objective;
    if (running_best_kind && row.k == 0) continue;  // empty step sum, bound diverges
    const double metric = against_objective ? row.objective_error : row.running_best;
    const double bound = eval_bound(curve, row.k);
    ++report.checked;
    if (metric > bound) report.violations.push_back(row.k);
  }
  return report;
}

void write_bound_csv(const BoundCurve& curve, std::int64_t horizon, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "k,bound\n";
  const bool finite_at_zero =
      curve.kind == BoundKind::piag_convex || curve.kind == BoundKind::piag_pl;
  for (std::int64_t k = finite_at_zero ? 0 : 1; k <= horizon; ++k)
    out << k << ',' << format_double(eval_bound(curve, k)) << '\n';
}

}  // namespace asyncopt
