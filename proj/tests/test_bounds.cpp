#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "asyncopt/bounds.hpp"
#include "asyncopt/data.hpp"
#include "asyncopt/errors.hpp"
#include "asyncopt/piag.hpp"
#include "asyncopt/rng.hpp"

using namespace asyncopt;

namespace {

BoundConstants basic_constants(double h, double l) {
  BoundConstants c;
  c.h = h;
  c.smoothness = l;
  c.delta0 = 1.0;
  c.x0_dist_sq = 1.0;
  c.sigma = 1.0;
  c.m_blocks = 4;
  return c;
}

}  // namespace

TEST_CASE("curve formula spot checks") {
  const DelayParams dp{0.5, 1.0, 0.0};
  const StepSizePolicy policy = piag_schedule(0.5, 1.0, dp);
  const BoundConstants c = basic_constants(0.5, 1.0);

  SUBCASE("convex curve at k = 0 has denominator one") {
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_convex, c, policy, StepSumSource::exact, 10);
    const double expected = c.delta0 + *c.x0_dist_sq / (2.0 * curve.a0);
    CHECK(eval_bound(curve, 0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(curve.a0 == doctest::Approx(0.5 * 1.5 / 0.5).epsilon(1e-15));
  }
  SUBCASE("PL curve is delta0 times the exponential of the rate") {
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_pl, c, policy, StepSumSource::exact, 10);
    const double ht = 0.75;
    const double beta = std::min(1.0, 0.5 / 1.0 * 1.0 / 1.0);
    const double rate = 3.0 * beta * 1.0 * 0.25 / (4.0 * (ht * ht - ht + 1.0));
    CHECK(curve.pl_rate == doctest::Approx(rate).epsilon(1e-15));
    const auto prefix = step_size_prefix_sums(policy, 10);
    CHECK(eval_bound(curve, 7) ==
          doctest::Approx(std::exp(-rate * prefix[7])).epsilon(1e-14));
  }
  SUBCASE("nonconvex curve at k = 1 is the quotient by gamma_0") {
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_nonconvex, c, policy, StepSumSource::exact, 10);
    const double rhs = 2.0 * (0.25 - 0.5 + 1.0) * 1.0 / 0.5;
    CHECK(eval_bound(curve, 1) == doctest::Approx(rhs / step_size(policy, 0)).epsilon(1e-14));
  }
  SUBCASE("bcd curve carries the block count") {
    const BoundCurve curve =
        make_bound_curve(BoundKind::bcd_nonconvex, c, policy, StepSumSource::exact, 10);
    const auto prefix = step_size_prefix_sums(policy, 10);
    CHECK(eval_bound(curve, 3) ==
          doctest::Approx(4.0 * 4.0 * 1.0 / (0.5 * prefix[3])).epsilon(1e-14));
  }
  SUBCASE("missing constants are hard errors") {
    BoundConstants missing = c;
    missing.x0_dist_sq.reset();
    CHECK_THROWS_AS(
        make_bound_curve(BoundKind::piag_convex, missing, policy, StepSumSource::exact, 10),
        ConfigError);
    missing = c;
    missing.sigma.reset();
    CHECK_THROWS_AS(
        make_bound_curve(BoundKind::piag_pl, missing, policy, StepSumSource::exact, 10),
        ConfigError);
  }
}

TEST_CASE("exact step sums give curves below the closed-form variant") {
  const DelayParams dp{0.1, 0.6, 0.0};
  const StepSizePolicy policy = piag_schedule(0.99, 1.0, dp);
  const BoundConstants c = basic_constants(0.99, 1.0);
  const BoundCurve exact =
      make_bound_curve(BoundKind::piag_convex, c, policy, StepSumSource::exact, 5000);
  const BoundCurve closed =
      make_bound_curve(BoundKind::piag_convex, c, policy, StepSumSource::closed_form, 5000);
  for (std::int64_t k = 1; k <= 5000; k += 7)
    CHECK(eval_bound(exact, k) <= eval_bound(closed, k) * (1.0 + 1e-12));
}

TEST_CASE("curves are positive and nonincreasing from k = 1") {
  const DelayParams dp{0.1, 0.2, 0.0};
  const StepSizePolicy policy = piag_schedule(0.9, 2.0, dp);
  const BoundConstants c = basic_constants(0.9, 2.0);
  for (const BoundKind kind : {BoundKind::piag_nonconvex, BoundKind::piag_convex,
                               BoundKind::piag_pl, BoundKind::bcd_nonconvex}) {
    const BoundCurve curve = make_bound_curve(kind, c, policy, StepSumSource::exact, 2000);
    double prev = eval_bound(curve, 1);
    CHECK(prev > 0.0);
    for (std::int64_t k = 2; k <= 2000; ++k) {
      const double cur = eval_bound(curve, k);
      CHECK(cur > 0.0);
      CHECK(cur <= prev * (1.0 + 1e-15));
      prev = cur;
    }
  }
}

TEST_CASE("dominance report on a real run") {
  std::mt19937_64 rng(substream_seed(77, 1));
  Mat gauss(10, 10);
  for (Index i = 0; i < 10; ++i)
    for (Index j = 0; j < 10; ++j) gauss(i, j) = draw_normal(rng);
  Mat a = gauss * gauss.transpose() + 10.0 * Mat::Identity(10, 10);
  a /= spectral_norm(a) / 3.0;  // scale to norm 3
  a = 0.5 * (a + a.transpose());
  Vec b(10);
  for (Index i = 0; i < 10; ++i) b[i] = draw_normal(rng);
  CompositeProblem p =
      build_quadratic_problem(a, b, Regularizer::l1(0.02), even_partition(10, 1));
  p = with_reference_optimum(std::move(p), reference_solve(p));

  const double h = 0.99;
  const DelayParams dp{0.1, 0.2, 0.0};
  const DelaySequence seq = sample_stochastic_delays(dp, 1000, 1, 4);
  const StepSizePolicy policy = piag_schedule(h, p.aggregate_smoothness, dp);
  const Vec x0 = Vec::Zero(10);
  const RunTrace trace = piag_run(p, policy, seq, x0, 1000);

  BoundConstants c;
  c.h = h;
  c.smoothness = p.aggregate_smoothness;
  c.delta0 = eval_objective(p, x0) - *p.optimal_value;
  c.x0_dist_sq = (x0 - *p.optimal_point).squaredNorm();

  SUBCASE("admissible convex run has zero violations") {
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_convex, c, policy, StepSumSource::exact, 1000);
    const DominanceReport report = dominance_report(curve, trace);
    CHECK(report.clean());
    CHECK(report.checked == 1001);
  }
  SUBCASE("running-best curve skips k = 0 and stays clean") {
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_nonconvex, c, policy, StepSumSource::exact, 1000);
    const DominanceReport report = dominance_report(curve, trace);
    CHECK(report.clean());
    CHECK(report.checked == 1000);
  }
  SUBCASE("mismatched configuration is a hard error") {
    BoundConstants other = c;
    other.h = 0.5;
    const StepSizePolicy p2 = piag_schedule(0.5, p.aggregate_smoothness, dp);
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_convex, other, p2, StepSumSource::exact, 1000);
    CHECK_THROWS_AS(dominance_report(curve, trace), ConfigError);
    const BoundCurve bcd_curve =
        make_bound_curve(BoundKind::bcd_nonconvex, c, policy, StepSumSource::exact, 1000);
    CHECK_THROWS_AS(dominance_report(bcd_curve, trace), ConfigError);
  }
  SUBCASE("negative control: an inadmissible run is reported, not asserted") {
    const StepSizePolicy big = constant_policy(3.0 * 0.99 / p.aggregate_smoothness, h,
                                               p.aggregate_smoothness);
    PiagOptions opt;
    opt.override_admissibility = true;
    const RunTrace wild = piag_run(p, big, seq, x0, 200, opt);
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_convex, c, big, StepSumSource::exact, 200);
    const DominanceReport report = dominance_report(curve, wild);
    CHECK(report.checked == 201);  // report exists; violations are informational
  }
}

TEST_CASE("order checks against the rate clock") {
  const BoundConstants c = basic_constants(0.5, 1.0);
  SUBCASE("convex curve times phi stays within a constant factor") {
    for (const double b : {0.0, 0.5}) {
      const DelayParams dp{0.1, b, 0.0};
      const StepSizePolicy policy = piag_schedule(0.5, 1.0, dp);
      const BoundCurve curve =
          make_bound_curve(BoundKind::piag_convex, c, policy, StepSumSource::closed_form, 1);
      double lo = 1e300, hi = 0.0;
      for (double k = 100; k <= 1e6; k *= 2) {
        const double v = eval_bound(curve, static_cast<std::int64_t>(k)) *
                         phi(b, static_cast<std::int64_t>(k));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(hi / lo < 3.0);
    }
  }
  SUBCASE("b = 0: PL curve is geometric") {
    const DelayParams dp{0.1, 0.0, 0.0};
    const StepSizePolicy policy = piag_schedule(0.5, 1.0, dp);
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_pl, c, policy, StepSumSource::exact, 2000);
    const double r1 = eval_bound(curve, 1001) / eval_bound(curve, 1000);
    const double r2 = eval_bound(curve, 1501) / eval_bound(curve, 1500);
    CHECK(r1 < 1.0);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-9));
  }
  SUBCASE("lambda diagnostic lies in (0,1)") {
    const DelayParams dp{0.1, 1.0, 0.0};
    const StepSizePolicy policy = piag_schedule(0.5, 1.0, dp);
    const BoundCurve curve =
        make_bound_curve(BoundKind::piag_pl, c, policy, StepSumSource::closed_form, 1);
    const double lambda = pl_lambda_diagnostic(curve);
    CHECK(lambda > 0.0);
    CHECK(lambda < 1.0);
  }
}
