#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "asyncopt/data.hpp"
#include "asyncopt/errors.hpp"
#include "asyncopt/problem.hpp"
#include "asyncopt/rng.hpp"

using namespace asyncopt;

namespace {

Vec random_vec(std::mt19937_64& rng, Index n, double scale = 1.0) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * draw_normal(rng);
  return v;
}

// central finite differences on the component value
Vec fd_gradient(const CompositeProblem& p, int i, const Vec& x, double step = 1e-6) {
  Vec g(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vec hi = x, lo = x;
    hi[j] += step;
    lo[j] -= step;
    g[j] = (p.components[static_cast<std::size_t>(i)]->value(hi) -
            p.components[static_cast<std::size_t>(i)]->value(lo)) /
           (2.0 * step);
  }
  return g;
}

CompositeProblem identity_quadratic(Index d, int blocks = 1) {
  return build_quadratic_problem(Mat::Identity(d, d), Vec::Zero(d), Regularizer::zero(),
                                 even_partition(d, blocks));
}

CompositeProblem single_sample_logistic(double lambda1, double lambda2) {
  Dataset data;
  data.dimension = 2;
  LogisticBatchComponent::Sample s;
  s.features = {{0, 1.0}};
  s.label = 1;
  data.samples.push_back(s);
  return build_logistic_problem(data, lambda1, lambda2, 1, 0);
}

}  // namespace

TEST_CASE("objective evaluation") {
  SUBCASE("centered quadratic at the origin is zero") {
    const CompositeProblem p = identity_quadratic(2);
    CHECK(eval_objective(p, Vec::Zero(2)) == 0.0);
  }
  SUBCASE("quadratic plus l1") {
    CompositeProblem p = build_quadratic_problem(Mat::Identity(2, 2), Vec::Zero(2),
                                                 Regularizer::l1(1.0), even_partition(2, 1));
    Vec x(2);
    x << 1, -1;
    CHECK(eval_objective(p, x) == doctest::Approx(3.0).epsilon(1e-15));  // 1 + 2
  }
  SUBCASE("single-sample logistic at the origin is ln 2") {
    const CompositeProblem p = single_sample_logistic(1e-5, 1e-4);
    CHECK(eval_objective(p, Vec::Zero(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("dimension mismatch is a hard error") {
    const CompositeProblem p = identity_quadratic(2);
    CHECK_THROWS_AS(eval_objective(p, Vec::Zero(3)), ConfigError);
  }
}

TEST_CASE("component gradients") {
  SUBCASE("quadratic gradient is the point itself") {
    const CompositeProblem p = identity_quadratic(2);
    Vec x(2);
    x << 3, -2;
    CHECK(component_gradient(p, 0, x) == x);
  }
  SUBCASE("logistic gradient at the origin is -q/2 for a +1 label") {
    const CompositeProblem p = single_sample_logistic(0.0, 0.0);
    const Vec g = component_gradient(p, 0, Vec::Zero(2));
    CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(g[1] == 0.0);
  }
  SUBCASE("gradients are bit-deterministic") {
    const Dataset data = synthesize_classification(40, 8, 0.4, 3);
    const CompositeProblem p = build_logistic_problem(data, 1e-5, 1e-4, 4, 3);
    std::mt19937_64 rng(5);
    const Vec x = random_vec(rng, 8);
    CHECK(component_gradient(p, 2, x) == component_gradient(p, 2, x));
  }
  SUBCASE("component index out of range") {
    const CompositeProblem p = identity_quadratic(2);
    CHECK_THROWS_AS(component_gradient(p, 1, Vec::Zero(2)), ConfigError);
    CHECK_THROWS_AS(component_gradient(p, -1, Vec::Zero(2)), ConfigError);
  }
}

TEST_CASE("gradients match finite differences on both families") {
  std::mt19937_64 rng(42);
  const Dataset data = synthesize_classification(30, 6, 0.5, 17);
  const CompositeProblem logistic = build_logistic_problem(data, 1e-5, 1e-4, 3, 1);

  Mat a(4, 4);
  a.setZero();
  for (Index i = 0; i < 4; ++i) a(i, i) = 1.0 + static_cast<double>(i);
  a(0, 1) = a(1, 0) = 0.25;
  std::mt19937_64 rng2(12);
  const CompositeProblem quad =
      build_quadratic_problem(a, random_vec(rng2, 4), Regularizer::zero(), even_partition(4, 2));

  for (const CompositeProblem* p : {&logistic, &quad}) {
    for (int rep = 0; rep < 100; ++rep) {
      const Vec x = random_vec(rng, p->dimension());
      const int i = static_cast<int>(draw_bounded(rng, static_cast<std::uint64_t>(p->n_components())));
      const Vec exact = component_gradient(*p, i, x);
      const Vec approx = fd_gradient(*p, i, x);
      CHECK((exact - approx).norm() <= 1e-4 * std::max(1.0, exact.norm()));
    }
  }
}

TEST_CASE("block partial gradients") {
  SUBCASE("second block of the identity quadratic") {
    const CompositeProblem p = identity_quadratic(2, 2);
    Vec x(2);
    x << 3, -2;
    const Vec g = block_partial_gradient(p, 1, x);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == -2.0);
    CHECK_THROWS_AS(block_partial_gradient(p, 2, x), ConfigError);
  }
  SUBCASE("blocks concatenate to the full gradient") {
    const Dataset data = synthesize_classification(25, 9, 0.5, 8);
    const CompositeProblem p = build_logistic_problem(data, 0.0, 1e-4, 2, 4, 4);
    std::mt19937_64 rng(3);
    const Vec x = random_vec(rng, 9);
    const Vec full = full_gradient(p, x);
    Vec stitched(9);
    for (int j = 0; j < p.n_blocks(); ++j) {
      const auto jj = static_cast<std::size_t>(j);
      stitched.segment(p.partition.offsets[jj], p.partition.sizes[jj]) =
          block_partial_gradient(p, j, x);
    }
    CHECK(stitched == full);
  }
  SUBCASE("separable objective: block gradient ignores other blocks") {
    Mat a = Mat::Zero(4, 4);
    a.diagonal() << 1, 2, 3, 4;
    const CompositeProblem p =
        build_quadratic_problem(a, Vec::Zero(4), Regularizer::zero(), even_partition(4, 2));
    std::mt19937_64 rng(4);
    Vec x = random_vec(rng, 4);
    const Vec before = block_partial_gradient(p, 0, x);
    x[2] += 5.0;  // perturb the other block
    x[3] -= 2.0;
    CHECK(block_partial_gradient(p, 0, x) == before);
  }
}

TEST_CASE("spectral norm estimation stays on the safe side") {
  SUBCASE("clustered top eigenvalues") {
    Mat a = Mat::Zero(3, 3);
    a.diagonal() << 4.0, 3.999, 1.0;
    const double est = spectral_norm(a);
    CHECK(est >= 4.0 * (1.0 - 1e-12));  // never below the true norm
    CHECK(est <= 4.0 * (1.0 + 1e-8));
  }
  SUBCASE("degenerate spectrum") {
    Mat a = Mat::Zero(2, 2);
    a.diagonal() << 4.0, 4.0;
    CHECK(spectral_norm(a) == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("rectangular blocks") {
    Mat wide(1, 3);
    wide << 3, 0, 4;
    CHECK(spectral_norm(wide) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(spectral_norm(wide.transpose()) == doctest::Approx(5.0).epsilon(1e-9));
  }
}

TEST_CASE("smoothness constants") {
  SUBCASE("identity matrix: L = Lhat = 1") {
    const SmoothnessConstants sc = quadratic_smoothness(Mat::Identity(2, 2), even_partition(2, 1));
    CHECK(sc.aggregate == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sc.blockwise == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("diagonal matrix with scalar blocks: L = Lhat = max entry") {
    Mat a = Mat::Zero(2, 2);
    a.diagonal() << 1, 4;
    const SmoothnessConstants sc = quadratic_smoothness(a, even_partition(2, 2));
    CHECK(sc.aggregate == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(sc.blockwise == doctest::Approx(4.0).epsilon(1e-8));
  }
  SUBCASE("logistic single sample with feature (2,0): L_1 = 1") {
    Dataset data;
    data.dimension = 2;
    LogisticBatchComponent::Sample s;
    s.features = {{0, 2.0}};
    s.label = 1;
    data.samples.push_back(s);
    const CompositeProblem p = build_logistic_problem(data, 0.0, 0.0, 1, 0);
    REQUIRE(p.component_smoothness.size() == 1);
    CHECK(p.component_smoothness[0] == doctest::Approx(1.0).epsilon(1e-15));  // |q|^2/4
  }
  SUBCASE("aggregate constant equals the quadratic mean of the components") {
    const Dataset data = synthesize_classification(60, 10, 0.3, 9);
    const CompositeProblem p = build_logistic_problem(data, 1e-5, 1e-4, 5, 1);
    double sum_sq = 0.0;
    for (double li : p.component_smoothness) sum_sq += li * li;
    CHECK(p.aggregate_smoothness ==
          doctest::Approx(std::sqrt(sum_sq / 5.0)).epsilon(1e-12));
  }
}

TEST_CASE("empirical Lipschitz ratios never exceed the constants") {
  const Dataset data = synthesize_classification(40, 7, 0.5, 21);
  const CompositeProblem p = build_logistic_problem(data, 1e-5, 1e-4, 4, 3);
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec x = random_vec(rng, 7);
    Vec h = random_vec(rng, 7);
    h /= h.norm();
    const int i = static_cast<int>(draw_bounded(rng, 4));
    const double li = p.component_smoothness[static_cast<std::size_t>(i)];
    for (const double t : {1e-3, 1.0, 10.0}) {
      const Vec gx = component_gradient(p, i, x);
      const Vec gy = component_gradient(p, i, x + t * h);
      CHECK((gy - gx).norm() <= li * t * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("block-wise smoothness constant holds on random draws") {
  const Dataset data = synthesize_classification(40, 8, 0.6, 13);
  const CompositeProblem p = build_logistic_problem(data, 0.0, 1e-4, 2, 13, 4);
  std::mt19937_64 rng(77);
  const double lhat = p.blockwise_smoothness;
  for (int rep = 0; rep < 100; ++rep) {
    const Vec x = random_vec(rng, 8);
    const int j = static_cast<int>(draw_bounded(rng, 4));
    const auto jj = static_cast<std::size_t>(j);
    Vec step = Vec::Zero(8);
    for (Index t = 0; t < p.partition.sizes[jj]; ++t)
      step[p.partition.offsets[jj] + t] = draw_normal(rng);
    const double hnorm = step.norm();
    for (int i = 0; i < 4; ++i) {
      const Vec gi_before = block_partial_gradient(p, i, x);
      const Vec gi_after = block_partial_gradient(p, i, x + step);
      CHECK((gi_after - gi_before).norm() <= lhat * hnorm * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("forward-backward gap") {
  SUBCASE("zero at a stationary point") {
    const CompositeProblem p = identity_quadratic(3);
    CHECK(forward_backward_gap(p, Vec::Zero(3)) == 0.0);
  }
  SUBCASE("hand value on the scalar quadratic") {
    const CompositeProblem p = identity_quadratic(1);
    Vec x(1);
    x << 2;
    CHECK(forward_backward_gap(p, x) == doctest::Approx(-2.0).epsilon(1e-14));
  }
  SUBCASE("never positive, zero only at prox fixed points") {
    const Dataset data = synthesize_classification(30, 6, 0.5, 5);
    const CompositeProblem p = build_logistic_problem(data, 1e-3, 1e-2, 3, 1);
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 200; ++rep) {
      const Vec x = random_vec(rng, 6, 2.0);
      const double gap = forward_backward_gap(p, x);
      CHECK(gap <= 0.0);
      const Vec moved = prox_gradient_point(p, x, 1.0 / p.aggregate_smoothness);
      if ((moved - x).norm() <= 1e-10)
        CHECK(std::abs(gap) <= 1e-10);
      else
        CHECK(gap < 0.0);
    }
  }
}

TEST_CASE("proximal-PL flag validation") {
  SUBCASE("strongly convex quadratic with sigma = smallest eigenvalue") {
    Mat a = Mat::Zero(3, 3);
    a.diagonal() << 0.5, 2.0, 4.0;
    std::mt19937_64 rng(6);
    const CompositeProblem p =
        build_quadratic_problem(a, random_vec(rng, 3), Regularizer::zero(), even_partition(3, 1));
    REQUIRE(p.convexity == Convexity::proximal_pl);
    CHECK(p.pl_sigma == doctest::Approx(0.5).epsilon(1e-9));
    REQUIRE(p.optimal_value.has_value());
    for (int rep = 0; rep < 1000; ++rep) {
      const Vec x = random_vec(rng, 3, 3.0);
      const double lhs = p.pl_sigma * (eval_objective(p, x) - *p.optimal_value);
      const double rhs = -p.aggregate_smoothness * forward_backward_gap(p, x);
      CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
  }
  SUBCASE("logistic with l2 satisfies the inequality with sigma = lambda2") {
    const Dataset data = synthesize_classification(25, 5, 0.6, 2);
    CompositeProblem p = build_logistic_problem(data, 1e-3, 1e-2, 2, 1);
    REQUIRE(p.derived_pl_sigma.has_value());
    const ReferenceSolution ref = reference_solve(p);
    p = with_reference_optimum(std::move(p), ref);
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 1000; ++rep) {
      const Vec x = random_vec(rng, 5, 2.0);
      const double lhs = *p.derived_pl_sigma * (eval_objective(p, x) - *p.optimal_value);
      const double rhs = -p.aggregate_smoothness * forward_backward_gap(p, x);
      CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("problem construction invariants") {
  SUBCASE("mismatched aggregate constant is rejected") {
    CompositeProblem p;
    p.partition = even_partition(2, 1);
    p.components.push_back(std::make_shared<QuadraticComponent>(Mat::Identity(2, 2), Vec::Zero(2)));
    p.component_smoothness = {1.0};
    p.aggregate_smoothness = 2.0;
    CHECK_THROWS_AS(finalize_problem(std::move(p)), ConfigError);
  }
  SUBCASE("asymmetric quadratic is rejected") {
    Mat a(2, 2);
    a << 1, 2, 0, 1;
    CHECK_THROWS_AS(
        build_quadratic_problem(a, Vec::Zero(2), Regularizer::zero(), even_partition(2, 1)),
        ConfigError);
  }
  SUBCASE("empty logistic batch is rejected") {
    CHECK_THROWS_AS(LogisticBatchComponent(3, {}, 0.0), ConfigError);
  }
}
