#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asyncopt/problem.hpp"

namespace asyncopt {

/// Binary classification samples with sparse features and labels in {-1,+1}.
struct Dataset {
  Index dimension = 0;
  std::vector<LogisticBatchComponent::Sample> samples;

  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
};

/// Parses "label idx:val idx:val ..." lines with 1-based indices. Labels 0
/// and -1 map to -1; 1 and +1 map to +1; anything else is an error. The
/// dimension is the largest index seen unless overridden.
Dataset load_libsvm(const std::string& path, Index dimension_override = 0);

void write_libsvm(const Dataset& data, const std::string& path);

/// Sparse Gaussian features, labels from a planted hyperplane with 10%
/// label noise. Deterministic in seed.
Dataset synthesize_classification(std::int64_t n, Index d, double sparsity, std::uint64_t seed);

/// Regularized logistic regression split into n_batches components after a
/// seeded shuffle (contiguous batches, remainder spread over the first
/// ones). Component i averages its batch's losses and carries the (l2/2)
/// ||x||^2 term; r = l1 * ||x||_1. n_blocks partitions the coordinates for
/// block-coordinate runs.
CompositeProblem build_logistic_problem(const Dataset& data, double l1, double l2,
                                        int n_batches, std::uint64_t shuffle_seed,
                                        int n_blocks = 1);

/// f(x) = 0.5 x'Ax - b'x with exact smoothness constants. With a positive
/// definite A and no regularizer, P* and x* = A^{-1} b are solved directly;
/// otherwise callers attach them via reference_solve.
CompositeProblem build_quadratic_problem(const Mat& a, const Vec& b, Regularizer reg,
                                         BlockPartition partition);

struct ReferenceSolution {
  Vec x;
  double p_star = 0.0;
  std::int64_t iterations = 0;
  double residual = 0.0;  // ||prox-gradient mapping|| at x
};

/// Deterministic proximal gradient with fixed step 1/L, run until the
/// prox-gradient residual drops below tol. Trusted baseline for P*.
ReferenceSolution reference_solve(const CompositeProblem& p, double tol = 1e-10,
                                  std::int64_t max_iterations = 5'000'000);

/// Stores the reference solution on the problem (optimal_value/point).
CompositeProblem with_reference_optimum(CompositeProblem p, const ReferenceSolution& ref);

}  // namespace asyncopt
