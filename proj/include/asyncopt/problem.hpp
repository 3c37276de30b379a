#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asyncopt/prox.hpp"
#include "asyncopt/types.hpp"

namespace asyncopt {

/// One smooth summand f^(i) of the objective. Implementations must be
/// deterministic: equal inputs give bit-identical outputs.
class SmoothComponent {
 public:
  virtual ~SmoothComponent() = default;
  virtual Index dimension() const = 0;
  virtual double value(const VecView& x) const = 0;
  virtual Vec gradient(const VecView& x) const = 0;
};

/// 0.5 x'Ax - b'x with A symmetric.
class QuadraticComponent : public SmoothComponent {
 public:
  QuadraticComponent(Mat a, Vec b);
  Index dimension() const override { return b_.size(); }
  double value(const VecView& x) const override;
  Vec gradient(const VecView& x) const override;
  const Mat& matrix() const { return a_; }
  const Vec& offset() const { return b_; }

 private:
  Mat a_;
  Vec b_;
};

/// Mean logistic loss over a batch of (sparse feature, +-1 label) samples
/// plus an l2 term: (1/|B|) sum log(1 + exp(-y q'x)) + (l2/2)||x||^2.
class LogisticBatchComponent : public SmoothComponent {
 public:
  struct Sample {
    std::vector<std::pair<Index, double>> features;  // (index, value), index < d
    int label = 1;                                   // -1 or +1
  };

  LogisticBatchComponent(Index dimension, std::vector<Sample> samples, double l2);
  Index dimension() const override { return dimension_; }
  double value(const VecView& x) const override;
  Vec gradient(const VecView& x) const override;
  const std::vector<Sample>& samples() const { return samples_; }
  double l2() const { return l2_; }

 private:
  Index dimension_ = 0;
  std::vector<Sample> samples_;
  double l2_ = 0.0;
};

enum class Convexity { nonconvex, convex, proximal_pl };

/// Composite objective P = f + r with f = (1/n) sum_i f^(i), block structure
/// and the smoothness constants the step-size formulas consume. Immutable
/// after construction and safe to share across runs.
struct CompositeProblem {
  std::vector<std::shared_ptr<const SmoothComponent>> components;
  Regularizer regularizer = Regularizer::zero();
  BlockPartition partition;

  std::vector<double> component_smoothness;  // L_i
  double aggregate_smoothness = 0.0;         // L = sqrt(mean L_i^2)
  double blockwise_smoothness = 0.0;         // Lhat

  Convexity convexity = Convexity::nonconvex;
  double pl_sigma = 0.0;                      // > 0 iff convexity == proximal_pl
  std::optional<double> derived_pl_sigma;     // PL constant known alongside a convex flag

  std::optional<double> optimal_value;        // P*
  std::optional<Vec> optimal_point;           // minimizer backing P*, if available

  Index dimension() const { return partition.dimension(); }
  int n_components() const { return static_cast<int>(components.size()); }
  int n_blocks() const { return partition.num_blocks(); }
};

/// Validates invariants (positive block sizes summing to d, L consistent
/// with the component constants, sigma > 0 for PL problems) and returns the
/// finished problem.
CompositeProblem finalize_problem(CompositeProblem p);

/// P(x) = (1/n) sum f^(i)(x) + r(x); +inf outside dom r.
double eval_objective(const CompositeProblem& p, const VecView& x);

/// f(x) alone.
double eval_smooth(const CompositeProblem& p, const VecView& x);

/// grad f^(i)(x), 0-based component index.
Vec component_gradient(const CompositeProblem& p, int i, const VecView& x);

/// grad f(x) = (1/n) sum_i grad f^(i)(x).
Vec full_gradient(const CompositeProblem& p, const VecView& x);

/// Block j of grad f(x), 0-based block index.
Vec block_partial_gradient(const CompositeProblem& p, int j, const VecView& x);

/// One forward-backward step: prox_{step * r}(x - step * grad f(x)).
Vec prox_gradient_point(const CompositeProblem& p, const VecView& x, double step);

/// P_hat(x) = min_y <grad f(x), y-x> + (L/2)||y-x||^2 + r(y) - r(x),
/// evaluated at the closed-form minimizer. Always <= 0; zero exactly at
/// fixed points of the prox-gradient step.
double forward_backward_gap(const CompositeProblem& p, const VecView& x);

struct SmoothnessConstants {
  std::vector<double> component;  // L_i
  double aggregate = 0.0;         // L
  double blockwise = 0.0;         // Lhat
};

/// Spectral norm via power iteration on B'B, 1e-9 relative tolerance,
/// deterministic start vector.
double spectral_norm(const Mat& b);

/// Smoothness constants for a quadratic 0.5 x'Ax - b'x under a partition:
/// L = ||A||_2, Lhat = max_{ij} ||A_ij||_2.
SmoothnessConstants quadratic_smoothness(const Mat& a, const BlockPartition& partition);

}  // namespace asyncopt
