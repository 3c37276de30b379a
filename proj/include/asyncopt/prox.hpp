#pragma once

#include <memory>
#include <vector>

#include "asyncopt/types.hpp"

namespace asyncopt {

/// Convex regularizer catalog. Every member has a closed-form proximal map;
/// zero and l1 are separable under any partition, box under coordinate-wise
/// bounds, and per_block attaches one regularizer to each block of a fixed
/// partition.
class Regularizer {
 public:
  enum class Kind { zero, l1, box, per_block };

  static Regularizer zero();
  static Regularizer l1(double lambda);
  static Regularizer box(Vec lo, Vec hi);
  static Regularizer per_block(std::vector<Regularizer> blocks, BlockPartition partition);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const std::vector<Regularizer>& blocks() const { return blocks_; }
  const BlockPartition& block_partition() const { return block_partition_; }

  /// True when the regularizer splits across the given partition.
  bool separable_under(const BlockPartition& partition) const;

  /// r(x); +inf outside the box domain.
  double value(const VecView& x) const;

 private:
  Regularizer() = default;
  Kind kind_ = Kind::zero;
  double lambda_ = 0.0;
  Vec lo_, hi_;
  std::vector<Regularizer> blocks_;
  BlockPartition block_partition_;
};

/// argmin_y gamma*r(y) + 0.5*||y - v||^2. gamma must be positive.
Vec prox(const Regularizer& reg, double gamma, const VecView& v);

/// Prox restricted to block j of the partition. Throws ConfigError when the
/// regularizer is not separable under the partition (the update would not
/// decompose block-wise).
Vec prox_block(const Regularizer& reg, const BlockPartition& partition, double gamma, int j,
               const VecView& v);

/// Subgradient of r at post_prox implied by the prox optimality condition:
/// (pre_prox - post_prox) / gamma. Callers must pass the exact pre/post pair
/// of one prox step.
Vec recover_subgradient(double gamma, const VecView& pre_prox, const VecView& post_prox);

/// g + xi with xi the element of the subdifferential of r at x minimizing
/// ||g + xi||; used for the stationarity metric at an iterate that was not
/// produced by a prox step.
Vec min_norm_stationarity(const Regularizer& reg, const VecView& x, const VecView& g);

}  // namespace asyncopt
