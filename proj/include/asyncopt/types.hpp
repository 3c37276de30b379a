#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace asyncopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Read-only view accepting any contiguous vector expression.
using VecView = Eigen::Ref<const Vec>;

/// Ordered block sizes with cached offsets; sizes are positive and sum to
/// the ambient dimension.
struct BlockPartition {
  std::vector<Index> sizes;
  std::vector<Index> offsets;  // offsets[j] = start of block j

  Index dimension() const { return sizes.empty() ? 0 : offsets.back() + sizes.back(); }
  int num_blocks() const { return static_cast<int>(sizes.size()); }
};

BlockPartition make_partition(std::vector<Index> sizes);

/// Splits d coordinates into m blocks whose sizes differ by at most one;
/// earlier blocks receive the extra coordinate.
BlockPartition even_partition(Index d, int m);

}  // namespace asyncopt
