#include "asyncopt/types.hpp"

#include "asyncopt/errors.hpp"

namespace asyncopt {

BlockPartition make_partition(std::vector<Index> sizes) {
  if (sizes.empty()) throw ConfigError("partition needs at least one block");
  BlockPartition p;
  p.sizes = std::move(sizes);
  p.offsets.resize(p.sizes.size());
  Index off = 0;
  for (std::size_t j = 0; j < p.sizes.size(); ++j) {
    if (p.sizes[j] <= 0) throw ConfigError("block sizes must be positive");
    p.offsets[j] = off;
    off += p.sizes[j];
  }
  return p;
}

BlockPartition even_partition(Index d, int m) {
  if (d < 1 || m < 1) throw ConfigError("even_partition requires d >= 1 and m >= 1");
  if (static_cast<Index>(m) > d) throw ConfigError("more blocks than coordinates");
  const Index base = d / m;
  const Index extra = d % m;
  std::vector<Index> sizes(static_cast<std::size_t>(m), base);
  for (Index j = 0; j < extra; ++j) sizes[static_cast<std::size_t>(j)] += 1;
  return make_partition(std::move(sizes));
}

}  // namespace asyncopt
