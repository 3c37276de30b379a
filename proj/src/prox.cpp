#include "asyncopt/prox.hpp"

#include <cmath>
#include <limits>

#include "asyncopt/errors.hpp"

namespace asyncopt {

namespace {

double soft_threshold(double v, double t) {
  // ties |v| == t map to exactly 0
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

Regularizer Regularizer::zero() { return Regularizer{}; }

Regularizer Regularizer::l1(double lambda) {
  if (lambda < 0) throw ConfigError("l1 weight must be nonnegative");
  Regularizer r;
  r.kind_ = Kind::l1;
  r.lambda_ = lambda;
  return r;
}

Regularizer Regularizer::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw ConfigError("box bounds size mismatch");
  if ((lo.array() > hi.array()).any()) throw ConfigError("box requires lo <= hi");
  Regularizer r;
  r.kind_ = Kind::box;
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  return r;
}

Regularizer Regularizer::per_block(std::vector<Regularizer> blocks, BlockPartition partition) {
  if (blocks.size() != partition.sizes.size())
    throw ConfigError("per_block needs one regularizer per block");
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].kind() == Kind::per_block)
      throw ConfigError("per_block regularizers do not nest");
    if (blocks[j].kind() == Kind::box && blocks[j].lo_.size() != partition.sizes[j])
      throw ConfigError("per_block box bounds must match block size");
  }
  Regularizer r;
  r.kind_ = Kind::per_block;
  r.blocks_ = std::move(blocks);
  r.block_partition_ = std::move(partition);
  return r;
}

bool Regularizer::separable_under(const BlockPartition& partition) const {
  switch (kind_) {
    case Kind::zero:
    case Kind::l1:
    case Kind::box:
      return true;  // coordinate-wise, hence separable under any partition
    case Kind::per_block:
      return block_partition_.sizes == partition.sizes;
  }
  return false;
}

double Regularizer::value(const VecView& x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::l1:
      return lambda_ * x.lpNorm<1>();
    case Kind::box: {
      if (x.size() != lo_.size()) throw ConfigError("box dimension mismatch");
      if ((x.array() < lo_.array()).any() || (x.array() > hi_.array()).any())
        return std::numeric_limits<double>::infinity();
      return 0.0;
    }
    case Kind::per_block: {
      if (x.size() != block_partition_.dimension())
        throw ConfigError("per_block dimension mismatch");
      double total = 0.0;
      for (std::size_t j = 0; j < blocks_.size(); ++j)
        total += blocks_[j].value(
            x.segment(block_partition_.offsets[j], block_partition_.sizes[j]));
      return total;
    }
  }
  return 0.0;
}

Vec prox(const Regularizer& reg, double gamma, const VecView& v) {
  if (!(gamma > 0)) throw ConfigError("prox requires gamma > 0");
  switch (reg.kind()) {
    case Regularizer::Kind::zero:
      return v;
    case Regularizer::Kind::l1: {
      const double t = gamma * reg.lambda();
      Vec out(v.size());
      for (Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], t);
      return out;
    }
    case Regularizer::Kind::box: {
      if (v.size() != reg.lo().size()) throw ConfigError("box dimension mismatch");
      return v.cwiseMax(reg.lo()).cwiseMin(reg.hi());
    }
    case Regularizer::Kind::per_block: {
      const auto& part = reg.block_partition();
      if (v.size() != part.dimension()) throw ConfigError("per_block dimension mismatch");
      Vec out(v.size());
      for (std::size_t j = 0; j < reg.blocks().size(); ++j)
        out.segment(part.offsets[j], part.sizes[j]) =
            prox(reg.blocks()[j], gamma, v.segment(part.offsets[j], part.sizes[j]));
      return out;
    }
  }
  throw ConfigError("unknown regularizer kind");
}

Vec prox_block(const Regularizer& reg, const BlockPartition& partition, double gamma, int j,
               const VecView& v) {
  if (!(gamma > 0)) throw ConfigError("prox requires gamma > 0");
  if (j < 0 || j >= partition.num_blocks()) throw ConfigError("block index out of range");
  if (!reg.separable_under(partition))
    throw ConfigError("regularizer is not separable under this partition");
  const auto jj = static_cast<std::size_t>(j);
  if (v.size() != partition.sizes[jj]) throw ConfigError("block vector size mismatch");
  switch (reg.kind()) {
    case Regularizer::Kind::zero:
      return v;
    case Regularizer::Kind::l1:
      return prox(reg, gamma, v);
    case Regularizer::Kind::box:
      return v.cwiseMax(reg.lo().segment(partition.offsets[jj], partition.sizes[jj]))
          .cwiseMin(reg.hi().segment(partition.offsets[jj], partition.sizes[jj]));
    case Regularizer::Kind::per_block:
      return prox(reg.blocks()[jj], gamma, v);
  }
  throw ConfigError("unknown regularizer kind");
}

Vec recover_subgradient(double gamma, const VecView& pre_prox, const VecView& post_prox) {
  if (!(gamma > 0)) throw ConfigError("recover_subgradient requires gamma > 0");
  if (pre_prox.size() != post_prox.size()) throw ConfigError("pre/post size mismatch");
  return (pre_prox - post_prox) / gamma;
}

Vec min_norm_stationarity(const Regularizer& reg, const VecView& x, const VecView& g) {
  if (x.size() != g.size()) throw ConfigError("dimension mismatch");
  switch (reg.kind()) {
    case Regularizer::Kind::zero:
      return g;
    case Regularizer::Kind::l1: {
      Vec out(g.size());
      const double lam = reg.lambda();
      for (Index i = 0; i < g.size(); ++i) {
        if (x[i] > 0)
          out[i] = g[i] + lam;
        else if (x[i] < 0)
          out[i] = g[i] - lam;
        else
          out[i] = soft_threshold(g[i], lam);
      }
      return out;
    }
    case Regularizer::Kind::box: {
      Vec out(g.size());
      for (Index i = 0; i < g.size(); ++i) {
        const bool at_lo = x[i] <= reg.lo()[i];
        const bool at_hi = x[i] >= reg.hi()[i];
        double v = g[i];
        if (at_lo && v > 0) v = 0;  // normal cone absorbs this component
        if (at_hi && v < 0) v = 0;
        out[i] = v;
      }
      return out;
    }
    case Regularizer::Kind::per_block: {
      const auto& part = reg.block_partition();
      Vec out(g.size());
      for (std::size_t j = 0; j < reg.blocks().size(); ++j)
        out.segment(part.offsets[j], part.sizes[j]) = min_norm_stationarity(
            reg.blocks()[j], x.segment(part.offsets[j], part.sizes[j]),
            g.segment(part.offsets[j], part.sizes[j]));
      return out;
    }
  }
  throw ConfigError("unknown regularizer kind");
}

}  // namespace asyncopt
