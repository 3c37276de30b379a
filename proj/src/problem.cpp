#include "asyncopt/problem.hpp"

#include <cmath>
#include <random>

#include "asyncopt/errors.hpp"
#include "asyncopt/rng.hpp"

namespace asyncopt {

namespace {

// log(1 + exp(z)) without overflow
double log1p_exp(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// 1 / (1 + exp(-t))
double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_dimension(Index expected, Index got) {
  if (expected != got) throw ConfigError("dimension mismatch");
}

}  // namespace

QuadraticComponent::QuadraticComponent(Mat a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size())
    throw ConfigError("quadratic shape mismatch");
  const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ConfigError("quadratic matrix must be symmetric");
}

double QuadraticComponent::value(const VecView& x) const {
  check_dimension(b_.size(), x.size());
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

Vec QuadraticComponent::gradient(const VecView& x) const {
  check_dimension(b_.size(), x.size());
  return a_ * x - b_;
}

LogisticBatchComponent::LogisticBatchComponent(Index dimension, std::vector<Sample> samples,
                                               double l2)
    : dimension_(dimension), samples_(std::move(samples)), l2_(l2) {
  if (dimension_ < 1) throw ConfigError("logistic dimension must be positive");
  if (samples_.empty()) throw ConfigError("logistic batch must not be empty");
  if (l2_ < 0) throw ConfigError("l2 weight must be nonnegative");
  for (const auto& s : samples_) {
    if (s.label != 1 && s.label != -1) throw ConfigError("labels must be -1 or +1");
    for (const auto& [idx, val] : s.features) {
      (void)val;
      if (idx < 0 || idx >= dimension_) throw ConfigError("feature index out of range");
    }
  }
}

double LogisticBatchComponent::value(const VecView& x) const {
  check_dimension(dimension_, x.size());
  double total = 0.0;
  for (const auto& s : samples_) {
    double margin = 0.0;
    for (const auto& [idx, val] : s.features) margin += val * x[idx];
    total += log1p_exp(-static_cast<double>(s.label) * margin);
  }
  return total / static_cast<double>(samples_.size()) + 0.5 * l2_ * x.squaredNorm();
}

Vec LogisticBatchComponent::gradient(const VecView& x) const {
  check_dimension(dimension_, x.size());
  Vec g = Vec::Zero(dimension_);
  for (const auto& s : samples_) {
    double margin = 0.0;
    for (const auto& [idx, val] : s.features) margin += val * x[idx];
    const double y = static_cast<double>(s.label);
    const double coef = -y * sigmoid(-y * margin);
    for (const auto& [idx, val] : s.features) g[idx] += coef * val;
  }
  g /= static_cast<double>(samples_.size());
  g += l2_ * x;
  return g;
}

CompositeProblem finalize_problem(CompositeProblem p) {
  if (p.components.empty()) throw ConfigError("problem needs at least one component");
  if (p.partition.sizes.empty()) throw ConfigError("problem needs a block partition");
  const Index d = p.partition.dimension();
  for (const auto& comp : p.components)
    if (comp->dimension() != d) throw ConfigError("component dimension mismatch");
  if (p.component_smoothness.size() != p.components.size())
    throw ConfigError("one smoothness constant per component required");
  double sum_sq = 0.0;
  for (double li : p.component_smoothness) {
    if (li < 0) throw ConfigError("smoothness constants must be nonnegative");
    sum_sq += li * li;
  }
  const double expected_l = std::sqrt(sum_sq / static_cast<double>(p.components.size()));
  if (p.aggregate_smoothness == 0.0) {
    p.aggregate_smoothness = expected_l;
  } else if (std::abs(p.aggregate_smoothness - expected_l) >
             1e-12 * std::max(1.0, expected_l)) {
    throw ConfigError("aggregate smoothness inconsistent with component constants");
  }
  if (p.blockwise_smoothness == 0.0) p.blockwise_smoothness = p.aggregate_smoothness;
  if (p.convexity == Convexity::proximal_pl && !(p.pl_sigma > 0))
    throw ConfigError("proximal-PL flag requires sigma > 0");
  if (!p.regularizer.separable_under(p.partition) &&
      p.regularizer.kind() == Regularizer::Kind::per_block)
    throw ConfigError("per_block regularizer partition mismatch");
  return p;
}

double eval_smooth(const CompositeProblem& p, const VecView& x) {
  check_dimension(p.dimension(), x.size());
  double total = 0.0;
  for (const auto& comp : p.components) total += comp->value(x);
  return total / static_cast<double>(p.components.size());
}

double eval_objective(const CompositeProblem& p, const VecView& x) {
  const double r = p.regularizer.value(x);
  if (std::isinf(r)) return r;
  return eval_smooth(p, x) + r;
}

Vec component_gradient(const CompositeProblem& p, int i, const VecView& x) {
  if (i < 0 || i >= p.n_components()) throw ConfigError("component index out of range");
  check_dimension(p.dimension(), x.size());
  return p.components[static_cast<std::size_t>(i)]->gradient(x);
}

Vec full_gradient(const CompositeProblem& p, const VecView& x) {
  check_dimension(p.dimension(), x.size());
  Vec g = p.components[0]->gradient(x);
  for (std::size_t i = 1; i < p.components.size(); ++i) g += p.components[i]->gradient(x);
  return g / static_cast<double>(p.components.size());
}

Vec block_partial_gradient(const CompositeProblem& p, int j, const VecView& x) {
  if (j < 0 || j >= p.n_blocks()) throw ConfigError("block index out of range");
  const Vec g = full_gradient(p, x);
  const auto jj = static_cast<std::size_t>(j);
  return g.segment(p.partition.offsets[jj], p.partition.sizes[jj]);
}

Vec prox_gradient_point(const CompositeProblem& p, const VecView& x, double step) {
  if (!(step > 0)) throw ConfigError("step must be positive");
  const Vec g = full_gradient(p, x);
  return prox(p.regularizer, step, x - step * g);
}

double forward_backward_gap(const CompositeProblem& p, const VecView& x) {
  const double l = p.aggregate_smoothness;
  if (!(l > 0)) throw ConfigError("forward_backward_gap requires L > 0");
  const Vec g = full_gradient(p, x);
  const Vec y = prox(p.regularizer, 1.0 / l, x - g / l);
  const Vec diff = y - x;
  return g.dot(diff) + 0.5 * l * diff.squaredNorm() + p.regularizer.value(y) -
         p.regularizer.value(x);
}

double spectral_norm(const Mat& b) {
  if (b.size() == 0) throw ConfigError("spectral_norm of empty matrix");
  // power iteration on the Gram matrix; works for rectangular blocks
  const bool wide = b.cols() > b.rows();
  const Index n = wide ? b.rows() : b.cols();
  std::mt19937_64 rng(0x5eed5eedULL);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = draw_normal(rng);
  const double vnorm = v.norm();
  if (vnorm == 0) return 0.0;
  v /= vnorm;
  double rho = 0.0;
  double resid = 0.0;
  for (int iter = 0; iter < 200000; ++iter) {
    const Vec w = wide ? Vec(b * (b.transpose() * v)) : Vec(b.transpose() * (b * v));
    rho = v.dot(w);  // Rayleigh quotient of the Gram matrix at the unit v
    resid = (w - rho * v).norm();
    const double wnorm = w.norm();
    if (wnorm == 0) return 0.0;
    if (resid <= 1e-9 * std::max(rho, 1e-300)) break;
    v = w / wnorm;
  }
  // the Rayleigh quotient approaches the dominant eigenvalue from below;
  // the residual margin keeps the returned constant on the safe side
  return std::sqrt(std::max(0.0, rho + resid));
}

SmoothnessConstants quadratic_smoothness(const Mat& a, const BlockPartition& partition) {
  if (a.rows() != partition.dimension()) throw ConfigError("partition does not match matrix");
  SmoothnessConstants out;
  out.component = {spectral_norm(a)};
  out.aggregate = out.component[0];
  double lhat = 0.0;
  for (std::size_t i = 0; i < partition.sizes.size(); ++i)
    for (std::size_t j = 0; j < partition.sizes.size(); ++j) {
      const Mat blockm = a.block(partition.offsets[i], partition.offsets[j],
                                 partition.sizes[i], partition.sizes[j]);
      lhat = std::max(lhat, spectral_norm(blockm));
    }
  out.blockwise = lhat;
  return out;
}

}  // namespace asyncopt
