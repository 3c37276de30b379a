#include "asyncopt/data.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "asyncopt/errors.hpp"
#include "asyncopt/rng.hpp"
#include "asyncopt/trace.hpp"

namespace asyncopt {

namespace {

int parse_label(const std::string& token, std::int64_t line_no) {
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad label '" + token + "'");
  }
  if (v == 1.0) return 1;
  if (v == 0.0 || v == -1.0) return -1;
  throw ConfigError("line " + std::to_string(line_no) + ": unknown label value '" + token +
                    "' (expected -1, 0 or +1)");
}

}  // namespace

Dataset load_libsvm(const std::string& path, Index dimension_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Dataset data;
  Index max_index = 0;  // 1-based
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    LogisticBatchComponent::Sample sample;
    sample.label = parse_label(token, line_no);
    while (ss >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
        throw ConfigError("line " + std::to_string(line_no) + ": bad feature '" + token + "'");
      std::int64_t idx = 0;
      double val = 0.0;
      try {
        std::size_t pos = 0;
        idx = std::stoll(token.substr(0, colon), &pos);
        if (pos != colon) throw std::invalid_argument(token);
        pos = 0;
        const std::string vs = token.substr(colon + 1);
        val = std::stod(vs, &pos);
        if (pos != vs.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad feature '" + token + "'");
      }
      if (idx < 1)
        throw ConfigError("line " + std::to_string(line_no) + ": indices are 1-based");
      max_index = std::max<Index>(max_index, idx);
      sample.features.emplace_back(idx - 1, val);
    }
    data.samples.push_back(std::move(sample));
  }
  if (dimension_override > 0) {
    if (dimension_override < max_index)
      throw ConfigError("dimension override smaller than the largest feature index");
    data.dimension = dimension_override;
  } else {
    data.dimension = max_index;
  }
  return data;
}

void write_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  for (const auto& s : data.samples) {
    out << (s.label > 0 ? "+1" : "-1");
    for (const auto& [idx, val] : s.features) out << ' ' << (idx + 1) << ':' << format_double(val);
    out << '\n';
  }
}

Dataset synthesize_classification(std::int64_t n, Index d, double sparsity,
                                  std::uint64_t seed) {
  if (n < 1 || d < 1) throw ConfigError("need n >= 1 and d >= 1");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw ConfigError("sparsity must lie in (0,1]");
  std::mt19937_64 rng(substream_seed(seed, 0xDA7AULL));
  Vec hyperplane(d);
  for (Index i = 0; i < d; ++i) hyperplane[i] = draw_normal(rng);

  Dataset data;
  data.dimension = d;
  data.samples.reserve(static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) {
    LogisticBatchComponent::Sample sample;
    double margin = 0.0;
    for (Index i = 0; i < d; ++i) {
      if (draw_unit(rng) < sparsity) {
        const double v = draw_normal(rng);
        sample.features.emplace_back(i, v);
        margin += v * hyperplane[i];
      }
    }
    sample.label = margin >= 0.0 ? 1 : -1;
    if (draw_unit(rng) < 0.1) sample.label = -sample.label;  // 10% label noise
    data.samples.push_back(std::move(sample));
  }
  return data;
}

namespace {

double feature_norm_sq(const LogisticBatchComponent::Sample& s) {
  double t = 0.0;
  for (const auto& [idx, val] : s.features) {
    (void)idx;
    t += val * val;
  }
  return t;
}

/// max_{ij} of the triangle-inequality Hessian block bound
/// (1/4N) sum_s ||q_s^(i)|| ||q_s^(j)|| (+ l2 on the diagonal), capped by the
/// single-block constant (1/4N) sum ||q_s||^2 + l2.
double logistic_blockwise_smoothness(const Dataset& data, double l2,
                                     const BlockPartition& partition) {
  const int m = partition.num_blocks();
  const double n = static_cast<double>(data.size());
  std::vector<Index> block_of(static_cast<std::size_t>(partition.dimension()));
  for (int j = 0; j < m; ++j)
    for (Index i = 0; i < partition.sizes[static_cast<std::size_t>(j)]; ++i)
      block_of[static_cast<std::size_t>(partition.offsets[static_cast<std::size_t>(j)] + i)] = j;

  Mat cross = Mat::Zero(m, m);
  Vec norms(m);
  double full = 0.0;
  for (const auto& s : data.samples) {
    norms.setZero();
    for (const auto& [idx, val] : s.features)
      norms[block_of[static_cast<std::size_t>(idx)]] += val * val;
    full += norms.sum();
    norms = norms.cwiseSqrt();
    cross += norms * norms.transpose();
  }
  double lhat = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      lhat = std::max(lhat, cross(i, j) / (4.0 * n) + (i == j ? l2 : 0.0));
  return std::min(lhat, full / (4.0 * n) + l2);
}

}  // namespace

CompositeProblem build_logistic_problem(const Dataset& data, double l1, double l2,
                                        int n_batches, std::uint64_t shuffle_seed,
                                        int n_blocks) {
  if (data.size() == 0) throw ConfigError("dataset is empty");
  if (data.dimension < 1) throw ConfigError("dataset dimension must be positive");
  if (n_batches < 1) throw ConfigError("need at least one batch");
  if (static_cast<std::int64_t>(n_batches) > data.size())
    throw ConfigError("more batches than samples");
  if (l1 < 0 || l2 < 0) throw ConfigError("regularization weights must be nonnegative");

  // seeded Fisher-Yates, then contiguous batches; the remainder goes to the
  // first batches
  std::vector<std::int64_t> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(substream_seed(shuffle_seed, 0x5Fu));
  for (std::int64_t i = data.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::int64_t>(draw_bounded(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  CompositeProblem p;
  p.partition = even_partition(data.dimension, n_blocks);
  p.regularizer = l1 > 0 ? Regularizer::l1(l1) : Regularizer::zero();

  const std::int64_t base = data.size() / n_batches;
  const std::int64_t extra = data.size() % n_batches;
  std::int64_t cursor = 0;
  for (int b = 0; b < n_batches; ++b) {
    const std::int64_t len = base + (b < extra ? 1 : 0);
    std::vector<LogisticBatchComponent::Sample> batch;
    batch.reserve(static_cast<std::size_t>(len));
    double norm_sum = 0.0;
    for (std::int64_t t = 0; t < len; ++t) {
      const auto& s = data.samples[static_cast<std::size_t>(order[static_cast<std::size_t>(cursor++)])];
      norm_sum += feature_norm_sq(s);
      batch.push_back(s);
    }
    p.components.push_back(
        std::make_shared<LogisticBatchComponent>(data.dimension, std::move(batch), l2));
    p.component_smoothness.push_back(norm_sum / (4.0 * static_cast<double>(len)) + l2);
  }

  p.blockwise_smoothness = logistic_blockwise_smoothness(data, l2, p.partition);
  p.convexity = Convexity::convex;
  if (l2 > 0) p.derived_pl_sigma = l2;  // strong convexity of the smooth part
  return finalize_problem(std::move(p));
}

CompositeProblem build_quadratic_problem(const Mat& a, const Vec& b, Regularizer reg,
                                         BlockPartition partition) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw ConfigError("quadratic shape mismatch");
  if (partition.dimension() != b.size()) throw ConfigError("partition does not match dimension");

  CompositeProblem p;
  p.partition = std::move(partition);
  p.regularizer = std::move(reg);
  p.components.push_back(std::make_shared<QuadraticComponent>(a, b));

  const SmoothnessConstants sc = quadratic_smoothness(a, p.partition);
  p.component_smoothness = sc.component;
  p.aggregate_smoothness = sc.aggregate;
  p.blockwise_smoothness = sc.blockwise;

  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  if (eig.info() != Eigen::Success) throw ConfigError("eigendecomposition failed");
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-10 * std::max(1.0, std::abs(eig.eigenvalues().maxCoeff())))
    throw ConfigError("quadratic matrix must be positive semidefinite");

  if (min_eig > 0) {
    p.convexity = Convexity::proximal_pl;
    p.pl_sigma = min_eig;
    p.derived_pl_sigma = min_eig;
    if (p.regularizer.kind() == Regularizer::Kind::zero) {
      const Vec x_star = eig.eigenvectors() *
                         (eig.eigenvectors().transpose() * b).cwiseQuotient(eig.eigenvalues());
      p.optimal_point = x_star;
      p.optimal_value = 0.5 * x_star.dot(a * x_star) - b.dot(x_star);
    }
  } else {
    p.convexity = Convexity::convex;
  }
  return finalize_problem(std::move(p));
}

ReferenceSolution reference_solve(const CompositeProblem& p, double tol,
                                  std::int64_t max_iterations) {
  const double l = p.aggregate_smoothness;
  if (!(l > 0)) throw ConfigError("reference solve requires L > 0");
  const double step = 1.0 / l;
  Vec x = Vec::Zero(p.dimension());
  ReferenceSolution out;
  for (std::int64_t it = 0; it < max_iterations; ++it) {
    const Vec y = prox_gradient_point(p, x, step);
    const double residual = l * (y - x).norm();
    if (residual < tol) {
      out.x = y;
      out.p_star = eval_objective(p, y);
      out.iterations = it + 1;
      out.residual = residual;
      return out;
    }
    x = y;
  }
  throw ConfigError("reference solve did not reach the residual tolerance");
}

CompositeProblem with_reference_optimum(CompositeProblem p, const ReferenceSolution& ref) {
  p.optimal_value = ref.p_star;
  p.optimal_point = ref.x;
  return p;
}

}  // namespace asyncopt
