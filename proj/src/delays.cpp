#include "asyncopt/delays.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "asyncopt/errors.hpp"
#include "asyncopt/rng.hpp"

namespace asyncopt {

namespace {

double raw_bound(const DelayParams& p, std::int64_t k) {
  return p.a * std::pow(static_cast<double>(k), p.b) + p.c;
}

}  // namespace

double DelayParams::bound(std::int64_t k) const {
  return std::min(static_cast<double>(k), raw_bound(*this, k));
}

void DelayParams::validate() const {
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("delay parameter a must lie in (0,1)");
  if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("delay parameter b must lie in [0,1]");
  if (!(c >= 0.0)) throw ConfigError("delay parameter c must be nonnegative");
}

DelaySequence sample_stochastic_delays(const DelayParams& params, std::int64_t horizon,
                                       int n_components, std::uint64_t seed) {
  params.validate();
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (n_components < 1) throw ConfigError("need at least one component");

  DelaySequence seq;
  seq.kind = DelayKind::stochastic;
  seq.params = params;
  seq.seed = seed;
  seq.per_component.assign(static_cast<std::size_t>(n_components),
                           std::vector<std::int64_t>(static_cast<std::size_t>(horizon) + 1, 0));

  for (int i = 0; i < n_components; ++i) {
    auto& row = seq.per_component[static_cast<std::size_t>(i)];
    std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(i)));
    for (std::int64_t k = 1; k <= horizon; ++k) {
      const double bound = params.bound(k);
      const std::int64_t prev = row[static_cast<std::size_t>(k - 1)];
      if (static_cast<double>(prev) <= bound - 1.0) {
        row[static_cast<std::size_t>(k)] = prev + 1;
      } else {
        const auto cap = std::min(
            k, static_cast<std::int64_t>(std::floor(raw_bound(params, k))));
        row[static_cast<std::size_t>(k)] =
            cap >= 1 ? 1 + static_cast<std::int64_t>(draw_bounded(rng, static_cast<std::uint64_t>(cap)))
                     : 0;
      }
    }
  }

  seq.values.assign(static_cast<std::size_t>(horizon) + 1, 0);
  for (std::int64_t k = 0; k <= horizon; ++k) {
    std::int64_t m = 0;
    for (const auto& row : seq.per_component)
      m = std::max(m, row[static_cast<std::size_t>(k)]);
    seq.values[static_cast<std::size_t>(k)] = m;
  }
  return seq;
}

DelaySequence build_adversarial_delays(const DelayParams& params, std::int64_t horizon) {
  params.validate();
  if (horizon < 1) throw ConfigError("horizon must be at least 1");

  DelaySequence seq;
  seq.kind = DelayKind::adversarial;
  seq.params = params;
  seq.values.assign(static_cast<std::size_t>(horizon) + 1, 0);

  // kappa - (a kappa^b + c) is nondecreasing in kappa, so scanning upward
  // from T_t until the predicate first fails finds the exact maximum.
  std::int64_t t_cur = 0;
  while (t_cur <= horizon) {
    seq.epochs.push_back(t_cur);
    std::int64_t kappa = t_cur + 1;
    while (static_cast<double>(kappa) - raw_bound(params, kappa) <= static_cast<double>(t_cur))
      ++kappa;
    const std::int64_t t_next = kappa;  // max satisfying kappa is t_next - 1
    for (std::int64_t k = t_cur; k <= std::min(t_next - 1, horizon); ++k)
      seq.values[static_cast<std::size_t>(k)] = k - t_cur;
    t_cur = t_next;
  }
  return seq;
}

DelaySequence make_user_delays(std::vector<std::int64_t> values, const DelayParams& params) {
  params.validate();
  if (values.empty()) throw ConfigError("delay sequence must not be empty");
  DelaySequence seq;
  seq.kind = DelayKind::user_supplied;
  seq.params = params;
  seq.values = std::move(values);
  return seq;
}

namespace {

bool conforms(std::int64_t tau, std::int64_t k, const DelayParams& params) {
  if (tau < 0 || tau > k) return false;
  return static_cast<double>(tau) <= raw_bound(params, k);
}

}  // namespace

std::optional<std::int64_t> validate_assumption1(const DelaySequence& seq,
                                                 const DelayParams& params) {
  params.validate();
  for (std::int64_t k = 0; k <= seq.horizon(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (!conforms(seq.values[kk], k, params)) return k;
    if (!seq.per_component.empty()) {
      std::int64_t m = 0;
      for (const auto& row : seq.per_component) {
        if (!conforms(row[kk], k, params)) return k;
        m = std::max(m, row[kk]);
      }
      if (m != seq.values[kk]) return k;
    }
  }
  return std::nullopt;
}

std::optional<std::int64_t> validate_assumption1(const DelaySequence& seq) {
  return validate_assumption1(seq, seq.params);
}

std::int64_t count_effective_gd_steps(const DelaySequence& seq, std::int64_t k) {
  if (seq.kind != DelayKind::adversarial)
    throw ConfigError("effective step count requires an adversarial sequence");
  if (k < 1 || k > seq.horizon() + 1)
    throw ConfigError("k out of range for effective step count");
  const auto it = std::upper_bound(seq.epochs.begin(), seq.epochs.end(), k - 1);
  return static_cast<std::int64_t>(it - seq.epochs.begin() - 1) + 1;
}

void write_delays_csv(const DelaySequence& seq, std::ostream& out) {
  if (seq.per_component.empty()) {
    out << "k,tau\n";
    for (std::int64_t k = 0; k <= seq.horizon(); ++k)
      out << k << ',' << seq.values[static_cast<std::size_t>(k)] << '\n';
    return;
  }
  out << 'k';
  for (std::size_t i = 0; i < seq.per_component.size(); ++i) out << ",tau_" << (i + 1);
  out << '\n';
  for (std::int64_t k = 0; k <= seq.horizon(); ++k) {
    out << k;
    for (const auto& row : seq.per_component) out << ',' << row[static_cast<std::size_t>(k)];
    out << '\n';
  }
}

void write_delays_csv(const DelaySequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  write_delays_csv(seq, out);
}

}  // namespace asyncopt
