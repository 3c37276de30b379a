#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "asyncopt/bounds.hpp"
#include "asyncopt/data.hpp"

namespace asyncopt {

/// Flat experiment description: every field maps to one "key = value" line
/// of the config format and one CLI flag.
struct ExperimentConfig {
  std::string engine = "piag";            // piag | bcd
  std::string problem = "logistic-synth"; // logistic-synth | logistic-libsvm | quadratic | lasso-quadratic

  // data
  std::string data_path;
  std::int64_t n_samples = 500;
  Index dimension = 100;
  double sparsity = 0.1;
  std::uint64_t data_seed = 1;
  double lambda1 = 1e-5;
  double lambda2 = 1e-4;
  int n_batches = 10;
  int n_blocks = 14;

  // delays
  std::string delay_kind = "stochastic";  // stochastic | adversarial
  DelayParams delay;
  std::uint64_t delay_seed = 1;

  // schedule
  std::string schedule = "matched";       // matched | constant
  double h = 0.99;
  double constant_gamma = 0.0;

  std::int64_t horizon = 10'000;
  int trials = 32;                        // bcd only
  std::uint64_t trial_seed = 1;
  std::string out_dir = "out";
  bool paper_faithful_sum = false;        // closed-form step sums in the bound curve
  bool override_admissibility = false;

  void validate() const;  // throws ConfigError
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value);

struct SummaryEntry {
  std::string key;
  std::string value;
  std::string provenance;  // "paper" | "config" | "derived"
};

struct ExperimentResult {
  ExperimentConfig config;
  RunTrace trace;                    // piag trace, or the averaged bcd trace
  std::vector<RunTrace> trials;      // bcd per-trial traces
  BoundCurve curve;
  DominanceReport dominance;
  std::vector<SummaryEntry> summary;
};

/// Full pipeline: build problem -> reference solve -> delays -> validate ->
/// schedule -> admissibility -> engine -> bound curve -> dominance. Writes
/// trace.csv, bound.csv, delays.csv and summary.txt under cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepResult {
  std::vector<double> b_values;
  std::vector<ExperimentResult> runs;
  std::vector<double> final_errors;  // aligned with b_values
  bool ordered_by_b = false;         // final error nondecreasing in b
};

/// One run per b value; writes an aligned comparison CSV
/// (k, error_b<b1>, ...) plus sweep_summary.txt under cfg.out_dir.
SweepResult sweep(const ExperimentConfig& cfg, const std::vector<double>& b_values);

/// Serializes summary entries as "key = value  # provenance" lines.
void write_summary(const std::vector<SummaryEntry>& summary, const std::string& path);

}  // namespace asyncopt
