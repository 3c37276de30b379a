// Experiment runner for the asynchronous optimization engines: configure a
// problem, delay model and step-size schedule, run PIAG or Async-BCD, and
// emit trace/bound CSVs plus a summary with derived constants.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "asyncopt/async_bcd.hpp"
#include "asyncopt/errors.hpp"
#include "asyncopt/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAdmissibility = 3;
constexpr int kExitInvariant = 4;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs
};

asyncopt::ExperimentConfig resolve_config(const CommonFlags& flags) {
  asyncopt::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = asyncopt::load_config_file(flags.config_path);
  for (const auto& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw asyncopt::ConfigError("override must look like key=value: " + kv);
    asyncopt::apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "flat key = value config file");
  cmd->add_option("-s,--set", flags.overrides,
                  "config override key=value (repeatable, applied after the file)");
}

int dispatch(const std::string& verb, const CommonFlags& flags,
             const std::vector<double>& sweep_b) {
  using namespace asyncopt;
  ExperimentConfig cfg = resolve_config(flags);

  if (verb == "run") {
    const ExperimentResult res = run_experiment(cfg);
    std::cout << "final objective error: "
              << format_double(res.trace.summary.final_objective_error) << '\n'
              << "bound violations: " << res.dominance.violations.size() << '\n'
              << "artifacts in " << cfg.out_dir << '\n';
    return kExitOk;
  }
  if (verb == "sweep") {
    const SweepResult res = sweep(cfg, sweep_b);
    for (std::size_t i = 0; i < res.b_values.size(); ++i)
      std::cout << "b = " << format_double(res.b_values[i])
                << "  final error = " << format_double(res.final_errors[i]) << '\n';
    std::cout << "final errors ordered by b: " << (res.ordered_by_b ? "yes" : "no") << '\n'
              << "artifacts in " << cfg.out_dir << '\n';
    return kExitOk;
  }
  if (verb == "validate-delays") {
    const DelaySequence seq =
        cfg.delay_kind == "adversarial"
            ? build_adversarial_delays(cfg.delay, cfg.horizon)
            : sample_stochastic_delays(cfg.delay, cfg.horizon,
                                       cfg.engine == "piag" ? cfg.n_batches : 1, cfg.delay_seed);
    if (auto bad = validate_assumption1(seq)) {
      std::cout << "violation at k = " << *bad << '\n';
      return kExitInvariant;
    }
    std::cout << "delays conform to the bound up to k = " << cfg.horizon << '\n';
    return kExitOk;
  }
  if (verb == "check-admissibility") {
    const DelaySequence seq =
        cfg.delay_kind == "adversarial"
            ? build_adversarial_delays(cfg.delay, cfg.horizon)
            : sample_stochastic_delays(cfg.delay, cfg.horizon,
                                       cfg.engine == "piag" ? cfg.n_batches : 1, cfg.delay_seed);
    const double smoothness = 1.0;  // admissibility scales out of L; unit constant
    StepSizePolicy policy = cfg.schedule == "matched"
                                ? (cfg.engine == "piag" ? piag_schedule(cfg.h, smoothness, cfg.delay)
                                                        : bcd_schedule(cfg.h, smoothness, cfg.delay))
                                : constant_policy(cfg.constant_gamma, cfg.h, smoothness);
    if (auto bad = check_admissibility(policy, seq, cfg.horizon)) {
      std::cout << "window sum exceeds h/L at k = " << *bad << '\n';
      return kExitAdmissibility;
    }
    std::cout << "schedule admissible up to k = " << cfg.horizon << '\n';
    return kExitOk;
  }
  if (verb == "build-adversarial") {
    const DelaySequence seq = build_adversarial_delays(cfg.delay, cfg.horizon);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/adversarial_delays.csv";
    write_delays_csv(seq, path);
    std::cout << "epochs:";
    for (std::size_t i = 0; i < seq.epochs.size() && i < 12; ++i) std::cout << ' ' << seq.epochs[i];
    if (seq.epochs.size() > 12) std::cout << " ...";
    std::cout << "\nwrote " << path << '\n';
    return kExitOk;
  }
  throw asyncopt::ConfigError("unknown verb " + verb);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous optimization experiments (PIAG / Async-BCD)"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<double> sweep_b{0.2, 0.6, 1.0};

  CLI::App* run = app.add_subcommand("run", "run one experiment end to end");
  add_common(run, flags);
  CLI::App* sw = app.add_subcommand("sweep", "run one experiment per b value and compare");
  add_common(sw, flags);
  sw->add_option("-b,--b-values", sweep_b, "delay growth exponents to sweep");
  CLI::App* vd = app.add_subcommand("validate-delays", "generate delays and check the bound");
  add_common(vd, flags);
  CLI::App* ca = app.add_subcommand("check-admissibility",
                                    "check the step-size window-sum condition");
  add_common(ca, flags);
  CLI::App* ba = app.add_subcommand("build-adversarial",
                                    "build the worst-case delay sequence and export it");
  add_common(ba, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    return dispatch(verb, flags, sweep_b);
  } catch (const asyncopt::AdmissibilityError& e) {
    std::cerr << "admissibility: " << e.what() << '\n';
    return kExitAdmissibility;
  } catch (const asyncopt::InvariantError& e) {
    std::cerr << "invariant: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const asyncopt::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
}
