// qflow: runs the identity, stationary-phase and model-sweep suites.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qflow/harness/suites.hpp"

namespace fs = std::filesystem;
using namespace qflow::harness;

namespace {

fs::path default_out_dir() {
  const char* env = std::getenv("QFLOW_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path("qflow-out");
}

struct Options {
  std::string scenario;
  std::uint64_t seed = 1;
  int identity_samples = 1000;
  int reduction_samples = 500;
  std::string out;
  int jobs = 1;
  bool svg = false;
};

// Writes the records, the quantity report and optionally the plot; returns the exit code.
int finish(SuiteReport& report, const std::map<std::string, Bound>& thresholds, const Options& opt,
           bool plot_model) {
  apply_thresholds(report, thresholds);
  const fs::path out = opt.out.empty() ? default_out_dir() : fs::path(opt.out);
  const std::string stem = report.scenario.empty() ? report.suite : report.scenario + "-" + report.suite;
  write_text(out / (stem + "-report.csv"), report_to_csv(report));
  if (!report.records.empty()) {
    write_records_csv(out / (stem + ".csv"), report.records);
    if (opt.svg) {
      write_text(out / (stem + ".svg"),
                 loglog_svg(stem, series_by_quantity(report.records, plot_model)));
    }
  }
  std::cout << report_to_text(report);
  std::cerr << "elapsed " << report.seconds << " s, outputs in " << out.string() << "\n";
  bool gates_ok = true;
  for (const SweepRecord& r : report.records) gates_ok = gates_ok && !r.gated();
  if (!gates_ok) std::cout << "  gated records present\n";
  return report.passed() && gates_ok ? 0 : 1;
}

Scenario require_scenario(const Options& opt) {
  if (opt.scenario.empty()) throw qflow::InputError("--scenario is required for this subcommand");
  return load_scenario(opt.scenario);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized symplectic flows on the Bargmann-Fock model: identity checks and k-sweeps"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool needs_scenario) {
    auto* s = sub->add_option("--scenario", opt.scenario, "scenario JSON file");
    if (needs_scenario) s->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--out", opt.out, "output directory (default $QFLOW_OUT_DIR or ./qflow-out)");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--svg", opt.svg, "also write a log-log SVG plot");
  };

  auto* identities = app.add_subcommand("identities", "algebraic identities on random symplectic matrices");
  add_common(identities, false);
  identities->add_option("--samples", opt.identity_samples, "number of random matrices")->capture_default_str();

  auto* stationary = app.add_subcommand("stationary-phase", "critical point, Hessian path and Gaussian reductions");
  add_common(stationary, false);
  stationary->add_option("--samples", opt.reduction_samples, "number of reduction samples")->capture_default_str();

  auto* kernel = app.add_subcommand("kernel-sweep", "model kernel against the leading term");
  add_common(kernel, true);
  auto* unitarity = app.add_subcommand("unitarity-sweep", "unitarity defect for each symbol mode");
  add_common(unitarity, true);
  auto* trace = app.add_subcommand("trace-sweep", "model trace against the fixed-point formula");
  add_common(trace, true);
  auto* schrodinger = app.add_subcommand("schrodinger-check", "finite-difference Schrodinger residual");
  add_common(schrodinger, true);

  CLI11_PARSE(app, argc, argv);

  try {
    // Algebraic suites take their thresholds from the scenario when one is given.
    auto thresholds_or = [&](const std::string& suite, std::map<std::string, Bound> fallback) {
      return opt.scenario.empty() ? fallback : load_scenario(opt.scenario).thresholds_for(suite);
    };
    if (*identities) {
      SuiteReport r = run_identity_suite(opt.seed, opt.identity_samples);
      return finish(r, thresholds_or(r.suite, identity_suite_thresholds()), opt, false);
    }
    if (*stationary) {
      SuiteReport r = run_stationary_phase_suite(opt.seed, opt.reduction_samples);
      return finish(r, thresholds_or(r.suite, stationary_phase_thresholds()), opt, false);
    }
    const Scenario sc = require_scenario(opt);
    if (*kernel) {
      SuiteReport r = run_kernel_sweep(sc, opt.jobs);
      return finish(r, sc.thresholds_for(r.suite), opt, false);
    }
    if (*unitarity) {
      SuiteReport r = run_unitarity_sweep(sc, opt.jobs);
      return finish(r, sc.thresholds_for(r.suite), opt, true);
    }
    if (*trace) {
      SuiteReport r = run_trace_sweep(sc, opt.jobs);
      return finish(r, sc.thresholds_for(r.suite), opt, false);
    }
    if (*schrodinger) {
      SuiteReport r = run_schrodinger_check(sc, opt.jobs);
      return finish(r, sc.thresholds_for(r.suite), opt, true);
    }
  } catch (const qflow::GateFailure& e) {
    std::cerr << "gate failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return 3;
  } catch (const qflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
