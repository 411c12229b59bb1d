#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qflow/harness/output.hpp"
#include "qflow/harness/scenario.hpp"

namespace qflow::harness {

struct Check {
  std::string name;
  double value = 0;
  Bound bound;

  bool passed() const { return value >= bound.lower && value <= bound.upper; }
};

/// Named scalar results of a suite, the records behind them, and the checks
/// applied to them.
struct SuiteReport {
  std::string suite;
  std::string scenario;
  std::map<std::string, double> quantities;
  std::vector<SweepRecord> records;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double seconds = 0;  // wall time; never written to the deterministic outputs

  bool passed() const;
  double quantity(const std::string& name) const;  // throws if absent
  bool has(const std::string& name) const { return quantities.count(name) != 0; }
};

/// Checks every threshold against the quantity of the same name. A threshold
/// naming a quantity the suite did not produce is an input error.
void apply_thresholds(SuiteReport& report, const std::map<std::string, Bound>& thresholds);

/// suite,scenario,quantity,value,lower,upper,pass in %.17g.
std::string report_to_csv(const SuiteReport& report);
std::string report_to_text(const SuiteReport& report);

// ---------------------------------------------------------------------------
// Algebraic suites.

inline constexpr double kIdentityTolerance = 1e-9;

/// Random symplectic matrices with d cycling through 1, 2, 3 and generator
/// norm <= 2, checked against every algebraic identity of the core.
SuiteReport run_identity_suite(std::uint64_t seed, int samples);
std::map<std::string, Bound> identity_suite_thresholds();

/// Critical point, Hessian path, square-root factor, Gaussian reductions and
/// the propagation phase.
SuiteReport run_stationary_phase_suite(std::uint64_t seed, int samples);
std::map<std::string, Bound> stationary_phase_thresholds();

// ---------------------------------------------------------------------------
// Model sweeps over the scenario's k_list. `jobs` bounds the worker pool.

SuiteReport run_kernel_sweep(const Scenario& sc, int jobs = 1);
SuiteReport run_unitarity_sweep(const Scenario& sc, int jobs = 1);
SuiteReport run_trace_sweep(const Scenario& sc, int jobs = 1);
SuiteReport run_schrodinger_check(const Scenario& sc, int jobs = 1);

/// Runs task(i) for i in [0, n) on up to `jobs` threads. Exceptions are
/// rethrown after all workers finish, lowest index first.
void parallel_for(int n, int jobs, const std::function<void(int)>& task);

}  // namespace qflow::harness
