#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "qflow/harness/suites.hpp"

namespace qflow::harness {

bool SuiteReport::passed() const {
  for (const Check& c : checks) {
    if (!c.passed()) return false;
  }
  return true;
}

double SuiteReport::quantity(const std::string& name) const {
  const auto it = quantities.find(name);
  if (it == quantities.end()) throw InputError("suite " + suite + " produced no quantity '" + name + "'");
  return it->second;
}

void apply_thresholds(SuiteReport& report, const std::map<std::string, Bound>& thresholds) {
  report.checks.clear();
  for (const auto& [name, bound] : thresholds) {
    const auto it = report.quantities.find(name);
    if (it == report.quantities.end()) {
      throw InputError("threshold '" + name + "' names no quantity of suite " + report.suite);
    }
    report.checks.push_back({name, it->second, bound});
  }
}

namespace {

std::string bound_text(double v) { return std::isinf(v) ? std::string("") : format_double(v); }

}  // namespace

std::string report_to_csv(const SuiteReport& report) {
  std::ostringstream os;
  os << "suite,scenario,quantity,value,lower,upper,pass\n";
  std::map<std::string, const Check*> checked;
  for (const Check& c : report.checks) checked[c.name] = &c;
  for (const auto& [name, value] : report.quantities) {
    os << report.suite << ',' << report.scenario << ',' << name << ',' << format_double(value);
    const auto it = checked.find(name);
    if (it != checked.end()) {
      os << ',' << bound_text(it->second->bound.lower) << ',' << bound_text(it->second->bound.upper)
         << ',' << (it->second->passed() ? "yes" : "no");
    } else {
      os << ",,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string report_to_text(const SuiteReport& report) {
  std::ostringstream os;
  os << "[" << report.suite << (report.scenario.empty() ? "" : " / " + report.scenario) << "]\n";
  for (const std::string& n : report.notes) os << "  note: " << n << '\n';
  std::map<std::string, const Check*> checked;
  for (const Check& c : report.checks) checked[c.name] = &c;
  for (const auto& [name, value] : report.quantities) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    os << "  " << name << " = " << buf;
    const auto it = checked.find(name);
    if (it != checked.end()) {
      os << "  [" << (std::isinf(it->second->bound.lower) ? "-inf" : format_double(it->second->bound.lower))
         << ", " << (std::isinf(it->second->bound.upper) ? "inf" : format_double(it->second->bound.upper))
         << "] " << (it->second->passed() ? "ok" : "FAILED");
    }
    os << '\n';
  }
  os << "  result: " << (report.passed() ? "pass" : "FAIL") << '\n';
  return os.str();
}

void parallel_for(int n, int jobs, const std::function<void(int)>& task) {
  if (n <= 0) return;
  jobs = std::max(1, std::min(jobs, n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qflow::harness
