#include <array>
#include <chrono>
#include <limits>
#include <cmath>
#include <optional>

#include "qflow/asymptotics.hpp"
#include "qflow/harness/suites.hpp"

namespace qflow::harness {

namespace {

using C = std::complex<double>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const C kMissing{kNaN, kNaN};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string at_k(const std::string& name, int k) { return name + "@" + std::to_string(k); }

// Log-log fit that reports NaN instead of throwing when too few points survive.
LineFit safe_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<bool>& gated = {}) {
  int usable = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((gated.empty() || !gated[i]) && y[i] > 0 && std::isfinite(y[i])) ++usable;
  }
  if (usable < 2) {
    LineFit f;
    f.slope = f.intercept = f.r_squared = kNaN;
    f.used = usable;
    f.excluded = static_cast<int>(y.size()) - usable;
    return f;
  }
  return fit_loglog(x, y, gated);
}

void store_fit(SuiteReport& r, const std::string& suffix, const LineFit& f) {
  r.quantities["slope." + suffix] = f.slope;
  r.quantities["r2." + suffix] = f.r_squared;
  r.quantities["excluded." + suffix] = f.excluded;
}

std::vector<double> as_double(const std::vector<int>& ks) { return {ks.begin(), ks.end()}; }

SpacePtr build_space(const Scenario& sc, int k) {
  return ModelSpace::build(sc.d, k, sc.truncation.degree(k));
}

C lift_phase(const Scenario& sc, int k) { return std::polar(1.0, k * sc.tau * sc.energy_offset); }

// Modulus multiplying the unit symbol for the requested mode; corrected adds f1 / k.
double mode_value(RhoMode mode, double modulus, double f1, int k) {
  switch (mode) {
    case RhoMode::One: return 1.0;
    case RhoMode::Unitarized: return modulus;
    case RhoMode::Corrected: return modulus + f1 / k;
  }
  return 1.0;
}

// Per-k data for sweeps built on W = T_symbol V with unit symbol modulus.
struct UnitModel {
  int k = 0;
  std::optional<TruncatedOperator> op;
  double diagonal = 0;     // ||W^* e_0||^2 - 1
  std::string failure;     // gate message when the model could not be built
};

UnitModel build_unit_model(const Scenario& sc, const QuadraticFlow& flow, int k) {
  UnitModel m;
  m.k = k;
  try {
    const SpacePtr space = build_space(sc, k);
    m.op = quantized_flow(space, flow, sc.symbol(1.0));
    m.diagonal = diagonal_defect(*m.op);
  } catch (const GateFailure& e) {
    m.failure = e.what();
  }
  return m;
}

std::vector<UnitModel> build_unit_models(const Scenario& sc, const QuadraticFlow& flow, int jobs) {
  std::vector<UnitModel> out(sc.k_list.size());
  parallel_for(static_cast<int>(out.size()), jobs, [&](int i) {
    out[static_cast<std::size_t>(i)] = build_unit_model(sc, flow, sc.k_list[static_cast<std::size_t>(i)]);
  });
  return out;
}

// f1 from the unitarized diagonal defects; NaN with a note when the fit is rejected.
SymbolCorrectionFit correction_fit(const std::vector<int>& ks, const std::vector<double>& diag,
                                   double modulus, double nu_value, int d,
                                   std::vector<std::string>& notes) {
  try {
    return fit_symbol_correction(ks, diag, modulus, nu_value, d);
  } catch (const Error& e) {
    notes.push_back(std::string("symbol correction fit rejected: ") + e.what());
    SymbolCorrectionFit f;
    f.f1 = f.c1 = f.c2 = f.r_squared = kNaN;
    return f;
  }
}

struct CorrectionSummary {
  SymbolCorrectionFit fit;
  double window_change = kNaN;
};

CorrectionSummary correction_summary(const Scenario& sc, const std::vector<UnitModel>& models,
                                     double modulus, double nu_value,
                                     std::vector<std::string>& notes) {
  std::vector<int> ks;
  std::vector<double> diag;
  for (const UnitModel& m : models) {
    if (!m.op) continue;
    ks.push_back(m.k);
    diag.push_back(modulus * modulus * (m.diagonal + 1.0) - 1.0);
  }
  CorrectionSummary out;
  if (ks.size() < 3) {
    notes.push_back("symbol correction needs at least three ungated k values");
    out.fit.f1 = out.fit.r_squared = kNaN;
    return out;
  }
  out.fit = correction_fit(ks, diag, modulus, nu_value, sc.d, notes);
  if (ks.size() >= 4 && std::isfinite(out.fit.f1)) {
    const std::vector<int> ka(ks.begin(), ks.end() - 1), kb(ks.begin() + 1, ks.end());
    const std::vector<double> da(diag.begin(), diag.end() - 1), db(diag.begin() + 1, diag.end());
    const SymbolCorrectionFit fa = correction_fit(ka, da, modulus, nu_value, sc.d, notes);
    const SymbolCorrectionFit fb = correction_fit(kb, db, modulus, nu_value, sc.d, notes);
    out.window_change = out.fit.f1 == 0.0 ? std::abs(fa.f1 - fb.f1)
                                          : std::abs(fa.f1 - fb.f1) / std::abs(out.fit.f1);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

SuiteReport run_kernel_sweep(const Scenario& sc, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = "kernel-sweep";
  report.scenario = sc.id;
  if (sc.offsets.empty() && sc.decay_offset.size() == 0) {
    throw InputError("kernel-sweep: scenario has neither offsets nor a decay offset");
  }
  const QuadraticFlow flow = sc.flow();
  const SymplecticMatrix<double>& a = flow.differential;
  const double modulus = unitarization_modulus(a);
  const double nu_value = nu(a);
  const std::vector<UnitModel> models = build_unit_models(sc, flow, jobs);

  double f1 = 0;
  if (sc.rho_mode == RhoMode::Corrected) {
    f1 = correction_summary(sc, models, modulus, nu_value, report.notes).fit.f1;
    report.quantities["f1"] = f1;
  }

  struct Sample {
    C value = kMissing;
    C predicted = kMissing;
    std::string gate = "ok";
  };
  const std::size_t nk = sc.k_list.size();
  std::vector<std::vector<Sample>> per_offset(sc.offsets.size(), std::vector<Sample>(nk));
  std::vector<Sample> decay(nk);

  parallel_for(static_cast<int>(nk), jobs, [&](int i) {
    const UnitModel& m = models[static_cast<std::size_t>(i)];
    const int k = m.k;
    const double rho = mode_value(sc.rho_mode, modulus, f1, k);
    auto fill = [&](Sample& s, const Vector& u, const Vector& w) {
      s.predicted = lift_phase(sc, k) * leading_kernel(a, SymbolValue<double>{rho}, k, u, w).value;
      if (!m.op) {
        s.gate = "gate";
        return;
      }
      const KernelSample ks = kernel_value(*m.op, u, w);
      s.value = rho * ks.value;
      if (ks.flagged) s.gate = "tail";
    };
    for (std::size_t o = 0; o < sc.offsets.size(); ++o) {
      fill(per_offset[o][static_cast<std::size_t>(i)], sc.offsets[o].u, sc.offsets[o].w);
    }
    if (sc.decay_offset.size() > 0) {
      const Vector origin = Vector::Zero(2 * sc.d);
      fill(decay[static_cast<std::size_t>(i)], origin, std::sqrt(double(k)) * sc.decay_offset);
    }
  });

  for (const UnitModel& m : models) {
    if (!m.failure.empty()) report.notes.push_back("k=" + std::to_string(m.k) + ": " + m.failure);
  }
  const std::vector<double> kd = as_double(sc.k_list);
  for (std::size_t o = 0; o < sc.offsets.size(); ++o) {
    const std::string& tag = sc.offsets[o].tag;
    std::vector<double> err(nk);
    std::vector<bool> gated(nk);
    for (std::size_t i = 0; i < nk; ++i) {
      const Sample& s = per_offset[o][i];
      report.records.push_back(make_record(sc.id, sc.k_list[i], "kernel." + tag, s.value,
                                           s.predicted, s.gate));
      err[i] = report.records.back().rel_err;
      gated[i] = s.gate != "ok";
      report.quantities[at_k("error." + tag, sc.k_list[i])] = err[i];
    }
    store_fit(report, tag, safe_loglog(kd, err, gated));
  }
  if (sc.decay_offset.size() > 0) {
    std::vector<double> x, y;
    int excluded = 0;
    for (std::size_t i = 0; i < nk; ++i) {
      const Sample& s = decay[i];
      report.records.push_back(make_record(sc.id, sc.k_list[i], "decay", s.value, s.predicted, s.gate));
      const double v = std::log(std::abs(s.value)) - sc.d * std::log(double(sc.k_list[i]));
      report.quantities[at_k("decay.log_scaled", sc.k_list[i])] = v;
      if (s.gate != "ok" || !std::isfinite(v)) {
        ++excluded;
        continue;
      }
      x.push_back(sc.k_list[i]);
      y.push_back(v);
    }
    double slope = kNaN, r2 = kNaN;
    if (x.size() >= 2) {
      const LineFit f = fit_line(x, y);
      slope = f.slope;
      r2 = f.r_squared;
    }
    report.quantities["decay.slope"] = slope;
    report.quantities["decay.r2"] = r2;
    report.quantities["decay.excluded"] = excluded;
  }
  report.quantities["rho"] = mode_value(sc.rho_mode, modulus, 0.0, 1);
  sort_records(report.records);
  report.seconds = elapsed_since(t0);
  return report;
}

// ---------------------------------------------------------------------------

SuiteReport run_unitarity_sweep(const Scenario& sc, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = "unitarity-sweep";
  report.scenario = sc.id;
  const QuadraticFlow flow = sc.flow();
  const SymplecticMatrix<double>& a = flow.differential;
  const double modulus = unitarization_modulus(a);
  const double nu_value = nu(a);
  const std::vector<UnitModel> models = build_unit_models(sc, flow, jobs);
  const CorrectionSummary corr = correction_summary(sc, models, modulus, nu_value, report.notes);
  const double f1 = corr.fit.f1;

  const RhoMode modes[] = {RhoMode::One, RhoMode::Unitarized, RhoMode::Corrected};
  const std::size_t nk = sc.k_list.size();
  std::vector<std::array<UnitarityDefect, 3>> defects(nk);
  parallel_for(static_cast<int>(nk), jobs, [&](int i) {
    const UnitModel& m = models[static_cast<std::size_t>(i)];
    if (!m.op) return;
    for (int j = 0; j < 3; ++j) {
      const double rho = mode_value(modes[j], modulus, f1, m.k);
      if (!std::isfinite(rho)) continue;
      defects[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          unitarity_defect(apply_symbol(*m.op, C(rho)));
    }
  });

  const std::vector<double> kd = as_double(sc.k_list);
  int min_reliable = std::numeric_limits<int>::max(), max_band = 0;
  for (int j = 0; j < 3; ++j) {
    const std::string mode = to_string(modes[j]);
    std::vector<double> values(nk);
    std::vector<bool> gated(nk);
    double max_defect = 0;
    for (std::size_t i = 0; i < nk; ++i) {
      const UnitModel& m = models[i];
      const bool usable = m.op && std::isfinite(mode_value(modes[j], modulus, f1, m.k));
      const UnitarityDefect& ud = defects[i][static_cast<std::size_t>(j)];
      values[i] = usable ? ud.defect : kNaN;
      gated[i] = !usable;
      report.records.push_back(make_record(sc.id, m.k, "defect." + mode, C(values[i]), C(0.0),
                                           usable ? "ok" : "gate"));
      report.quantities[at_k("defect." + mode, m.k)] = values[i];
      if (usable) {
        max_defect = std::max(max_defect, ud.defect);
        min_reliable = std::min(min_reliable, ud.reliable_degree);
        max_band = std::max(max_band, ud.excluded_band);
      }
    }
    store_fit(report, mode, safe_loglog(kd, values, gated));
    report.quantities["max." + mode] = max_defect;
    report.quantities["last." + mode] = values.back();
  }
  for (const UnitModel& m : models) {
    if (!m.op) {
      report.notes.push_back("k=" + std::to_string(m.k) + ": " + m.failure);
      continue;
    }
    const double diag = modulus * modulus * (m.diagonal + 1.0);
    report.records.push_back(make_record(sc.id, m.k, "diagonal.unitarized", C(diag), C(1.0)));
  }
  report.quantities["modulus"] = modulus;
  report.quantities["f1"] = f1;
  report.quantities["f1.r2"] = corr.fit.r_squared;
  report.quantities["f1.window_change"] = corr.window_change;
  report.quantities["slope_gain"] =
      report.quantities["slope.unitarized"] - report.quantities["slope.corrected"];
  report.quantities["slope"] = report.quantities["slope." + to_string(sc.rho_mode)];
  report.quantities["reliable_degree.min"] =
      min_reliable == std::numeric_limits<int>::max() ? kNaN : min_reliable;
  report.quantities["excluded_band.max"] = max_band;
  sort_records(report.records);
  report.seconds = elapsed_since(t0);
  return report;
}

// ---------------------------------------------------------------------------

SuiteReport run_trace_sweep(const Scenario& sc, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = "trace-sweep";
  report.scenario = sc.id;
  const QuadraticFlow flow = sc.flow();
  const SymplecticMatrix<double>& a = flow.differential;
  const double modulus = unitarization_modulus(a);
  if (sc.rho_mode == RhoMode::Corrected) {
    throw InputError("trace-sweep: rho_mode 'corrected' is not supported; use one or unitarized");
  }
  const double rho = mode_value(sc.rho_mode, modulus, 0.0, 1);
  // Throws DegenerateFixedPoint when the origin is not an isolated fixed point.
  const TracePrediction<double> leading = trace_leading(a, SymbolValue<double>{rho});

  // Rotations in d = 1 with a constant symbol have geometric-series closed forms.
  const Matrix& m = a.matrix();
  const bool rotation = sc.d == 1 && sc.phase_gradient == 0.0 &&
                        detail::max_abs(m.transpose() * m - Matrix::Identity(2, 2)) < 1e-12;
  const double angle = rotation ? std::atan2(m(1, 0), m(0, 0)) : 0.0;

  struct TracePoint {
    C localized = kMissing, plain = kMissing;
    double top_weight = 0;
    int truncation = 0;
    std::string gate = "ok";
    std::string failure;
  };
  const std::size_t nk = sc.k_list.size();
  std::vector<TracePoint> points(nk);
  parallel_for(static_cast<int>(nk), jobs, [&](int i) {
    TracePoint& p = points[static_cast<std::size_t>(i)];
    const int k = sc.k_list[static_cast<std::size_t>(i)];
    try {
      const SpacePtr space = build_space(sc, k);
      const TruncatedOperator op = quantized_flow(space, flow, sc.symbol(rho));
      const LocalizedTrace lt = localized_trace(op, sc.trace_radius);
      p.localized = lt.value;
      p.top_weight = lt.top_weight;
      p.plain = model_trace(op);
      p.truncation = space->truncation();
    } catch (const GateFailure& e) {
      p.gate = "gate";
      p.failure = "k=" + std::to_string(k) + ": " + e.what();
    }
  });

  const std::vector<double> kd = as_double(sc.k_list);
  std::vector<double> err(nk);
  std::vector<bool> gated(nk);
  double closed_max = 0, plain_max = 0;
  for (std::size_t i = 0; i < nk; ++i) {
    const int k = sc.k_list[i];
    const TracePoint& p = points[i];
    if (!p.failure.empty()) report.notes.push_back(p.failure);
    const C predicted = lift_phase(sc, k) * leading.value;
    report.records.push_back(make_record(sc.id, k, "trace.localized", p.localized, predicted, p.gate));
    err[i] = report.records.back().rel_err;
    gated[i] = p.gate != "ok";
    report.quantities[at_k("error", k)] = err[i];
    if (rotation && p.gate == "ok") {
      const C scale = rho * lift_phase(sc, k);
      const C closed = scale * rotation_localized_trace(angle, k, sc.trace_radius);
      const C plain = scale * rotation_truncated_trace(angle, p.truncation);
      report.records.push_back(make_record(sc.id, k, "trace.closed_form", p.localized, closed));
      report.records.push_back(make_record(sc.id, k, "trace.plain", p.plain, plain));
      closed_max = std::max(closed_max, relative_error(p.localized, closed));
      plain_max = std::max(plain_max, relative_error(p.plain, plain));
    }
  }
  bool monotone = true;
  double previous = INFINITY;
  for (std::size_t i = 0; i < nk; ++i) {
    if (gated[i]) continue;
    if (!(err[i] < previous)) monotone = false;
    previous = err[i];
  }
  store_fit(report, "error", safe_loglog(kd, err, gated));
  report.quantities["slope"] = report.quantities["slope.error"];
  report.quantities["monotone"] = monotone ? 1.0 : 0.0;
  report.quantities["formula.re"] = leading.value.real();
  report.quantities["formula.im"] = leading.value.imag();
  if (rotation) {
    report.quantities["closed_form.max_rel_error"] = closed_max;
    report.quantities["plain.max_rel_error"] = plain_max;
  }
  sort_records(report.records);
  report.seconds = elapsed_since(t0);
  return report;
}

// ---------------------------------------------------------------------------

SuiteReport run_schrodinger_check(const Scenario& sc, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = "schrodinger-check";
  report.scenario = sc.id;
  if (sc.offsets.empty()) throw InputError("schrodinger-check: scenario has no offsets");
  const QuadraticFlow flow = sc.flow();
  const double modulus = unitarization_modulus(flow.differential);
  const double rho = mode_value(sc.rho_mode == RhoMode::One ? RhoMode::One : RhoMode::Unitarized,
                                modulus, 0.0, 1);
  const std::size_t nk = sc.k_list.size(), no = sc.offsets.size();
  std::vector<std::vector<SchrodingerResidual>> results(no, std::vector<SchrodingerResidual>(nk));
  std::vector<std::vector<std::string>> gates(no, std::vector<std::string>(nk, "ok"));
  std::vector<std::string> failures(nk);
  parallel_for(static_cast<int>(nk), jobs, [&](int i) {
    const std::size_t ki = static_cast<std::size_t>(i);
    SpacePtr space;
    try {
      space = build_space(sc, sc.k_list[ki]);
    } catch (const GateFailure& e) {
      failures[ki] = e.what();
      for (std::size_t o = 0; o < no; ++o) gates[o][ki] = "gate";
      return;
    }
    for (std::size_t o = 0; o < no; ++o) {
      try {
        results[o][ki] = schrodinger_residual(space, flow, sc.symbol(rho), sc.offsets[o].u,
                                              sc.offsets[o].w);
      } catch (const ConvergenceError& e) {
        gates[o][ki] = "step";
        failures[ki] = e.what();
      } catch (const GateFailure& e) {
        gates[o][ki] = "gate";
        failures[ki] = e.what();
      }
    }
  });
  for (std::size_t i = 0; i < nk; ++i) {
    if (!failures[i].empty()) report.notes.push_back("k=" + std::to_string(sc.k_list[i]) + ": " + failures[i]);
  }
  const std::vector<double> kd = as_double(sc.k_list);
  double max_change = 0;
  for (std::size_t o = 0; o < no; ++o) {
    const std::string& tag = sc.offsets[o].tag;
    std::vector<double> values(nk);
    std::vector<bool> gated(nk);
    for (std::size_t i = 0; i < nk; ++i) {
      const bool ok = gates[o][i] == "ok";
      values[i] = ok ? results[o][i].residual : kNaN;
      gated[i] = !ok;
      if (ok) max_change = std::max(max_change, results[o][i].halving_change);
      report.records.push_back(make_record(sc.id, sc.k_list[i], "schrodinger." + tag, C(values[i]),
                                           C(0.0), gates[o][i]));
      report.quantities[at_k("residual." + tag, sc.k_list[i])] = values[i];
    }
    store_fit(report, tag, safe_loglog(kd, values, gated));
  }
  report.quantities["max_halving_change"] = max_change;
  sort_records(report.records);
  report.seconds = elapsed_since(t0);
  return report;
}

}  // namespace qflow::harness
