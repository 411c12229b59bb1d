#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "qflow/asymptotics.hpp"
#include "qflow/harness/suites.hpp"
#include "qflow/stationary_phase.hpp"

namespace qflow::harness {

namespace {

using C = std::complex<double>;

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Relative to the larger of 1 and the reference size.
double rel(double residual, double reference) { return residual / std::max(1.0, std::abs(reference)); }

void track(std::map<std::string, double>& q, const std::string& name, double value) {
  double& slot = q[name];
  slot = std::max(slot, std::isfinite(value) ? value : INFINITY);
}

std::uint64_t sample_seed(std::uint64_t seed, int i) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i) * 0xBF58476D1CE4E5B9ULL + 1;
}

}  // namespace

SuiteReport run_identity_suite(std::uint64_t seed, int samples) {
  if (samples < 1) throw InputError("identities: samples must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = "identities";
  auto& q = report.quantities;
  for (const char* name :
       {"polar.reconstruction", "polar.orthogonal", "polar.orthogonal_symplectic",
        "polar.positive_symplectic", "nu.three_routes", "nu.lower_bound", "projector.pcal",
        "projector.rcal", "s_form.unitary_invariance", "s_form.closure", "s_form.real_part_sign",
        "gamma.f_routes", "unitary.s_equals_psi2", "unitarization.two_routes",
        "graph.splitting"}) {
    q[name] = 0;
  }
  int d_max = 0;
  for (int i = 0; i < samples; ++i) {
    const int d = 1 + i % 3;
    d_max = std::max(d_max, d);
    const std::uint64_t s = sample_seed(seed, i);
    std::mt19937_64 rng(s ^ 0x5851F42D4C957F2DULL);
    const SymplecticMatrix<double> a = random_symplectic<double>(d, 2.0, s);
    const Matrix& m = a.matrix();
    const Eigen::Index n = m.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix j = standard_complex_structure<double>(d);
    const PolarFactors<double> f = polar_decompose(a);
    const double norm_a = m.norm();

    track(q, "polar.reconstruction", detail::max_abs(f.O * f.P - m) / norm_a);
    track(q, "polar.orthogonal", detail::max_abs(f.O.transpose() * f.O - id));
    track(q, "polar.orthogonal_symplectic", detail::max_abs(f.O.transpose() * j * f.O - j));
    track(q, "polar.positive_symplectic",
          detail::max_abs(f.P.transpose() * j * f.P - j) / f.P.squaredNorm());

    const NuRoutes<double> nr = nu_routes(a, f);
    track(q, "nu.three_routes", nr.max_relative_spread());
    const double floor = std::pow(2.0, d);
    track(q, "nu.lower_bound", std::max(0.0, (floor - nr.from_polar) / floor));

    const ProjectorIdentityResiduals<double> lr = projector_identities(a, f);
    track(q, "projector.pcal", lr.pcal_identity);
    track(q, "projector.rcal", lr.rcal_identity);
    track(q, "unitarization.two_routes", unitarization_modulus_routes(a).relative_spread());

    const Vector u = random_vector(n, rng), w = random_vector(n, rng);
    const C s_val = s_form(a, f, u, w);
    track(q, "s_form.closure", rel(std::abs(assembled_s_form(a, u, w) - s_val), std::abs(s_val)));
    track(q, "s_form.real_part_sign", std::max(0.0, s_val.real()));
    track(q, "gamma.f_routes", rel(gamma_fg(a, u, w).f_route_residual, (m * u - w).norm()));

    // S_{R A S^t}(S u, R w) = S_A(u, w) for unitary R, S.
    const SymplecticMatrix<double> r = random_unitary<double>(d, s + 1);
    const SymplecticMatrix<double> t = random_unitary<double>(d, s + 2);
    const SymplecticMatrix<double> moved =
        SymplecticMatrix<double>::from_matrix(r.matrix() * m * t.matrix().transpose(), 1e-8);
    const C s_moved = s_form(moved, Vector(t.matrix() * u), Vector(r.matrix() * w));
    track(q, "s_form.unitary_invariance", rel(std::abs(s_moved - s_val), std::abs(s_val)));

    const C s_unitary = s_form(r, u, w);
    const C expected = psi2(Vector(r.matrix() * u), w);
    track(q, "unitary.s_equals_psi2", rel(std::abs(s_unitary - expected), std::abs(expected)));

    const GraphSplitting<double> g = graph_splitting(a);
    const Vector z = stack_pair(u, w);
    const double split = (g.tangent_part(z) + g.normal_part(z) - z).norm() +
                         detail::max_abs(g.tangent.transpose() * g.normal);
    track(q, "graph.splitting", split / z.norm());
  }
  q["samples"] = samples;
  q["max_dimension"] = d_max;
  report.seconds = elapsed_since(t0);
  return report;
}

std::map<std::string, Bound> identity_suite_thresholds() {
  std::map<std::string, Bound> out;
  for (const char* name :
       {"polar.reconstruction", "polar.orthogonal", "polar.orthogonal_symplectic",
        "polar.positive_symplectic", "nu.three_routes", "nu.lower_bound", "projector.pcal",
        "projector.rcal", "s_form.unitary_invariance", "s_form.closure", "s_form.real_part_sign",
        "gamma.f_routes", "unitary.s_equals_psi2", "unitarization.two_routes",
        "graph.splitting"}) {
    out[name] = Bound{-INFINITY, kIdentityTolerance};
  }
  return out;
}

SuiteReport run_stationary_phase_suite(std::uint64_t seed, int samples) {
  if (samples < 1) throw InputError("stationary-phase: samples must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = "stationary-phase";
  auto& q = report.quantities;

  const PhasePoint critical{1.0, 0.0, 1.0, 0.0};
  const Vector4c xc = critical.vec().cast<C>();
  q["critical.gradient"] = phase_gradient(xc).cwiseAbs().maxCoeff();
  const Matrix4c closed_form = hessian_path(1.0);
  q["hessian.analytic_vs_closed_form"] = (phase_hessian(xc) - closed_form).cwiseAbs().maxCoeff();
  q["hessian.fd_vs_closed_form"] = (phase_hessian_fd(critical) - closed_form).cwiseAbs().maxCoeff();

  const PhasePoint found = stationary_point({1.2, 0.1, 0.9, -0.1});
  q["newton.distance"] = (found.vec() - critical.vec()).cwiseAbs().maxCoeff();

  double det_err = 0;
  for (int i = 0; i <= 10; ++i) {
    det_err = std::max(det_err, std::abs(hessian_path(i / 10.0).determinant() - C(1.0)));
  }
  q["hessian_path.det_minus_one"] = det_err;
  Eigen::SelfAdjointEigenSolver<Matrix4> h0(hessian_path(0.0).real(), Eigen::EigenvaluesOnly);
  q["hessian_path.signature_at_0"] =
      static_cast<double>((h0.eigenvalues().array() > 0).count() - (h0.eigenvalues().array() < 0).count());

  double sqrt_err = 0, max_jump = 0;
  for (double k : {1.0, 2.0 * std::numbers::pi, 17.0, 256.0}) {
    const SqrtFactor sf = sqrt_factor(k);
    const double target = std::pow(k / (2.0 * std::numbers::pi), 2);
    sqrt_err = std::max(sqrt_err, std::abs(sf.value - target) / target);
    max_jump = std::max(max_jump, sf.max_step_phase);
  }
  q["sqrt_factor.relative_error"] = sqrt_err;
  q["sqrt_factor.max_step_phase"] = max_jump;

  double reduction = 0, routes = 0, transpose_count = 0;
  for (int i = 0; i < samples; ++i) {
    const int d = 1 + i % 2;
    const std::uint64_t s = sample_seed(seed, i) ^ 0xD1B54A32D192ED03ULL;
    std::mt19937_64 rng(s);
    const SymplecticMatrix<double> a = random_symplectic<double>(d, 2.0, s);
    const Eigen::Index n = 2 * d;
    const Vector u = random_vector(n, rng), w = random_vector(n, rng), sv = random_vector(n, rng);
    const ReductionCheck rc = gaussian_reduction_check(a, u, w, sv);
    reduction = std::max(reduction, rc.residual);
    if (rc.variant == "A^t") transpose_count += 1;
    routes = std::max(routes, leading_gaussian_integral(a, u, w).route_residual);
  }
  q["reduction.max_residual"] = reduction;
  q["reduction.transpose_fraction"] = transpose_count / samples;
  q["leading_gaussian.route_residual"] = routes;

  double quad = 0;
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t s = sample_seed(seed, 100000 + i);
    std::mt19937_64 rng(s);
    const SymplecticMatrix<double> a = random_symplectic<double>(1, 1.5, s);
    const Vector u = 0.7 * random_vector(2, rng), w = 0.7 * random_vector(2, rng);
    const C closed = leading_gaussian_integral(a, u, w).gaussian;
    const C numeric = gaussian_integral_quadrature(a, u, w);
    quad = std::max(quad, std::abs(numeric - closed) / std::abs(closed));
  }
  q["quadrature.relative_error"] = quad;

  double prop_grad = 0, prop_value = 0, prop_hess = 0;
  for (double f0 : {0.0, 1.0, -2.5}) {
    const double tau = 0.3;
    const PropPhase pp = prop_phase(tau, f0);
    prop_grad = std::max(prop_grad, pp.gradient_norm);
    prop_value = std::max(prop_value, std::abs(pp.value - tau * f0));
    Matrix4 fd;
    constexpr double h = 1e-4;
    for (int c = 0; c < 4; ++c) {
      Vector4 e = Vector4::Zero();
      e(c) = h;
      fd.col(c) = (prop_phase_gradient(tau, f0, pp.point + e) -
                   prop_phase_gradient(tau, f0, pp.point - e)) / (2 * h);
    }
    prop_hess = std::max(prop_hess, (fd - pp.hessian).cwiseAbs().maxCoeff());
  }
  q["prop_phase.gradient"] = prop_grad;
  q["prop_phase.value_minus_tau_f0"] = prop_value;
  q["prop_phase.hessian_fd"] = prop_hess;
  q["samples"] = samples;
  report.seconds = elapsed_since(t0);
  return report;
}

std::map<std::string, Bound> stationary_phase_thresholds() {
  const double inf = INFINITY;
  return {
      {"critical.gradient", {-inf, 1e-12}},
      {"hessian.analytic_vs_closed_form", {-inf, 1e-12}},
      {"hessian.fd_vs_closed_form", {-inf, 1e-8}},
      {"newton.distance", {-inf, 1e-10}},
      {"hessian_path.det_minus_one", {-inf, 1e-12}},
      {"hessian_path.signature_at_0", {0, 0}},
      {"sqrt_factor.relative_error", {-inf, 1e-12}},
      {"sqrt_factor.max_step_phase", {-inf, 0.5}},
      {"reduction.max_residual", {-inf, 1e-9}},
      {"reduction.transpose_fraction", {1, 1}},
      {"leading_gaussian.route_residual", {-inf, 1e-9}},
      {"quadrature.relative_error", {-inf, 1e-6}},
      {"prop_phase.gradient", {-inf, 1e-12}},
      {"prop_phase.value_minus_tau_f0", {-inf, 1e-12}},
      {"prop_phase.hessian_fd", {-inf, 1e-8}},
  };
}

}  // namespace qflow::harness
