#include "qflow/stationary_phase.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qflow/quadrature.hpp"

namespace qflow {

namespace {
using C = std::complex<double>;
constexpr C kI{0.0, 1.0};
}  // namespace

std::complex<double> phase_psi(const PhasePoint& p) {
  return kI * p.t * (1.0 - std::exp(-kI * p.theta)) +
         kI * p.u * (1.0 - std::exp(kI * (p.theta + p.vartheta))) - p.vartheta;
}

Vector4c phase_gradient(const Vector4c& x) {
  const C t = x(0), th = x(1), u = x(2), vth = x(3);
  const C e_minus = std::exp(-kI * th);
  const C e_sum = std::exp(kI * (th + vth));
  return {kI * (1.0 - e_minus), -t * e_minus + u * e_sum, kI * (1.0 - e_sum), u * e_sum - 1.0};
}

Matrix4c phase_hessian(const Vector4c& x) {
  const C t = x(0), th = x(1), u = x(2), vth = x(3);
  const C e_minus = std::exp(-kI * th);
  const C e_sum = std::exp(kI * (th + vth));
  Matrix4c h;
  h << C(0), -e_minus, C(0), C(0),
       -e_minus, kI * t * e_minus + kI * u * e_sum, e_sum, kI * u * e_sum,
       C(0), e_sum, C(0), e_sum,
       C(0), kI * u * e_sum, e_sum, kI * u * e_sum;
  return h;
}

Matrix4c phase_hessian_fd(const PhasePoint& p, double h) {
  auto second = [&](double step) {
    Matrix4c out;
    const Vector4 x0 = p.vec();
    auto f = [&](const Vector4& x) { return phase_psi(PhasePoint::from(x)); };
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        Vector4 ei = Vector4::Zero(), ej = Vector4::Zero();
        ei(i) = step;
        ej(j) = step;
        out(i, j) = (f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)) /
                    (4.0 * step * step);
      }
    }
    return out;
  };
  const Matrix4c coarse = second(h);
  const Matrix4c fine = second(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

PhasePoint stationary_point(const PhasePoint& start, double tol, int max_iter) {
  const bool in_basin = std::abs(start.theta) < 1.0 && std::abs(start.vartheta) < 1.0 &&
                        start.t > 0.25 && start.t < 4.0 && start.u > 0.25 && start.u < 4.0;
  if (!in_basin) {
    std::ostringstream os;
    os << "stationary_point: start (" << start.t << ", " << start.theta << ", " << start.u << ", "
       << start.vartheta << ") lies outside the Newton basin";
    throw ConvergenceError(os.str());
  }
  Vector4c x = start.vec().cast<C>();
  for (int it = 0; it < max_iter; ++it) {
    const Vector4c g = phase_gradient(x);
    if (g.cwiseAbs().maxCoeff() <= 1e-15) break;
    const Vector4c step = phase_hessian(x).partialPivLu().solve(g);
    x -= step;
    if (!x.allFinite()) break;
    if (step.cwiseAbs().maxCoeff() <= 1e-15) break;
  }
  const double grad = x.allFinite() ? phase_gradient(x).cwiseAbs().maxCoeff() : INFINITY;
  const double imag = x.allFinite() ? x.imag().cwiseAbs().maxCoeff() : INFINITY;
  if (!(grad <= tol) || !(imag <= tol)) {
    std::ostringstream os;
    os << "stationary_point: Newton did not converge in " << max_iter << " iterations (gradient "
       << grad << ", imaginary drift " << imag << ")";
    throw ConvergenceError(os.str());
  }
  return PhasePoint::from(x.real());
}

Matrix4c hessian_path(double s) {
  if (s < 0.0 || s > 1.0) throw InputError("hessian_path: s must lie in [0, 1]");
  const C si = kI * s;
  Matrix4c h;
  h << C(0), C(-1), C(0), C(0),
       C(-1), 2.0 * si, C(1), si,
       C(0), C(1), C(0), C(1),
       C(0), si, C(1), si;
  return h;
}

SqrtFactor sqrt_factor(double k, int steps) {
  if (!(k > 0)) throw InputError("sqrt_factor: k must be positive");
  if (steps < 1) throw InputError("sqrt_factor: need at least one step");
  const C scale = k / (2.0 * std::numbers::pi * kI);

  // At s = 0 the matrix is real symmetric: per-eigenvalue principal roots.
  Eigen::SelfAdjointEigenSolver<Matrix4> es(hessian_path(0.0).real(), Eigen::EigenvaluesOnly);
  C root(1.0);
  for (int i = 0; i < 4; ++i) root *= std::sqrt(scale * es.eigenvalues()(i));

  SqrtFactor out;
  out.steps = steps;
  for (int j = 1; j <= steps; ++j) {
    const double s = double(j) / steps;
    const C det = (scale * hessian_path(s)).determinant();
    C next = std::sqrt(det);
    if (std::abs(next + root) < std::abs(next - root)) next = -next;
    const double jump = std::arg(next / root);
    out.net_phase += jump;
    out.max_step_phase = std::max(out.max_step_phase, std::abs(jump));
    root = next;
  }
  out.value = root;
  return out;
}

ReductionCheck gaussian_reduction_check(const SymplecticMatrix<double>& a, const Vector& u,
                                        const Vector& w, const Vector& s) {
  const Matrix& m = a.matrix();
  if (u.size() != m.rows() || w.size() != m.rows() || s.size() != m.rows()) {
    throw DimensionMismatch("gaussian_reduction_check: vectors must lie in R^{2d}");
  }
  const Eigen::Index n = m.rows();
  const Matrix j = standard_complex_structure(a.dim());
  const Matrix q = Matrix::Identity(n, n) + m.transpose() * m;
  const Eigen::LLT<Matrix> q_llt(q);
  const Matrix a_inv = a.inverse();
  const Vector l = m * u - w;
  const Vector ainv_l = a_inv * l;
  const GammaFG<double> g = gamma_fg(a, u, w);

  auto lhs_at = [&](const Vector& r) {
    const Vector v = r + u;
    return psi2(u, v) + psi2(Vector(m * v), w);
  };
  auto first_rhs = [&](const Vector& r) {
    return psi2(Vector(m * u), w) - kI * omega0(ainv_l, r) - r.dot(m.transpose() * l) -
           0.5 * r.dot(q * r);
  };
  const C second_rhs = g.gamma - kI * s.dot(j * ainv_l) - 0.5 * s.dot(q * s);

  ReductionCheck out;
  const Vector r_t = s - q_llt.solve(Vector(m.transpose() * l));
  const Vector r_a = s - q_llt.solve(Vector(m * l));
  out.first_manipulation =
      std::max(std::abs(lhs_at(r_t) - first_rhs(r_t)), std::abs(lhs_at(r_a) - first_rhs(r_a)));
  out.with_transpose = std::abs(lhs_at(r_t) - second_rhs);
  out.without_transpose = std::abs(lhs_at(r_a) - second_rhs);
  const bool transpose_wins = out.with_transpose <= out.without_transpose;
  out.variant = transpose_wins ? "A^t" : "A";
  out.residual =
      std::max(out.first_manipulation, std::min(out.with_transpose, out.without_transpose));
  if (!(out.residual <= 1e-9 * std::max(1.0, std::abs(lhs_at(r_t))))) {
    std::ostringstream os;
    os << "gaussian_reduction_check: no substitution variant reproduces the reduction (A^t: "
       << out.with_transpose << ", A: " << out.without_transpose << ", first: "
       << out.first_manipulation << ")";
    throw ConvergenceError(os.str());
  }
  return out;
}

LeadingGaussian leading_gaussian_integral(const SymplecticMatrix<double>& a, const Vector& u,
                                          const Vector& w) {
  const Matrix& m = a.matrix();
  const Eigen::Index n = m.rows();
  const Matrix q = Matrix::Identity(n, n) + m.transpose() * m;
  const Eigen::LLT<Matrix> q_llt(q);
  const double sqrt_det = Matrix(q_llt.matrixL()).diagonal().prod();
  const GammaFG<double> g = gamma_fg(a, u, w);
  const double norm = std::pow(2.0 * std::numbers::pi, a.dim()) / sqrt_det;

  LeadingGaussian out;
  out.gaussian = norm * std::exp(-0.5 * g.F.dot(q_llt.solve(g.F)));
  out.via_gamma = std::exp(g.gamma) * out.gaussian;
  out.via_s_form = norm * std::exp(s_form(a, u, w));
  out.route_residual = std::abs(out.via_gamma - out.via_s_form);
  return out;
}

std::complex<double> gaussian_integral_quadrature(const SymplecticMatrix<double>& a,
                                                  const Vector& u, const Vector& w,
                                                  double abs_tol) {
  if (a.dim() != 1) throw DimensionMismatch("gaussian_integral_quadrature: d = 1 only");
  const Matrix& m = a.matrix();
  const Matrix q = Matrix::Identity(2, 2) + m.transpose() * m;
  const Vector b = standard_complex_structure(1) * (a.inverse() * (m * u - w));
  Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
  const double radius = std::sqrt(2.0 * 42.0 / es.eigenvalues().minCoeff());
  AdaptiveOptions opt;
  opt.abs_tol = abs_tol;
  return adaptive_simpson_2d(
      [&](double x, double y) {
        const double quad = 0.5 * (q(0, 0) * x * x + 2.0 * q(0, 1) * x * y + q(1, 1) * y * y);
        return std::exp(C(-quad, -(x * b(0) + y * b(1))));
      },
      -radius, radius, -radius, radius, opt);
}

double prop_phase_value(double tau, double f0, const Vector4& x) {
  const double t = x(0), th = x(1), u = x(2), vth = x(3);
  return u * (tau * f0 + vth + th) - t * th - vth;
}

Vector4 prop_phase_gradient(double tau, double f0, const Vector4& x) {
  const double t = x(0), th = x(1), u = x(2), vth = x(3);
  return {-th, u - t, tau * f0 + vth + th, u - 1.0};
}

PropPhase prop_phase(double tau, double f0) {
  PropPhase out;
  out.point = Vector4(1.0, 0.0, 1.0, -tau * f0);
  out.value = prop_phase_value(tau, f0, out.point);
  out.gradient_norm = prop_phase_gradient(tau, f0, out.point).cwiseAbs().maxCoeff();
  // Psi_tau is bilinear in (u, .) and (t, theta); the Hessian is constant.
  out.hessian << 0, -1, 0, 0,
                 -1, 0, 1, 0,
                 0, 1, 0, 1,
                 0, 0, 1, 0;
  return out;
}

}  // namespace qflow
