#pragma once

// The phase of the composed-kernel oscillatory integral,
//
//   Psi(t, theta, u, vartheta) = i t (1 - e^{-i theta}) + i u (1 - e^{i(theta + vartheta)}) - vartheta,
//
// its critical point and Hessian, the square-root determinant factor, and the
// Gaussian reductions that turn the composition of two Szego kernels into
// the leading term exp(S_A).

#include <complex>
#include <string>

#include "qflow/symplectic.hpp"

namespace qflow {

using Vector4 = Eigen::Vector4d;
using Vector4c = Eigen::Vector4cd;
using Matrix4 = Eigen::Matrix4d;
using Matrix4c = Eigen::Matrix4cd;

/// (t, theta, u, vartheta); t and u are dilation variables in (0, inf).
struct PhasePoint {
  double t = 1, theta = 0, u = 1, vartheta = 0;

  Vector4 vec() const { return {t, theta, u, vartheta}; }
  static PhasePoint from(const Vector4& v) { return {v(0), v(1), v(2), v(3)}; }
};

std::complex<double> phase_psi(const PhasePoint& p);
Vector4c phase_gradient(const Vector4c& x);
Matrix4c phase_hessian(const Vector4c& x);

/// Second differences of phase_psi with one Richardson step.
Matrix4c phase_hessian_fd(const PhasePoint& p, double h = 1e-3);

/// Newton on the complexified gradient. Starts outside
/// |theta|, |vartheta| < 1, t, u in (1/4, 4) are rejected.
PhasePoint stationary_point(const PhasePoint& start, double tol = 1e-10, int max_iter = 50);

/// The homotopy H(s) from the real signature-zero matrix H(0) to the
/// Hessian of Psi at its critical point, H(1).
Matrix4c hessian_path(double s);

struct SqrtFactor {
  std::complex<double> value;   // det(k H(1) / 2 pi i)^{1/2} on the tracked branch
  double net_phase = 0;         // accumulated arg change along the path
  double max_step_phase = 0;    // largest arg jump between consecutive samples
  int steps = 0;
};

/// Follows det(k H(s) / 2 pi i)^{1/2} from s = 0, where per-eigenvalue
/// principal roots fix the branch, to s = 1.
SqrtFactor sqrt_factor(double k, int steps = 200);

struct ReductionCheck {
  double first_manipulation = 0;   // residual of the v = r + u expansion
  double with_transpose = 0;       // second identity with r = s - Q^{-1} A^t L
  double without_transpose = 0;    // second identity with r = s - Q^{-1} A L
  std::string variant;             // "A^t" or "A"
  double residual = 0;             // max(first, selected variant)
};

/// Evaluates both Gaussian reduction identities; throws ConvergenceError when
/// neither substitution variant holds to 1e-9.
ReductionCheck gaussian_reduction_check(const SymplecticMatrix<double>& a, const Vector& u,
                                        const Vector& w, const Vector& s);

struct LeadingGaussian {
  std::complex<double> gaussian;       // closed form of the s-integral
  std::complex<double> via_gamma;      // e^Gamma * gaussian
  std::complex<double> via_s_form;     // (2 pi)^d det(Q)^{-1/2} e^{S_A}
  double route_residual = 0;
};

LeadingGaussian leading_gaussian_integral(const SymplecticMatrix<double>& a, const Vector& u,
                                          const Vector& w);

/// Direct adaptive quadrature of the s-integral, d = 1 only.
std::complex<double> gaussian_integral_quadrature(const SymplecticMatrix<double>& a,
                                                  const Vector& u, const Vector& w,
                                                  double abs_tol = 1e-10);

/// Psi_tau = u (tau f0 + vartheta + theta) - t theta - vartheta.
double prop_phase_value(double tau, double f0, const Vector4& x);
Vector4 prop_phase_gradient(double tau, double f0, const Vector4& x);

struct PropPhase {
  Vector4 point;
  double value = 0;
  Matrix4 hessian;
  double gradient_norm = 0;
};

PropPhase prop_phase(double tau, double f0);

}  // namespace qflow
