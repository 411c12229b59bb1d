#pragma once

// Closed-form leading-order predictions for the kernel of a quantized linear
// flow near a fixed point: the Gaussian leading term, its decay envelope off
// the graph, the modulus of the symbol that makes the operator unitary to
// leading order, the diagonal of U U*, and the fixed-point trace term.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <sstream>

#include "qflow/symplectic.hpp"

namespace qflow {

/// Value of the zeroth-order Toeplitz symbol at the base point.
template <typename Scalar = double>
struct SymbolValue {
  std::complex<Scalar> rho{1};

  Scalar modulus() const { return std::abs(rho); }
  Scalar phase() const { return std::arg(rho); }
};

template <typename Scalar = double>
struct LeadingKernelPrediction {
  int k = 1;
  std::complex<Scalar> value;
  std::complex<Scalar> exponent;   // S_A(u, w)
  std::complex<Scalar> prefactor;  // rho (k/pi)^d 2^d / nu
};

/// rho (k/pi)^d (2^d / nu(A)) exp(S_A(u, w)).
template <typename Scalar, typename DerivedU, typename DerivedW>
LeadingKernelPrediction<Scalar> leading_kernel(const SymplecticMatrix<Scalar>& a,
                                               const SymbolValue<Scalar>& rho, int k,
                                               const Eigen::MatrixBase<DerivedU>& u,
                                               const Eigen::MatrixBase<DerivedW>& w) {
  if (k < 1) throw InputError("leading_kernel: k must be >= 1");
  const PolarFactors<Scalar> f = polar_decompose(a);
  const int d = a.dim();
  LeadingKernelPrediction<Scalar> out;
  out.k = k;
  out.exponent = s_form(a, f, u, w);
  out.prefactor = rho.rho * std::pow(Scalar(k) / std::numbers::pi_v<Scalar>, d) *
                  (std::pow(Scalar(2), d) / nu(a, f));
  out.value = out.prefactor * std::exp(out.exponent);
  return out;
}

template <typename Scalar = double>
struct UnitarizationModulus {
  Scalar from_nu;           // 2^{-d/2} sqrt(nu)
  Scalar from_multiplier;   // 2^{-d/2} det(A J0 + J0 A)^{1/4}

  Scalar value() const { return from_nu; }
  Scalar relative_spread() const { return std::abs(from_nu - from_multiplier) / from_nu; }
};

template <typename Scalar>
UnitarizationModulus<Scalar> unitarization_modulus_routes(const SymplecticMatrix<Scalar>& a) {
  const PolarFactors<Scalar> f = polar_decompose(a);
  const NuRoutes<Scalar> r = nu_routes(a, f);
  const Scalar scale = std::pow(Scalar(2), -Scalar(a.dim()) / Scalar(2));
  return {scale * std::sqrt(r.from_polar), scale * std::sqrt(r.from_anticommutator)};
}

/// |rho| for which U U* matches the Szego diagonal at leading order.
template <typename Scalar>
Scalar unitarization_modulus(const SymplecticMatrix<Scalar>& a) {
  return unitarization_modulus_routes(a).value();
}

/// exp(Re S_A(u, w)): attenuation of |kernel| relative to its on-graph value.
template <typename Scalar, typename DerivedU, typename DerivedW>
Scalar decay_envelope(const SymplecticMatrix<Scalar>& a, int k,
                      const Eigen::MatrixBase<DerivedU>& u,
                      const Eigen::MatrixBase<DerivedW>& w) {
  (void)k;  // the rescaled envelope is level independent
  return std::exp(std::real(s_form(a, u, w)));
}

/// (k/pi)^d |rho|^2 2^d / sqrt(det Q_A): leading diagonal of U U*.
template <typename Scalar>
Scalar diagonal_composition(const SymplecticMatrix<Scalar>& a, const SymbolValue<Scalar>& rho,
                            int k) {
  const int d = a.dim();
  const Scalar n = nu(a);
  return std::pow(Scalar(k) / std::numbers::pi_v<Scalar>, d) * std::norm(rho.rho) *
         std::pow(Scalar(2), d) / n;
}

/// Closed form of the integral of exp(-2 v^t Q^{-1} v) over R^{2d}.
template <typename Derived>
typename Derived::Scalar gaussian_diag_integral(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  if (q.rows() != q.cols() || q.rows() % 2 != 0) {
    throw DimensionMismatch("gaussian_diag_integral: Q must be 2d x 2d");
  }
  const MatrixX<Scalar> qs = q;
  if (detail::max_abs(MatrixX<Scalar>(qs - qs.transpose())) > Scalar(1e-12) * (1 + detail::max_abs(qs))) {
    throw InputError("gaussian_diag_integral: Q is not symmetric");
  }
  const Eigen::LLT<MatrixX<Scalar>> llt(qs);
  if (llt.info() != Eigen::Success) {
    throw InputError("gaussian_diag_integral: Q is not positive definite");
  }
  const int d = static_cast<int>(qs.rows() / 2);
  const Scalar sqrt_det = llt.matrixL().toDenseMatrix().diagonal().prod();
  return std::pow(Scalar(2), -2 * d) * std::pow(Scalar(2) * std::numbers::pi_v<Scalar>, d) *
         sqrt_det;
}

// ---------------------------------------------------------------------------
// Fixed-point trace term.

template <typename Scalar = double>
struct FixedPointQuadratic {
  MatrixX<std::complex<Scalar>> by_polarization;  // from values of S_A(u, u)
  MatrixX<std::complex<Scalar>> by_coefficients;  // symmetrized closed-form coefficients
  Scalar symmetrization_residual = 0;
};

/// S_i with S_A(u, u) = -1/2 u^t S_i u, computed two ways.
template <typename Scalar>
FixedPointQuadratic<Scalar> fixed_point_quadratic(const SymplecticMatrix<Scalar>& a,
                                                  const PolarFactors<Scalar>& f) {
  using C = std::complex<Scalar>;
  const int n = 2 * a.dim();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  FixedPointQuadratic<Scalar> out;

  // Polarization: S(e_i + e_j) - S(e_i) - S(e_j) = 2 M_ij for symmetric M.
  MatrixX<C> m(n, n);
  auto s_diag = [&](const VectorX<Scalar>& v) { return s_form(a, f, v, v); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const VectorX<Scalar> ei = id.col(i), ej = id.col(j);
      m(i, j) = C(0.5) * (s_diag(ei + ej) - s_diag(ei) - s_diag(ej));
    }
  }
  out.by_polarization = -Scalar(2) * m;

  // S(u, u) = u^t C u with C = -(A - I)^t (Pcal + i/2 Rcal)(A - I) + i A^t J0.
  const MatrixX<Scalar> a_minus = a.matrix() - id;
  const MatrixX<Scalar> j = standard_complex_structure<Scalar>(a.dim());
  const MatrixX<C> pr = f.Pcal.template cast<C>() + C(0, 0.5) * f.Rcal.template cast<C>();
  const MatrixX<C> coeff = -a_minus.transpose().template cast<C>() * pr * a_minus.template cast<C>() +
                           C(0, 1) * (a.matrix().transpose() * j).template cast<C>();
  out.by_coefficients = -(coeff + coeff.transpose());
  out.symmetrization_residual = (out.by_polarization - out.by_coefficients).cwiseAbs().maxCoeff();
  return out;
}

template <typename Scalar = double>
struct TracePrediction {
  std::complex<Scalar> value;                // rho 2^{2d} / nu det(S_i)^{-1/2}
  std::complex<Scalar> inverse_sqrt_det;     // det(S_i)^{-1/2} on the chosen branch
  MatrixX<std::complex<Scalar>> fixed_point_matrix;
  Scalar nu_value = 0;
  std::string branch;                        // human-readable branch description
};

/// Leading fixed-point contribution to the trace of the quantized flow.
///
/// det(S_i)^{-1/2} is continued from the case where S_i is real positive
/// definite: writing S_i = R^{1/2}(I + iK)R^{1/2} with R = Re S_i > 0 and K
/// real symmetric, the root is det(R)^{-1/2} prod_j (1 + i kappa_j)^{-1/2}
/// with principal roots. The path S(t) = R + i t Im S_i never crosses the
/// branch cut, so this is the continuous deformation.
template <typename Scalar>
TracePrediction<Scalar> trace_leading(const SymplecticMatrix<Scalar>& a_fixed,
                                      const SymbolValue<Scalar>& rho,
                                      Scalar degeneracy_tolerance = Scalar(1e-10)) {
  using C = std::complex<Scalar>;
  const PolarFactors<Scalar> f = polar_decompose(a_fixed);
  const FixedPointQuadratic<Scalar> fq = fixed_point_quadratic(a_fixed, f);
  const MatrixX<C>& s = fq.by_coefficients;
  const MatrixX<Scalar> re = s.real();
  const MatrixX<Scalar> im = s.imag();

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> re_es(re);
  const VectorX<Scalar>& re_eval = re_es.eigenvalues();
  const Scalar scale = std::max(Scalar(1), re_eval.cwiseAbs().maxCoeff());
  if (!(re_eval.minCoeff() > degeneracy_tolerance * scale)) {
    std::ostringstream os;
    os << "trace_leading: degenerate fixed point (smallest eigenvalue of Re S_i = "
       << re_eval.minCoeff() << ")";
    throw DegenerateFixedPoint(os.str());
  }
  const MatrixX<Scalar> re_isqrt = re_es.operatorInverseSqrt();
  const MatrixX<Scalar> kmat = re_isqrt * im * re_isqrt;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> k_es((kmat + kmat.transpose()) / Scalar(2),
                                                     Eigen::EigenvaluesOnly);
  C root = C(Scalar(1) / std::sqrt(re_eval.prod()));
  for (Eigen::Index i = 0; i < k_es.eigenvalues().size(); ++i) {
    root /= std::sqrt(C(1, k_es.eigenvalues()(i)));
  }

  TracePrediction<Scalar> out;
  out.nu_value = nu(a_fixed, f);
  out.inverse_sqrt_det = root;
  out.fixed_point_matrix = s;
  out.value = rho.rho * std::pow(Scalar(2), 2 * a_fixed.dim()) / out.nu_value * root;
  out.branch = "continuation from Re S_i along Re S_i + t i Im S_i, t in [0,1]";
  return out;
}

}  // namespace qflow
