#pragma once

// Linear symplectic algebra on R^{2d} with the standard structures
//
//   J0 = [[0, -I], [I, 0]]      (complex structure, multiplication by i)
//   omega0(u, v) = u^t (-J0) v  (symplectic form)
//
// and the universal quadratic forms built from them: psi2, the graph-adapted
// form S_A, the normalization nu(A), and the auxiliary quantities Gamma, F, G
// that appear when the composition of two Szego kernels is reduced to a
// Gaussian integral.
//
// Coordinates are ordered (x_1..x_d, y_1..y_d); z_j = x_j + i y_j identifies
// R^{2d} with C^d.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using ComplexMatrix = MatrixX<std::complex<double>>;
using ComplexVector = VectorX<std::complex<double>>;

/// The standard complex structure J0 on R^{2d}.
template <typename Scalar = double>
MatrixX<Scalar> standard_complex_structure(int d) {
  MatrixX<Scalar> j = MatrixX<Scalar>::Zero(2 * d, 2 * d);
  j.topRightCorner(d, d) = -MatrixX<Scalar>::Identity(d, d);
  j.bottomLeftCorner(d, d) = MatrixX<Scalar>::Identity(d, d);
  return j;
}

namespace detail {

template <typename DerivedU, typename DerivedV>
void require_same_size(const Eigen::MatrixBase<DerivedU>& u,
                       const Eigen::MatrixBase<DerivedV>& v, const char* where) {
  if (u.size() != v.size() || u.size() % 2 != 0) {
    std::ostringstream os;
    os << where << ": vectors of sizes " << u.size() << " and " << v.size()
       << " are not a pair in R^{2d}";
    throw DimensionMismatch(os.str());
  }
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

/// omega0(u, v) = u^t (-J0) v = sum_j (x_j v_{y_j} - y_j v_{x_j}).
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar omega0(const Eigen::MatrixBase<DerivedU>& u,
                                 const Eigen::MatrixBase<DerivedV>& v) {
  detail::require_same_size(u, v, "omega0");
  const Eigen::Index d = u.size() / 2;
  return u.head(d).dot(v.tail(d)) - u.tail(d).dot(v.head(d));
}

/// psi2(u, v) = -i omega0(u, v) - |u - v|^2 / 2.
template <typename DerivedU, typename DerivedV>
std::complex<typename DerivedU::Scalar> psi2(const Eigen::MatrixBase<DerivedU>& u,
                                             const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  detail::require_same_size(u, v, "psi2");
  return {-Scalar(0.5) * (u - v).squaredNorm(), -omega0(u, v)};
}

/// A real 2d x 2d matrix with A^t (-J0) A = -J0. Construction validates.
template <typename Scalar = double>
class SymplecticMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  static SymplecticMatrix from_matrix(MatrixX<Scalar> a,
                                      Scalar tolerance = Scalar(kDefaultTolerance)) {
    if (a.rows() != a.cols() || a.rows() == 0 || a.rows() % 2 != 0) {
      throw DimensionMismatch("symplectic matrix must be square of even size");
    }
    const int d = static_cast<int>(a.rows() / 2);
    const MatrixX<Scalar> j = standard_complex_structure<Scalar>(d);
    const Scalar scale = std::max(Scalar(1), a.squaredNorm() / Scalar(2 * d));
    const Scalar residual = detail::max_abs(a.transpose() * j * a - j);
    if (!(residual <= tolerance * scale)) {
      std::ostringstream os;
      os << "matrix is not symplectic: |A^t J0 A - J0| = " << residual;
      throw NotSymplectic(os.str());
    }
    return SymplecticMatrix(std::move(a), d);
  }

  static SymplecticMatrix identity(int d) {
    return SymplecticMatrix(MatrixX<Scalar>::Identity(2 * d, 2 * d), d);
  }

  int dim() const noexcept { return d_; }
  const MatrixX<Scalar>& matrix() const noexcept { return a_; }

  /// A^{-1} = -J0 A^t J0, exact for symplectic A.
  MatrixX<Scalar> inverse() const {
    const MatrixX<Scalar> j = standard_complex_structure<Scalar>(d_);
    return -j * a_.transpose() * j;
  }

  /// Max-abs residual of the symplectic identity (stored matrices may drift
  /// slightly from exact symplecticity after arithmetic).
  Scalar symplectic_residual() const {
    const MatrixX<Scalar> j = standard_complex_structure<Scalar>(d_);
    return detail::max_abs(a_.transpose() * j * a_ - j);
  }

 private:
  SymplecticMatrix(MatrixX<Scalar> a, int d) : a_(std::move(a)), d_(d) {}

  MatrixX<Scalar> a_;
  int d_;
};

/// Matrix exponential of the Hamiltonian matrix -J0 H for symmetric H.
template <typename Scalar>
SymplecticMatrix<Scalar> exp_hamiltonian(const MatrixX<Scalar>& h, Scalar time = Scalar(1)) {
  const int d = static_cast<int>(h.rows() / 2);
  const MatrixX<Scalar> generator = -time * standard_complex_structure<Scalar>(d) * h;
  return SymplecticMatrix<Scalar>::from_matrix(generator.exp(), Scalar(1e-9));
}

namespace detail {

template <typename Scalar>
MatrixX<Scalar> random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixX<Scalar> g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = Scalar(normal(rng));
  }
  return (g + g.transpose()) / Scalar(2);
}

template <typename Scalar>
Scalar spectral_norm_symmetric(const MatrixX<Scalar>& h) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// exp(-J0 H) for a random symmetric H with spectral norm scale * U(0, 1].
template <typename Scalar = double>
SymplecticMatrix<Scalar> random_symplectic(int d, Scalar scale, std::uint64_t seed) {
  if (d < 1) throw InputError("random_symplectic: d must be >= 1");
  if (scale < Scalar(0)) throw InputError("random_symplectic: scale must be >= 0");
  if (scale == Scalar(0)) return SymplecticMatrix<Scalar>::identity(d);
  std::mt19937_64 rng(seed);
  MatrixX<Scalar> h = detail::random_symmetric<Scalar>(2 * d, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Scalar target = scale * Scalar(1.0 - unit(rng));  // in (0, scale]
  h *= target / detail::spectral_norm_symmetric(h);
  return exp_hamiltonian<Scalar>(h);
}

/// Random orthogonal symplectic (unitary) matrix: exp(-J0 H) with H commuting
/// with J0.
template <typename Scalar = double>
SymplecticMatrix<Scalar> random_unitary(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const MatrixX<Scalar> x = detail::random_symmetric<Scalar>(d, rng);
  MatrixX<Scalar> y = detail::random_symmetric<Scalar>(d, rng);
  y = (y - y.transpose()).eval() / Scalar(2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      y(i, j) += Scalar(0.25) * Scalar(i - j);  // non-trivial antisymmetric part
    }
  }
  MatrixX<Scalar> h(2 * d, 2 * d);
  h << x, -y, y, x;
  return exp_hamiltonian<Scalar>(h);
}

// ---------------------------------------------------------------------------
// Polar decomposition and the derived symmetric matrices.

template <typename Scalar = double>
struct PolarFactors {
  MatrixX<Scalar> O;     // orthogonal symplectic
  MatrixX<Scalar> P;     // symmetric positive definite symplectic
  MatrixX<Scalar> Q;     // I + P^2
  MatrixX<Scalar> Pcal;  // O Q^{-1} O^t
  MatrixX<Scalar> Rcal;  // O (I - P^2) Q^{-1} J0 O^t
};

/// Positive polar decomposition A = O P from the eigendecomposition of A^t A.
/// Inputs with condition number above `max_condition` are rejected.
template <typename Scalar>
PolarFactors<Scalar> polar_decompose(const SymplecticMatrix<Scalar>& a,
                                     Scalar max_condition = Scalar(1e6),
                                     Scalar tolerance = Scalar(1e-12)) {
  const MatrixX<Scalar>& m = a.matrix();
  const int n = static_cast<int>(m.rows());
  const MatrixX<Scalar> ata = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(ata);
  if (es.info() != Eigen::Success) throw ConvergenceError("polar_decompose: eigensolver failed");
  const VectorX<Scalar>& lambda = es.eigenvalues();
  if (!(lambda.minCoeff() > Scalar(0))) {
    throw IllConditioned("polar_decompose: A^t A is not positive definite");
  }
  const Scalar condition = std::sqrt(lambda.maxCoeff() / lambda.minCoeff());
  if (!(condition <= max_condition)) {
    std::ostringstream os;
    os << "polar_decompose: condition number " << condition << " exceeds " << max_condition;
    throw IllConditioned(os.str());
  }
  const MatrixX<Scalar>& v = es.eigenvectors();
  const VectorX<Scalar> root = lambda.cwiseSqrt();

  PolarFactors<Scalar> f;
  f.P = v * root.asDiagonal() * v.transpose();
  f.O = m * (v * root.cwiseInverse().asDiagonal() * v.transpose());
  const MatrixX<Scalar> p2 = v * lambda.asDiagonal() * v.transpose();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  f.Q = id + p2;
  const MatrixX<Scalar> q_inv = v * (lambda.array() + Scalar(1)).inverse().matrix().asDiagonal() *
                                v.transpose();
  const MatrixX<Scalar> j = standard_complex_structure<Scalar>(a.dim());
  f.Pcal = f.O * q_inv * f.O.transpose();
  f.Rcal = f.O * (id - p2) * q_inv * j * f.O.transpose();

  const Scalar scale = std::max(Scalar(1), detail::max_abs(m));
  const Scalar reconstruction = detail::max_abs(f.O * f.P - m);
  const Scalar orthogonality = detail::max_abs(f.O.transpose() * f.O - id);
  if (!(reconstruction <= Scalar(1e3) * tolerance * scale * condition) ||
      !(orthogonality <= Scalar(1e3) * tolerance * condition)) {
    std::ostringstream os;
    os << "polar_decompose: factors did not reach tolerance (reconstruction " << reconstruction
       << ", orthogonality " << orthogonality << ")";
    throw ConvergenceError(os.str());
  }
  return f;
}

// ---------------------------------------------------------------------------
// The graph-adapted quadratic form.

/// S_A(u, w) = -L^t [Pcal + (i/2) Rcal] L - i omega0(Au, w), L = Au - w.
template <typename Scalar, typename DerivedU, typename DerivedW>
std::complex<Scalar> s_form(const SymplecticMatrix<Scalar>& a, const PolarFactors<Scalar>& f,
                            const Eigen::MatrixBase<DerivedU>& u,
                            const Eigen::MatrixBase<DerivedW>& w) {
  detail::require_same_size(u, w, "s_form");
  if (u.size() != a.matrix().rows()) throw DimensionMismatch("s_form: vector size != 2d");
  const VectorX<Scalar> au = a.matrix() * u;
  const VectorX<Scalar> l = au - w;
  const Scalar re = -l.dot(f.Pcal * l);
  const Scalar im = -Scalar(0.5) * l.dot(f.Rcal * l) - omega0(au, w);
  return {re, im};
}

template <typename Scalar, typename DerivedU, typename DerivedW>
std::complex<Scalar> s_form(const SymplecticMatrix<Scalar>& a,
                            const Eigen::MatrixBase<DerivedU>& u,
                            const Eigen::MatrixBase<DerivedW>& w) {
  return s_form(a, polar_decompose(a), u, w);
}

/// The three equivalent expressions for nu(A).
template <typename Scalar = double>
struct NuRoutes {
  Scalar from_polar;          // sqrt det(I + P^2)
  Scalar from_gram;           // det(I + A^t A)^{1/2}
  Scalar from_anticommutator; // det(A J0 + J0 A)^{1/2}

  Scalar max_relative_spread() const {
    const Scalar a = std::abs(from_polar - from_gram);
    const Scalar b = std::abs(from_polar - from_anticommutator);
    return std::max(a, b) / from_polar;
  }
};

template <typename Scalar>
NuRoutes<Scalar> nu_routes(const SymplecticMatrix<Scalar>& a, const PolarFactors<Scalar>& f) {
  const MatrixX<Scalar>& m = a.matrix();
  const int n = static_cast<int>(m.rows());
  const MatrixX<Scalar> j = standard_complex_structure<Scalar>(a.dim());
  const MatrixX<Scalar> gram = MatrixX<Scalar>::Identity(n, n) + m.transpose() * m;
  const MatrixX<Scalar> anti = m * j + j * m;
  return {std::sqrt(f.Q.determinant()), std::sqrt(gram.determinant()),
          std::sqrt(anti.determinant())};
}

/// nu(A) = sqrt det(I + P^2) >= 2^d, with equality iff A is unitary.
template <typename Scalar>
Scalar nu(const SymplecticMatrix<Scalar>& a, const PolarFactors<Scalar>& f) {
  (void)a;
  return std::sqrt(f.Q.determinant());
}

template <typename Scalar>
Scalar nu(const SymplecticMatrix<Scalar>& a) {
  return nu(a, polar_decompose(a));
}

// ---------------------------------------------------------------------------
// Tangent / normal splitting of R^{2d} x R^{2d} along graph(A).

template <typename Scalar = double>
struct GraphSplitting {
  MatrixX<Scalar> tangent;  // 4d x 2d, orthonormal columns spanning {(u, Au)}
  MatrixX<Scalar> normal;   // 4d x 2d, orthonormal columns spanning graph(A)^perp

  VectorX<Scalar> tangent_part(const VectorX<Scalar>& z) const {
    return tangent * (tangent.transpose() * z);
  }
  VectorX<Scalar> normal_part(const VectorX<Scalar>& z) const {
    return normal * (normal.transpose() * z);
  }
};

template <typename Scalar>
GraphSplitting<Scalar> graph_splitting(const SymplecticMatrix<Scalar>& a) {
  const MatrixX<Scalar>& m = a.matrix();
  const int n = static_cast<int>(m.rows());
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  GraphSplitting<Scalar> g;
  // [I; A] (I + A^t A)^{-1/2} and [-A^t; I] (I + A A^t)^{-1/2}.
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> t_es(id + m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> n_es(id + m * m.transpose());
  MatrixX<Scalar> t(2 * n, n), nn(2 * n, n);
  t << id, m;
  nn << -m.transpose(), id;
  g.tangent = t * t_es.operatorInverseSqrt();
  g.normal = nn * n_es.operatorInverseSqrt();
  return g;
}

/// Stacks (u, w) into a single vector of R^{4d}.
template <typename DerivedU, typename DerivedW>
VectorX<typename DerivedU::Scalar> stack_pair(const Eigen::MatrixBase<DerivedU>& u,
                                              const Eigen::MatrixBase<DerivedW>& w) {
  VectorX<typename DerivedU::Scalar> z(u.size() + w.size());
  z << u, w;
  return z;
}

// ---------------------------------------------------------------------------
// Gamma, F, G and the assembled form S.

template <typename Scalar = double>
struct GammaFG {
  std::complex<Scalar> gamma;
  VectorX<Scalar> F;
  VectorX<Scalar> G;
  Scalar f_route_residual;  // |(-J0 A^{-1} L) - (-A^t J0 L)|
};

template <typename Scalar, typename DerivedU, typename DerivedW>
GammaFG<Scalar> gamma_fg(const SymplecticMatrix<Scalar>& a, const Eigen::MatrixBase<DerivedU>& u,
                         const Eigen::MatrixBase<DerivedW>& w) {
  detail::require_same_size(u, w, "gamma_fg");
  if (u.size() != a.matrix().rows()) throw DimensionMismatch("gamma_fg: vector size != 2d");
  const MatrixX<Scalar>& m = a.matrix();
  const int n = static_cast<int>(m.rows());
  const MatrixX<Scalar> j = standard_complex_structure<Scalar>(a.dim());
  const MatrixX<Scalar> q = MatrixX<Scalar>::Identity(n, n) + m.transpose() * m;
  const Eigen::LLT<MatrixX<Scalar>> q_llt(q);

  const VectorX<Scalar> au = m * u;
  const VectorX<Scalar> l = au - w;
  const VectorX<Scalar> ainv_l = a.inverse() * l;
  const VectorX<Scalar> at_l = m.transpose() * l;
  const VectorX<Scalar> q_inv_at_l = q_llt.solve(at_l);

  GammaFG<Scalar> out;
  out.gamma = psi2(au, w) + std::complex<Scalar>(Scalar(0.5) * at_l.dot(q_inv_at_l),
                                                  omega0(ainv_l, q_inv_at_l));
  out.F = -j * ainv_l;
  out.G = at_l;
  const VectorX<Scalar> f_alt = -m.transpose() * j * l;
  out.f_route_residual = detail::max_abs(out.F - f_alt);
  return out;
}

/// S assembled from psi2, F, G and Q:
/// psi2(Au, w) - i G^t Q^{-1} F + G^t Q^{-1} G / 2 - F^t Q^{-1} F / 2.
template <typename Scalar, typename DerivedU, typename DerivedW>
std::complex<Scalar> assembled_s_form(const SymplecticMatrix<Scalar>& a,
                                      const Eigen::MatrixBase<DerivedU>& u,
                                      const Eigen::MatrixBase<DerivedW>& w) {
  const GammaFG<Scalar> g = gamma_fg(a, u, w);
  const MatrixX<Scalar>& m = a.matrix();
  const int n = static_cast<int>(m.rows());
  const MatrixX<Scalar> q = MatrixX<Scalar>::Identity(n, n) + m.transpose() * m;
  const Eigen::LLT<MatrixX<Scalar>> q_llt(q);
  const VectorX<Scalar> q_inv_f = q_llt.solve(g.F);
  const VectorX<Scalar> q_inv_g = q_llt.solve(g.G);
  const VectorX<Scalar> au = m * u;
  return psi2(au, w) + std::complex<Scalar>(Scalar(0.5) * g.G.dot(q_inv_g) -
                                                Scalar(0.5) * g.F.dot(q_inv_f),
                                            -g.G.dot(q_inv_f));
}

/// Residuals of the two matrix identities behind the closed form of S:
///   I - J0 A Q^{-1} A^t J0 - A Q^{-1} A^t = 2 Pcal
///   A Q^{-1} A^t J0 + (A Q^{-1} A^t J0)^t = -Rcal
template <typename Scalar = double>
struct ProjectorIdentityResiduals {
  Scalar pcal_identity;
  Scalar rcal_identity;
  Scalar max() const { return std::max(pcal_identity, rcal_identity); }
};

template <typename Scalar>
ProjectorIdentityResiduals<Scalar> projector_identities(const SymplecticMatrix<Scalar>& a,
                                        const PolarFactors<Scalar>& f) {
  const MatrixX<Scalar>& m = a.matrix();
  const int n = static_cast<int>(m.rows());
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> j = standard_complex_structure<Scalar>(a.dim());
  const MatrixX<Scalar> q_inv = f.Q.inverse();
  const MatrixX<Scalar> aqa = m * q_inv * m.transpose();
  const MatrixX<Scalar> lhs1 = id - j * aqa * j - aqa;
  const MatrixX<Scalar> x = aqa * j;
  return {detail::max_abs(lhs1 - Scalar(2) * f.Pcal), detail::max_abs(x + x.transpose() + f.Rcal)};
}

template <typename Scalar>
ProjectorIdentityResiduals<Scalar> projector_identities(const SymplecticMatrix<Scalar>& a) {
  return projector_identities(a, polar_decompose(a));
}

}  // namespace qflow
