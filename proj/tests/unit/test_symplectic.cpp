#include <doctest.h>

#include <cmath>

#include "qflow/symplectic.hpp"

using namespace qflow;

namespace {

Matrix hyperbolic_h() {
  Matrix h(2, 2);
  h << 1, 0, 0, -1;
  return h;
}

}  // namespace

TEST_SUITE("symplectic") {

TEST_CASE("complex structure squares to minus identity and omega is antisymmetric") {
  const Matrix j = standard_complex_structure<double>(2);
  CHECK((j * j + Matrix::Identity(4, 4)).norm() == doctest::Approx(0.0));
  Vector u(4), v(4);
  u << 1, 2, -1, 0.5;
  v << 0.3, -1, 2, 1;
  CHECK(omega0(u, v) == doctest::Approx(-omega0(v, u)));
  // omega0(e_x, e_y) = 1 in d = 1.
  Vector ex(2), ey(2);
  ex << 1, 0;
  ey << 0, 1;
  CHECK(omega0(ex, ey) == doctest::Approx(1.0));
}

TEST_CASE("non-symplectic input is rejected and odd sizes are dimension errors") {
  Matrix a(2, 2);
  a << 2, 0, 0, 1;
  CHECK_THROWS_AS(SymplecticMatrix<double>::from_matrix(a), NotSymplectic);
  CHECK_THROWS_AS(SymplecticMatrix<double>::from_matrix(Matrix::Identity(3, 3)), DimensionMismatch);
}

TEST_CASE("hyperbolic flow differential is the boost matrix") {
  const double tau = 0.3;
  const SymplecticMatrix<double> a = exp_hamiltonian<double>(hyperbolic_h(), -tau);
  Matrix boost(2, 2);
  boost << std::cosh(tau), std::sinh(tau), std::sinh(tau), std::cosh(tau);
  CHECK(detail::max_abs(a.matrix() - boost) < 1e-14);
}

TEST_CASE("nu of a boost is 2 cosh and its three routes agree") {
  for (double tau : {0.1, 0.3, 1.2}) {
    const SymplecticMatrix<double> a = exp_hamiltonian<double>(hyperbolic_h(), -tau);
    const NuRoutes<double> r = nu_routes(a, polar_decompose(a));
    CHECK(r.from_polar == doctest::Approx(2 * std::cosh(tau)).epsilon(1e-13));
    CHECK(r.max_relative_spread() < 1e-13);
  }
}

TEST_CASE("nu attains 2^d exactly on unitary matrices") {
  for (int d = 1; d <= 3; ++d) {
    const SymplecticMatrix<double> r = random_unitary<double>(d, 11 + d);
    CHECK(nu(r) == doctest::Approx(std::pow(2.0, d)).epsilon(1e-12));
  }
}

TEST_CASE("polar factors reconstruct A with orthogonal and positive symplectic parts") {
  const SymplecticMatrix<double> a = random_symplectic<double>(2, 2.0, 99);
  const PolarFactors<double> f = polar_decompose(a);
  const Matrix id = Matrix::Identity(4, 4);
  CHECK(detail::max_abs(f.O * f.P - a.matrix()) < 1e-12);
  CHECK(detail::max_abs(f.O.transpose() * f.O - id) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(f.P);
  CHECK(es.eigenvalues().minCoeff() > 0);
  CHECK(detail::max_abs(f.Q - (id + f.P * f.P)) < 1e-12);
}

TEST_CASE("polar decomposition refuses extreme condition numbers") {
  const SymplecticMatrix<double> a = exp_hamiltonian<double>(hyperbolic_h(), -8.0);
  CHECK_THROWS_AS(polar_decompose(a, 1e6), IllConditioned);
}

TEST_CASE("S form on unitary matrices reduces to psi2") {
  const SymplecticMatrix<double> r = random_unitary<double>(2, 5);
  Vector u(4), w(4);
  u << 0.3, -0.2, 0.7, 1.0;
  w << -0.5, 0.1, 0.2, 0.4;
  const auto s = s_form(r, u, w);
  const auto p = psi2(Vector(r.matrix() * u), w);
  CHECK(std::abs(s - p) < 1e-13);
}

TEST_CASE("S form vanishes on the graph and has negative real part off it") {
  const SymplecticMatrix<double> a = random_symplectic<double>(1, 1.5, 4);
  Vector u(2);
  u << 0.4, -1.1;
  const Vector on_graph = a.matrix() * u;
  CHECK(std::abs(s_form(a, u, on_graph)) < 1e-13);
  Vector w = on_graph;
  w(0) += 0.5;
  CHECK(s_form(a, u, w).real() < -1e-3);
}

TEST_CASE("closed form and assembled form of S agree") {
  const SymplecticMatrix<double> a = random_symplectic<double>(3, 2.0, 17);
  Vector u = Vector::LinSpaced(6, -1, 1), w = Vector::LinSpaced(6, 0.5, -0.7);
  CHECK(std::abs(s_form(a, u, w) - assembled_s_form(a, u, w)) < 1e-12);
}

TEST_CASE("graph splitting: tangent and normal parts are complementary") {
  const SymplecticMatrix<double> a = random_symplectic<double>(1, 1.0, 21);
  const GraphSplitting<double> g = graph_splitting(a);
  CHECK(detail::max_abs(g.tangent.transpose() * g.normal) < 1e-13);
  Vector x(2);
  x << 1.0, 0.5;
  const Vector z = stack_pair(Vector(-a.matrix().transpose() * x), x);
  CHECK(g.tangent_part(z).norm() < 1e-13);
}

TEST_CASE("projector matrix identities hold on a sample") {
  const SymplecticMatrix<double> a = random_symplectic<double>(2, 2.0, 3);
  CHECK(projector_identities(a).max() < 1e-12);
}

}  // TEST_SUITE
