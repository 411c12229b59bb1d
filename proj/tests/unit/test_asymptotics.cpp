#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qflow/asymptotics.hpp"

using namespace qflow;
using C = std::complex<double>;

TEST_SUITE("asymptotics") {

TEST_CASE("leading kernel at the identity is the Szego kernel") {
  const SymplecticMatrix<double> id = SymplecticMatrix<double>::identity(1);
  Vector u(2), w(2);
  u << 0.2, -0.4;
  w << 0.5, 0.1;
  const int k = 40;
  const auto p = leading_kernel(id, SymbolValue<double>{1.0}, k, u, w);
  const C szego = (k / std::numbers::pi) * std::exp(psi2(u, w));
  CHECK(std::abs(p.value - szego) < 1e-12 * std::abs(szego));
}

TEST_CASE("unitarization modulus of a boost is sqrt(cosh tau)") {
  Matrix h(2, 2);
  h << 1, 0, 0, -1;
  const double tau = 0.3;
  const SymplecticMatrix<double> a = exp_hamiltonian<double>(h, -tau);
  const auto routes = unitarization_modulus_routes(a);
  CHECK(routes.from_nu == doctest::Approx(std::sqrt(std::cosh(tau))).epsilon(1e-13));
  CHECK(routes.relative_spread() < 1e-13);
}

TEST_CASE("diagonal composition of the unitarized symbol is (k/pi)^d") {
  const SymplecticMatrix<double> a = random_symplectic<double>(2, 1.5, 8);
  const double rho = unitarization_modulus(a);
  const int k = 12;
  CHECK(diagonal_composition(a, SymbolValue<double>{rho}, k) ==
        doctest::Approx(std::pow(k / std::numbers::pi, 2)).epsilon(1e-12));
}

TEST_CASE("gaussian diagonal integral matches the diagonal case and rejects indefinite input") {
  Matrix q(2, 2);
  q << 3.0, 0.0, 0.0, 5.0;
  // int_{R^2} exp(-2 v^t Q^{-1} v) dv = pi / 2 sqrt(det Q)
  CHECK(gaussian_diag_integral(q) == doctest::Approx(std::numbers::pi / 2 * std::sqrt(15.0)));
  q(1, 1) = -1.0;
  CHECK_THROWS_AS(gaussian_diag_integral(q), InputError);
  CHECK_THROWS_AS(gaussian_diag_integral(Matrix::Identity(3, 3)), DimensionMismatch);
}

TEST_CASE("fixed-point quadratic: both constructions coincide") {
  const SymplecticMatrix<double> a = random_symplectic<double>(2, 1.0, 31);
  const auto fq = fixed_point_quadratic(a, polar_decompose(a));
  CHECK(fq.symmetrization_residual < 1e-12);
}

TEST_CASE("rotation trace prediction is the geometric series sum") {
  // For rotation by angle a the leading term must equal 1 / (1 - e^{ia}).
  for (double angle : {0.7, 1.9, -0.4}) {
    Matrix h = Matrix::Identity(2, 2);
    const SymplecticMatrix<double> a = exp_hamiltonian<double>(h, -angle);
    const auto t = trace_leading(a, SymbolValue<double>{1.0});
    const C oracle = 1.0 / (1.0 - std::exp(C(0, angle)));
    CHECK(std::abs(t.value - oracle) < 1e-12 * std::abs(oracle));
  }
}

TEST_CASE("trace prediction is invariant under unitary conjugation") {
  const SymplecticMatrix<double> a = random_symplectic<double>(2, 1.2, 44);
  const SymplecticMatrix<double> r = random_unitary<double>(2, 45);
  const SymplecticMatrix<double> conj = SymplecticMatrix<double>::from_matrix(
      r.matrix() * a.matrix() * r.matrix().transpose(), 1e-9);
  const C t1 = trace_leading(a, SymbolValue<double>{1.0}).value;
  const C t2 = trace_leading(conj, SymbolValue<double>{1.0}).value;
  CHECK(std::abs(t1 - t2) < 1e-10 * std::abs(t1));
}

TEST_CASE("leading kernel modulus ratio to the graph projection equals the envelope ratio") {
  const SymplecticMatrix<double> a = random_symplectic<double>(1, 1.0, 9);
  const GraphSplitting<double> g = graph_splitting(a);
  Vector u(2), w(2);
  u << 0.3, -0.6;
  w << 0.8, 0.2;
  const Vector z = g.tangent_part(stack_pair(u, w));
  const Vector pu = z.head(2), pw = z.tail(2);
  const SymbolValue<double> one{1.0};
  const double ratio = std::abs(leading_kernel(a, one, 20, u, w).value) /
                       std::abs(leading_kernel(a, one, 20, pu, pw).value);
  CHECK(ratio == doctest::Approx(decay_envelope(a, 20, u, w) / decay_envelope(a, 20, pu, pw)));
}

TEST_CASE("trace prediction rejects the identity flow") {
  const SymplecticMatrix<double> id = SymplecticMatrix<double>::identity(1);
  CHECK_THROWS_AS(trace_leading(id, SymbolValue<double>{1.0}), DegenerateFixedPoint);
}

TEST_CASE("decay envelope is one on the graph and below one off it") {
  const SymplecticMatrix<double> a = random_symplectic<double>(1, 1.0, 2);
  Vector u(2), w(2);
  u << 0.2, -0.1;
  CHECK(decay_envelope(a, 64, u, Vector(a.matrix() * u)) == doctest::Approx(1.0));
  w << 0.3, 0.4;
  CHECK(decay_envelope(a, 64, u, w) < 1.0);
}

}  // TEST_SUITE
