#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qflow/asymptotics.hpp"
#include "qflow/fock.hpp"
#include "qflow/serialize.hpp"

using namespace qflow;
using C = std::complex<double>;

namespace {

Matrix hyperbolic_h() {
  Matrix h(2, 2);
  h << 1, 0, 0, -1;
  return h;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("truncation rule follows the square-root heuristic with a floor") {
  const TruncationRule rule;
  CHECK(rule.degree(16) == 72);
  CHECK(rule.degree(400) == 120);
  CHECK(TruncationRule{8, 72}.degree(512) >= static_cast<int>(std::ceil(8 * std::sqrt(512.0))));
}

TEST_CASE("model space basis is orthonormal and multi-indices are counted") {
  const SpacePtr s1 = ModelSpace::build(1, 32, 40);
  CHECK(s1->size() == 41);
  CHECK(s1->gram_residual() < 1e-9);
  const SpacePtr s2 = ModelSpace::build(2, 8, 10);
  CHECK(s2->size() == 66);  // C(10 + 2, 2)
  CHECK(s2->gram_residual() < 1e-9);
}

TEST_CASE("Szego kernel matches (k/pi)^d e^{psi2} inside the truncation") {
  const int k = 16;
  const SpacePtr space = ModelSpace::build(1, k, 80);
  Vector u(2), w(2);
  u << 0.3, -0.2;
  w << -0.1, 0.25;
  const C oracle = (k / std::numbers::pi) * std::exp(psi2(u, w));
  const C projector = kernel_value(identity_operator(space), u, w).value;
  CHECK(std::abs(projector - oracle) < 1e-10 * std::abs(oracle));
  // Unscaled points z = u / sqrt(k).
  const double s = 1.0 / std::sqrt(double(k));
  const C closed = szego_kernel(*space, to_complex(Vector(s * u)), to_complex(Vector(s * w)));
  CHECK(std::abs(closed - oracle) < 1e-12 * std::abs(oracle));
}

TEST_CASE("zero-time flow lifts to the identity") {
  const SpacePtr space = ModelSpace::build(1, 16, 30);
  const TruncatedOperator v = pullback_operator(space, flow_from_hamiltonian(hyperbolic_h(), 0.0));
  CHECK((v.matrix - ComplexMatrix::Identity(space->size(), space->size())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rotation flow lifts to the diagonal phase e^{i n a}") {
  const double angle = 0.7;
  const SpacePtr space = ModelSpace::build(1, 16, 30);
  const TruncatedOperator v = pullback_operator(space, flow_from_hamiltonian(Matrix::Identity(2, 2), angle));
  for (Eigen::Index n = 0; n < space->size(); ++n) {
    CHECK(std::abs(v.matrix(n, n) - std::polar(1.0, n * angle)) < 1e-10);
  }
  CHECK(unitarity_defect(v).defect < 1e-10);
}

TEST_CASE("rotation-invariant Hamiltonians give block-diagonal operators by degree") {
  const SpacePtr space = ModelSpace::build(2, 6, 8);
  const TruncatedOperator v = pullback_operator(space, flow_from_hamiltonian(Matrix::Identity(4, 4), 0.4));
  double off = 0;
  for (Eigen::Index i = 0; i < space->size(); ++i) {
    for (Eigen::Index j = 0; j < space->size(); ++j) {
      if (space->degree(i) != space->degree(j)) off = std::max(off, std::abs(v.matrix(i, j)));
    }
  }
  CHECK(off < 1e-9);
}

TEST_CASE("adjoint kernel is the conjugate transpose kernel") {
  const SpacePtr space = ModelSpace::build(1, 16, 72);
  SymbolProfile symbol;
  symbol.phase_gradient = 1.0;
  const TruncatedOperator u = quantized_flow(space, flow_from_hamiltonian(hyperbolic_h(), 0.3), symbol);
  Vector x(2), y(2);
  x << 0.2, -0.3;
  y << -0.4, 0.1;
  const C forward = kernel_value(u, x, y).value;
  const C backward = kernel_value(u.adjoint(), y, x).value;
  CHECK(std::abs(backward - std::conj(forward)) < 1e-10 * std::abs(forward));
}

TEST_CASE("energy offset contributes the global phase e^{i k tau f0}") {
  const SpacePtr space = ModelSpace::build(1, 10, 20);
  const TruncatedOperator plain = pullback_operator(space, flow_from_hamiltonian(hyperbolic_h(), 0.3));
  const TruncatedOperator shifted =
      pullback_operator(space, flow_from_hamiltonian(hyperbolic_h(), 0.3, 2.0));
  const C phase = std::polar(1.0, 10 * 0.3 * 2.0);
  CHECK((shifted.matrix - phase * plain.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lift calibration keeps only the candidate giving a unitary rotation") {
  const LiftCalibration cal = calibrate_lift_constant({-1, -0.5, 0, 0.5, 1});
  CHECK(cal.chosen == 0.0);
  CHECK(kLiftConstant == cal.chosen);
}

TEST_CASE("constant symbols scale the operator") {
  const SpacePtr space = ModelSpace::build(1, 10, 20);
  const TruncatedOperator t = symbol_operator(space, SymbolProfile{C(1.5), 0.0, Vector(), 0.0});
  CHECK((t.matrix - 1.5 * ComplexMatrix::Identity(space->size(), space->size())).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("compressed generator of the rotation is diagonal (n + 1) / 2k plus the offset") {
  const int k = 8;
  const SpacePtr space = ModelSpace::build(1, k, 20);
  const TruncatedOperator t = toeplitz_f(space, Matrix::Identity(2, 2), 0.25);
  for (Eigen::Index n = 0; n < space->size(); ++n) {
    CHECK(t.matrix(n, n).real() == doctest::Approx(0.25 + (n + 1) / (2.0 * k)));
  }
  CHECK((t.matrix - ComplexMatrix(t.matrix.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rotation trace closed forms agree with the operator") {
  const double angle = 0.7;
  const int k = 64;
  const SpacePtr space = ModelSpace::build(1, k, 72);
  const TruncatedOperator v = pullback_operator(space, flow_from_hamiltonian(Matrix::Identity(2, 2), angle));
  CHECK(std::abs(model_trace(v) - rotation_truncated_trace(angle, 72)) < 1e-9);
  const LocalizedTrace lt = localized_trace(v, 0.35);
  CHECK(std::abs(lt.value - rotation_localized_trace(angle, k, 0.35)) < 1e-9);
}

TEST_CASE("hyperbolic unitarity defect shrinks with the unitarized symbol") {
  const QuadraticFlow flow = flow_from_hamiltonian(hyperbolic_h(), 0.3);
  const double rho = unitarization_modulus(flow.differential);
  SymbolProfile unit;
  unit.phase_gradient = 1.0;
  SymbolProfile scaled = unit;
  scaled.rho0 = rho;
  const SpacePtr space = ModelSpace::build(1, 64, 72);
  const double d1 = unitarity_defect(quantized_flow(space, flow, unit)).defect;
  const double d2 = unitarity_defect(quantized_flow(space, flow, scaled)).defect;
  CHECK(d2 < 0.2 * d1);
}

TEST_CASE("symbol correction fit recovers an injected 1/k term") {
  const std::vector<int> ks{32, 64, 128, 256};
  std::vector<double> defects;
  for (int k : ks) defects.push_back(-0.25 / k + 0.1 / (double(k) * k));
  const SymbolCorrectionFit f = fit_symbol_correction(ks, defects, 1.0, 2.0, 1);
  CHECK(f.c1 == doctest::Approx(-0.25));
  // f1 = -c1 nu / (2^{d+1} rho0)
  CHECK(f.f1 == doctest::Approx(0.125));
}

TEST_CASE("operator JSON round trip") {
  const SpacePtr space = ModelSpace::build(1, 12, 16);
  const TruncatedOperator v = pullback_operator(space, flow_from_hamiltonian(hyperbolic_h(), 0.2));
  const TruncatedOperator back = operator_from_json(operator_to_json(v));
  CHECK(back.space->truncation() == 16);
  CHECK((back.matrix - v.matrix).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
