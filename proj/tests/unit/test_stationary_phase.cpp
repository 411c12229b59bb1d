#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qflow/stationary_phase.hpp"

using namespace qflow;
using C = std::complex<double>;

TEST_SUITE("stationary_phase") {

TEST_CASE("phase vanishes with its gradient at the critical point") {
  const PhasePoint p{1, 0, 1, 0};
  CHECK(std::abs(phase_psi(p)) == 0.0);
  CHECK(phase_gradient(p.vec().cast<C>()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic Hessian matches finite differences away from the critical point") {
  const PhasePoint p{1.3, 0.2, 0.8, -0.3};
  const Matrix4c fd = phase_hessian_fd(p);
  CHECK((fd - phase_hessian(p.vec().cast<C>())).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("Newton finds the critical point and refuses far starts") {
  const PhasePoint s = stationary_point({0.7, -0.2, 1.4, 0.3});
  CHECK(std::abs(s.t - 1) < 1e-10);
  CHECK(std::abs(s.vartheta) < 1e-10);
  CHECK_THROWS_AS(stationary_point({10, 0, 1, 0}), ConvergenceError);
}

TEST_CASE("Hessian path has unit determinant and a signature-zero real start") {
  for (double s : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(hessian_path(s).determinant() - 1.0) < 1e-14);
  CHECK(hessian_path(0.0).imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(hessian_path(1.5));
}

TEST_CASE("square-root factor is (k / 2 pi)^2") {
  const double k = 40;
  CHECK(std::abs(sqrt_factor(k).value - std::pow(k / (2 * std::numbers::pi), 2)) < 1e-12);
}

TEST_CASE("Gaussian reduction selects the transposed substitution") {
  const SymplecticMatrix<double> a = random_symplectic<double>(2, 1.5, 12);
  const Vector u = Vector::LinSpaced(4, -1, 1), w = Vector::LinSpaced(4, 0.3, 0.9),
               s = Vector::LinSpaced(4, 0.5, -0.5);
  const ReductionCheck rc = gaussian_reduction_check(a, u, w, s);
  CHECK(rc.variant == "A^t");
  CHECK(rc.residual < 1e-10);
  CHECK(rc.without_transpose > 1e-6);
}

TEST_CASE("closed-form Gaussian integral matches direct quadrature in d = 1") {
  const SymplecticMatrix<double> a = random_symplectic<double>(1, 1.0, 3);
  Vector u(2), w(2);
  u << 0.2, 0.4;
  w << -0.3, 0.1;
  const LeadingGaussian lg = leading_gaussian_integral(a, u, w);
  CHECK(lg.route_residual < 1e-12);
  CHECK(std::abs(gaussian_integral_quadrature(a, u, w) - lg.gaussian) < 1e-7 * std::abs(lg.gaussian));
}

TEST_CASE("propagation phase: critical value is tau f0") {
  const PropPhase pp = prop_phase(0.4, 1.5);
  CHECK(pp.gradient_norm == 0.0);
  CHECK(pp.value == doctest::Approx(0.6));
}

}  // TEST_SUITE
