#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qflow/errors.hpp"
#include "qflow/fit.hpp"
#include "qflow/quadrature.hpp"

using namespace qflow;

TEST_SUITE("numerics") {

TEST_CASE("Gauss-Hermite integrates even moments exactly") {
  const GaussHermite gh = gauss_hermite(20);
  for (int m = 0; m <= 8; ++m) {
    double sum = 0;
    for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) sum += gh.weights(i) * std::pow(gh.nodes(i), 2 * m);
    CHECK(sum == doctest::Approx(std::tgamma(m + 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("Gauss-Hermite nodes are symmetric") {
  const GaussHermite gh = gauss_hermite(15);
  for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) {
    CHECK(gh.nodes(i) == doctest::Approx(-gh.nodes(gh.nodes.size() - 1 - i)));
  }
}

TEST_CASE("adaptive Simpson on oscillatory and two-dimensional integrands") {
  const auto one = adaptive_simpson([](double x) { return std::exp(std::complex<double>(0, x)); }, 0,
                                    std::numbers::pi);
  CHECK(std::abs(one - std::complex<double>(0, 2)) < 1e-9);
  const auto two = adaptive_simpson_2d(
      [](double x, double y) { return std::complex<double>(std::exp(-x * x - y * y)); }, -6, 6, -6, 6);
  CHECK(std::abs(two - std::numbers::pi) < 1e-8);
}

TEST_CASE("regularized lower gamma against closed forms") {
  CHECK(regularized_lower_gamma(1, 2.0) == doctest::Approx(1 - std::exp(-2.0)).epsilon(1e-14));
  // P(3, x) = 1 - e^{-x} (1 + x + x^2 / 2)
  const double x = 4.5;
  CHECK(regularized_lower_gamma(3, x) ==
        doctest::Approx(1 - std::exp(-x) * (1 + x + x * x / 2)).epsilon(1e-13));
}

TEST_CASE("log-log fit recovers a power law and counts exclusions") {
  std::vector<double> x{32, 64, 128, 256, 512}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
  y[2] = -1;  // non-positive: dropped
  const LineFit f = fit_loglog(x, y, {false, false, false, false, true});
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(f.used == 3);
  CHECK(f.excluded == 2);
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("polynomial fit without constant term") {
  std::vector<double> x{1, 2, 3, 4}, y;
  for (double v : x) y.push_back(2 * v - 0.5 * v * v);
  const PolynomialFit p = fit_polynomial_no_constant(x, y, 2);
  CHECK(p.coefficients[0] == doctest::Approx(2.0));
  CHECK(p.coefficients[1] == doctest::Approx(-0.5));
}

}  // TEST_SUITE
