#pragma once

#include <vector>

namespace qflow {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  int used = 0;
  int excluded = 0;  // points dropped because their gate flag was set or value non-positive
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// OLS of log y against log x over points whose `gated` flag is false and
/// whose y is positive. `gated` may be empty.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<bool>& gated = {});

struct PolynomialFit {
  std::vector<double> coefficients;  // c_1..c_n of sum_j c_j x^j
  double r_squared = 0;
};

/// Least squares y = sum_{j=1..degree} c_j x^j (no constant term).
PolynomialFit fit_polynomial_no_constant(const std::vector<double>& x,
                                         const std::vector<double>& y, int degree);

}  // namespace qflow
