#include "qflow/fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "qflow/errors.hpp"

namespace qflow {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("fit_line: x and y differ in length");
  if (x.size() < 2) throw InputError("fit_line: need at least two points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw InputError("fit_line: all x values coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  f.used = static_cast<int>(x.size());
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<bool>& gated) {
  if (x.size() != y.size() || (!gated.empty() && gated.size() != x.size())) {
    throw DimensionMismatch("fit_loglog: inputs differ in length");
  }
  std::vector<double> lx, ly;
  int excluded = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool flagged = !gated.empty() && gated[i];
    if (flagged || !(y[i] > 0) || !(x[i] > 0) || !std::isfinite(y[i])) {
      ++excluded;
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  LineFit f = fit_line(lx, ly);
  f.excluded = excluded;
  return f;
}

PolynomialFit fit_polynomial_no_constant(const std::vector<double>& x,
                                         const std::vector<double>& y, int degree) {
  if (x.size() != y.size()) throw DimensionMismatch("fit_polynomial: inputs differ in length");
  if (degree < 1 || x.size() < static_cast<std::size_t>(degree)) {
    throw InputError("fit_polynomial: not enough points for the requested degree");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, degree);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1;
    for (int j = 0; j < degree; ++j) {
      p *= x[i];
      design(i, j) = p;
    }
    rhs(i) = y[i];
  }
  const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = rhs - design * c;
  const double mean = rhs.mean();
  const double ss_tot = (rhs.array() - mean).square().sum();
  PolynomialFit out;
  out.coefficients.assign(c.data(), c.data() + c.size());
  out.r_squared = ss_tot == 0 ? 1.0 : 1.0 - resid.squaredNorm() / ss_tot;
  return out;
}

}  // namespace qflow
