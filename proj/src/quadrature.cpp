#include "qflow/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qflow {

namespace {

// Orthonormal Hermite values scaled by exp(-x^2/2): q_j = p_j(x) e^{-x^2/2}.
// Returns q_{n-1}, q_n and accumulates sum_{j<n} q_j^2.
struct HermiteTail {
  double q_prev;
  double q_last;
  double sum_sq;
};

HermiteTail scaled_hermite(int n, double x) {
  double q0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  double q1 = std::sqrt(2.0) * x * q0;
  double sum = q0 * q0;
  if (n == 1) return {q0, q1, sum};
  for (int j = 1; j < n; ++j) {
    sum += q1 * q1;
    const double q2 = std::sqrt(2.0 / (j + 1)) * x * q1 - std::sqrt(double(j) / (j + 1)) * q0;
    q0 = q1;
    q1 = q2;
  }
  return {q0, q1, sum};
}

}  // namespace

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw InputError("gauss_hermite: n must be >= 1");
  GaussHermite rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes(0) = 0.0;
    rule.weights(0) = std::sqrt(std::numbers::pi);
    return rule;
  }
  Vector diag = Vector::Zero(n);
  Vector sub(n - 1);
  for (int i = 1; i < n; ++i) sub(i - 1) = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("gauss_hermite: eigensolver failed");

  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    for (int it = 0; it < 6; ++it) {
      const HermiteTail h = scaled_hermite(n, x);
      if (h.q_prev == 0.0) break;
      const double step = h.q_last / (std::sqrt(2.0 * n) * h.q_prev);
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    const HermiteTail h = scaled_hermite(n, x);
    rule.nodes(i) = x;
    rule.weights(i) = std::exp(-x * x) / h.sum_sq;
  }
  // Enforce exact symmetry of the rule.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes(j) - rule.nodes(i));
    const double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = rule.weights(j) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  return rule;
}

namespace {

using C = std::complex<double>;

C simpson_step(const ComplexFunction& f, double a, double b, C fa, C fm, C fb, C whole,
               double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const C flm = f(lm), frm = f(rm);
  const C left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const C right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const C both = left + right;
  const C delta = both - whole;
  if (std::abs(delta) <= 15.0 * tol && depth >= 4) return both + delta / 15.0;
  if (depth >= max_depth) {
    std::ostringstream os;
    os << "adaptive_simpson: depth limit reached on [" << a << ", " << b << "], local error "
       << std::abs(delta);
    throw ConvergenceError(os.str());
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

std::complex<double> adaptive_simpson(const ComplexFunction& f, double a, double b,
                                      const AdaptiveOptions& opt) {
  if (!(b > a)) throw InputError("adaptive_simpson: empty interval");
  const double m = 0.5 * (a + b);
  const C fa = f(a), fm = f(m), fb = f(b);
  const C whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, opt.abs_tol, 0, opt.max_depth);
}

std::complex<double> adaptive_simpson_2d(const ComplexFunction2& f, double ax, double bx,
                                         double ay, double by, const AdaptiveOptions& opt) {
  AdaptiveOptions inner = opt;
  inner.abs_tol = opt.abs_tol / (bx - ax);
  return adaptive_simpson(
      [&](double x) {
        return adaptive_simpson([&](double y) { return f(x, y); }, ay, by, inner);
      },
      ax, bx, opt);
}

double regularized_lower_gamma(int a, double x) {
  if (a < 1) throw InputError("regularized_lower_gamma: a must be >= 1");
  if (x < 0) throw InputError("regularized_lower_gamma: x must be >= 0");
  if (x == 0) return 0.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a + 1.0);
  if (x < a + 1.0) {
    // P(a, x) = e^{-x} x^a / a! * sum_j x^j / ((a+1)...(a+j))
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < 100000; ++j) {
      term *= x / (a + j);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::exp(log_prefix) * sum;
  }
  // Q(a, x) = e^{-x} sum_{j<a} x^j / j!, summed from the largest term down.
  double term = std::exp(-x + (a - 1) * std::log(x) - std::lgamma(double(a)));
  double q = 0.0;
  for (int j = a - 1; j >= 0; --j) {
    q += term;
    term *= j / x;
  }
  return 1.0 - q;
}

}  // namespace qflow
