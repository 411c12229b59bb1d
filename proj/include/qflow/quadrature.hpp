#pragma once

#include <complex>
#include <functional>

#include "qflow/symplectic.hpp"

namespace qflow {

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
struct GaussHermite {
  Vector nodes;
  Vector weights;
};

/// n-point rule: Golub-Welsch for the nodes, Newton polish on the orthonormal
/// Hermite recurrence, weights from the Christoffel sum (stable for the tiny
/// tail weights where eigenvector-based weights lose all digits).
GaussHermite gauss_hermite(int n);

using RealFunction = std::function<double(double)>;
using ComplexFunction = std::function<std::complex<double>(double)>;
using ComplexFunction2 = std::function<std::complex<double>(double, double)>;

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
};

/// Adaptive Simpson with the Richardson correction (S2 + (S2 - S1)/15) on
/// acceptance. Throws ConvergenceError when the depth budget is exhausted.
std::complex<double> adaptive_simpson(const ComplexFunction& f, double a, double b,
                                      const AdaptiveOptions& opt = {});

/// Iterated adaptive Simpson over the rectangle [ax, bx] x [ay, by].
std::complex<double> adaptive_simpson_2d(const ComplexFunction2& f, double ax, double bx,
                                         double ay, double by, const AdaptiveOptions& opt = {});

/// Regularized lower incomplete gamma P(a, x) for integer a >= 1, accurate in
/// both tails.
double regularized_lower_gamma(int a, double x);

}  // namespace qflow
