#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qflow/fock.hpp"
#include "qflow/quadrature.hpp"

namespace qflow {

namespace {
using C = std::complex<double>;
}

ComplexVector to_complex(const Vector& v) {
  if (v.size() % 2 != 0) throw DimensionMismatch("to_complex: odd-dimensional vector");
  const Eigen::Index d = v.size() / 2;
  ComplexVector z(d);
  for (Eigen::Index j = 0; j < d; ++j) z(j) = C(v(j), v(j + d));
  return z;
}

KernelSample kernel_value(const TruncatedOperator& op, const Vector& u, const Vector& w) {
  const ModelSpace& space = *op.space;
  if (u.size() != 2 * space.dim() || w.size() != 2 * space.dim()) {
    throw DimensionMismatch("kernel_value: offsets must lie in R^{2d}");
  }
  const ComplexVector bu = space.normalized_basis_at(u);
  const ComplexVector bw = space.normalized_basis_at(w);
  const double scale = std::pow(double(space.level()), space.dim());

  KernelSample s;
  s.u = u;
  s.w = w;
  s.value = scale * bu.transpose() * op.matrix * bw.conjugate();

  const int band_start = space.truncation() - op.top_band_width() + 1;
  double tail = 0;
  for (Eigen::Index m = 0; m < op.matrix.rows(); ++m) {
    const bool m_top = space.degree(m) >= band_start;
    const double am = std::abs(bu(m));
    for (Eigen::Index n = 0; n < op.matrix.cols(); ++n) {
      if (!m_top && space.degree(n) < band_start) continue;
      tail += am * std::abs(op.matrix(m, n)) * std::abs(bw(n));
    }
  }
  tail *= scale;
  s.tail = tail / std::max(std::abs(s.value), std::numeric_limits<double>::min());
  s.flagged = !(s.tail <= kKernelTailTolerance);
  return s;
}

std::complex<double> szego_kernel(const ModelSpace& space, const ComplexVector& z,
                                  const ComplexVector& w) {
  if (z.size() != space.dim() || w.size() != space.dim()) {
    throw DimensionMismatch("szego_kernel: points must lie in C^d");
  }
  const double k = space.level();
  const C zw = (z.transpose() * w.conjugate())(0);
  const C exponent = k * (zw - 0.5 * z.squaredNorm() - 0.5 * w.squaredNorm());
  return std::pow(k / std::numbers::pi, space.dim()) * std::exp(exponent);
}

std::complex<double> model_trace(const TruncatedOperator& op) { return op.matrix.trace(); }

LocalizedTrace localized_trace(const TruncatedOperator& op, double radius, double tail_tolerance) {
  if (!(radius > 0)) throw InputError("localized_trace: radius must be positive");
  const ModelSpace& space = *op.space;
  const double x = space.level() * radius * radius;
  LocalizedTrace out;
  out.value = 0;
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) {
    const double weight = regularized_lower_gamma(space.degree(i) + space.dim(), x);
    out.value += weight * op.matrix(i, i);
  }
  out.top_weight = regularized_lower_gamma(space.truncation() + space.dim(), x);
  if (!(out.top_weight <= tail_tolerance)) {
    std::ostringstream os;
    os << "localized_trace: ball of radius " << radius << " reaches the truncation degree "
       << space.truncation() << " at k=" << space.level() << " (top weight " << out.top_weight
       << ")";
    throw GateFailure(os.str(), out.top_weight);
  }
  return out;
}

std::complex<double> rotation_localized_trace(double angle, int k, double radius) {
  const C z = std::polar(1.0, angle);
  const double x = k * radius * radius;
  return (C(1) - std::exp(-x * (C(1) - z))) / (C(1) - z);
}

std::complex<double> rotation_truncated_trace(double angle, int n) {
  const C z = std::polar(1.0, angle);
  return (C(1) - std::pow(z, n + 1)) / (C(1) - z);
}

}  // namespace qflow
