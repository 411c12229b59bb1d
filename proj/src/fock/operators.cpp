#include <cmath>
#include <sstream>

#include "qflow/fock.hpp"

namespace qflow {

namespace {

using C = std::complex<double>;

void require_matching(const SpacePtr& space, int d, const char* where) {
  if (!space) throw InputError(std::string(where) + ": null model space");
  if (space->dim() != d) {
    std::ostringstream os;
    os << where << ": space has d=" << space->dim() << " but input has d=" << d;
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

TruncatedOperator pullback_operator(const SpacePtr& space, const QuadraticFlow& flow) {
  require_matching(space, flow.dim(), "pullback_operator");
  const Matrix& a = flow.differential.matrix();
  const Eigen::Index n = a.rows();
  const Matrix q = Matrix::Identity(n, n) + a.transpose() * a;
  // zeta = M eta turns exp(-zeta^t Q zeta / 2) into the rule's exp(-|eta|^2).
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * q);
  const Matrix m = es.operatorInverseSqrt();
  const Matrix left = m * space->nodes();
  const Matrix right = a * left;
  const Vector log_w = (space->weights().array().log() + std::log(m.determinant())).matrix();

  ComplexVector phase;
  const bool quadratic_phase = flow.lift_constant != 0.0;
  if (quadratic_phase) {
    phase.resize(left.cols());
    for (Eigen::Index p = 0; p < left.cols(); ++p) {
      const double fq = 0.5 * left.col(p).dot(flow.hamiltonian * left.col(p));
      phase(p) = std::polar(1.0, flow.lift_constant * flow.tau * fq);
    }
  }
  ComplexMatrix mat;
  try {
    mat = space->contract(left, right, log_w, quadratic_phase ? &phase : nullptr);
  } catch (const GateFailure&) {
    std::ostringstream os;
    os << "pullback_operator: quadrature overflow, |A| = " << a.norm() << " too large for N = "
       << space->truncation();
    throw GateFailure(os.str(), a.norm());
  }
  const double largest = mat.cwiseAbs().maxCoeff();
  if (!(largest <= 4.0)) {
    std::ostringstream os;
    os << "pullback_operator: entries of size " << largest << " for |A| = " << a.norm()
       << "; quadrature inadequate at N = " << space->truncation();
    throw GateFailure(os.str(), largest);
  }
  mat *= std::polar(1.0, space->level() * flow.tau * flow.energy_offset);
  return {space, std::move(mat)};
}

std::complex<double> SymbolProfile::base_value(int k) const {
  return rho0 + first_order_correction / double(k);
}

std::complex<double> SymbolProfile::operator()(const Vector& v, int k) const {
  double projection = v.size() > 0 ? v(0) : 0.0;
  if (direction.size() > 0) {
    if (direction.size() != v.size()) throw DimensionMismatch("symbol: direction size mismatch");
    projection = direction.dot(v);
  }
  return base_value(k) * std::polar(1.0, phase_gradient * projection);
}

TruncatedOperator symbol_operator(const SpacePtr& space, const SymbolProfile& symbol) {
  if (!space) throw InputError("symbol_operator: null model space");
  const int k = space->level();
  if (symbol.phase_gradient == 0.0) {
    return apply_symbol(identity_operator(space), symbol.base_value(k));
  }
  if (symbol.direction.size() != 0 && symbol.direction.size() != 2 * space->dim()) {
    throw DimensionMismatch("symbol_operator: direction is not in R^{2d}");
  }
  const Matrix& eta = space->nodes();
  ComplexVector values(eta.cols());
  const double scale = 1.0 / std::sqrt(double(k));
  for (Eigen::Index p = 0; p < eta.cols(); ++p) values(p) = symbol(scale * eta.col(p), k);
  const Vector log_w = space->weights().array().log().matrix();
  return {space, space->contract(eta, eta, log_w, &values)};
}

TruncatedOperator apply_symbol(const TruncatedOperator& op, std::complex<double> rho) {
  return {op.space, rho * op.matrix};
}

TruncatedOperator apply_symbol(const TruncatedOperator& op, const SymbolProfile& symbol) {
  return op.then(symbol_operator(op.space, symbol));
}

TruncatedOperator quantized_flow(const SpacePtr& space, const QuadraticFlow& flow,
                                 const SymbolProfile& symbol) {
  return apply_symbol(pullback_operator(space, flow), symbol);
}

TruncatedOperator toeplitz_f(const SpacePtr& space, const Matrix& h, double f0) {
  if (!space) throw InputError("toeplitz_f: null model space");
  if (h.rows() != 2 * space->dim() || h.cols() != h.rows()) {
    throw DimensionMismatch("toeplitz_f: H must be 2d x 2d");
  }
  const Matrix& eta = space->nodes();
  ComplexVector values(eta.cols());
  for (Eigen::Index p = 0; p < eta.cols(); ++p) values(p) = 0.5 * eta.col(p).dot(h * eta.col(p));
  const Vector log_w = space->weights().array().log().matrix();
  ComplexMatrix mat = space->contract(eta, eta, log_w, &values) / double(space->level());
  mat.diagonal().array() += f0;
  const double asym = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, mat.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "toeplitz_f: compressed multiplication operator is not self-adjoint (" << asym << ")";
    throw GateFailure(os.str(), asym);
  }
  return {space, std::move(mat)};
}

}  // namespace qflow
