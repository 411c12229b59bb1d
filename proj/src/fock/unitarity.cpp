#include <cmath>
#include <sstream>

#include "qflow/fit.hpp"
#include "qflow/fock.hpp"

namespace qflow {

UnitarityDefect unitarity_defect(const TruncatedOperator& op) {
  UnitarityDefect out;
  out.reliable_degree = op.reliable_degree();
  out.excluded_band = op.space->truncation() - out.reliable_degree;
  Eigen::Index rows = 0;
  while (rows < op.matrix.rows() && op.space->degree(rows) <= out.reliable_degree) ++rows;
  if (rows == 0) {
    throw GateFailure("unitarity_defect: no basis row is free of truncation effects",
                      double(op.space->truncation()));
  }
  const ComplexMatrix block = op.matrix.topRows(rows);
  const ComplexMatrix gram = block * block.adjoint() - ComplexMatrix::Identity(rows, rows);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  out.defect = es.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

double diagonal_defect(const TruncatedOperator& op) {
  return op.matrix.row(0).squaredNorm() - 1.0;
}

SchrodingerResidual schrodinger_residual(const SpacePtr& space, const QuadraticFlow& flow,
                                         const SymbolProfile& symbol, const Vector& u,
                                         const Vector& w, double dtau) {
  const int k = space->level();
  const int d = space->dim();
  if (dtau < 0) throw InputError("schrodinger_residual: dtau must be >= 0");
  if (dtau == 0) dtau = 0.005 / (k * std::max(1.0, std::abs(flow.energy_offset)));

  const TruncatedOperator symbol_op = symbol_operator(space, symbol);
  auto kernel_at = [&](double tau) {
    QuadraticFlow f = flow_from_hamiltonian(flow.hamiltonian, tau, flow.energy_offset,
                                            flow.lift_constant);
    return kernel_value(pullback_operator(space, f).then(symbol_op), u, w).value;
  };

  const TruncatedOperator current = pullback_operator(space, flow).then(symbol_op);
  const TruncatedOperator generator = toeplitz_f(space, flow.hamiltonian, flow.energy_offset);
  const TruncatedOperator applied{space, double(k) * generator.matrix * current.matrix};
  const std::complex<double> gen = std::complex<double>(0, 1) * kernel_value(applied, u, w).value;

  const double norm =
      std::pow(double(k), d) * std::exp(std::real(s_form(flow.differential, u, w)));
  auto residual_for = [&](double h, std::complex<double>* derivative) {
    const std::complex<double> diff = (kernel_at(flow.tau + h) - kernel_at(flow.tau - h)) / (2 * h);
    if (derivative) *derivative = diff;
    return std::abs(diff - gen) / norm;
  };

  SchrodingerResidual out;
  out.dtau = dtau;
  out.generator_term = gen;
  out.residual = residual_for(dtau, &out.derivative);
  out.residual_half = residual_for(0.5 * dtau, nullptr);
  out.halving_change = std::abs(out.residual - out.residual_half) /
                       std::max(out.residual_half, std::numeric_limits<double>::min());
  if (!(out.halving_change < 0.1)) {
    std::ostringstream os;
    os << "schrodinger_residual: step dtau=" << dtau << " too large at k=" << k
       << " (halving changes the residual by " << 100 * out.halving_change << "%)";
    throw ConvergenceError(os.str());
  }
  return out;
}

SymbolCorrectionFit fit_symbol_correction(const std::vector<int>& ks,
                                          const std::vector<double>& diagonal_defects,
                                          double rho0, double nu_value, int d) {
  if (ks.size() != diagonal_defects.size() || ks.size() < 3) {
    throw InputError("fit_symbol_correction: need at least three (k, defect) pairs");
  }
  if (!(rho0 > 0)) throw InputError("fit_symbol_correction: rho0 must be positive");
  SymbolCorrectionFit out;
  double largest = 0;
  for (double v : diagonal_defects) largest = std::max(largest, std::abs(v));
  if (largest <= 1e-13) return out;  // already unitary on the diagonal

  std::vector<double> inv_k;
  for (int k : ks) inv_k.push_back(1.0 / k);
  const PolynomialFit fit = fit_polynomial_no_constant(inv_k, diagonal_defects, 2);
  out.c1 = fit.coefficients[0];
  out.c2 = fit.coefficients[1];
  out.r_squared = fit.r_squared;
  if (!(out.r_squared >= 0.95)) {
    std::ostringstream os;
    os << "fit_symbol_correction: ill-conditioned fit of the 1/k coefficient (R^2 = "
       << out.r_squared << ")";
    throw ConvergenceError(os.str());
  }
  out.f1 = -out.c1 * nu_value / (std::pow(2.0, d + 1) * rho0);
  return out;
}

}  // namespace qflow
