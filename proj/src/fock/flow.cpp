#include <cmath>
#include <sstream>

#include "qflow/fock.hpp"

namespace qflow {

double QuadraticFlow::energy(const Vector& v) const {
  return energy_offset + 0.5 * v.dot(hamiltonian * v);
}

Vector QuadraticFlow::vector_field(const Vector& v) const {
  return -standard_complex_structure(dim()) * (hamiltonian * v);
}

Vector QuadraticFlow::map(const Vector& v) const {
  // phi_tau is the inverse of the stored differential of phi_{-tau}.
  return differential.inverse() * v;
}

QuadraticFlow flow_from_hamiltonian(const Matrix& h, double tau, double energy_offset,
                                    double lift_constant) {
  if (h.rows() != h.cols() || h.rows() == 0 || h.rows() % 2 != 0) {
    throw DimensionMismatch("flow_from_hamiltonian: H must be 2d x 2d");
  }
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + h.cwiseAbs().maxCoeff())) {
    throw InputError("flow_from_hamiltonian: H is not symmetric");
  }
  QuadraticFlow flow;
  flow.hamiltonian = 0.5 * (h + h.transpose());
  flow.tau = tau;
  flow.energy_offset = energy_offset;
  flow.lift_constant = lift_constant;
  // phi_tau = exp(-tau J0 H), so d phi_{-tau} = exp(tau J0 H).
  flow.differential = exp_hamiltonian<double>(flow.hamiltonian, -tau);
  return flow;
}

LiftCalibration calibrate_lift_constant(const std::vector<double>& candidates, double tau, int k,
                                        int n) {
  if (candidates.empty()) throw InputError("calibrate_lift_constant: no candidates");
  const SpacePtr space = ModelSpace::build(1, k, n);
  LiftCalibration out;
  int passing = 0;
  for (double c : candidates) {
    const QuadraticFlow flow = flow_from_hamiltonian(Matrix::Identity(2, 2), tau, 0.0, c);
    const double defect = unitarity_defect(pullback_operator(space, flow)).defect;
    out.defects.emplace_back(c, defect);
    if (defect <= 1e-7) {
      out.chosen = c;
      ++passing;
    }
  }
  if (passing != 1) {
    std::ostringstream os;
    os << "calibrate_lift_constant: " << passing << " candidates give a unitary rotation";
    throw ConvergenceError(os.str());
  }
  return out;
}

}  // namespace qflow
