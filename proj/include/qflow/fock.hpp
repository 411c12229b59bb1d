#pragma once

// Bargmann-Fock model of the level-k Hardy space component.
//
// Everything is expressed in rescaled coordinates zeta = sqrt(k) z, where the
// level-k space has orthonormal basis
//
//   e_m(zeta) = zeta^m / sqrt(pi^d m!)   against   exp(-|zeta|^2) d zeta,
//
// which is the normalized monomial basis z^m sqrt(k^{|m|+d} / (pi^d m!)) for
// the weight exp(-k|z|^2) after the change of variables. Kernels are reported
// in the original normalization, so the reproducing kernel on the diagonal is
// (k/pi)^d.
//
// Operators are stored as matrix(m, n) = <Op e_n, e_m>, and the kernel of Op
// is sum_{m,n} e_m(x) matrix(m, n) conj(e_n(y)) times the Gaussian
// trivialization factors, at fiber angle zero.

#include <memory>
#include <string>
#include <vector>

#include "qflow/asymptotics.hpp"
#include "qflow/symplectic.hpp"

namespace qflow {

using MultiIndex = std::vector<int>;

/// N(k) = max(minimum, ceil(multiplier sqrt(k))).
struct TruncationRule {
  double multiplier = 6.0;
  int minimum = 72;

  int degree(int k) const;
};

class ModelSpace {
 public:
  static constexpr double kGramTolerance = 1e-9;

  /// Builds the degree <= n space at level k and runs the Gram gate.
  /// `extra_nodes` Gauss-Hermite nodes per real axis are added beyond the
  /// n + 1 needed for exactness on polynomial integrands.
  static std::shared_ptr<const ModelSpace> build(int d, int k, int n, int extra_nodes = 12);

  int dim() const noexcept { return d_; }
  int level() const noexcept { return k_; }
  int truncation() const noexcept { return n_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  int degree(Eigen::Index i) const { return degrees_[static_cast<std::size_t>(i)]; }
  double gram_residual() const noexcept { return gram_residual_; }

  /// Tensor Gauss-Hermite rule on R^{2d} for exp(-|eta|^2); nodes are columns.
  const Matrix& nodes() const noexcept { return nodes_; }
  const Vector& weights() const noexcept { return weights_; }

  /// Rows e_m(zeta_q) * exp(log_scale_q) for the columns zeta_q of `points`,
  /// evaluated in log space so large degrees at far nodes do not overflow.
  ComplexMatrix scaled_basis(const Matrix& points, const Vector& log_scale) const;

  /// e_m(zeta) exp(-|zeta|^2 / 2) for one rescaled point.
  ComplexVector normalized_basis_at(const Vector& zeta) const;

  /// sum_q c_q conj(e_m(left_q)) e_n(right_q) w_q, accumulated in node blocks.
  /// `log_weight` is log w_q; `phase` (optional) multiplies the right factor.
  ComplexMatrix contract(const Matrix& left, const Matrix& right, const Vector& log_weight,
                         const ComplexVector* phase = nullptr) const;

 private:
  ModelSpace() = default;

  int d_ = 1, k_ = 1, n_ = 0;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  Matrix nodes_;
  Vector weights_;
  std::vector<double> half_log_factorial_;
  double gram_residual_ = 0;
};

using SpacePtr = std::shared_ptr<const ModelSpace>;

/// Operator on a truncated model space.
struct TruncatedOperator {
  SpacePtr space;
  ComplexMatrix matrix;

  TruncatedOperator adjoint() const { return {space, matrix.adjoint()}; }
  TruncatedOperator then(const TruncatedOperator& after) const;  // after * this

  /// Largest degree D such that every row of degree <= D has squared mass
  /// below `tolerance` in the top degree band. Rows above D see truncation.
  int reliable_degree(double tolerance = 1e-20) const;
  int top_band_width() const;
};

TruncatedOperator identity_operator(const SpacePtr& space);

// ---------------------------------------------------------------------------
// Flows.

/// Lift coefficient of the quadratic part of the Hamiltonian in the fiber
/// phase; fixed by calibrate_lift_constant (see tests).
inline constexpr double kLiftConstant = 0.0;

/// Linear flow of f(v) = f0 + v^t H v / 2 with vector field -J0 H v.
struct QuadraticFlow {
  Matrix hamiltonian;
  double tau = 0;
  SymplecticMatrix<double> differential = SymplecticMatrix<double>::identity(1);  // d phi_{-tau}
  double energy_offset = 0;
  double lift_constant = kLiftConstant;

  int dim() const { return differential.dim(); }
  double energy(const Vector& v) const;
  Vector vector_field(const Vector& v) const;
  Vector map(const Vector& v) const;  // phi_tau(v)
};

QuadraticFlow flow_from_hamiltonian(const Matrix& h, double tau, double energy_offset = 0.0,
                                    double lift_constant = kLiftConstant);

struct LiftCalibration {
  double chosen = 0;
  std::vector<std::pair<double, double>> defects;  // (candidate, unitarity defect)
};

/// Picks the unique candidate making the rotation flow exactly unitary.
LiftCalibration calibrate_lift_constant(const std::vector<double>& candidates, double tau = 0.7,
                                        int k = 16, int n = 24);

// ---------------------------------------------------------------------------
// Operators.

/// Pi o (lifted phi_{-tau})^* o Pi on the truncated space.
TruncatedOperator pullback_operator(const SpacePtr& space, const QuadraticFlow& flow);

/// Zeroth-order Toeplitz symbol rho(v) = (rho0 + correction/k) exp(i beta <xi, v>)
/// in unscaled coordinates; beta = 0 is a constant symbol.
struct SymbolProfile {
  std::complex<double> rho0{1.0};
  double phase_gradient = 0;
  Vector direction;  // unit vector in R^{2d}; empty means the first axis
  double first_order_correction = 0;

  std::complex<double> base_value(int k) const;
  std::complex<double> operator()(const Vector& v, int k) const;
};

TruncatedOperator symbol_operator(const SpacePtr& space, const SymbolProfile& symbol);
TruncatedOperator apply_symbol(const TruncatedOperator& op, std::complex<double> rho);
TruncatedOperator apply_symbol(const TruncatedOperator& op, const SymbolProfile& symbol);

/// R o Pi o phi^* o Pi with R the Toeplitz operator of `symbol`.
TruncatedOperator quantized_flow(const SpacePtr& space, const QuadraticFlow& flow,
                                 const SymbolProfile& symbol);

/// T_f = Pi M_f Pi for f(v) = f0 + v^t H v / 2 (unscaled v).
TruncatedOperator toeplitz_f(const SpacePtr& space, const Matrix& h, double f0 = 0.0);

// ---------------------------------------------------------------------------
// Kernels, traces and unitarity.

struct KernelSample {
  Vector u, w;                  // rescaled offsets
  std::complex<double> value;
  double tail = 0;              // top-band contribution relative to |value|
  bool flagged = false;
};

inline constexpr double kKernelTailTolerance = 1e-7;

/// Kernel of `op` at x = u / sqrt(k), y = w / sqrt(k) around the origin.
KernelSample kernel_value(const TruncatedOperator& op, const Vector& u, const Vector& w);

/// (k/pi)^d exp(k (z . conj w - |z|^2/2 - |w|^2/2)) at unscaled points.
std::complex<double> szego_kernel(const ModelSpace& space, const ComplexVector& z,
                                  const ComplexVector& w);

/// Identifies R^{2d} (x..., y...) with C^d.
ComplexVector to_complex(const Vector& v);

std::complex<double> model_trace(const TruncatedOperator& op);

struct LocalizedTrace {
  std::complex<double> value;
  double top_weight = 0;   // bump weight of the highest-degree basis element
};

/// sum_n w_n U_nn with w_n the mass of e_n inside the ball |v| < radius;
/// this is the trace of op composed with the ball indicator.
LocalizedTrace localized_trace(const TruncatedOperator& op, double radius,
                               double tail_tolerance = 1e-12);

/// Closed form of the localized trace for rotation by `angle` (d = 1):
/// (1 - exp(-x (1 - e^{ia}))) / (1 - e^{ia}) with x = k radius^2.
std::complex<double> rotation_localized_trace(double angle, int k, double radius);

/// (1 - e^{i(N+1)a}) / (1 - e^{ia}): plain truncated trace of the rotation.
std::complex<double> rotation_truncated_trace(double angle, int n);

struct UnitarityDefect {
  double defect = 0;      // || U U^* - I || on rows of degree <= reliable_degree
  int reliable_degree = 0;
  int excluded_band = 0;  // N - reliable_degree
};

UnitarityDefect unitarity_defect(const TruncatedOperator& op);

/// (pi/k)^d (U U^*)(0, 0) - 1.
double diagonal_defect(const TruncatedOperator& op);

struct SchrodingerResidual {
  double residual = 0;        // normalized with step dtau
  double residual_half = 0;   // normalized with step dtau / 2
  double halving_change = 0;  // |r - r_half| / r_half
  double dtau = 0;
  std::complex<double> derivative;
  std::complex<double> generator_term;
};

/// Compares the central difference d/dtau of the quantized flow's kernel at
/// (u, w) against i (k T_f U), normalized by k^d exp(Re S).
SchrodingerResidual schrodinger_residual(const SpacePtr& space, const QuadraticFlow& flow,
                                         const SymbolProfile& symbol, const Vector& u,
                                         const Vector& w, double dtau = 0.0);

// ---------------------------------------------------------------------------
// First-order symbol correction.

struct SymbolCorrectionFit {
  double f1 = 0;           // real correction: symbol rho0 + f1 / k
  double c1 = 0, c2 = 0;   // diagonal defect ~ c1 / k + c2 / k^2
  double r_squared = 1;
};

/// Fits (k, diagonal defect) pairs and returns the f1 cancelling the 1/k term.
SymbolCorrectionFit fit_symbol_correction(const std::vector<int>& ks,
                                          const std::vector<double>& diagonal_defects,
                                          double rho0, double nu_value, int d);

}  // namespace qflow
