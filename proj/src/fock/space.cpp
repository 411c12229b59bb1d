#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qflow/fock.hpp"
#include "qflow/quadrature.hpp"

namespace qflow {

namespace {

constexpr Eigen::Index kNodeBlock = 8192;

void enumerate(int d, int total, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur[pos] = total;
    out.push_back(cur);
    return;
  }
  for (int m = total; m >= 0; --m) {
    cur[pos] = m;
    enumerate(d, total - m, cur, pos + 1, out);
  }
}

}  // namespace

int TruncationRule::degree(int k) const {
  if (k < 1) throw InputError("truncation rule: k must be >= 1");
  return std::max(minimum, static_cast<int>(std::ceil(multiplier * std::sqrt(double(k)))));
}

std::shared_ptr<const ModelSpace> ModelSpace::build(int d, int k, int n, int extra_nodes) {
  if (d < 1) throw InputError("build_space: d must be >= 1");
  if (k < 1) throw InputError("build_space: k must be >= 1");
  if (n < 0) throw InputError("build_space: N must be >= 0");
  std::shared_ptr<ModelSpace> s(new ModelSpace());
  s->d_ = d;
  s->k_ = k;
  s->n_ = n;

  MultiIndex cur(static_cast<std::size_t>(d), 0);
  for (int total = 0; total <= n; ++total) {
    const std::size_t before = s->indices_.size();
    enumerate(d, total, cur, 0, s->indices_);
    s->degrees_.insert(s->degrees_.end(), s->indices_.size() - before, total);
  }
  s->half_log_factorial_.resize(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) s->half_log_factorial_[m] = 0.5 * std::lgamma(m + 1.0);

  const GaussHermite gh = gauss_hermite(n + 1 + std::max(0, extra_nodes));
  const Eigen::Index per_axis = gh.nodes.size();
  const int axes = 2 * d;
  Eigen::Index total_nodes = 1;
  for (int a = 0; a < axes; ++a) total_nodes *= per_axis;
  s->nodes_.resize(axes, total_nodes);
  s->weights_.resize(total_nodes);
  for (Eigen::Index q = 0; q < total_nodes; ++q) {
    Eigen::Index rest = q;
    double w = 1.0;
    for (int a = 0; a < axes; ++a) {
      const Eigen::Index i = rest % per_axis;
      rest /= per_axis;
      s->nodes_(a, q) = gh.nodes(i);
      w *= gh.weights(i);
    }
    s->weights_(q) = w;
  }

  const Vector log_w = s->weights_.array().log().matrix();
  const ComplexMatrix gram = s->contract(s->nodes_, s->nodes_, log_w);
  s->gram_residual_ =
      (gram - ComplexMatrix::Identity(s->size(), s->size())).cwiseAbs().maxCoeff();
  if (!(s->gram_residual_ <= kGramTolerance)) {
    std::ostringstream os;
    os << "build_space: Gram gate failed for d=" << d << " k=" << k << " N=" << n
       << " (residual " << s->gram_residual_ << ")";
    throw GateFailure(os.str(), s->gram_residual_);
  }
  return s;
}

ComplexMatrix ModelSpace::scaled_basis(const Matrix& points, const Vector& log_scale) const {
  using C = std::complex<double>;
  const Eigen::Index q = points.cols();
  const double log_norm = -0.5 * d_ * std::log(std::numbers::pi);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  // logs(j, q) = log zeta_j at point q, complex.
  ComplexMatrix logs(d_, q);
  for (Eigen::Index p = 0; p < q; ++p) {
    for (int j = 0; j < d_; ++j) {
      const C z(points(j, p), points(j + d_, p));
      logs(j, p) = (z == C(0)) ? C(neg_inf, 0) : std::log(z);
    }
  }
  ComplexMatrix out(q, size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    const MultiIndex& m = indices_[static_cast<std::size_t>(i)];
    double shift = log_norm;
    for (int j = 0; j < d_; ++j) shift -= half_log_factorial_[m[j]];
    for (Eigen::Index p = 0; p < q; ++p) {
      C e(log_scale(p) + shift, 0.0);
      bool zero = false;
      for (int j = 0; j < d_; ++j) {
        if (m[j] == 0) continue;
        if (std::isinf(logs(j, p).real())) {
          zero = true;
          break;
        }
        e += double(m[j]) * logs(j, p);
      }
      out(p, i) = zero ? C(0) : std::exp(e);
    }
  }
  return out;
}

ComplexVector ModelSpace::normalized_basis_at(const Vector& zeta) const {
  if (zeta.size() != 2 * d_) throw DimensionMismatch("normalized_basis_at: point is not in R^{2d}");
  Vector scale(1);
  scale(0) = -0.5 * zeta.squaredNorm();
  return scaled_basis(zeta, scale).row(0).transpose();
}

ComplexMatrix ModelSpace::contract(const Matrix& left, const Matrix& right,
                                   const Vector& log_weight, const ComplexVector* phase) const {
  const Eigen::Index q = left.cols();
  if (right.cols() != q || log_weight.size() != q || (phase && phase->size() != q)) {
    throw DimensionMismatch("contract: node arrays disagree in length");
  }
  ComplexMatrix acc = ComplexMatrix::Zero(size(), size());
  for (Eigen::Index start = 0; start < q; start += kNodeBlock) {
    const Eigen::Index len = std::min(kNodeBlock, q - start);
    const Vector half = 0.5 * log_weight.segment(start, len);
    const ComplexMatrix l = scaled_basis(left.middleCols(start, len), half);
    ComplexMatrix r = scaled_basis(right.middleCols(start, len), half);
    if (phase) r = phase->segment(start, len).asDiagonal() * r;
    acc.noalias() += l.adjoint() * r;
  }
  if (!acc.allFinite()) {
    throw GateFailure("contract: non-finite quadrature sum (overflow)", std::numeric_limits<double>::infinity());
  }
  return acc;
}

TruncatedOperator TruncatedOperator::then(const TruncatedOperator& after) const {
  if (space != after.space && (space->size() != after.space->size())) {
    throw DimensionMismatch("operator composition across different spaces");
  }
  return {space, after.matrix * matrix};
}

int TruncatedOperator::top_band_width() const {
  return std::max(2, space->truncation() / 10);
}

int TruncatedOperator::reliable_degree(double tolerance) const {
  const int n = space->truncation();
  const int band_start = n - top_band_width() + 1;
  if (band_start <= 0) return n;
  int reliable = n;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    double tail = 0;
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (space->degree(j) >= band_start) tail += std::norm(matrix(i, j));
    }
    if (tail > tolerance) reliable = std::min(reliable, space->degree(i) - 1);
  }
  return std::max(reliable, -1);
}

TruncatedOperator identity_operator(const SpacePtr& space) {
  return {space, ComplexMatrix::Identity(space->size(), space->size())};
}

}  // namespace qflow
