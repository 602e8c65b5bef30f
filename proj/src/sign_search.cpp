#include "sign_search.hpp"

#include "phaselens/error.hpp"
#include "phaselens/frame.hpp"

namespace phaselens::detail {

SignPatternSolver::SignPatternSolver(const Eigen::MatrixXcd& synthesis, Field field)
    : field_(field) {
  const auto m = synthesis.cols();
  if (m > 62) throw Error(ErrorCode::EnumerationCapExceeded, "too many frame vectors for sign enumeration");
  pattern_count_ = std::uint64_t{1} << (m - 1);

  // Row j of A is phi_j^*, so (A y)_j = <y, phi_j>.
  const Eigen::MatrixXcd a = synthesis.adjoint();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(a);
  pseudo_inverse_ = cod.pseudoInverse();
  residual_projector_ = Eigen::MatrixXcd::Identity(m, m) - a * pseudo_inverse_;
  if (field_ == Field::Real) {
    pseudo_inverse_ = pseudo_inverse_.real().cast<Scalar>();
    residual_projector_ = residual_projector_.real().cast<Scalar>();
  }
}

bool SignPatternSolver::for_each_realizer(
    const Eigen::VectorXd& target, double relative_tolerance,
    const std::function<bool(const Eigen::VectorXcd&)>& visit) const {
  const auto m = target.size();
  if (m != residual_projector_.rows()) {
    throw Error(ErrorCode::Incompatible, "magnitude pattern length does not match the frame");
  }
  const double threshold = relative_tolerance * target.norm();
  Eigen::VectorXcd rhs(m);
  for (std::uint64_t p = 0; p < pattern_count_; ++p) {
    rhs(0) = target(0);
    for (Eigen::Index j = 1; j < m; ++j) {
      rhs(j) = ((p >> (j - 1)) & 1U) ? -target(j) : target(j);
    }
    const double residual = (residual_projector_ * rhs).norm();
    if (residual <= threshold) {
      Eigen::VectorXcd y = pseudo_inverse_ * rhs;
      if (visit(y)) return true;
    }
  }
  return false;
}

}  // namespace phaselens::detail
