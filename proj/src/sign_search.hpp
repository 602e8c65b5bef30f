#pragma once

// Least-squares search over sign patterns: given magnitudes t_j, find y with
// <y, phi_j> = eps_j t_j for eps in {+1,-1}^m, eps_0 = +1.

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "phaselens/vector.hpp"

namespace phaselens::detail {

class SignPatternSolver {
 public:
  SignPatternSolver(const Eigen::MatrixXcd& synthesis, Field field);

  /// 2^(m-1).
  std::uint64_t pattern_count() const { return pattern_count_; }

  /// Visits, in increasing pattern order, every y whose residual
  /// ||<y,phi_j> - eps_j t_j|| is <= relative_tolerance * ||t||. Pattern p sets
  /// eps_j = -1 exactly when bit (j-1) of p is set. Stops as soon as `visit`
  /// returns true and reports whether it did.
  bool for_each_realizer(const Eigen::VectorXd& target, double relative_tolerance,
                         const std::function<bool(const Eigen::VectorXcd&)>& visit) const;

 private:
  Field field_;
  std::uint64_t pattern_count_;
  Eigen::MatrixXcd pseudo_inverse_;       // n x m
  Eigen::MatrixXcd residual_projector_;   // m x m, I - A A^+
};

}  // namespace phaselens::detail
