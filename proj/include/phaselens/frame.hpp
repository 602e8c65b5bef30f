#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phaselens/vector.hpp"

namespace phaselens {

/// Relative threshold below which a singular value or eigenvalue counts as
/// zero: s <= kRankTolerance * s_max.
inline constexpr double kRankTolerance = 1e-10;

/// The image of x under the magnitude map, indexed like the frame.
struct MagnitudePattern {
  std::vector<double> entries;
};

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// A family of analysis functionals. Either an explicit list of vectors in
/// R^n / C^n, or the pairwise-sum family {e_i + e_j}_{i<j} of l^2 truncated to
/// indices <= N and enumerated in lexicographic (i, j) order.
class Frame {
 public:
  /// Each vector must have `dim` coordinates; under Field::Real every
  /// coordinate must have zero imaginary part.
  static Frame explicit_frame(Field field, std::size_t dim,
                              const std::vector<std::vector<Scalar>>& vectors);
  static Frame explicit_real(std::size_t dim, const std::vector<std::vector<double>>& vectors);
  /// Columns of `synthesis` are the frame vectors.
  static Frame from_synthesis(Field field, const Eigen::MatrixXcd& synthesis);
  static Frame pairwise_sum(std::size_t truncation);

  bool is_explicit() const { return truncation_ == 0; }
  bool is_pairwise_sum() const { return truncation_ != 0; }

  Field field() const { return field_; }
  std::size_t functional_count() const;

  /// Explicit only.
  std::size_t dim() const;
  /// n x m matrix whose columns are the frame vectors. Explicit only.
  const Eigen::MatrixXcd& synthesis() const;

  /// PairwiseSum only.
  std::size_t truncation() const;
  /// 1-based (i, j) with i < j for functional `index` of a PairwiseSum frame.
  std::pair<std::size_t, std::size_t> pair_at(std::size_t index) const;

  /// Functional `index` as a vector.
  VectorRep functional(std::size_t index) const;
  std::string functional_label(std::size_t index) const;

  double max_functional_norm() const;

  friend bool operator==(const Frame& a, const Frame& b);

 private:
  Frame() = default;

  Field field_ = Field::Real;
  Eigen::MatrixXcd synthesis_;
  std::size_t truncation_ = 0;
};

/// Number of singular values above kRankTolerance * s_max.
std::size_t numerical_rank(const Eigen::MatrixXcd& m, double relative_tolerance = kRankTolerance);

/// Column submatrix.
Eigen::MatrixXcd select_columns(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& columns);

/// <x, phi_i> for every functional. Raises Incompatible when x does not live
/// in the frame's space (wrong dimension, complex vector under a real frame,
/// sequence-space vector for an explicit frame).
std::vector<Scalar> analysis_coefficients(const Frame& frame, const VectorRep& x);

MagnitudePattern analysis_magnitudes(const Frame& frame, const VectorRep& x);

/// S = sum_j phi_j phi_j^*.
Eigen::MatrixXcd frame_operator(const Frame& frame);

/// Extreme eigenvalues of S. NotAFrame when the family does not span.
FrameBounds frame_bounds(const Frame& frame);

/// {S^{-1} phi_j}. NotAFrame when the family does not span.
Frame canonical_dual(const Frame& frame);

/// Sorted-key JSON with 17 significant digits; the basis of the fingerprint.
std::string canonical_serialization(const Frame& frame);
/// Hex SHA-256 of the canonical serialization.
std::string fingerprint(const Frame& frame);

/// Dense vector from an Eigen column.
VectorRep to_vector(const Eigen::VectorXcd& v);
/// Eigen column from a vector living in the explicit frame's space.
Eigen::VectorXcd to_eigen(const Frame& frame, const VectorRep& x);

}  // namespace phaselens
