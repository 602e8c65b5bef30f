#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace phaselens {

enum class Field { Real, Complex };

using Scalar = std::complex<double>;

const char* to_string(Field field);

/// Coordinates of a vector in H_n. Kept verbatim.
struct Dense {
  std::vector<Scalar> coords;
};

/// Finitely supported element of l^2. Indices are 1-based sequence
/// positions, strictly increasing, values nonzero.
struct FiniteSupport {
  std::vector<std::pair<std::size_t, Scalar>> entries;
};

/// The square-summable sequence whose k-th entry is 1/k.
struct Reciprocal {};

/// A vector either of a finite-dimensional space or of the sequence space.
///
/// Dense vectors may be paired with sequence-space vectors; coordinate i of a
/// Dense vector is read as sequence position i+1.
class VectorRep {
 public:
  using Storage = std::variant<Dense, FiniteSupport, Reciprocal>;

  VectorRep() : storage_(Dense{}) {}

  static VectorRep dense(std::vector<Scalar> coords);
  static VectorRep dense_real(const std::vector<double>& coords);
  /// Sorts by index and drops zero values. Index 0 or a repeated index is an
  /// InvalidArgument error.
  static VectorRep finite_support(std::vector<std::pair<std::size_t, Scalar>> entries);
  /// value * e_k, k 1-based.
  static VectorRep basis(std::size_t k, Scalar value = 1.0);
  static VectorRep reciprocal();
  static VectorRep zeros(std::size_t dim);

  const Storage& storage() const { return storage_; }
  bool is_dense() const { return std::holds_alternative<Dense>(storage_); }
  bool is_finite_support() const { return std::holds_alternative<FiniteSupport>(storage_); }
  bool is_reciprocal() const { return std::holds_alternative<Reciprocal>(storage_); }

  /// Dense only.
  std::size_t dim() const;
  const std::vector<Scalar>& dense_coords() const;

  /// Largest 1-based position that may be nonzero; nullopt for Reciprocal.
  std::optional<std::size_t> support_bound() const;

  /// Entry at 1-based sequence position k.
  Scalar at(std::size_t k) const;

  /// True when every stored value has zero imaginary part.
  bool is_real() const;

  VectorRep scaled(Scalar factor) const;

 private:
  explicit VectorRep(Storage storage) : storage_(std::move(storage)) {}
  Storage storage_;
};

/// <x, y>, linear in x and conjugate-linear in y.
Scalar inner_product(const VectorRep& x, const VectorRep& y);
double norm_squared(const VectorRep& x);
double norm(const VectorRep& x);

/// a*x + b*y. Reciprocal operands are not representable and raise
/// Incompatible. Two Dense operands must share their dimension; any other mix
/// yields a FiniteSupport result.
VectorRep linear_combination(Scalar a, const VectorRep& x, Scalar b, const VectorRep& y);

}  // namespace phaselens
