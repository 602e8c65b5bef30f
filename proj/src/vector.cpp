#include "phaselens/vector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "phaselens/error.hpp"

namespace phaselens {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Incompatible: return "Incompatible";
    case ErrorCode::NotAFrame: return "NotAFrame";
    case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

const char* to_string(Field field) {
  return field == Field::Real ? "real" : "complex";
}

namespace {

using Entries = std::vector<std::pair<std::size_t, Scalar>>;

// sum_{k>=1} 1/k^2
constexpr double kReciprocalNormSquared = std::numbers::pi * std::numbers::pi / 6.0;

Entries as_entries(const VectorRep& v) {
  if (const auto* fs = std::get_if<FiniteSupport>(&v.storage())) return fs->entries;
  const auto& coords = std::get<Dense>(v.storage()).coords;
  Entries out;
  out.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] != Scalar{0.0}) out.emplace_back(i + 1, coords[i]);
  }
  return out;
}

Scalar sparse_dot(const Entries& x, const Entries& y) {
  Scalar acc{0.0};
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first == y[j].first) {
      acc += x[i].second * std::conj(y[j].second);
      ++i;
      ++j;
    } else if (x[i].first < y[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return acc;
}

// <x, reciprocal>
Scalar dot_reciprocal(const Entries& x) {
  Scalar acc{0.0};
  for (const auto& [k, v] : x) acc += v / static_cast<double>(k);
  return acc;
}

}  // namespace

VectorRep VectorRep::dense(std::vector<Scalar> coords) {
  return VectorRep(Dense{std::move(coords)});
}

VectorRep VectorRep::dense_real(const std::vector<double>& coords) {
  std::vector<Scalar> c(coords.begin(), coords.end());
  return dense(std::move(c));
}

VectorRep VectorRep::finite_support(Entries entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Entries kept;
  kept.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first == 0) {
      throw Error(ErrorCode::InvalidArgument, "finite-support indices are 1-based");
    }
    if (i > 0 && entries[i].first == entries[i - 1].first) {
      throw Error(ErrorCode::InvalidArgument,
                  "repeated finite-support index " + std::to_string(entries[i].first));
    }
    if (entries[i].second != Scalar{0.0}) kept.push_back(entries[i]);
  }
  return VectorRep(FiniteSupport{std::move(kept)});
}

VectorRep VectorRep::basis(std::size_t k, Scalar value) {
  return finite_support({{k, value}});
}

VectorRep VectorRep::reciprocal() { return VectorRep(Reciprocal{}); }

VectorRep VectorRep::zeros(std::size_t dim) {
  return dense(std::vector<Scalar>(dim, Scalar{0.0}));
}

std::size_t VectorRep::dim() const {
  return dense_coords().size();
}

const std::vector<Scalar>& VectorRep::dense_coords() const {
  const auto* d = std::get_if<Dense>(&storage_);
  if (d == nullptr) throw Error(ErrorCode::Incompatible, "vector is not dense");
  return d->coords;
}

std::optional<std::size_t> VectorRep::support_bound() const {
  if (const auto* d = std::get_if<Dense>(&storage_)) return d->coords.size();
  if (const auto* fs = std::get_if<FiniteSupport>(&storage_)) {
    return fs->entries.empty() ? 0 : fs->entries.back().first;
  }
  return std::nullopt;
}

Scalar VectorRep::at(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "sequence positions are 1-based");
  if (const auto* d = std::get_if<Dense>(&storage_)) {
    return k <= d->coords.size() ? d->coords[k - 1] : Scalar{0.0};
  }
  if (const auto* fs = std::get_if<FiniteSupport>(&storage_)) {
    auto it = std::lower_bound(fs->entries.begin(), fs->entries.end(), k,
                               [](const auto& e, std::size_t key) { return e.first < key; });
    return (it != fs->entries.end() && it->first == k) ? it->second : Scalar{0.0};
  }
  return Scalar{1.0 / static_cast<double>(k)};
}

bool VectorRep::is_real() const {
  if (const auto* d = std::get_if<Dense>(&storage_)) {
    return std::all_of(d->coords.begin(), d->coords.end(),
                       [](const Scalar& s) { return s.imag() == 0.0; });
  }
  if (const auto* fs = std::get_if<FiniteSupport>(&storage_)) {
    return std::all_of(fs->entries.begin(), fs->entries.end(),
                       [](const auto& e) { return e.second.imag() == 0.0; });
  }
  return true;
}

VectorRep VectorRep::scaled(Scalar factor) const {
  if (const auto* d = std::get_if<Dense>(&storage_)) {
    std::vector<Scalar> c = d->coords;
    for (auto& v : c) v *= factor;
    return dense(std::move(c));
  }
  if (const auto* fs = std::get_if<FiniteSupport>(&storage_)) {
    Entries e = fs->entries;
    for (auto& [k, v] : e) v *= factor;
    return finite_support(std::move(e));
  }
  if (factor == Scalar{1.0}) return *this;
  throw Error(ErrorCode::Incompatible, "scaled reciprocal sequence is not representable");
}

Scalar inner_product(const VectorRep& x, const VectorRep& y) {
  if (x.is_dense() && y.is_dense()) {
    const auto& a = x.dense_coords();
    const auto& b = y.dense_coords();
    if (a.size() != b.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "inner product of dense vectors of dimension " + std::to_string(a.size()) +
                      " and " + std::to_string(b.size()));
    }
    Scalar acc{0.0};
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
    return acc;
  }
  if (x.is_reciprocal() && y.is_reciprocal()) return Scalar{kReciprocalNormSquared};
  if (y.is_reciprocal()) return dot_reciprocal(as_entries(x));
  if (x.is_reciprocal()) return std::conj(dot_reciprocal(as_entries(y)));
  return sparse_dot(as_entries(x), as_entries(y));
}

double norm_squared(const VectorRep& x) {
  if (x.is_reciprocal()) return kReciprocalNormSquared;
  double acc = 0.0;
  if (x.is_dense()) {
    for (const auto& v : x.dense_coords()) acc += std::norm(v);
  } else {
    for (const auto& [k, v] : std::get<FiniteSupport>(x.storage()).entries) acc += std::norm(v);
  }
  return acc;
}

double norm(const VectorRep& x) { return std::sqrt(norm_squared(x)); }

VectorRep linear_combination(Scalar a, const VectorRep& x, Scalar b, const VectorRep& y) {
  if (x.is_reciprocal() || y.is_reciprocal()) {
    throw Error(ErrorCode::Incompatible, "linear combination with the reciprocal sequence");
  }
  if (x.is_dense() && y.is_dense()) {
    const auto& u = x.dense_coords();
    const auto& v = y.dense_coords();
    if (u.size() != v.size()) {
      throw Error(ErrorCode::DimensionMismatch, "linear combination of mismatched dense vectors");
    }
    std::vector<Scalar> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = a * u[i] + b * v[i];
    return VectorRep::dense(std::move(out));
  }
  const Entries ex = as_entries(x);
  const Entries ey = as_entries(y);
  Entries out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ex.size() || j < ey.size()) {
    if (j == ey.size() || (i < ex.size() && ex[i].first < ey[j].first)) {
      out.emplace_back(ex[i].first, a * ex[i].second);
      ++i;
    } else if (i == ex.size() || ey[j].first < ex[i].first) {
      out.emplace_back(ey[j].first, b * ey[j].second);
      ++j;
    } else {
      out.emplace_back(ex[i].first, a * ex[i].second + b * ey[j].second);
      ++i;
      ++j;
    }
  }
  return VectorRep::finite_support(std::move(out));
}

}  // namespace phaselens
