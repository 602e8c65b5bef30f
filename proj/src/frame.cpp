#include "phaselens/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "phaselens/error.hpp"

namespace phaselens {

Frame Frame::explicit_frame(Field field, std::size_t dim,
                            const std::vector<std::vector<Scalar>>& vectors) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "frame dimension must be positive");
  if (vectors.empty()) throw Error(ErrorCode::InvalidArgument, "frame needs at least one vector");
  Eigen::MatrixXcd synthesis(dim, vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("frame vector {} has {} coordinates, expected {}", j,
                              vectors[j].size(), dim));
    }
    for (std::size_t k = 0; k < dim; ++k) synthesis(k, j) = vectors[j][k];
  }
  return from_synthesis(field, synthesis);
}

Frame Frame::explicit_real(std::size_t dim, const std::vector<std::vector<double>>& vectors) {
  std::vector<std::vector<Scalar>> v;
  v.reserve(vectors.size());
  for (const auto& row : vectors) v.emplace_back(row.begin(), row.end());
  return explicit_frame(Field::Real, dim, v);
}

Frame Frame::from_synthesis(Field field, const Eigen::MatrixXcd& synthesis) {
  if (synthesis.rows() == 0 || synthesis.cols() == 0) {
    throw Error(ErrorCode::InvalidArgument, "empty frame");
  }
  if (field == Field::Real && synthesis.imag().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::FieldMismatch, "real frame with complex entries");
  }
  Frame f;
  f.field_ = field;
  f.synthesis_ = synthesis;
  return f;
}

Frame Frame::pairwise_sum(std::size_t truncation) {
  if (truncation < 2) {
    throw Error(ErrorCode::InvalidArgument, "pairwise-sum truncation must be at least 2");
  }
  Frame f;
  f.field_ = Field::Real;
  f.truncation_ = truncation;
  return f;
}

std::size_t Frame::functional_count() const {
  if (is_explicit()) return static_cast<std::size_t>(synthesis_.cols());
  return truncation_ * (truncation_ - 1) / 2;
}

std::size_t Frame::dim() const {
  if (!is_explicit()) throw Error(ErrorCode::Incompatible, "pairwise-sum frame has no finite dimension");
  return static_cast<std::size_t>(synthesis_.rows());
}

const Eigen::MatrixXcd& Frame::synthesis() const {
  if (!is_explicit()) throw Error(ErrorCode::Incompatible, "pairwise-sum frame has no synthesis matrix");
  return synthesis_;
}

std::size_t Frame::truncation() const {
  if (!is_pairwise_sum()) throw Error(ErrorCode::Incompatible, "explicit frame has no truncation");
  return truncation_;
}

std::pair<std::size_t, std::size_t> Frame::pair_at(std::size_t index) const {
  const std::size_t n = truncation();
  if (index >= functional_count()) throw Error(ErrorCode::InvalidArgument, "functional index out of range");
  std::size_t i = 1;
  while (index >= n - i) {
    index -= n - i;
    ++i;
  }
  return {i, i + 1 + index};
}

VectorRep Frame::functional(std::size_t index) const {
  if (index >= functional_count()) throw Error(ErrorCode::InvalidArgument, "functional index out of range");
  if (is_explicit()) {
    std::vector<Scalar> c(synthesis_.rows());
    for (Eigen::Index k = 0; k < synthesis_.rows(); ++k) c[k] = synthesis_(k, index);
    return VectorRep::dense(std::move(c));
  }
  const auto [i, j] = pair_at(index);
  return VectorRep::finite_support({{i, 1.0}, {j, 1.0}});
}

std::string Frame::functional_label(std::size_t index) const {
  if (is_explicit()) return fmt::format("phi_{}", index);
  const auto [i, j] = pair_at(index);
  return fmt::format("e_{}+e_{}", i, j);
}

double Frame::max_functional_norm() const {
  if (is_pairwise_sum()) return std::sqrt(2.0);
  return synthesis_.colwise().norm().maxCoeff();
}

bool operator==(const Frame& a, const Frame& b) {
  if (a.field_ != b.field_ || a.truncation_ != b.truncation_) return false;
  if (a.is_pairwise_sum()) return true;
  return a.synthesis_.rows() == b.synthesis_.rows() && a.synthesis_.cols() == b.synthesis_.cols() &&
         a.synthesis_ == b.synthesis_;
}

std::size_t numerical_rank(const Eigen::MatrixXcd& m, double relative_tolerance) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = relative_tolerance * s(0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return rank;
}

Eigen::MatrixXcd select_columns(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& columns) {
  Eigen::MatrixXcd out(m.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) out.col(c) = m.col(columns[c]);
  return out;
}

VectorRep to_vector(const Eigen::VectorXcd& v) {
  return VectorRep::dense(std::vector<Scalar>(v.data(), v.data() + v.size()));
}

Eigen::VectorXcd to_eigen(const Frame& frame, const VectorRep& x) {
  const std::size_t n = frame.dim();
  if (frame.field() == Field::Real && !x.is_real()) {
    throw Error(ErrorCode::Incompatible, "complex vector paired with a real frame");
  }
  if (x.is_dense()) {
    if (x.dim() != n) {
      throw Error(ErrorCode::Incompatible,
                  fmt::format("vector of dimension {} paired with a frame in dimension {}", x.dim(), n));
    }
    return Eigen::Map<const Eigen::VectorXcd>(x.dense_coords().data(), static_cast<Eigen::Index>(n));
  }
  const auto bound = x.support_bound();
  if (!bound || *bound > n) {
    throw Error(ErrorCode::Incompatible, "sequence-space vector paired with a finite frame");
  }
  Eigen::VectorXcd out(n);
  for (std::size_t k = 0; k < n; ++k) out(k) = x.at(k + 1);
  return out;
}

std::vector<Scalar> analysis_coefficients(const Frame& frame, const VectorRep& x) {
  if (frame.is_explicit()) {
    const Eigen::VectorXcd v = to_eigen(frame, x);
    const Eigen::VectorXcd c = frame.synthesis().adjoint() * v;
    return std::vector<Scalar>(c.data(), c.data() + c.size());
  }
  if (!x.is_real()) throw Error(ErrorCode::Incompatible, "complex vector paired with a real frame");
  const std::size_t n = frame.truncation();
  std::vector<Scalar> coord(n + 1);
  for (std::size_t k = 1; k <= n; ++k) coord[k] = x.at(k);
  std::vector<Scalar> out;
  out.reserve(frame.functional_count());
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) out.push_back(coord[i] + coord[j]);
  }
  return out;
}

MagnitudePattern analysis_magnitudes(const Frame& frame, const VectorRep& x) {
  const auto c = analysis_coefficients(frame, x);
  MagnitudePattern p;
  p.entries.resize(c.size());
  std::transform(c.begin(), c.end(), p.entries.begin(), [](const Scalar& s) { return std::abs(s); });
  return p;
}

Eigen::MatrixXcd frame_operator(const Frame& frame) {
  const auto& phi = frame.synthesis();
  Eigen::MatrixXcd s = phi * phi.adjoint();
  // Entries (i,k) and (k,i) come from the same products; make the symmetry exact.
  Eigen::MatrixXcd h = 0.5 * (s + s.adjoint());
  if (frame.field() == Field::Real) h = h.real().cast<Scalar>();
  return h;
}

FrameBounds frame_bounds(const Frame& frame) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(frame_operator(frame), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  if (!(hi > 0.0) || lo <= kRankTolerance * hi) {
    throw Error(ErrorCode::NotAFrame,
                fmt::format("family does not span: eigenvalues of S in [{:.3g}, {:.3g}]", lo, hi));
  }
  return {lo, hi};
}

Frame canonical_dual(const Frame& frame) {
  frame_bounds(frame);  // rejects non-spanning families
  const Eigen::MatrixXcd s = frame_operator(frame);
  Eigen::MatrixXcd dual = s.ldlt().solve(frame.synthesis());
  if (frame.field() == Field::Real) dual = dual.real().cast<Scalar>();
  return Frame::from_synthesis(frame.field(), dual);
}

namespace {

std::string number(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string canonical_serialization(const Frame& frame) {
  if (frame.is_pairwise_sum()) {
    return fmt::format(R"({{"structured":"pairwise_sum","truncation":{}}})", frame.truncation());
  }
  const auto& phi = frame.synthesis();
  std::string out = fmt::format(R"({{"dim":{},"field":"{}","vectors":[)", phi.rows(),
                                to_string(frame.field()));
  for (Eigen::Index j = 0; j < phi.cols(); ++j) {
    if (j > 0) out += ',';
    out += '[';
    for (Eigen::Index k = 0; k < phi.rows(); ++k) {
      if (k > 0) out += ',';
      const Scalar v = phi(k, j);
      if (frame.field() == Field::Real) {
        out += number(v.real());
      } else {
        out += '[' + number(v.real()) + ',' + number(v.imag()) + ']';
      }
    }
    out += ']';
  }
  out += "]}";
  return out;
}

std::string fingerprint(const Frame& frame) {
  const std::string text = canonical_serialization(frame);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace phaselens
