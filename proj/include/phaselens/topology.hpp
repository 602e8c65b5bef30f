#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phaselens/certify.hpp"
#include "phaselens/frame.hpp"
#include "phaselens/metrics.hpp"
#include "phaselens/vector.hpp"

namespace phaselens {

/// Terms are indexed by k = 1..range.
namespace seq {
struct ExplicitList {
  std::vector<VectorRep> points;
};
/// x_k = k e_k.
struct ScaledBasis {
  std::size_t range = 200;
};
/// x_k = e_k.
struct UnitBasis {
  std::size_t range = 200;
};
/// x_k = ((-1)^k, (-1)^{k+1}) in R^2.
struct AlternatingSign {
  std::size_t range = 100;
};
/// x_k = limit + k^{-rate} direction.
struct PerturbedLimit {
  VectorRep limit;
  double rate = 1.0;
  VectorRep direction;
  std::size_t range = 200;
};
}  // namespace seq

class SequenceSpec {
 public:
  using Variant = std::variant<seq::ExplicitList, seq::ScaledBasis, seq::UnitBasis, seq::AlternatingSign,
                               seq::PerturbedLimit>;

  /// InvalidArgument when the range is below 2.
  SequenceSpec(Variant v);  // NOLINT: implicit by intent

  const Variant& variant() const { return v_; }
  std::size_t range() const;
  /// Term k, 1 <= k <= range().
  VectorRep term(std::size_t k) const;
  std::string describe() const;

 private:
  Variant v_;
};

enum class Topology { TauPhi, TauW, DPhi };
enum class ConvergenceVerdict { ConsistentWithConvergence, DivergenceWitnessed, Unbounded };

const char* to_string(Topology t);
const char* to_string(ConvergenceVerdict v);

inline constexpr double kDefaultConvergenceTol = 1e-6;
inline constexpr std::size_t kDefaultPrefix = 200;
inline constexpr std::size_t kDefaultTruncation = 50;

/// Residuals r_k, k = 1..K, for one functional or test vector.
struct ResidualTrace {
  std::string label;
  std::vector<double> values;
  double tail_min = 0.0;
  double tail_max = 0.0;
  /// False when the functional's support reaches into the tail window, so
  /// the prefix cannot show it settling. Such traces do not enter the
  /// verdict.
  bool resolved = true;
};

struct ConvergenceReport {
  Topology topology = Topology::TauPhi;
  ConvergenceVerdict verdict = ConvergenceVerdict::ConsistentWithConvergence;
  std::vector<ResidualTrace> traces;
  /// Index into `traces` of the witness; set unless the verdict is
  /// ConsistentWithConvergence.
  std::optional<std::size_t> witness;
  std::string witness_label;
  /// Frame index of the witness (tau_Phi only).
  std::optional<std::size_t> witness_functional;
  /// Test vector of the witness (tau_w only).
  std::optional<VectorRep> witness_vector;
  /// The witness residual is >= gap at every tail index.
  double gap = 0.0;
  /// True when the witness residual exceeds tol at every tail index.
  bool persistent = false;
  std::size_t prefix = 0;
  /// First 1-based index of the tail (last quartile).
  std::size_t tail_start = 0;
  double tol = kDefaultConvergenceTol;
  std::size_t unresolved = 0;
  std::optional<std::size_t> truncation;
  /// Every evaluated value is unaffected by the truncation.
  bool exact = true;
  std::string qualifier;
};

/// First index of the tail window for a prefix of length K.
std::size_t tail_start(std::size_t prefix);

/// ||<x_k, phi_i>| - |<x, phi_i>|| for every functional.
ConvergenceReport converge_tau_phi(const Frame& frame, const SequenceSpec& sequence, const QuotientPoint& limit,
                                   std::size_t prefix, double tol = kDefaultConvergenceTol);

struct TestVector {
  std::string label;
  VectorRep vector;
};

/// Default tau_w witnesses. Dense ambient space of dimension n: e_1..e_n and
/// 32 seeded random unit vectors. Sequence space: e_1..e_P and 32 seeded
/// random unit vectors supported on 1..P, with P = min(basis_prefix,
/// tail_start(prefix) - 1), then Reciprocal.
std::vector<TestVector> default_witnesses(const SequenceSpec& sequence, const QuotientPoint& limit,
                                          std::size_t prefix, std::size_t basis_prefix, std::uint64_t seed);

/// ||<x_k, y>| - |<x, y>|| for every test vector y.
ConvergenceReport converge_tau_w(const SequenceSpec& sequence, const QuotientPoint& limit,
                                 const std::vector<TestVector>& witnesses, std::size_t prefix,
                                 double tol = kDefaultConvergenceTol);

/// d_Phi(x_k, x). Unbounded when the tail is strictly increasing and ends
/// above 1e6 tol.
ConvergenceReport converge_d_phi(const Frame& frame, const SequenceSpec& sequence, const QuotientPoint& limit,
                                 std::size_t prefix, double tol = kDefaultConvergenceTol);

/// Smallest i with ||<x,phi_i>| - |<y,phi_i>|| > 1e-9 max(||x||, ||y||).
std::optional<std::size_t> separation_witness(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y);

struct MismatchExemplar {
  std::string description;
  ConvergenceVerdict tau_phi;
  ConvergenceVerdict tau_w;
  std::string witness_label;
};

struct CoincidenceSummary {
  Certificate certificate;
  std::size_t trials = 0;
  std::size_t prefix = 0;
  double tol = kDefaultConvergenceTol;
  std::uint64_t seed = 0;
  /// Random trials whose tau_Phi and tau_w verdicts differ.
  std::size_t trial_mismatches = 0;
  std::vector<MismatchExemplar> exemplars;
  std::string qualifier;
};

struct CoincidenceOptions {
  std::size_t trials = 100;
  std::size_t prefix = kDefaultPrefix;
  double tol = kDefaultConvergenceTol;
  double radius = 1.0;
  std::uint64_t seed = 20240101;
  CertifyOptions certify;
};

/// Random norm-bounded sequences x_k = s_k realize(alpha(x + 2^{-k/4} d))
/// with random signs s_k, which converge to x in tau_Phi by construction;
/// records whether tau_w agrees. For frames that are not phase retrieval,
/// also runs x_k = (-1)^k y towards x for a colliding pair (x, y). Explicit
/// real spanning frames only.
CoincidenceSummary finite_dim_coincidence_suite(const Frame& frame, const CoincidenceOptions& options = {});

}  // namespace phaselens
