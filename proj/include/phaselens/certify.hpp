#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "phaselens/frame.hpp"
#include "phaselens/vector.hpp"

namespace phaselens {

enum class Verdict { PhaseRetrieval, NotPhaseRetrieval, Inconclusive };

enum class Method { ComplementProperty, FullSparkCount, SignEnumeration, NecessaryConditionOnly };

const char* to_string(Verdict v);
const char* to_string(Method m);

/// Index set sigma (0-based frame indices) such that neither sigma nor its
/// complement spans.
struct FailingSubset {
  std::vector<std::size_t> indices;
};

/// Two vectors with equal magnitude patterns that are not class-equal.
struct CollidingPair {
  VectorRep x;
  VectorRep y;
};

using Witness = std::variant<std::monostate, FailingSubset, CollidingPair>;

struct CertifyOptions {
  double rank_tolerance = kRankTolerance;
  std::size_t subset_cap = 24;
  std::size_t sign_cap = 20;
  std::size_t trials = 50;
  std::uint64_t seed = 20240101;
};

struct Certificate {
  Verdict verdict = Verdict::Inconclusive;
  Method method = Method::ComplementProperty;
  Witness witness;
  std::string frame_fingerprint;
  CertifyOptions parameters;
  std::vector<std::string> notes;
};

struct SparkResult {
  /// nullopt: every column subset is independent (only possible for m <= n).
  std::optional<std::size_t> spark;
  /// Lexicographically smallest minimal dependent subset, 0-based.
  std::vector<std::size_t> witness;
};

/// Calls `visit` for every k-subset of {0..m-1} in lexicographic order until
/// it returns true. Returns whether it stopped early.
bool for_each_combination(std::size_t m, std::size_t k,
                          const std::function<bool(const std::vector<std::size_t>&)>& visit);

SparkResult spark(const Frame& frame, double rank_tolerance = kRankTolerance);

/// Every n columns independent. InvalidArgument when m < n.
bool is_full_spark(const Frame& frame, double rank_tolerance = kRankTolerance);

/// Exhaustive complement-property check. Subsets are visited by increasing
/// size then lexicographically, each pair {sigma, sigma^c} once; the reported
/// witness is the first failure in that order whatever the worker count.
Certificate complement_property(const Frame& frame, const CertifyOptions& options = {});

/// Colliding pair x = u + v, y = u - v built from a failing subset, where
/// u is orthogonal to span{phi_i : i in sigma} and v to the complement.
CollidingPair collision_from_failing_subset(const Frame& frame, const FailingSubset& subset,
                                            double rank_tolerance = kRankTolerance);

/// Randomised search for a colliding pair in a real frame via least squares
/// over all sign patterns. Independent of the complement-property route.
std::optional<CollidingPair> falsify_by_sign_enumeration(const Frame& frame, std::size_t trials,
                                                         std::uint64_t seed,
                                                         const CertifyOptions& options = {});

/// Verdict for an explicit frame. Real field: m >= 2n-1 screen, then the
/// complement property decides. Complex field: the complement property is
/// only necessary, so a passing frame is Inconclusive unless a real-sign
/// collision turns up.
Certificate certify_phase_retrieval(const Frame& frame, const CertifyOptions& options = {});

/// {U phi_j}. SingularTransform when U is not invertible.
Frame transform_frame(const Frame& frame, const Eigen::MatrixXcd& u);

/// Checks a certificate's witness against the frame: failing subsets must
/// leave both sides rank deficient; colliding pairs must share magnitudes to
/// 1e-8 (relative) while being class-distinct.
bool verify_witness(const Frame& frame, const Witness& witness,
                    double rank_tolerance = kRankTolerance);

}  // namespace phaselens
