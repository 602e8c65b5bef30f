#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "phaselens/frame.hpp"
#include "phaselens/vector.hpp"

namespace phaselens {

/// A representative standing for its class under unimodular scaling
/// (+-1 over R, e^{i theta} over C). Every metric here depends only on the
/// class.
struct QuotientPoint {
  QuotientPoint() = default;
  QuotientPoint(VectorRep r) : rep(std::move(r)) {}  // NOLINT: implicit by intent

  VectorRep rep;
};

/// min_theta ||x - e^{i theta} y|| = sqrt(||x||^2 + ||y||^2 - 2|<x,y>|).
double bures_distance(const QuotientPoint& x, const QuotientPoint& y);

/// D(x, y) <= relative_tolerance * max(||x||, ||y||).
bool class_equal(const QuotientPoint& x, const QuotientPoint& y, double relative_tolerance = 1e-9);

struct SupremumReport {
  double value = 0.0;
  /// Functional attaining the supremum (first on ties).
  std::size_t argmax = 0;
  /// Set for pairwise-sum frames: the supremum runs over indices <= N only.
  std::optional<std::size_t> truncation;
  /// True when the truncated supremum equals the untruncated one, i.e. both
  /// inputs are finitely supported strictly below N. Always true for explicit
  /// frames.
  bool exact = true;
};

/// sup_j | |<x,phi_j>| - |<y,phi_j>| |.
double d_phi(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y);
SupremumReport d_phi_report(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y);

struct DefinitionalReport {
  double value = 0.0;
  /// Same supremum with the inner minimum taken over a uniform theta grid.
  double grid_value = 0.0;
  /// max_j |grid minimum - analytic minimum|.
  double max_grid_deviation = 0.0;
  std::size_t grid_size = 0;
};

/// sup_j min_theta |<x - e^{i theta} y, phi_j>| evaluated per functional:
/// over R the phase set is {0, pi}; over C the inner minimum is taken in
/// closed form. Serves as an independent check on d_phi.
DefinitionalReport d_phi_definitional(const Frame& frame, const QuotientPoint& x,
                                      const QuotientPoint& y, std::size_t grid_size = 256);

struct MinimaxResult {
  double value = 0.0;
  double theta_star = 0.0;
  /// value - true minimum is at most this.
  double error_bound = 0.0;
  std::size_t grid_size = 0;
};

inline constexpr std::size_t kDefaultGridSize = 4096;

/// min_theta max_j |<x - e^{i theta} y, phi_j>| over an explicit frame.
/// Complex field: uniform grid, then golden-section refinement around the
/// best grid point down to a bracket of width 1e-10. Real field: exact
/// evaluation at theta in {0, pi}.
MinimaxResult frak_distance(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y,
                            std::size_t grid_size = kDefaultGridSize);

struct MetricReport {
  double bures = 0.0;
  double d_phi = 0.0;
  double frak = 0.0;
  double theta_star = 0.0;
  double frak_error_bound = 0.0;
  double alpha_difference_norm = 0.0;
  FrameBounds bounds;
  std::size_t functional_count = 0;
  std::size_t grid_size = 0;
  /// rhs - lhs for each inequality of the chain; >= 0 when it holds.
  std::map<std::string, double> slacks;
};

namespace slack {
inline constexpr const char* kDPhiBySqrtBD = "d_phi <= sqrt(B)*D";
inline constexpr const char* kFrakBySqrtBD = "frak <= sqrt(B)*D";
inline constexpr const char* kDBySqrtMOverAFrak = "D <= sqrt(m/A)*frak";
inline constexpr const char* kDPhiByAlpha = "d_phi <= |alpha(x)-alpha(y)|";
inline constexpr const char* kAlphaBySqrtMDPhi = "|alpha(x)-alpha(y)| <= sqrt(m)*d_phi";
}  // namespace slack

/// All three metrics plus the slacks of the inequality chain. NotAFrame when
/// the family does not span.
MetricReport inequality_report(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y,
                               std::size_t grid_size = kDefaultGridSize);

/// A class whose magnitude pattern is `target`, found by least squares over
/// sign patterns (first sign fixed to +1) in increasing pattern order; the
/// first realizer with residual <= 1e-8 ||target|| wins. Real spanning frames
/// only.
std::optional<QuotientPoint> realize_from_magnitudes(const Frame& frame, const MagnitudePattern& target,
                                                     std::size_t sign_cap = 20);

}  // namespace phaselens
