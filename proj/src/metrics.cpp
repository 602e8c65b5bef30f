#include "phaselens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "phaselens/error.hpp"
#include "phaselens/parallel.hpp"
#include "sign_search.hpp"

namespace phaselens {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRadicandClamp = 1e-12;
constexpr double kGoldenWidth = 1e-10;
constexpr double kRealizeResidual = 1e-8;

struct CoefficientPair {
  std::vector<Scalar> a;  // <x, phi_j>
  std::vector<Scalar> b;  // <y, phi_j>
};

CoefficientPair coefficients(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y) {
  return {analysis_coefficients(frame, x.rep), analysis_coefficients(frame, y.rep)};
}

// max_j |a_j - e^{i theta} b_j|
double envelope(const CoefficientPair& c, double theta) {
  const Scalar phase = std::polar(1.0, theta);
  double worst = 0.0;
  for (std::size_t j = 0; j < c.a.size(); ++j) worst = std::max(worst, std::abs(c.a[j] - phase * c.b[j]));
  return worst;
}

// Strict total order on representations. The symmetric distances evaluate
// with the smaller argument first so that swapping inputs is bit-exact.
bool precedes(const VectorRep& x, const VectorRep& y) {
  const auto& sx = x.storage();
  const auto& sy = y.storage();
  if (sx.index() != sy.index()) return sx.index() < sy.index();
  auto less = [](Scalar a, Scalar b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  };
  if (const auto* dx = std::get_if<Dense>(&sx)) {
    const auto& dy = std::get<Dense>(sy);
    return std::lexicographical_compare(dx->coords.begin(), dx->coords.end(), dy.coords.begin(), dy.coords.end(),
                                        less);
  }
  if (const auto* fx = std::get_if<FiniteSupport>(&sx)) {
    const auto& fy = std::get<FiniteSupport>(sy);
    return std::lexicographical_compare(
        fx->entries.begin(), fx->entries.end(), fy.entries.begin(), fy.entries.end(),
        [&](const auto& a, const auto& b) { return a.first != b.first ? a.first < b.first : less(a.second, b.second); });
  }
  return false;
}

}  // namespace

double bures_distance(const QuotientPoint& x, const QuotientPoint& y) {
  if (precedes(y.rep, x.rep)) return bures_distance(y, x);
  const Scalar ip = inner_product(x.rep, y.rep);
  if (!x.rep.is_reciprocal() && !y.rep.is_reciprocal()) {
    // Align the phase and measure the difference directly; this stays exact
    // for class-equal inputs.
    const double mag = std::abs(ip);
    const Scalar lambda = mag > 0.0 ? ip / mag : Scalar{1.0};
    return norm(linear_combination(1.0, x.rep, -lambda, y.rep));
  }
  const double nx = norm_squared(x.rep);
  const double ny = norm_squared(y.rep);
  double radicand = nx + ny - 2.0 * std::abs(ip);
  if (radicand < 0.0) {
    if (radicand < -kRadicandClamp * std::max(1.0, nx + ny)) {
      throw std::logic_error("negative Bures radicand beyond rounding");
    }
    radicand = 0.0;
  }
  return std::sqrt(radicand);
}

bool class_equal(const QuotientPoint& x, const QuotientPoint& y, double relative_tolerance) {
  const double scale = std::max(norm(x.rep), norm(y.rep));
  return bures_distance(x, y) <= relative_tolerance * scale;
}

SupremumReport d_phi_report(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y) {
  const auto c = coefficients(frame, x, y);
  SupremumReport r;
  for (std::size_t j = 0; j < c.a.size(); ++j) {
    const double diff = std::abs(std::abs(c.a[j]) - std::abs(c.b[j]));
    if (diff > r.value) {
      r.value = diff;
      r.argmax = j;
    }
  }
  if (frame.is_pairwise_sum()) {
    const std::size_t n = frame.truncation();
    r.truncation = n;
    const auto bx = x.rep.support_bound();
    const auto by = y.rep.support_bound();
    r.exact = bx && by && std::max(*bx, *by) < n;
  }
  return r;
}

double d_phi(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y) {
  return d_phi_report(frame, x, y).value;
}

DefinitionalReport d_phi_definitional(const Frame& frame, const QuotientPoint& x,
                                      const QuotientPoint& y, std::size_t grid_size) {
  if (grid_size < 64) throw Error(ErrorCode::InvalidArgument, "grid size must be at least 64");
  const auto c = coefficients(frame, x, y);
  const bool real = frame.field() == Field::Real;

  std::vector<Scalar> phases(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    phases[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(grid_size));
  }

  DefinitionalReport r;
  r.grid_size = grid_size;
  for (std::size_t j = 0; j < c.a.size(); ++j) {
    const Scalar a = c.a[j];
    const Scalar b = c.b[j];
    double analytic;
    if (real) {
      analytic = std::min(std::abs(a - b), std::abs(a + b));
    } else {
      // min over the circle of |a - w b| is attained with w b pointing along a.
      analytic = std::abs(std::abs(a) - std::abs(b));
    }
    double grid_min = std::numeric_limits<double>::infinity();
    for (const Scalar& w : phases) grid_min = std::min(grid_min, std::abs(a - w * b));

    r.value = std::max(r.value, analytic);
    r.grid_value = std::max(r.grid_value, grid_min);
    r.max_grid_deviation = std::max(r.max_grid_deviation, std::abs(grid_min - analytic));
  }
  return r;
}

MinimaxResult frak_distance(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y,
                            std::size_t grid_size) {
  if (!frame.is_explicit()) {
    throw Error(ErrorCode::Incompatible, "minimax distance needs a finite index set");
  }
  if (grid_size < 4) throw Error(ErrorCode::InvalidArgument, "grid size must be at least 4");
  if (precedes(y.rep, x.rep)) {
    // max_j |b_j - e^{i t} a_j| = max_j |a_j - e^{-i t} b_j|.
    MinimaxResult r = frak_distance(frame, y, x, grid_size);
    if (r.theta_star > 0.0) r.theta_star = kTwoPi - r.theta_star;
    return r;
  }
  const auto c = coefficients(frame, x, y);

  MinimaxResult r;
  r.grid_size = grid_size;
  if (frame.field() == Field::Real) {
    const double at_zero = envelope(c, 0.0);
    const double at_pi = envelope(c, std::numbers::pi);
    r.value = std::min(at_zero, at_pi);
    r.theta_star = at_pi < at_zero ? std::numbers::pi : 0.0;
    return r;
  }

  const double step = kTwoPi / static_cast<double>(grid_size);
  const std::size_t work = grid_size * std::max<std::size_t>(1, c.a.size());
  const std::size_t chunks = work >= (1U << 16) ? worker_count() : 1;
  std::vector<std::pair<double, std::size_t>> best(chunks, {std::numeric_limits<double>::infinity(), 0});
  parallel_chunks(grid_size, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto local = best[chunk];
    for (std::size_t k = begin; k < end; ++k) {
      const double g = envelope(c, step * static_cast<double>(k));
      if (g < local.first) local = {g, k};
    }
    best[chunk] = local;
  });
  std::pair<double, std::size_t> winner = best.front();
  for (const auto& b : best) {
    if (b.first < winner.first) winner = b;
  }

  // Golden-section search on the bracket around the best grid point.
  const double centre = step * static_cast<double>(winner.second);
  double lo = centre - step;
  double hi = centre + step;
  constexpr double inv_phi = 0.6180339887498949;
  double p = hi - inv_phi * (hi - lo);
  double q = lo + inv_phi * (hi - lo);
  double gp = envelope(c, p);
  double gq = envelope(c, q);
  while (hi - lo > kGoldenWidth) {
    if (gp <= gq) {
      hi = q;
      q = p;
      gq = gp;
      p = hi - inv_phi * (hi - lo);
      gp = envelope(c, p);
    } else {
      lo = p;
      p = q;
      gp = gq;
      q = lo + inv_phi * (hi - lo);
      gq = envelope(c, q);
    }
  }
  const double refined_theta = 0.5 * (lo + hi);
  const double refined = envelope(c, refined_theta);

  double theta = centre;
  r.value = winner.first;
  if (refined < r.value) {
    r.value = refined;
    theta = refined_theta;
  }
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  r.theta_star = theta;
  // |g(t) - g(t')| <= ||y|| max_j ||phi_j|| |t - t'|, and the minimiser lies
  // within half a grid step of some grid point.
  r.error_bound = norm(y.rep) * frame.max_functional_norm() * 0.5 * step;
  return r;
}

MetricReport inequality_report(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y,
                               std::size_t grid_size) {
  MetricReport r;
  r.bounds = frame_bounds(frame);
  r.functional_count = frame.functional_count();
  r.grid_size = grid_size;
  r.bures = bures_distance(x, y);
  r.d_phi = d_phi(frame, x, y);
  const auto frak = frak_distance(frame, x, y, grid_size);
  r.frak = frak.value;
  r.theta_star = frak.theta_star;
  r.frak_error_bound = frak.error_bound;

  const auto ax = analysis_magnitudes(frame, x.rep);
  const auto ay = analysis_magnitudes(frame, y.rep);
  double acc = 0.0;
  for (std::size_t j = 0; j < ax.entries.size(); ++j) {
    const double d = ax.entries[j] - ay.entries[j];
    acc += d * d;
  }
  r.alpha_difference_norm = std::sqrt(acc);

  const double m = static_cast<double>(r.functional_count);
  const double sqrt_b = std::sqrt(r.bounds.upper);
  r.slacks[slack::kDPhiBySqrtBD] = sqrt_b * r.bures - r.d_phi;
  r.slacks[slack::kFrakBySqrtBD] = sqrt_b * r.bures - r.frak;
  r.slacks[slack::kDBySqrtMOverAFrak] = std::sqrt(m / r.bounds.lower) * r.frak - r.bures;
  r.slacks[slack::kDPhiByAlpha] = r.alpha_difference_norm - r.d_phi;
  r.slacks[slack::kAlphaBySqrtMDPhi] = std::sqrt(m) * r.d_phi - r.alpha_difference_norm;
  return r;
}

std::optional<QuotientPoint> realize_from_magnitudes(const Frame& frame, const MagnitudePattern& target,
                                                     std::size_t sign_cap) {
  if (!frame.is_explicit()) throw Error(ErrorCode::Incompatible, "realization needs an explicit frame");
  if (frame.field() != Field::Real) throw Error(ErrorCode::FieldMismatch, "realization is defined for real frames");
  const std::size_t m = frame.functional_count();
  if (m > sign_cap) {
    throw Error(ErrorCode::EnumerationCapExceeded,
                fmt::format("{} frame vectors exceed the sign-enumeration cap {}", m, sign_cap));
  }
  if (target.entries.size() != m) {
    throw Error(ErrorCode::Incompatible, "magnitude pattern length does not match the frame");
  }
  for (double t : target.entries) {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "magnitudes must be nonnegative");
  }
  frame_bounds(frame);  // spanning precondition

  detail::SignPatternSolver solver(frame.synthesis(), Field::Real);
  const Eigen::Map<const Eigen::VectorXd> t(target.entries.data(), static_cast<Eigen::Index>(m));
  std::optional<QuotientPoint> found;
  solver.for_each_realizer(t, kRealizeResidual, [&](const Eigen::VectorXcd& y) {
    found = QuotientPoint(to_vector(y.real().cast<Scalar>()));
    return true;
  });
  return found;
}

}  // namespace phaselens
