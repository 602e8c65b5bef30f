#include "phaselens/certify.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "phaselens/error.hpp"
#include "phaselens/metrics.hpp"
#include "phaselens/parallel.hpp"
#include "sign_search.hpp"

namespace phaselens {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::PhaseRetrieval: return "PhaseRetrieval";
    case Verdict::NotPhaseRetrieval: return "NotPhaseRetrieval";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::ComplementProperty: return "ComplementProperty";
    case Method::FullSparkCount: return "FullSparkCount";
    case Method::SignEnumeration: return "SignEnumeration";
    case Method::NecessaryConditionOnly: return "NecessaryConditionOnly";
  }
  return "?";
}

namespace {

constexpr double kCollisionResidual = 1e-8;
constexpr double kClassSeparation = 1e-6;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Lexicographic rank -> k-subset of {0..m-1}.
std::vector<std::size_t> unrank_combination(std::size_t m, std::size_t k, std::uint64_t rank) {
  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t c = next;; ++c) {
      const std::uint64_t block = binomial(m - c - 1, k - slot - 1);
      if (rank < block) {
        out.push_back(c);
        next = c + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

bool next_combination(std::vector<std::size_t>& s, std::size_t m) {
  const std::size_t k = s.size();
  for (std::size_t i = k; i-- > 0;) {
    if (s[i] < m - k + i) {
      ++s[i];
      for (std::size_t j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& s, std::size_t m) {
  std::vector<std::size_t> out;
  out.reserve(m - s.size());
  std::size_t p = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (p < s.size() && s[p] == i) {
      ++p;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

bool spans(const Frame& frame, const std::vector<std::size_t>& subset, double tol) {
  const std::size_t n = frame.dim();
  if (subset.size() < n) return false;
  return numerical_rank(select_columns(frame.synthesis(), subset), tol) == n;
}

// Unit vector orthogonal to every column of `cols` (a null vector of cols^*).
Eigen::VectorXcd orthogonal_unit(const Eigen::MatrixXcd& cols, std::size_t n, Field field) {
  if (cols.cols() == 0) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    e(0) = 1.0;
    return e;
  }
  if (field == Field::Real) {
    const Eigen::MatrixXd a = cols.real().transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    return svd.matrixV().col(static_cast<Eigen::Index>(n) - 1).cast<Scalar>();
  }
  const Eigen::MatrixXcd a = cols.adjoint();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().col(static_cast<Eigen::Index>(n) - 1);
}

// Projection of g onto the orthogonal complement of span(cols).
Eigen::VectorXcd project_out(const Eigen::MatrixXcd& cols, const Eigen::VectorXcd& g) {
  if (cols.cols() == 0) return g;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(cols);
  return g - cols * cod.solve(g);
}

Eigen::VectorXcd gaussian(std::mt19937_64& rng, std::size_t n, Field field) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double re = normal(rng);
    const double im = field == Field::Complex ? normal(rng) : 0.0;
    v(static_cast<Eigen::Index>(k)) = Scalar{re, im};
  }
  return v;
}

// Trial vectors for the collision search. Generic Gaussian vectors miss the
// collision set whenever it is a proper union of subspaces (e.g. m = 2n-2,
// n >= 3). After the first (Gaussian) trial, each trial takes the hyperplane
// H spanned by n-1 frame vectors, T = {j : phi_j in H}, and draws
// x = P(H^perp) g1 + P(span{phi_j : j not in T}^perp) g2. Any failure of the
// complement property has a failing set of this form, so a collision, when
// one exists, is reachable; only the sign-enumeration solve decides.
class TrialSampler {
 public:
  TrialSampler(const Frame& frame, std::mt19937_64& rng) : frame_(frame), rng_(rng) {
    const std::size_t n = frame.dim();
    const std::size_t m = frame.functional_count();
    k_ = std::min(m, n - 1);
    if (binomial(m, k_) <= kMaxListedProposals) {
      for_each_combination(m, k_, [&](const std::vector<std::size_t>& s) {
        proposals_.push_back(s);
        return false;
      });
      std::shuffle(proposals_.begin(), proposals_.end(), rng_);
    }
  }

  Eigen::VectorXcd next(std::size_t trial) {
    const std::size_t n = frame_.dim();
    const std::size_t m = frame_.functional_count();
    const Field field = frame_.field();
    Eigen::VectorXcd g1 = gaussian(rng_, n, field);
    if (trial == 0) return g1;
    const Eigen::VectorXcd g2 = gaussian(rng_, n, field);

    std::vector<std::size_t> base;
    if (!proposals_.empty()) {
      base = proposals_[(trial - 1) % proposals_.size()];
    } else {
      std::vector<std::size_t> all(m);
      std::iota(all.begin(), all.end(), std::size_t{0});
      std::sample(all.begin(), all.end(), std::back_inserter(base), k_, rng_);
    }
    const auto& phi = frame_.synthesis();
    const Eigen::MatrixXcd span = select_columns(phi, base);
    std::vector<std::size_t> in_plane;
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::VectorXcd col = phi.col(static_cast<Eigen::Index>(j));
      if (project_out(span, col).norm() <= kInPlaneTolerance * col.norm()) in_plane.push_back(j);
    }
    const Eigen::VectorXcd x = project_out(select_columns(phi, in_plane), g1) +
                               project_out(select_columns(phi, complement_of(in_plane, m)), g2);
    if (x.norm() <= 1e-12 * (g1.norm() + g2.norm())) return g1;
    if (field == Field::Real) return x.real().cast<Scalar>();
    return x;
  }

 private:
  static constexpr std::uint64_t kMaxListedProposals = 1U << 16;
  static constexpr double kInPlaneTolerance = 1e-9;

  const Frame& frame_;
  std::mt19937_64& rng_;
  std::size_t k_ = 0;
  std::vector<std::vector<std::size_t>> proposals_;
};

std::optional<CollidingPair> search_collision(const Frame& frame, std::size_t trials, std::uint64_t seed) {
  detail::SignPatternSolver solver(frame.synthesis(), frame.field());
  std::mt19937_64 rng(seed);
  TrialSampler sampler(frame, rng);
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::VectorXcd x = sampler.next(t);
    const double xnorm = x.norm();
    if (xnorm == 0.0) continue;
    const Eigen::VectorXd c = (frame.synthesis().adjoint() * x).cwiseAbs();
    const VectorRep xr = to_vector(x);
    std::optional<CollidingPair> hit;
    solver.for_each_realizer(c, kCollisionResidual, [&](const Eigen::VectorXcd& y) {
      const VectorRep yr = to_vector(y);
      if (bures_distance(xr, yr) > kClassSeparation * xnorm) {
        hit = CollidingPair{xr, yr};
        return true;
      }
      return false;
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

void require_explicit(const Frame& frame) {
  if (!frame.is_explicit()) throw Error(ErrorCode::Incompatible, "operation needs an explicit frame");
}

}  // namespace

bool for_each_combination(std::size_t m, std::size_t k,
                          const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  if (k > m) return false;
  std::vector<std::size_t> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  do {
    if (visit(s)) return true;
  } while (next_combination(s, m));
  return false;
}

SparkResult spark(const Frame& frame, double rank_tolerance) {
  require_explicit(frame);
  const std::size_t n = frame.dim();
  const std::size_t m = frame.functional_count();
  const auto& phi = frame.synthesis();
  SparkResult r;
  // Any n+1 vectors are dependent, so sizes beyond n+1 never need a look.
  for (std::size_t k = 1; k <= std::min(m, n + 1); ++k) {
    const bool found = for_each_combination(m, k, [&](const std::vector<std::size_t>& s) {
      if (numerical_rank(select_columns(phi, s), rank_tolerance) < k) {
        r.witness = s;
        return true;
      }
      return false;
    });
    if (found) {
      r.spark = k;
      return r;
    }
  }
  return r;
}

bool is_full_spark(const Frame& frame, double rank_tolerance) {
  require_explicit(frame);
  const std::size_t n = frame.dim();
  const std::size_t m = frame.functional_count();
  if (m < n) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("full spark needs at least n = {} vectors, got {}", n, m));
  }
  const auto& phi = frame.synthesis();
  const bool dependent = for_each_combination(m, n, [&](const std::vector<std::size_t>& s) {
    return numerical_rank(select_columns(phi, s), rank_tolerance) < n;
  });
  return !dependent;
}

Certificate complement_property(const Frame& frame, const CertifyOptions& options) {
  require_explicit(frame);
  const std::size_t m = frame.functional_count();
  if (m > options.subset_cap) {
    throw Error(ErrorCode::EnumerationCapExceeded,
                fmt::format("{} frame vectors exceed the subset-enumeration cap {}", m, options.subset_cap));
  }
  const double tol = options.rank_tolerance;

  Certificate cert;
  cert.frame_fingerprint = fingerprint(frame);
  cert.parameters = options;
  cert.method = Method::ComplementProperty;

  constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t k = 0; 2 * k <= m; ++k) {
    // When |sigma| = m/2 both sigma and its complement have this size; the
    // subsets containing index 0 come first in lexicographic order and cover
    // every pair once.
    const std::uint64_t total = (2 * k == m) ? binomial(m - 1, k - 1) : binomial(m, k);
    const std::size_t chunks = total >= 1024 ? 4 * worker_count() : 1;
    std::vector<std::uint64_t> first_failure(chunks, kNone);
    parallel_chunks(total, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
      std::vector<std::size_t> s = unrank_combination(m, k, begin);
      for (std::uint64_t rank = begin; rank < end; ++rank) {
        if (!spans(frame, s, tol) && !spans(frame, complement_of(s, m), tol)) {
          first_failure[chunk] = rank;
          return;
        }
        next_combination(s, m);
      }
    });
    const auto hit = std::find_if(first_failure.begin(), first_failure.end(),
                                  [&](std::uint64_t r) { return r != kNone; });
    if (hit != first_failure.end()) {
      cert.verdict = Verdict::NotPhaseRetrieval;
      cert.witness = FailingSubset{unrank_combination(m, k, *hit)};
      cert.notes.push_back("neither the failing subset nor its complement spans");
      return cert;
    }
  }

  if (frame.field() == Field::Real) {
    cert.verdict = Verdict::PhaseRetrieval;
    cert.notes.push_back("complement property holds; over R this characterises phase retrieval");
  } else {
    cert.verdict = Verdict::Inconclusive;
    cert.method = Method::NecessaryConditionOnly;
    cert.notes.push_back("complement property holds; over C it is only a necessary condition");
  }
  return cert;
}

CollidingPair collision_from_failing_subset(const Frame& frame, const FailingSubset& subset,
                                            double rank_tolerance) {
  require_explicit(frame);
  const std::size_t n = frame.dim();
  const std::size_t m = frame.functional_count();
  const auto& phi = frame.synthesis();
  const auto rest = complement_of(subset.indices, m);
  const Eigen::MatrixXcd on = select_columns(phi, subset.indices);
  const Eigen::MatrixXcd off = select_columns(phi, rest);
  if (numerical_rank(on, rank_tolerance) >= n || numerical_rank(off, rank_tolerance) >= n) {
    throw Error(ErrorCode::InvalidArgument, "subset does not fail the complement property");
  }
  const Eigen::VectorXcd u = orthogonal_unit(on, n, frame.field());
  const Eigen::VectorXcd v = orthogonal_unit(off, n, frame.field());
  if (std::abs(u.dot(v)) >= 1.0 - 1e-9) {
    // u is orthogonal to every frame vector, so it collides with 0.
    return {to_vector(u), VectorRep::zeros(n)};
  }
  return {to_vector(u + v), to_vector(u - v)};
}

std::optional<CollidingPair> falsify_by_sign_enumeration(const Frame& frame, std::size_t trials,
                                                         std::uint64_t seed,
                                                         const CertifyOptions& options) {
  require_explicit(frame);
  if (frame.field() != Field::Real) {
    throw Error(ErrorCode::FieldMismatch, "sign enumeration falsifier needs a real frame");
  }
  const std::size_t m = frame.functional_count();
  if (m > options.sign_cap) {
    throw Error(ErrorCode::EnumerationCapExceeded,
                fmt::format("{} frame vectors exceed the sign-enumeration cap {}", m, options.sign_cap));
  }
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  return search_collision(frame, trials, seed);
}

Certificate certify_phase_retrieval(const Frame& frame, const CertifyOptions& options) {
  require_explicit(frame);
  const std::size_t n = frame.dim();
  const std::size_t m = frame.functional_count();

  if (frame.field() == Field::Real) {
    if (m < 2 * n - 1) {
      Certificate cert;
      cert.verdict = Verdict::NotPhaseRetrieval;
      cert.method = Method::NecessaryConditionOnly;
      cert.frame_fingerprint = fingerprint(frame);
      cert.parameters = options;
      cert.notes.push_back(fmt::format("m = {} < 2n-1 = {}: too few vectors for real phase retrieval", m, 2 * n - 1));
      std::optional<CollidingPair> pair;
      if (m <= options.sign_cap) pair = search_collision(frame, options.trials, options.seed);
      if (!pair) {
        // A block of min(m, n-1) vectors and its complement both have fewer
        // than n members.
        FailingSubset sigma;
        for (std::size_t i = 0; i < std::min(m, n - 1); ++i) sigma.indices.push_back(i);
        pair = collision_from_failing_subset(frame, sigma, options.rank_tolerance);
        cert.notes.push_back("colliding pair constructed from a failing subset");
      } else {
        cert.notes.push_back("colliding pair found by sign enumeration");
      }
      cert.witness = *pair;
      return cert;
    }
    if (m > options.subset_cap) {
      // Fall back to the full-spark sufficient condition when it is cheaper.
      if (binomial(m, n) <= (std::uint64_t{1} << (options.subset_cap - 1)) &&
          is_full_spark(frame, options.rank_tolerance)) {
        Certificate cert;
        cert.verdict = Verdict::PhaseRetrieval;
        cert.method = Method::FullSparkCount;
        cert.frame_fingerprint = fingerprint(frame);
        cert.parameters = options;
        cert.notes.push_back("m >= 2n-1 and every n vectors are independent");
        return cert;
      }
    }
    return complement_property(frame, options);
  }

  Certificate cert = complement_property(frame, options);
  if (cert.verdict == Verdict::NotPhaseRetrieval) return cert;
  if (m <= options.sign_cap) {
    if (auto pair = search_collision(frame, options.trials, options.seed)) {
      cert.verdict = Verdict::NotPhaseRetrieval;
      cert.method = Method::SignEnumeration;
      cert.witness = *pair;
      cert.notes.push_back("real-sign collision found despite the complement property");
      return cert;
    }
    cert.notes.push_back(fmt::format("no real-sign collision in {} trials", options.trials));
  }
  return cert;
}

Frame transform_frame(const Frame& frame, const Eigen::MatrixXcd& u) {
  require_explicit(frame);
  const auto n = static_cast<Eigen::Index>(frame.dim());
  if (u.rows() != n || u.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, fmt::format("transform must be {0}x{0}", n));
  }
  if (frame.field() == Field::Real && u.imag().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::FieldMismatch, "complex transform applied to a real frame");
  }
  if (numerical_rank(u) < static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::SingularTransform, "transform is not invertible");
  }
  return Frame::from_synthesis(frame.field(), u * frame.synthesis());
}

bool verify_witness(const Frame& frame, const Witness& witness, double rank_tolerance) {
  if (const auto* sigma = std::get_if<FailingSubset>(&witness)) {
    const std::size_t n = frame.dim();
    const auto& phi = frame.synthesis();
    const auto rest = complement_of(sigma->indices, frame.functional_count());
    return numerical_rank(select_columns(phi, sigma->indices), rank_tolerance) < n &&
           numerical_rank(select_columns(phi, rest), rank_tolerance) < n;
  }
  if (const auto* pair = std::get_if<CollidingPair>(&witness)) {
    const auto ax = analysis_magnitudes(frame, pair->x);
    const auto ay = analysis_magnitudes(frame, pair->y);
    double scale = 1.0;
    double worst = 0.0;
    for (std::size_t j = 0; j < ax.entries.size(); ++j) {
      scale = std::max(scale, ax.entries[j]);
      worst = std::max(worst, std::abs(ax.entries[j] - ay.entries[j]));
    }
    const double size = std::max(norm(pair->x), norm(pair->y));
    return worst <= 1e-8 * scale && bures_distance(pair->x, pair->y) > kClassSeparation * size;
  }
  return false;
}

}  // namespace phaselens
