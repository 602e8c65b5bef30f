#include "phaselens/topology.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "phaselens/error.hpp"
#include "phaselens/parallel.hpp"

namespace phaselens {

namespace {

constexpr std::size_t kRandomWitnessCount = 32;
constexpr double kUnboundedFactor = 1e6;
constexpr double kSeparationTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_prefix(const SequenceSpec& sequence, std::size_t prefix) {
  if (prefix < 2 || prefix > sequence.range()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("prefix {} outside [2, {}]", prefix, sequence.range()));
  }
}

bool sequence_space(const SequenceSpec& sequence) { return !sequence.term(1).is_dense(); }

bool resolvable(bool in_sequence_space, std::optional<std::size_t> support, std::size_t first_tail) {
  return !in_sequence_space || !support || *support < first_tail;
}

std::string qualifier(std::size_t prefix, std::size_t first_tail) {
  return fmt::format("evidence from the finite prefix k = 1..{} with tail k >= {}; not a statement about the limit",
                     prefix, first_tail);
}

ConvergenceReport start_report(Topology topology, std::size_t prefix, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  ConvergenceReport r;
  r.topology = topology;
  r.prefix = prefix;
  r.tail_start = tail_start(prefix);
  r.tol = tol;
  r.qualifier = qualifier(prefix, r.tail_start);
  return r;
}

// Fills tail statistics, then the verdict and witness from resolved traces.
void classify(ConvergenceReport& r, bool allow_unbounded) {
  const std::size_t first = r.tail_start - 1;
  for (auto& t : r.traces) {
    const auto begin = t.values.begin() + static_cast<std::ptrdiff_t>(first);
    t.tail_min = *std::min_element(begin, t.values.end());
    t.tail_max = *std::max_element(begin, t.values.end());
    if (!t.resolved) ++r.unresolved;
  }

  std::optional<std::size_t> persistent;
  std::optional<std::size_t> transient;
  for (std::size_t i = 0; i < r.traces.size(); ++i) {
    const auto& t = r.traces[i];
    if (!t.resolved || t.tail_max <= r.tol) continue;
    if (t.tail_min > r.tol) {
      if (!persistent || t.tail_min > r.traces[*persistent].tail_min) persistent = i;
    } else if (!transient || t.tail_max > r.traces[*transient].tail_max) {
      transient = i;
    }
  }
  if (!persistent && !transient) {
    r.verdict = ConvergenceVerdict::ConsistentWithConvergence;
    return;
  }
  r.witness = persistent ? persistent : transient;
  r.persistent = persistent.has_value();
  const auto& w = r.traces[*r.witness];
  r.witness_label = w.label;
  r.gap = w.tail_min;
  r.verdict = ConvergenceVerdict::DivergenceWitnessed;

  if (allow_unbounded && r.prefix - first >= 2 && w.values.back() > kUnboundedFactor * r.tol) {
    bool increasing = true;
    for (std::size_t k = first + 1; k < w.values.size(); ++k) increasing = increasing && w.values[k] > w.values[k - 1];
    if (increasing) r.verdict = ConvergenceVerdict::Unbounded;
  }
}

Eigen::VectorXcd random_unit(std::mt19937_64& rng, std::size_t n, bool complex) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  do {
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = Scalar{normal(rng), complex ? normal(rng) : 0.0};
  } while (v.norm() == 0.0);
  return v / v.norm();
}

}  // namespace

SequenceSpec::SequenceSpec(Variant v) : v_(std::move(v)) {
  if (range() < 2) throw Error(ErrorCode::InvalidArgument, "sequence range must be at least 2");
  if (const auto* p = std::get_if<seq::PerturbedLimit>(&v_)) {
    if (!(p->rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "decay rate must be positive");
  }
}

std::size_t SequenceSpec::range() const {
  return std::visit(Overloaded{[](const seq::ExplicitList& s) { return s.points.size(); },
                               [](const auto& s) { return s.range; }},
                    v_);
}

VectorRep SequenceSpec::term(std::size_t k) const {
  if (k < 1 || k > range()) throw Error(ErrorCode::InvalidArgument, fmt::format("term {} out of range", k));
  const double kd = static_cast<double>(k);
  return std::visit(
      Overloaded{
          [&](const seq::ExplicitList& s) { return s.points[k - 1]; },
          [&](const seq::ScaledBasis&) { return VectorRep::basis(k, kd); },
          [&](const seq::UnitBasis&) { return VectorRep::basis(k); },
          [&](const seq::AlternatingSign&) {
            const double s = k % 2 == 0 ? 1.0 : -1.0;
            return VectorRep::dense_real({s, -s});
          },
          [&](const seq::PerturbedLimit& s) {
            return linear_combination(1.0, s.limit, std::pow(kd, -s.rate), s.direction);
          },
      },
      v_);
}

std::string SequenceSpec::describe() const {
  return std::visit(
      Overloaded{
          [](const seq::ExplicitList& s) { return fmt::format("explicit list of {} points", s.points.size()); },
          [](const seq::ScaledBasis& s) { return fmt::format("x_k = k e_k, k <= {}", s.range); },
          [](const seq::UnitBasis& s) { return fmt::format("x_k = e_k, k <= {}", s.range); },
          [](const seq::AlternatingSign& s) {
            return fmt::format("x_k = ((-1)^k, (-1)^(k+1)), k <= {}", s.range);
          },
          [](const seq::PerturbedLimit& s) {
            return fmt::format("x_k = x + k^(-{}) d, k <= {}", s.rate, s.range);
          },
      },
      v_);
}

const char* to_string(Topology t) {
  switch (t) {
    case Topology::TauPhi: return "tau_phi";
    case Topology::TauW: return "tau_w";
    case Topology::DPhi: return "d_phi";
  }
  return "?";
}

const char* to_string(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::ConsistentWithConvergence: return "ConsistentWithConvergence";
    case ConvergenceVerdict::DivergenceWitnessed: return "DivergenceWitnessed";
    case ConvergenceVerdict::Unbounded: return "Unbounded";
  }
  return "?";
}

std::size_t tail_start(std::size_t prefix) { return prefix - std::max<std::size_t>(1, prefix / 4) + 1; }

ConvergenceReport converge_tau_phi(const Frame& frame, const SequenceSpec& sequence, const QuotientPoint& limit,
                                   std::size_t prefix, double tol) {
  check_prefix(sequence, prefix);
  ConvergenceReport r = start_report(Topology::TauPhi, prefix, tol);
  const auto target = analysis_magnitudes(frame, limit.rep).entries;
  const std::size_t m = target.size();
  const bool in_sequence_space = sequence_space(sequence);

  r.traces.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    r.traces[i].label = frame.functional_label(i);
    r.traces[i].values.resize(prefix);
    if (frame.is_pairwise_sum()) {
      r.traces[i].resolved = resolvable(in_sequence_space, frame.pair_at(i).second, r.tail_start);
    }
  }
  for (std::size_t k = 1; k <= prefix; ++k) {
    const auto mags = analysis_magnitudes(frame, sequence.term(k)).entries;
    for (std::size_t i = 0; i < m; ++i) r.traces[i].values[k - 1] = std::abs(mags[i] - target[i]);
  }
  if (frame.is_pairwise_sum()) r.truncation = frame.truncation();
  classify(r, false);
  if (r.witness) r.witness_functional = *r.witness;
  return r;
}

std::vector<TestVector> default_witnesses(const SequenceSpec& sequence, const QuotientPoint& limit,
                                          std::size_t prefix, std::size_t basis_prefix, std::uint64_t seed) {
  check_prefix(sequence, prefix);
  std::mt19937_64 rng(seed);
  std::vector<TestVector> out;
  const VectorRep first = sequence.term(1);
  if (first.is_dense()) {
    const std::size_t n = first.dim();
    const bool complex = !first.is_real() || !limit.rep.is_real();
    for (std::size_t i = 1; i <= n; ++i) {
      std::vector<Scalar> e(n, 0.0);
      e[i - 1] = 1.0;
      out.push_back({fmt::format("e_{}", i), VectorRep::dense(std::move(e))});
    }
    for (std::size_t r = 1; r <= kRandomWitnessCount; ++r) {
      out.push_back({fmt::format("random_{}", r), to_vector(random_unit(rng, n, complex))});
    }
    return out;
  }

  const std::size_t p = std::max<std::size_t>(1, std::min(basis_prefix, tail_start(prefix) - 1));
  for (std::size_t i = 1; i <= p; ++i) out.push_back({fmt::format("e_{}", i), VectorRep::basis(i)});
  for (std::size_t r = 1; r <= kRandomWitnessCount; ++r) {
    const Eigen::VectorXcd v = random_unit(rng, p, false);
    std::vector<std::pair<std::size_t, Scalar>> entries;
    for (std::size_t i = 0; i < p; ++i) entries.emplace_back(i + 1, v(static_cast<Eigen::Index>(i)));
    out.push_back({fmt::format("random_{}", r), VectorRep::finite_support(std::move(entries))});
  }
  out.push_back({"reciprocal", VectorRep::reciprocal()});
  return out;
}

ConvergenceReport converge_tau_w(const SequenceSpec& sequence, const QuotientPoint& limit,
                                 const std::vector<TestVector>& witnesses, std::size_t prefix, double tol) {
  check_prefix(sequence, prefix);
  if (witnesses.empty()) throw Error(ErrorCode::InvalidArgument, "witness list is empty");
  ConvergenceReport r = start_report(Topology::TauW, prefix, tol);
  const bool in_sequence_space = sequence_space(sequence);

  std::vector<double> target;
  target.reserve(witnesses.size());
  r.traces.resize(witnesses.size());
  for (std::size_t w = 0; w < witnesses.size(); ++w) {
    target.push_back(std::abs(inner_product(limit.rep, witnesses[w].vector)));
    r.traces[w].label = witnesses[w].label;
    r.traces[w].values.resize(prefix);
    r.traces[w].resolved = resolvable(in_sequence_space, witnesses[w].vector.support_bound(), r.tail_start);
  }
  for (std::size_t k = 1; k <= prefix; ++k) {
    const VectorRep x = sequence.term(k);
    for (std::size_t w = 0; w < witnesses.size(); ++w) {
      r.traces[w].values[k - 1] = std::abs(std::abs(inner_product(x, witnesses[w].vector)) - target[w]);
    }
  }
  classify(r, false);
  if (r.witness) r.witness_vector = witnesses[*r.witness].vector;
  return r;
}

ConvergenceReport converge_d_phi(const Frame& frame, const SequenceSpec& sequence, const QuotientPoint& limit,
                                 std::size_t prefix, double tol) {
  check_prefix(sequence, prefix);
  ConvergenceReport r = start_report(Topology::DPhi, prefix, tol);
  ResidualTrace trace;
  trace.label = "d_phi";
  trace.values.resize(prefix);
  for (std::size_t k = 1; k <= prefix; ++k) {
    const auto s = d_phi_report(frame, sequence.term(k), limit);
    trace.values[k - 1] = s.value;
    r.exact = r.exact && s.exact;
  }
  r.traces.push_back(std::move(trace));
  if (frame.is_pairwise_sum()) r.truncation = frame.truncation();
  classify(r, true);
  return r;
}

std::optional<std::size_t> separation_witness(const Frame& frame, const QuotientPoint& x, const QuotientPoint& y) {
  const auto a = analysis_magnitudes(frame, x.rep).entries;
  const auto b = analysis_magnitudes(frame, y.rep).entries;
  const double threshold = kSeparationTolerance * std::max(norm(x.rep), norm(y.rep));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > threshold) return i;
  }
  return std::nullopt;
}

CoincidenceSummary finite_dim_coincidence_suite(const Frame& frame, const CoincidenceOptions& options) {
  if (!frame.is_explicit() || frame.field() != Field::Real) {
    throw Error(ErrorCode::FieldMismatch, "coincidence suite needs an explicit real frame");
  }
  if (options.trials == 0 || options.prefix < 2 || !(options.radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "trials, prefix and radius must be positive (prefix >= 2)");
  }
  frame_bounds(frame);  // NotAFrame when the family does not span

  CoincidenceSummary summary;
  summary.certificate = certify_phase_retrieval(frame, options.certify);
  summary.trials = options.trials;
  summary.prefix = options.prefix;
  summary.tol = options.tol;
  summary.seed = options.seed;
  summary.qualifier = qualifier(options.prefix, tail_start(options.prefix));

  const std::size_t n = frame.dim();
  const std::size_t k_max = options.prefix;
  std::vector<char> mismatch(options.trials, 0);
  parallel_chunks(options.trials, options.trials, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      std::seed_seq seq{options.seed, static_cast<std::uint64_t>(t)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> radius(0.1, 1.0);
      std::bernoulli_distribution coin(0.5);
      const Eigen::VectorXcd x = random_unit(rng, n, false) * (options.radius * radius(rng));
      const Eigen::VectorXcd d = random_unit(rng, n, false) * (options.radius * radius(rng));

      seq::ExplicitList list;
      list.points.reserve(k_max);
      for (std::size_t k = 1; k <= k_max; ++k) {
        const Eigen::VectorXcd target_vec = x + std::exp2(-static_cast<double>(k) / 4.0) * d;
        const auto realized = realize_from_magnitudes(frame, analysis_magnitudes(frame, to_vector(target_vec)),
                                                      options.certify.sign_cap);
        if (!realized) throw std::logic_error("magnitude pattern of a vector has no realizer");
        list.points.push_back(realized->rep.scaled(coin(rng) ? 1.0 : -1.0));
      }
      const SequenceSpec sequence(std::move(list));
      const QuotientPoint limit = to_vector(x);
      const auto witnesses = default_witnesses(sequence, limit, k_max, n, options.seed + t);
      const auto phi = converge_tau_phi(frame, sequence, limit, k_max, options.tol);
      const auto w = converge_tau_w(sequence, limit, witnesses, k_max, options.tol);
      mismatch[t] = phi.verdict != w.verdict;
    }
  });
  summary.trial_mismatches = static_cast<std::size_t>(std::count(mismatch.begin(), mismatch.end(), 1));

  if (summary.certificate.verdict == Verdict::NotPhaseRetrieval) {
    CollidingPair pair;
    if (const auto* p = std::get_if<CollidingPair>(&summary.certificate.witness)) {
      pair = *p;
    } else {
      pair = collision_from_failing_subset(frame, std::get<FailingSubset>(summary.certificate.witness),
                                           options.certify.rank_tolerance);
    }
    seq::ExplicitList list;
    for (std::size_t k = 1; k <= k_max; ++k) list.points.push_back(pair.y.scaled(k % 2 == 0 ? 1.0 : -1.0));
    const SequenceSpec sequence(std::move(list));
    auto witnesses = default_witnesses(sequence, pair.x, k_max, n, options.seed);
    witnesses.insert(witnesses.begin(), TestVector{"x", pair.x});
    const auto phi = converge_tau_phi(frame, sequence, pair.x, k_max, options.tol);
    const auto w = converge_tau_w(sequence, pair.x, witnesses, k_max, options.tol);
    if (phi.verdict != w.verdict) {
      summary.exemplars.push_back({"x_k = (-1)^k y towards x for a colliding pair (x, y)", phi.verdict, w.verdict,
                                   w.witness_label});
    }
  }
  return summary;
}

}  // namespace phaselens
