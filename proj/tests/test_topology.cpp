#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "phaselens/certify.hpp"
#include "phaselens/error.hpp"
#include "phaselens/topology.hpp"

using namespace phaselens;

namespace {

const Frame kR2 = Frame::explicit_real(2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
const Frame kOnb = Frame::explicit_real(2, {{1.0, 0.0}, {0.0, 1.0}});
const QuotientPoint kZero = VectorRep::finite_support({});

bool consistent(const ConvergenceReport& r) { return r.verdict == ConvergenceVerdict::ConsistentWithConvergence; }

void check_report_invariants(const ConvergenceReport& r) {
  CHECK_FALSE(r.qualifier.empty());
  CHECK(r.tail_start == tail_start(r.prefix));
  if (!consistent(r)) {
    REQUIRE(r.witness.has_value());
    const auto& v = r.traces[*r.witness].values;
    for (std::size_t k = r.tail_start; k <= r.prefix; ++k) CHECK(v[k - 1] >= r.gap);
    CHECK(r.traces[*r.witness].resolved);
  } else {
    CHECK_FALSE(r.witness.has_value());
    for (const auto& t : r.traces) {
      if (t.resolved) CHECK(t.tail_max <= r.tol);
    }
  }
}

}  // namespace

TEST_SUITE("topology_lab") {
  TEST_CASE("tail window is the last quartile") {
    CHECK(tail_start(45) == 35);
    CHECK(tail_start(200) == 151);
    CHECK(tail_start(4) == 4);
    CHECK(tail_start(2) == 2);
  }

  TEST_CASE("sequence specs expand to exact vectors") {
    const SequenceSpec scaled(seq::ScaledBasis{10});
    CHECK(scaled.term(4).at(4) == Scalar{4.0});
    CHECK(scaled.term(4).support_bound() == std::optional<std::size_t>{4});
    const SequenceSpec alt(seq::AlternatingSign{6});
    CHECK(alt.term(1).dense_coords() == std::vector<Scalar>{-1.0, 1.0});
    CHECK(alt.term(2).dense_coords() == std::vector<Scalar>{1.0, -1.0});
    const SequenceSpec pert(seq::PerturbedLimit{VectorRep::dense_real({1, 1}), 1.0, VectorRep::dense_real({2, 0}), 5});
    CHECK(pert.term(4).dense_coords() == std::vector<Scalar>{1.5, 1.0});
    CHECK_THROWS_AS(SequenceSpec(seq::UnitBasis{1}), Error);
    CHECK_THROWS_AS(SequenceSpec(seq::ExplicitList{{VectorRep::zeros(2)}}), Error);
    CHECK_THROWS_AS(scaled.term(0), Error);
    CHECK_THROWS_AS(scaled.term(11), Error);
    CHECK_THROWS_AS(converge_tau_phi(kOnb, alt, kZero, 7), Error);
  }

  TEST_CASE("scaled basis under pairwise sums: tau_phi converges, tau_w and d_phi do not") {
    const Frame f = Frame::pairwise_sum(50);
    const SequenceSpec s(seq::ScaledBasis{200});
    const auto phi = converge_tau_phi(f, s, kZero, 200);
    CHECK(consistent(phi));
    CHECK(phi.unresolved == 0);
    check_report_invariants(phi);

    const SequenceSpec s45(seq::ScaledBasis{45});
    const auto phi45 = converge_tau_phi(f, s45, kZero, 45);
    CHECK(consistent(phi45));
    CHECK(phi45.unresolved > 0);
    for (std::size_t i = 0; i < phi45.traces.size(); ++i) {
      const auto [a, b] = f.pair_at(i);
      for (std::size_t k = 1; k <= 45; ++k) {
        const double expected = (k == a || k == b) ? static_cast<double>(k) : 0.0;
        CHECK(phi45.traces[i].values[k - 1] == expected);
      }
    }

    const auto w = converge_tau_w(s45, kZero, default_witnesses(s45, kZero, 45, 45, 7), 45);
    CHECK(w.verdict == ConvergenceVerdict::DivergenceWitnessed);
    CHECK(w.witness_label == "reciprocal");
    CHECK(w.persistent);
    REQUIRE(w.witness_vector.has_value());
    CHECK(w.witness_vector->is_reciprocal());
    check_report_invariants(w);

    const auto d = converge_d_phi(f, s45, kZero, 45);
    CHECK(d.verdict == ConvergenceVerdict::Unbounded);
    CHECK(d.exact);
    for (std::size_t k = 1; k <= 45; ++k) CHECK(d.traces[0].values[k - 1] == static_cast<double>(k));
  }

  TEST_CASE("unit basis: d_phi stays at 1 while tau_phi converges") {
    const Frame f = Frame::pairwise_sum(50);
    const SequenceSpec s(seq::UnitBasis{45});
    const auto d = converge_d_phi(f, s, kZero, 45);
    CHECK(d.verdict == ConvergenceVerdict::DivergenceWitnessed);
    CHECK(d.gap == 1.0);
    check_report_invariants(d);
    CHECK(consistent(converge_tau_phi(f, s, kZero, 45)));
    // Beyond the truncation the supremum is only a lower bound.
    CHECK_FALSE(converge_d_phi(f, SequenceSpec(seq::UnitBasis{60}), kZero, 60).exact);
  }

  TEST_CASE("alternating signs under the ONB") {
    const SequenceSpec s(seq::AlternatingSign{100});
    const QuotientPoint limit = VectorRep::dense_real({1, 1});
    CHECK(consistent(converge_tau_phi(kOnb, s, limit, 100)));
    const auto w = converge_tau_w(s, limit, {{"y", VectorRep::dense_real({1, 1})}}, 100);
    CHECK(w.verdict == ConvergenceVerdict::DivergenceWitnessed);
    CHECK(w.gap == 2.0);
    check_report_invariants(w);
  }

  TEST_CASE("constant sequences have zero residuals") {
    gen::Rng rng(41);
    const auto x = gen::vector(rng, 2, Field::Real);
    const SequenceSpec s(seq::ExplicitList{std::vector<VectorRep>(20, x)});
    for (const auto& r : {converge_tau_phi(kR2, s, x, 20),
                          converge_tau_w(s, x, default_witnesses(s, x, 20, 2, 3), 20), converge_d_phi(kR2, s, x, 20)}) {
      CHECK(consistent(r));
      for (const auto& t : r.traces) {
        for (double v : t.values) CHECK(v == 0.0);
      }
    }
  }

  TEST_CASE("perturbed limit under a finite PR frame converges in every topology") {
    gen::Rng rng(42);
    const auto x = gen::vector(rng, 2, Field::Real);
    const auto d = gen::vector(rng, 2, Field::Real);
    const SequenceSpec s(seq::PerturbedLimit{x, 4.0, d, 200});
    CHECK(consistent(converge_d_phi(kR2, s, x, 200)));
    CHECK(consistent(converge_tau_phi(kR2, s, x, 200)));
    CHECK(consistent(converge_tau_w(s, x, default_witnesses(s, x, 200, 2, 5), 200)));
  }

  TEST_CASE("verdict implications on random sequences") {
    gen::Rng rng(43);
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 2 + rng.index(2);
      const Frame f = gen::frame(rng, Field::Real, n, n + rng.index(n + 1));
      const auto x = gen::vector(rng, n, Field::Real);
      seq::ExplicitList list;
      const int kind = t % 3;
      const auto y = gen::vector(rng, n, Field::Real);
      for (std::size_t k = 1; k <= 80; ++k) {
        const double eps = kind == 0 ? std::pow(static_cast<double>(k), -4.0) : 0.0;
        const double sign = rng.coin() ? 1.0 : -1.0;
        const VectorRep base = kind == 2 ? y : x;
        list.points.push_back(linear_combination(sign, base, eps, y));
      }
      const SequenceSpec s(std::move(list));
      auto witnesses = default_witnesses(s, x, 80, n, 100 + t);
      for (std::size_t j = 0; j < f.functional_count(); ++j) witnesses.push_back({"phi", f.functional(j)});
      const auto phi = converge_tau_phi(f, s, x, 80);
      const auto w = converge_tau_w(s, x, witnesses, 80);
      const auto d = converge_d_phi(f, s, x, 80);
      if (consistent(d)) CHECK(consistent(phi));
      if (consistent(w)) CHECK(consistent(phi));
      check_report_invariants(phi);
      check_report_invariants(w);
      check_report_invariants(d);
    }
  }

  TEST_CASE("separation witness") {
    const auto idx = separation_witness(kR2, VectorRep::dense_real({1, 2}), VectorRep::dense_real({1, -2}));
    CHECK(idx == std::optional<std::size_t>{2});
    CHECK_FALSE(separation_witness(kR2, VectorRep::dense_real({1, 2}), VectorRep::dense_real({-1, -2})).has_value());
    CHECK_FALSE(separation_witness(kOnb, VectorRep::dense_real({1, 1}), VectorRep::dense_real({1, -1})).has_value());
    gen::Rng rng(44);
    for (int t = 0; t < 200; ++t) {
      const auto x = gen::vector(rng, 2, Field::Real);
      const auto y = t % 2 ? x.scaled(-1.0) : gen::vector(rng, 2, Field::Real);
      if (!separation_witness(kR2, x, y)) CHECK(bures_distance(x, y) <= 1e-6);
    }
  }

  TEST_CASE("coincidence suite") {
    CoincidenceOptions opt;
    opt.trials = 20;
    const auto pr = finite_dim_coincidence_suite(kR2, opt);
    CHECK(pr.certificate.verdict == Verdict::PhaseRetrieval);
    CHECK(pr.trial_mismatches == 0);
    CHECK(pr.exemplars.empty());
    CHECK_FALSE(pr.qualifier.empty());

    const auto onb = finite_dim_coincidence_suite(kOnb, opt);
    CHECK(onb.certificate.verdict == Verdict::NotPhaseRetrieval);
    REQUIRE_FALSE(onb.exemplars.empty());
    CHECK(onb.exemplars.front().tau_phi == ConvergenceVerdict::ConsistentWithConvergence);
    CHECK(onb.exemplars.front().tau_w == ConvergenceVerdict::DivergenceWitnessed);

    // Same seed, same summary.
    const auto again = finite_dim_coincidence_suite(kOnb, opt);
    CHECK(again.trial_mismatches == onb.trial_mismatches);

    const Scalar i{0.0, 1.0};
    CHECK_THROWS_AS(finite_dim_coincidence_suite(Frame::explicit_frame(Field::Complex, 1, {{i}}), opt), Error);
    try {
      finite_dim_coincidence_suite(Frame::explicit_real(2, {{1, 0}, {2, 0}, {3, 0}}), opt);
      FAIL("expected NotAFrame");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotAFrame);
    }
  }
}
