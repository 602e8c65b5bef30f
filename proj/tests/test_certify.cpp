#include <doctest.h>

#include <cstdlib>
#include <string>

#include "generators.hpp"
#include "oracles.hpp"
#include "phaselens/certify.hpp"
#include "phaselens/error.hpp"
#include "phaselens/metrics.hpp"

using namespace phaselens;

namespace {

std::size_t oracle_rank(const Frame& f, const std::vector<std::size_t>& cols) {
  std::vector<oracle::CVec> rows(f.dim(), oracle::CVec(cols.size()));
  for (std::size_t i = 0; i < f.dim(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      rows[i][j] = f.synthesis()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return oracle::rank(rows);
}

// Complement property by brute force over all 2^m subsets.
bool oracle_complement_property(const Frame& f) {
  const std::size_t m = f.functional_count();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<std::size_t> in, out;
    for (std::size_t j = 0; j < m; ++j) ((mask >> j) & 1U ? in : out).push_back(j);
    if (oracle_rank(f, in) < f.dim() && oracle_rank(f, out) < f.dim()) return false;
  }
  return true;
}

// Colliding pairs checked without the library's metric code.
bool oracle_collision(const Frame& f, const CollidingPair& p) {
  const auto a = analysis_magnitudes(f, p.x).entries;
  const auto b = analysis_magnitudes(f, p.y).entries;
  double scale = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    scale = std::max(scale, a[j]);
    if (std::abs(a[j] - b[j]) > 1e-8 * std::max(1.0, a[j])) return false;
  }
  const auto& x = p.x.dense_coords();
  const auto& y = p.y.dense_coords();
  return oracle::bures(x, y) > 1e-6 * std::sqrt(std::max(oracle::norm2(x), oracle::norm2(y)));
}

class ThreadsGuard {
 public:
  explicit ThreadsGuard(const char* value) {
    if (const char* old = std::getenv("PHASELENS_THREADS")) previous_ = old;
    setenv("PHASELENS_THREADS", value, 1);
  }
  ~ThreadsGuard() {
    if (previous_.empty()) {
      unsetenv("PHASELENS_THREADS");
    } else {
      setenv("PHASELENS_THREADS", previous_.c_str(), 1);
    }
  }

 private:
  std::string previous_;
};

const Frame kR2 = Frame::explicit_real(2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
const Frame kOnb = Frame::explicit_real(2, {{1.0, 0.0}, {0.0, 1.0}});

}  // namespace

TEST_SUITE("pr_certify") {
  TEST_CASE("combinations are visited in lexicographic order") {
    std::vector<std::vector<std::size_t>> seen;
    for_each_combination(5, 3, [&](const std::vector<std::size_t>& s) {
      seen.push_back(s);
      return false;
    });
    CHECK(seen.size() == 10);
    CHECK(seen.front() == std::vector<std::size_t>{0, 1, 2});
    CHECK(seen[1] == std::vector<std::size_t>{0, 1, 3});
    CHECK(seen.back() == std::vector<std::size_t>{2, 3, 4});
    CHECK(std::is_sorted(seen.begin(), seen.end()));
  }

  TEST_CASE("spark of small frames") {
    CHECK(spark(kR2).spark == std::optional<std::size_t>{3});
    CHECK(is_full_spark(kR2));
    CHECK_FALSE(spark(kOnb).spark.has_value());
    const Frame repeated = Frame::explicit_real(2, {{1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}});
    const auto s = spark(repeated);
    CHECK(s.spark == std::optional<std::size_t>{2});
    CHECK(s.witness == std::vector<std::size_t>{0, 2});
    CHECK_FALSE(is_full_spark(repeated));
    const Frame with_zero = Frame::explicit_real(2, {{1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}});
    CHECK(spark(with_zero).spark == std::optional<std::size_t>{1});
    CHECK_THROWS_AS(is_full_spark(Frame::explicit_real(3, {{1, 0, 0}, {0, 1, 0}})), Error);
  }

  TEST_CASE("spark agrees with a brute-force rank oracle") {
    gen::Rng rng(21);
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 2 + rng.index(3);
      const std::size_t m = n + rng.index(4);
      const Frame f = gen::planted_frame(rng, n, m, rng.index(m + 1));
      std::optional<std::size_t> expected;
      for (std::size_t k = 1; k <= m && !expected; ++k) {
        for_each_combination(m, k, [&](const std::vector<std::size_t>& s) {
          if (oracle_rank(f, s) < k) expected = k;
          return expected.has_value();
        });
      }
      CHECK(spark(f).spark == expected);
    }
  }

  TEST_CASE("certificates for the sample frames") {
    const auto pr = certify_phase_retrieval(kR2);
    CHECK(pr.verdict == Verdict::PhaseRetrieval);
    CHECK(pr.method == Method::ComplementProperty);
    CHECK(std::holds_alternative<std::monostate>(pr.witness));

    const auto onb = certify_phase_retrieval(kOnb);
    CHECK(onb.verdict == Verdict::NotPhaseRetrieval);
    REQUIRE(std::holds_alternative<CollidingPair>(onb.witness));
    CHECK(verify_witness(kOnb, onb.witness));
    CHECK(oracle_collision(kOnb, std::get<CollidingPair>(onb.witness)));

    const Scalar i{0.0, 1.0};
    const Frame c2 = Frame::explicit_frame(Field::Complex, 2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, i}});
    const auto c = certify_phase_retrieval(c2);
    CHECK(c.verdict == Verdict::Inconclusive);
    CHECK(c.notes.front().rfind("complement property holds", 0) == 0);
    CHECK(c.frame_fingerprint == fingerprint(c2));
  }

  TEST_CASE("complement property matches exhaustive enumeration over all subsets") {
    gen::Rng rng(22);
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 2 + rng.index(2);
      const std::size_t m = 2 * n - 1 + rng.index(3);
      const Frame f = gen::planted_frame(rng, n, m, rng.index(m + 1));
      const auto cert = complement_property(f);
      const bool expected = oracle_complement_property(f);
      CHECK((cert.verdict == Verdict::PhaseRetrieval) == expected);
      if (!expected) {
        REQUIRE(std::holds_alternative<FailingSubset>(cert.witness));
        const auto& s = std::get<FailingSubset>(cert.witness).indices;
        CHECK(verify_witness(f, cert.witness));
        std::vector<std::size_t> rest;
        for (std::size_t j = 0; j < m; ++j) {
          if (std::find(s.begin(), s.end(), j) == s.end()) rest.push_back(j);
        }
        CHECK(oracle_rank(f, s) < n);
        CHECK(oracle_rank(f, rest) < n);
        const auto pair = collision_from_failing_subset(f, std::get<FailingSubset>(cert.witness));
        CHECK(oracle_collision(f, pair));
      }
    }
  }

  TEST_CASE("too few vectors: necessary-condition verdict carries a verified collision") {
    gen::Rng rng(23);
    for (int t = 0; t < 40; ++t) {
      const std::size_t n = 2 + rng.index(4);
      const std::size_t m = n + rng.index(n - 1);  // n <= m <= 2n-2
      const Frame f = gen::frame(rng, Field::Real, n, m);
      const auto cert = certify_phase_retrieval(f);
      CHECK(cert.verdict == Verdict::NotPhaseRetrieval);
      CHECK(cert.method == Method::NecessaryConditionOnly);
      REQUIRE(std::holds_alternative<CollidingPair>(cert.witness));
      CHECK(oracle_collision(f, std::get<CollidingPair>(cert.witness)));
    }
  }

  TEST_CASE("sign-enumeration falsifier agrees with the complement property") {
    gen::Rng rng(24);
    int failing = 0;
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 2 + rng.index(3);
      const std::size_t m = n + rng.index(2 * n);
      const Frame f = gen::planted_frame(rng, n, m, rng.index(m + 1));
      const bool cp = oracle_complement_property(f);
      const auto pair = falsify_by_sign_enumeration(f, 50, 1000 + t);
      CHECK(pair.has_value() == !cp);
      if (pair) {
        ++failing;
        CHECK(oracle_collision(f, *pair));
      }
    }
    CHECK(failing > 10);
  }

  TEST_CASE("witness does not depend on the worker count") {
    // 17 vectors in a hyperplane of R^4 and 3 generic ones: the only failures
    // pair the 3 generic vectors against the rest.
    gen::Rng rng(25);
    const Frame f = gen::planted_frame(rng, 4, 20, 17);
    CertifyOptions opt;
    Certificate serial, parallel;
    {
      ThreadsGuard g("1");
      serial = complement_property(f, opt);
    }
    {
      ThreadsGuard g("4");
      parallel = complement_property(f, opt);
    }
    REQUIRE(std::holds_alternative<FailingSubset>(serial.witness));
    REQUIRE(std::holds_alternative<FailingSubset>(parallel.witness));
    CHECK(std::get<FailingSubset>(serial.witness).indices == std::get<FailingSubset>(parallel.witness).indices);
    CHECK(std::get<FailingSubset>(serial.witness).indices.size() == 3);
    CHECK(verify_witness(f, serial.witness));
  }

  TEST_CASE("phase retrieval is invariant under invertible transforms") {
    gen::Rng rng(26);
    for (int t = 0; t < 40; ++t) {
      const std::size_t n = 2 + rng.index(2);
      const std::size_t m = 2 * n - 1 + rng.index(2);
      const Frame f = gen::planted_frame(rng, n, m, rng.index(m + 1));
      const Eigen::MatrixXcd u = gen::invertible(rng, n, Field::Real);
      REQUIRE(numerical_rank(u) == n);
      CHECK(certify_phase_retrieval(f).verdict == certify_phase_retrieval(transform_frame(f, u)).verdict);
    }
  }

  TEST_CASE("transform errors") {
    Eigen::MatrixXcd singular = Eigen::MatrixXcd::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(transform_frame(kR2, singular), Error);
    try {
      transform_frame(kR2, singular);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularTransform);
    }
    Eigen::MatrixXcd complex = Eigen::MatrixXcd::Identity(2, 2);
    complex(0, 1) = Scalar{0.0, 1.0};
    try {
      transform_frame(kR2, complex);
      FAIL("expected FieldMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FieldMismatch);
    }
  }

  TEST_CASE("caps and field checks") {
    gen::Rng rng(27);
    const Frame big = gen::frame(rng, Field::Real, 3, 26);
    try {
      complement_property(big);
      FAIL("expected EnumerationCapExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EnumerationCapExceeded);
    }
    CertifyOptions small;
    small.sign_cap = 4;
    try {
      falsify_by_sign_enumeration(gen::frame(rng, Field::Real, 2, 5), 5, 1, small);
      FAIL("expected EnumerationCapExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EnumerationCapExceeded);
    }
    try {
      falsify_by_sign_enumeration(gen::frame(rng, Field::Complex, 2, 4), 5, 1);
      FAIL("expected FieldMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FieldMismatch);
    }
    CHECK_THROWS_AS(certify_phase_retrieval(Frame::pairwise_sum(5)), Error);
  }

  TEST_CASE("full spark route above the subset cap") {
    gen::Rng rng(28);
    const Frame f = gen::frame(rng, Field::Real, 2, 30);
    const auto cert = certify_phase_retrieval(f);
    CHECK(cert.verdict == Verdict::PhaseRetrieval);
    CHECK(cert.method == Method::FullSparkCount);
  }

  TEST_CASE("bogus witnesses are rejected") {
    CHECK_FALSE(verify_witness(kR2, FailingSubset{{0}}));
    CHECK_FALSE(verify_witness(kR2, CollidingPair{VectorRep::dense_real({1, 2}), VectorRep::dense_real({1, -2})}));
    CHECK_FALSE(verify_witness(kOnb, CollidingPair{VectorRep::dense_real({1, 2}), VectorRep::dense_real({-1, -2})}));
    CHECK(verify_witness(kOnb, CollidingPair{VectorRep::dense_real({1, 2}), VectorRep::dense_real({1, -2})}));
    CHECK_FALSE(verify_witness(kOnb, Witness{}));
  }
}
