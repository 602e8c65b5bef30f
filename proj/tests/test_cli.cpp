#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "phaselens/cli.hpp"

using namespace phaselens;
using nlohmann::json;

namespace {

const std::string kFrames = PHASELENS_DATA_DIR "/frames/";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("certify exit codes follow the verdict") {
    CHECK(run({"certify", kFrames + "r2_fullspark.json"}).code == cli::kExitPhaseRetrieval);
    CHECK(run({"certify", kFrames + "onb_r2.json"}).code == cli::kExitNotPhaseRetrieval);
    CHECK(run({"certify", kFrames + "c2_four_vector.json"}).code == cli::kExitInconclusive);
  }

  TEST_CASE("JSON output is byte identical across runs and carries the seed") {
    const std::vector<std::string> args{"--format", "json", "--seed", "99", "certify", kFrames + "onb_r2.json"};
    const Result a = run(args);
    const Result b = run(args);
    CHECK(a.out == b.out);
    const json j = json::parse(a.out);
    CHECK(j["seed"] == 99);
    CHECK(j["verdict"] == "NotPhaseRetrieval");

    const std::vector<std::string> conv{"--format", "json", "converge", kFrames + "onb_r2.json",
                                        R"({"kind": "alternating_sign", "range": 100})", "[1,1]"};
    CHECK(run(conv).out == run(conv).out);
  }

  TEST_CASE("dist reports the quotient distances") {
    const Result r = run({"--format", "json", "dist", kFrames + "c2_four_vector.json", "[3,0]", "[0,4]"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["values"]["bures"].get<double>() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(j["values"]["d_phi"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(j["values"]["frak"].get<double>() == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(j.contains("seed"));
  }

  TEST_CASE("converge reports one verdict per topology") {
    const Result r = run({"--format", "json", "converge", "pairwise_sum", R"({"kind": "scaled_basis", "range": 45})",
                          "reciprocal", "--witness", "reciprocal"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j["reports"].size() == 3);
    CHECK(j["reports"][0]["topology"] == "tau_phi");
    CHECK(j["reports"][2]["topology"] == "d_phi");
  }

  TEST_CASE("usage and math errors map to their exit codes") {
    CHECK(run({"certify", kFrames + "missing.json"}).code == cli::kExitUsage);
    CHECK(run({"repro", "no_such_scenario"}).code == cli::kExitUsage);
    CHECK(run({"--tol", "-1", "certify", kFrames + "r2_fullspark.json"}).code == cli::kExitUsage);
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"dist", kFrames + "r2_fullspark.json", "[1,2,3]", "[1,2]"}).code == cli::kExitUsage);
    CHECK(run({"--cap-subsets", "2", "certify", kFrames + "r2_fullspark.json"}).code == cli::kExitCapExceeded);
    CHECK(run({"bounds", kFrames + "collinear_r2.json"}).code == cli::kExitMath);
    const Result help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("certify") != std::string::npos);
  }

  TEST_CASE("repro scenarios pass") {
    for (const auto& name : cli::scenario_names()) {
      INFO(name);
      const Result r = run({"repro", name});
      CHECK(r.code == 0);
      CHECK(r.out.find("FAIL") == std::string::npos);
    }
  }
}
