#include "phaselens/cli.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "phaselens/certify.hpp"
#include "phaselens/error.hpp"
#include "phaselens/frame.hpp"
#include "phaselens/io.hpp"
#include "phaselens/metrics.hpp"
#include "phaselens/topology.hpp"

namespace phaselens::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kCertifyTrials = 50;

struct RunConfig {
  std::string command;
  std::string frame;
  std::string x;
  std::string y;
  std::string sequence;
  std::string limit;
  std::string scenario;
  std::vector<std::string> witnesses;
  std::optional<std::string> field;
  std::optional<double> tol;
  std::size_t grid = kDefaultGridSize;
  std::optional<std::size_t> truncation;
  std::optional<std::size_t> prefix;
  std::uint64_t seed = CertifyOptions{}.seed;
  std::string format = "table";
  std::size_t cap_subsets = CertifyOptions{}.subset_cap;
  std::size_t cap_signs = CertifyOptions{}.sign_cap;
  std::size_t trials = CoincidenceOptions{}.trials;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::Incompatible:
    case ErrorCode::FieldMismatch:
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    case ErrorCode::EnumerationCapExceeded:
      return kExitCapExceeded;
    case ErrorCode::NotAFrame:
    case ErrorCode::SingularTransform:
      return kExitMath;
  }
  return kExitInternal;
}

std::optional<Field> field_of(const RunConfig& c) {
  if (!c.field) return std::nullopt;
  return *c.field == "complex" ? Field::Complex : Field::Real;
}

Frame load(const RunConfig& c) {
  if (c.frame == "pairwise_sum") return Frame::pairwise_sum(c.truncation.value_or(kDefaultTruncation));
  Frame f = load_frame(c.frame, field_of(c));
  if (f.is_pairwise_sum() && c.truncation) return Frame::pairwise_sum(*c.truncation);
  return f;
}

// Inline JSON when the argument looks like JSON, otherwise a file path.
json argument_json(const std::string& arg, const std::string& what) {
  if (arg == "reciprocal") return "reciprocal";
  const auto first = arg.find_first_not_of(" \t");
  const bool inline_json = first != std::string::npos && std::string("[{\"-0123456789").find(arg[first]) != std::string::npos;
  return parse_json(inline_json ? arg : read_text_file(arg), what);
}

CertifyOptions certify_options(const RunConfig& c) {
  CertifyOptions o;
  o.rank_tolerance = c.tol.value_or(kRankTolerance);
  o.subset_cap = c.cap_subsets;
  o.sign_cap = c.cap_signs;
  o.trials = kCertifyTrials;
  o.seed = c.seed;
  return o;
}

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::string vector_text(const VectorRep& v) { return vector_to_json(v).dump(); }

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void row(std::ostream& out, const std::string& key, const std::string& value) {
  out << fmt::format("{:<44} {}\n", key, value);
}

int cmd_certify(const RunConfig& c, std::ostream& out) {
  const Frame f = load(c);
  const Certificate cert = certify_phase_retrieval(f, certify_options(c));
  if (c.format == "json") {
    json j = to_json(cert);
    j["seed"] = c.seed;
    emit(out, j);
  } else {
    row(out, "verdict", to_string(cert.verdict));
    row(out, "method", to_string(cert.method));
    row(out, "fingerprint", cert.frame_fingerprint);
    if (const auto* s = std::get_if<FailingSubset>(&cert.witness)) {
      row(out, "failing subset", json(s->indices).dump());
    } else if (const auto* p = std::get_if<CollidingPair>(&cert.witness)) {
      row(out, "colliding x", vector_text(p->x));
      row(out, "colliding y", vector_text(p->y));
    }
    for (const auto& note : cert.notes) row(out, "note", note);
    row(out, "seed", std::to_string(c.seed));
  }
  switch (cert.verdict) {
    case Verdict::PhaseRetrieval: return kExitPhaseRetrieval;
    case Verdict::NotPhaseRetrieval: return kExitNotPhaseRetrieval;
    case Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitInternal;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
  const Frame f = load(c);
  const FrameBounds b = frame_bounds(f);
  const double tol = c.tol.value_or(kRankTolerance);
  std::optional<std::size_t> spark_value;
  bool spark_known = false;
  if (f.functional_count() <= c.cap_subsets) {
    spark_value = spark(f, tol).spark;
    spark_known = true;
  }
  if (c.format == "json") {
    json j = {{"schema_version", kSchemaVersion},
              {"frame_fingerprint", fingerprint(f)},
              {"field", to_string(f.field())},
              {"dim", f.dim()},
              {"functional_count", f.functional_count()},
              {"bounds", to_json(b)},
              {"tight", b.upper - b.lower <= 1e-12 * b.upper},
              {"seed", c.seed}};
    if (spark_known) j["spark"] = spark_value ? json(*spark_value) : json(nullptr);
    emit(out, j);
  } else {
    row(out, "fingerprint", fingerprint(f));
    row(out, "field / dim / vectors", fmt::format("{} / {} / {}", to_string(f.field()), f.dim(), f.functional_count()));
    row(out, "lower bound A", num(b.lower));
    row(out, "upper bound B", num(b.upper));
    if (spark_known) row(out, "spark", spark_value ? std::to_string(*spark_value) : "none (independent)");
    row(out, "seed", std::to_string(c.seed));
  }
  return 0;
}

int cmd_dist(const RunConfig& c, std::ostream& out) {
  const Frame f = load(c);
  const QuotientPoint x = vector_from_json(argument_json(c.x, "x"));
  const QuotientPoint y = vector_from_json(argument_json(c.y, "y"));
  if (f.is_pairwise_sum()) {
    const auto s = d_phi_report(f, x, y);
    const double d = bures_distance(x, y);
    if (c.format == "json") {
      emit(out, {{"schema_version", kSchemaVersion},
                 {"values", {{"bures", d}, {"d_phi", s.value}}},
                 {"parameters", {{"truncation", *s.truncation}, {"exact", s.exact}}},
                 {"inputs", {{"x", vector_to_json(x.rep)}, {"y", vector_to_json(y.rep)}}},
                 {"seed", c.seed}});
    } else {
      row(out, "D", num(d));
      row(out, fmt::format("d_phi (indices <= {})", *s.truncation), num(s.value) + (s.exact ? "" : " (truncated)"));
      row(out, "seed", std::to_string(c.seed));
    }
    return 0;
  }
  const MetricReport r = inequality_report(f, x, y, c.grid);
  if (c.format == "json") {
    json j = to_json(r);
    j["inputs"] = {{"x", vector_to_json(x.rep)}, {"y", vector_to_json(y.rep)}, {"frame_fingerprint", fingerprint(f)}};
    j["seed"] = c.seed;
    emit(out, j);
  } else {
    row(out, "D", num(r.bures));
    row(out, "d_phi", num(r.d_phi));
    row(out, "frak", fmt::format("{} (error bound {:.3g})", num(r.frak), r.frak_error_bound));
    row(out, "theta*", num(r.theta_star));
    row(out, "|alpha(x)-alpha(y)|", num(r.alpha_difference_norm));
    row(out, "frame bounds A, B", fmt::format("{}, {}", num(r.bounds.lower), num(r.bounds.upper)));
    for (const auto& [name, value] : r.slacks) row(out, "slack " + name, num(value));
    row(out, "grid", std::to_string(r.grid_size));
    row(out, "seed", std::to_string(c.seed));
  }
  return 0;
}

int cmd_converge(const RunConfig& c, std::ostream& out) {
  const Frame f = load(c);
  const SequenceSpec s = sequence_from_json(argument_json(c.sequence, "sequence"));
  const QuotientPoint limit = vector_from_json(argument_json(c.limit, "limit"));
  const std::size_t k = c.prefix.value_or(std::min(kDefaultPrefix, s.range()));
  const double tol = c.tol.value_or(kDefaultConvergenceTol);

  std::vector<TestVector> witnesses;
  for (std::size_t i = 0; i < c.witnesses.size(); ++i) {
    witnesses.push_back({fmt::format("user_{}", i + 1), vector_from_json(argument_json(c.witnesses[i], "witness"))});
  }
  for (auto& w : default_witnesses(s, limit, k, k, c.seed)) witnesses.push_back(std::move(w));

  const std::vector<ConvergenceReport> reports{converge_tau_phi(f, s, limit, k, tol),
                                               converge_tau_w(s, limit, witnesses, k, tol),
                                               converge_d_phi(f, s, limit, k, tol)};
  if (c.format == "json") {
    json rs = json::array();
    for (const auto& r : reports) rs.push_back(to_json(r));
    emit(out, {{"schema_version", kSchemaVersion},
               {"sequence", s.describe()},
               {"limit", vector_to_json(limit.rep)},
               {"reports", rs},
               {"seed", c.seed}});
  } else {
    out << fmt::format("sequence: {}\n", s.describe());
    out << fmt::format("{:<9} {:<27} {:<20} {:>14}\n", "topology", "verdict", "witness", "gap");
    for (const auto& r : reports) {
      out << fmt::format("{:<9} {:<27} {:<20} {:>14}\n", to_string(r.topology), to_string(r.verdict),
                         r.witness ? r.witness_label : "-", r.witness ? num(r.gap) : "-");
    }
    out << reports.front().qualifier << '\n';
    row(out, "seed", std::to_string(c.seed));
  }
  return 0;
}

int cmd_suite(const RunConfig& c, std::ostream& out) {
  const Frame f = load(c);
  CoincidenceOptions o;
  o.trials = c.trials;
  o.prefix = c.prefix.value_or(kDefaultPrefix);
  o.tol = c.tol.value_or(kDefaultConvergenceTol);
  o.seed = c.seed;
  o.certify = certify_options(c);
  o.certify.rank_tolerance = kRankTolerance;
  const CoincidenceSummary s = finite_dim_coincidence_suite(f, o);
  if (c.format == "json") {
    json j = to_json(s);
    j["seed"] = c.seed;
    emit(out, j);
  } else {
    row(out, "certificate", to_string(s.certificate.verdict));
    row(out, "trials", std::to_string(s.trials));
    row(out, "trial mismatches", std::to_string(s.trial_mismatches));
    for (const auto& e : s.exemplars) {
      row(out, "mismatch exemplar", fmt::format("{}: tau_phi {}, tau_w {} (witness {})", e.description,
                                                to_string(e.tau_phi), to_string(e.tau_w), e.witness_label));
    }
    out << s.qualifier << '\n';
    row(out, "seed", std::to_string(c.seed));
  }
  return 0;
}

int cmd_repro(const RunConfig& c, std::ostream& out) {
  const ScenarioReport r = run_scenario(c.scenario, c.seed);
  if (c.format == "json") {
    json checks = json::array();
    for (const auto& ch : r.checks) {
      checks.push_back({{"name", ch.name}, {"expected", ch.expected}, {"observed", ch.observed}, {"pass", ch.pass}});
    }
    emit(out, {{"schema_version", kSchemaVersion}, {"scenario", r.name}, {"checks", checks}, {"pass", r.pass()},
               {"seed", c.seed}});
  } else {
    out << fmt::format("scenario {}\n", r.name);
    out << fmt::format("{:<46} {:<28} {:<22} {}\n", "check", "expected", "observed", "status");
    for (const auto& ch : r.checks) {
      out << fmt::format("{:<46} {:<28} {:<22} {}\n", ch.name, ch.expected, ch.observed, ch.pass ? "PASS" : "FAIL");
    }
    row(out, "seed", std::to_string(c.seed));
  }
  return r.pass() ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Phase retrieval frame toolkit: certification, quotient metrics and convergence diagnostics",
               "phaselens"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  app.add_option("--field", c.field, "Override the frame field")->check(CLI::IsMember({"real", "complex"}));
  app.add_option("--tol", c.tol, "Convergence tolerance (converge, suite) or relative rank tolerance (certify, bounds)")
      ->check(CLI::PositiveNumber);
  app.add_option("--grid", c.grid, "Theta grid size for the minimax distance")->check(CLI::Range(4, 1 << 24));
  app.add_option("--truncation", c.truncation, "Truncation N of pairwise-sum frames")->check(CLI::Range(2, 1 << 20));
  app.add_option("--prefix", c.prefix, "Sequence prefix length K")->check(CLI::Range(2, 1 << 24));
  app.add_option("--seed", c.seed, "Seed for every randomised step");
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--cap-subsets", c.cap_subsets, "Largest m for subset enumeration")->check(CLI::Range(1, 62));
  app.add_option("--cap-signs", c.cap_signs, "Largest m for sign enumeration")->check(CLI::Range(1, 62));

  auto* certify = app.add_subcommand("certify", "Certify phase retrieval for a frame");
  certify->add_option("frame", c.frame, "Frame file (JSON or CSV)")->required();
  auto* bounds = app.add_subcommand("bounds", "Frame bounds and spark");
  bounds->add_option("frame", c.frame, "Frame file (JSON or CSV)")->required();
  auto* dist = app.add_subcommand("dist", "Quotient distances and inequality slacks");
  dist->add_option("frame", c.frame, "Frame file, or pairwise_sum")->required();
  dist->add_option("x", c.x, "Vector (inline JSON or file)")->required();
  dist->add_option("y", c.y, "Vector (inline JSON or file)")->required();
  auto* converge = app.add_subcommand("converge", "Convergence diagnostics in tau_phi, tau_w and d_phi");
  converge->add_option("frame", c.frame, "Frame file, or pairwise_sum")->required();
  converge->add_option("sequence", c.sequence, "Sequence spec (inline JSON or file)")->required();
  converge->add_option("limit", c.limit, "Limit vector (inline JSON or file)")->required();
  converge->add_option("--witness", c.witnesses, "Extra tau_w test vector (repeatable)")->allow_extra_args(false);
  auto* suite = app.add_subcommand("suite", "Finite-dimensional coincidence suite");
  suite->add_option("frame", c.frame, "Frame file (JSON or CSV)")->required();
  suite->add_option("--trials", c.trials, "Number of random trials")->check(CLI::Range(1, 1 << 20));
  auto* repro = app.add_subcommand("repro", "Reproduce a named example");
  repro->add_option("scenario", c.scenario, "Scenario name")->required()->check(CLI::IsMember(scenario_names()));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e, out, err);
    return status == 0 ? 0 : kExitUsage;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    if (c.command == "certify") return cmd_certify(c, out);
    if (c.command == "bounds") return cmd_bounds(c, out);
    if (c.command == "dist") return cmd_dist(c, out);
    if (c.command == "converge") return cmd_converge(c, out);
    if (c.command == "suite") return cmd_suite(c, out);
    if (c.command == "repro") return cmd_repro(c, out);
  } catch (const Error& e) {
    err << fmt::format("error ({}): {}\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << fmt::format("internal error: {}\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace phaselens::cli
