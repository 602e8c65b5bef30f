#include "phaselens/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "phaselens/error.hpp"

namespace phaselens {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

bool is_complex_entry(const json& e) { return e.is_array(); }

Scalar scalar_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  parse_error(fmt::format("expected a number or [re, im], got {}", e.dump()));
}

json scalar_to_json(Scalar s, bool real) {
  if (real) return s.real();
  return json::array({s.real(), s.imag()});
}

Field field_from_string(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  parse_error(fmt::format("unknown field \"{}\"", s));
}

std::size_t positive_size(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1) {
    parse_error(fmt::format("\"{}\" must be a positive integer", key));
  }
  return j[key].get<std::size_t>();
}

json witness_to_json(const Witness& w) {
  if (const auto* s = std::get_if<FailingSubset>(&w)) {
    return {{"kind", "failing_subset"}, {"indices", s->indices}};
  }
  if (const auto* p = std::get_if<CollidingPair>(&w)) {
    return {{"kind", "colliding_pair"}, {"x", vector_to_json(p->x)}, {"y", vector_to_json(p->y)}};
  }
  return nullptr;
}

json options_to_json(const CertifyOptions& o) {
  return {{"rank_tolerance", o.rank_tolerance},
          {"subset_cap", o.subset_cap},
          {"sign_cap", o.sign_cap},
          {"trials", o.trials},
          {"seed", o.seed}};
}

json downsample(const std::vector<double>& values) {
  json out = json::array();
  const std::size_t n = values.size();
  const std::size_t points = std::min(n, kMaxTracePoints);
  for (std::size_t i = 0; i < points; ++i) {
    const std::size_t idx = points == n ? i : (i * (n - 1) + (points - 1) / 2) / (points - 1);
    out.push_back(json::array({idx + 1, values[idx]}));
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(fmt::format("{}: {}", what, e.what()));
  }
}

Frame parse_frame_json(const std::string& text, std::optional<Field> field_override) {
  const json j = parse_json(text, "frame");
  if (!j.is_object()) parse_error("frame must be a JSON object");
  if (j.contains("structured")) {
    if (j["structured"] != "pairwise_sum") parse_error(fmt::format("unknown structured frame {}", j["structured"].dump()));
    if (field_override == Field::Complex) {
      throw Error(ErrorCode::FieldMismatch, "pairwise-sum frames are real");
    }
    return Frame::pairwise_sum(positive_size(j, "truncation"));
  }
  if (!j.contains("vectors") || !j["vectors"].is_array() || j["vectors"].empty()) {
    parse_error("frame needs a nonempty \"vectors\" array");
  }
  const json& vs = j["vectors"];
  bool any_complex = false;
  std::vector<std::vector<Scalar>> vectors;
  for (const json& v : vs) {
    if (!v.is_array() || v.empty()) parse_error("each frame vector must be a nonempty array");
    std::vector<Scalar> coords;
    for (const json& e : v) {
      any_complex = any_complex || is_complex_entry(e);
      coords.push_back(scalar_from_json(e));
    }
    vectors.push_back(std::move(coords));
  }
  Field field = any_complex ? Field::Complex : Field::Real;
  if (j.contains("field")) {
    if (!j["field"].is_string()) parse_error("\"field\" must be a string");
    field = field_from_string(j["field"].get<std::string>());
  }
  if (field_override) field = *field_override;
  const std::size_t dim = j.contains("dim") ? positive_size(j, "dim") : vectors.front().size();
  return Frame::explicit_frame(field, dim, vectors);
}

Frame parse_frame_csv(const std::string& text, std::optional<Field> field_override) {
  std::vector<std::vector<Scalar>> vectors;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    std::vector<Scalar> coords;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        const double value = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        coords.emplace_back(value, 0.0);
      } catch (const std::exception&) {
        parse_error(fmt::format("line {}: \"{}\" is not a real number", line_no, cell));
      }
    }
    vectors.push_back(std::move(coords));
  }
  if (vectors.empty()) parse_error("CSV frame has no rows");
  return Frame::explicit_frame(field_override.value_or(Field::Real), vectors.front().size(), vectors);
}

Frame load_frame(const std::filesystem::path& path, std::optional<Field> field_override) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".csv") return parse_frame_csv(text, field_override);
  return parse_frame_json(text, field_override);
}

VectorRep vector_from_json(const json& j) {
  if (j.is_string()) {
    if (j == "reciprocal") return VectorRep::reciprocal();
    parse_error(fmt::format("unknown vector {}", j.dump()));
  }
  if (j.is_array()) {
    if (j.empty()) parse_error("vector must be nonempty");
    std::vector<Scalar> coords;
    for (const json& e : j) coords.push_back(scalar_from_json(e));
    return VectorRep::dense(std::move(coords));
  }
  if (j.is_object() && j.contains("support") && j["support"].is_array()) {
    std::vector<std::pair<std::size_t, Scalar>> entries;
    for (const json& e : j["support"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || e[0].get<long long>() < 1) {
        parse_error(fmt::format("support entry must be [k >= 1, value], got {}", e.dump()));
      }
      entries.emplace_back(e[0].get<std::size_t>(), scalar_from_json(e[1]));
    }
    try {
      return VectorRep::finite_support(std::move(entries));
    } catch (const Error& e) {
      parse_error(e.what());
    }
  }
  parse_error(fmt::format("cannot read a vector from {}", j.dump()));
}

json vector_to_json(const VectorRep& v) {
  if (v.is_reciprocal()) return "reciprocal";
  const bool real = v.is_real();
  if (v.is_dense()) {
    json out = json::array();
    for (Scalar s : v.dense_coords()) out.push_back(scalar_to_json(s, real));
    return out;
  }
  json support = json::array();
  for (const auto& [k, s] : std::get<FiniteSupport>(v.storage()).entries) {
    support.push_back(json::array({k, scalar_to_json(s, real)}));
  }
  return {{"support", support}};
}

SequenceSpec sequence_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    parse_error("sequence spec must be an object with a \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "explicit") {
      if (!j.contains("points") || !j["points"].is_array()) parse_error("explicit sequence needs \"points\"");
      seq::ExplicitList list;
      for (const json& p : j["points"]) list.points.push_back(vector_from_json(p));
      return SequenceSpec(std::move(list));
    }
    if (kind == "scaled_basis") return SequenceSpec(seq::ScaledBasis{positive_size(j, "range")});
    if (kind == "unit_basis") return SequenceSpec(seq::UnitBasis{positive_size(j, "range")});
    if (kind == "alternating_sign") return SequenceSpec(seq::AlternatingSign{positive_size(j, "range")});
    if (kind == "perturbed_limit") {
      if (!j.contains("limit") || !j.contains("direction")) {
        parse_error("perturbed_limit needs \"limit\" and \"direction\"");
      }
      const double rate = j.value("rate", 1.0);
      return SequenceSpec(seq::PerturbedLimit{vector_from_json(j["limit"]), rate, vector_from_json(j["direction"]),
                                              positive_size(j, "range")});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    parse_error(fmt::format("sequence spec: {}", e.what()));
  } catch (const json::exception& e) {
    parse_error(fmt::format("sequence spec: {}", e.what()));
  }
  parse_error(fmt::format("unknown sequence kind \"{}\"", kind));
}

json to_json(const FrameBounds& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

json to_json(const Certificate& c) {
  return {{"schema_version", kSchemaVersion},
          {"verdict", to_string(c.verdict)},
          {"method", to_string(c.method)},
          {"witness", witness_to_json(c.witness)},
          {"frame_fingerprint", c.frame_fingerprint},
          {"parameters", options_to_json(c.parameters)},
          {"notes", c.notes}};
}

json to_json(const MetricReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"values",
           {{"bures", r.bures},
            {"d_phi", r.d_phi},
            {"frak", r.frak},
            {"theta_star", r.theta_star},
            {"frak_error_bound", r.frak_error_bound},
            {"alpha_difference_norm", r.alpha_difference_norm}}},
          {"bounds", to_json(r.bounds)},
          {"parameters", {{"grid_size", r.grid_size}, {"functional_count", r.functional_count}}},
          {"slacks", r.slacks}};
}

json to_json(const ConvergenceReport& r) {
  json witness = nullptr;
  if (r.witness) {
    witness = {{"label", r.witness_label}, {"gap", r.gap}, {"persistent", r.persistent}};
    if (r.witness_functional) witness["functional"] = *r.witness_functional;
    if (r.witness_vector) witness["vector"] = vector_to_json(*r.witness_vector);
  }
  std::optional<std::size_t> shown = r.witness;
  if (!shown && !r.traces.empty()) {
    shown = 0;
    for (std::size_t i = 1; i < r.traces.size(); ++i) {
      if (r.traces[i].tail_max > r.traces[*shown].tail_max) shown = i;
    }
  }
  json parameters = {{"prefix", r.prefix}, {"tail_start", r.tail_start}, {"tol", r.tol}, {"exact", r.exact}};
  parameters["truncation"] = r.truncation ? json(*r.truncation) : json(nullptr);
  return {{"schema_version", kSchemaVersion},
          {"topology", to_string(r.topology)},
          {"verdict", to_string(r.verdict)},
          {"witness", witness},
          {"trace_label", shown ? json(r.traces[*shown].label) : json(nullptr)},
          {"residual_trace", shown ? downsample(r.traces[*shown].values) : json::array()},
          {"trace_count", r.traces.size()},
          {"unresolved", r.unresolved},
          {"parameters", parameters},
          {"qualifier", r.qualifier}};
}

json to_json(const CoincidenceSummary& s) {
  json exemplars = json::array();
  for (const auto& e : s.exemplars) {
    exemplars.push_back({{"description", e.description},
                         {"tau_phi", to_string(e.tau_phi)},
                         {"tau_w", to_string(e.tau_w)},
                         {"witness", e.witness_label}});
  }
  return {{"schema_version", kSchemaVersion},
          {"certificate", to_json(s.certificate)},
          {"trials", s.trials},
          {"trial_mismatches", s.trial_mismatches},
          {"exemplars", exemplars},
          {"parameters", {{"prefix", s.prefix}, {"tol", s.tol}, {"seed", s.seed}}},
          {"qualifier", s.qualifier}};
}

}  // namespace phaselens
