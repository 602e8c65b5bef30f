#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "phaselens/certify.hpp"
#include "phaselens/frame.hpp"
#include "phaselens/metrics.hpp"
#include "phaselens/topology.hpp"
#include "phaselens/vector.hpp"

namespace phaselens {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kMaxTracePoints = 512;

/// Whole file as a string. Parse error when unreadable.
std::string read_text_file(const std::filesystem::path& path);

/// {"field": "real"|"complex", "dim": n, "vectors": [[...], ...]} with complex
/// entries as [re, im], or {"structured": "pairwise_sum", "truncation": N}.
/// Missing "field" is inferred from the entries; `field_override` wins over
/// both.
Frame parse_frame_json(const std::string& text, std::optional<Field> field_override = std::nullopt);

/// One real vector per row, comma separated.
Frame parse_frame_csv(const std::string& text, std::optional<Field> field_override = std::nullopt);

/// Picks CSV for a ".csv" extension, JSON otherwise.
Frame load_frame(const std::filesystem::path& path, std::optional<Field> field_override = std::nullopt);

/// [a, b, ...] (entries real or [re, im]) -> Dense;
/// {"support": [[k, v], ...]} -> FiniteSupport; "reciprocal" -> Reciprocal.
VectorRep vector_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const VectorRep& v);

/// {"kind": "explicit", "points": [...]} | {"kind": "scaled_basis", "range": K}
/// | {"kind": "unit_basis", "range": K} | {"kind": "alternating_sign", "range": K}
/// | {"kind": "perturbed_limit", "limit": v, "rate": r, "direction": v, "range": K}.
SequenceSpec sequence_from_json(const nlohmann::json& j);

/// Parses text as JSON; Parse error with the offending context otherwise.
nlohmann::json parse_json(const std::string& text, const std::string& what);

nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(const MetricReport& r);
/// Carries the witness trace (or, when converging, the trace with the largest
/// tail maximum) downsampled to at most kMaxTracePoints [k, r_k] pairs.
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const CoincidenceSummary& s);
nlohmann::json to_json(const FrameBounds& b);

}  // namespace phaselens
