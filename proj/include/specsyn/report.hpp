#pragma once

#include <json.hpp>
#include <string>

#include "specsyn/config.hpp"
#include "specsyn/refinement.hpp"
#include "specsyn/synthesis.hpp"
#include "specsyn/unit_state.hpp"

namespace specsyn {

struct ReportMeta {
  std::string input;
  std::string model_backend;
  std::string verifier;
  bool deterministic = true;
  std::int64_t elapsed_ms = 0;  // omitted when deterministic
  std::size_t model_calls = 0;
};

std::string poi_string(const PoiRef& ref);  // "segment.index"
std::string path_string(const Path& path);  // "1.0.2", empty for none
Path parse_path(const std::string& s);

nlohmann::json vdr_json(const VdrReport& r);

/// Clause record {id, kind, predicate, poi, status, origin, round} plus the
/// owner function, POI kind and statement path that locate it in source.
nlohmann::json clause_json(const UnitState& unit, const SpecClause& c);

nlohmann::json synthesis_report(const UnitState& unit, const SynthesisResult& res, const RunConfig& cfg,
                                const ReportMeta& meta);

/// Segment listing for `specsyn segment`.
nlohmann::json segments_json(const UnitState& unit);

/// Report left behind when synthesis aborts: configuration, the clauses
/// known so far and an error section with the error kind and message.
nlohmann::json partial_report(const UnitState* unit, const RunConfig& cfg, const ReportMeta& meta,
                              const std::string& error_kind, const std::string& message);

/// Pretty JSON text with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace specsyn
