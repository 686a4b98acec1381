#include "specsyn/report.hpp"

#include <sstream>

#include "specsyn/acsl.hpp"
#include "specsyn/error.hpp"

namespace specsyn {

using nlohmann::json;

std::string poi_string(const PoiRef& ref) { return std::to_string(ref.segment) + "." + std::to_string(ref.index); }

std::string path_string(const Path& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) out += (i ? "." : "") + std::to_string(path[i]);
  return out;
}

Path parse_path(const std::string& s) {
  Path out;
  std::istringstream in(s);
  for (std::string part; std::getline(in, part, '.');) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw MalformedOutput("bad statement path '" + s + "'");
    out.push_back(static_cast<std::size_t>(std::stoull(part)));
  }
  return out;
}

json vdr_json(const VdrReport& r) {
  json outcomes = json::array();
  for (const auto& o : r.outcomes)
    outcomes.push_back({{"variant", o.variant_id}, {"operator", o.operator_id}, {"refuted", o.refuted},
                        {"diagnostic", o.diagnostic}});
  return {{"round", r.round},
          {"total", r.total},
          {"refuted", r.refuted},
          {"rate", r.rate},
          {"undistinguished", r.undistinguished},
          {"objective", vdr_objective(r)},
          {"outcomes", outcomes}};
}

json clause_json(const UnitState& unit, const SpecClause& c) {
  json j = {{"id", c.id},
            {"kind", std::string(clause_keyword(c.kind))},
            {"predicate", c.predicate},
            {"poi", poi_string(c.poi)},
            {"status", std::string(to_string(c.status))},
            {"origin", std::string(to_string(c.origin))},
            {"round", c.round}};
  if (c.poi.segment < unit.segments.size()) {
    const auto& pois = unit.at(c.poi.segment).pois;
    if (c.poi.index < pois.size()) {
      const PointOfInterest& p = pois[c.poi.index];
      j["owner"] = p.owner_name;
      j["poi_kind"] = std::string(to_string(p.kind));
      j["path"] = path_string(p.path);
    }
  }
  return j;
}

namespace {

json config_json(const RunConfig& cfg, const ReportMeta& meta) {
  return {{"n_refine", cfg.n_refine},
          {"n_repair", cfg.n_repair},
          {"t", cfg.t},
          {"mutation_budget", cfg.mutation_budget},
          {"seed", cfg.seed},
          {"model_backend", meta.model_backend},
          {"verifier", meta.verifier},
          {"toolchain", cfg.toolchain.describe()}};
}

}  // namespace

json synthesis_report(const UnitState& unit, const SynthesisResult& res, const RunConfig& cfg,
                      const ReportMeta& meta) {
  json segs = json::array();
  for (const auto& rec : res.segments) {
    json pois = json::array();
    for (const auto& p : rec.pois) {
      json history = json::array();
      for (const auto& h : p.refinement.history) history.push_back(vdr_json(h));
      json poi = {{"poi", poi_string(p.poi)},
                  {"description", p.description},
                  {"generation_calls", p.generation_calls},
                  {"refinement_calls", p.refinement.model_calls},
                  {"vdr_history", history}};
      if (p.refinement.skipped) poi["refinement_skipped"] = p.refinement.skip_reason;
      pois.push_back(poi);
    }
    json hints = json::object();
    for (const auto& [k, v] : rec.sketch.per_poi_hints) hints[std::to_string(k)] = v;
    json s = {{"id", rec.segment_id},
              {"members", rec.members},
              {"sketch", {{"text", rec.sketch.text}, {"hints", hints}}},
              {"pois", pois}};
    if (rec.error) s["error"] = *rec.error;
    segs.push_back(s);
  }

  json clauses = json::array();
  for (const auto& c : res.specs) clauses.push_back(clause_json(unit, c));
  for (const auto& c : res.dropped) clauses.push_back(clause_json(unit, c));

  json verdicts = json::array();
  for (const auto& v : res.final_verdicts)
    verdicts.push_back({{"clause", v.clause_id},
                        {"status", std::string(to_string(v.status))},
                        {"diagnostic", v.diagnostic}});
  json dropped = json::array();
  for (const auto& c : res.dropped) dropped.push_back(c.id);

  json out = {
      {"format", "specsyn-report"},
      {"version", 1},
      {"input", meta.input},
      {"config", config_json(cfg, meta)},
      {"segments", segs},
      {"clauses", clauses},
      {"final_pass",
       {{"verdicts", verdicts},
        {"dropped", dropped},
        {"targets_total", res.targets_total},
        {"targets_proved", res.targets_proved}}},
      {"warnings", res.warnings},
      {"stats", {{"model_calls", meta.model_calls}}},
  };
  if (!meta.deterministic) out["stats"]["elapsed_ms"] = meta.elapsed_ms;
  return out;
}

json segments_json(const UnitState& unit) {
  json segs = json::array();
  for (const auto& st : unit.segments) {
    json pois = json::array();
    for (const auto& p : st.pois)
      pois.push_back({{"poi", poi_string(p.id)},
                      {"kind", std::string(to_string(p.kind))},
                      {"owner", p.owner_name},
                      {"path", path_string(p.path)}});
    segs.push_back({{"id", st.seg.id},
                    {"members", st.seg.member_names},
                    {"deps", st.seg.deps},
                    {"topo_rank", st.seg.topo_rank},
                    {"external_refs", st.seg.external_refs},
                    {"pois", pois},
                    {"code", st.seg.code}});
  }
  return {{"format", "specsyn-segments"}, {"version", 1}, {"segments", segs}};
}

json partial_report(const UnitState* unit, const RunConfig& cfg, const ReportMeta& meta,
                    const std::string& error_kind, const std::string& message) {
  json clauses = json::array();
  if (unit)
    for (const auto& c : unit->all_specs()) clauses.push_back(clause_json(*unit, c));
  json out = {{"format", "specsyn-report"},
              {"version", 1},
              {"input", meta.input},
              {"config", config_json(cfg, meta)},
              {"clauses", clauses},
              {"error", {{"kind", error_kind}, {"message", message}}},
              {"stats", {{"model_calls", meta.model_calls}}}};
  if (!meta.deterministic) out["stats"]["elapsed_ms"] = meta.elapsed_ms;
  return out;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace specsyn
