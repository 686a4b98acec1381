#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specsyn/config.hpp"
#include "specsyn/event_log.hpp"
#include "specsyn/model_client.hpp"
#include "specsyn/refinement.hpp"
#include "specsyn/unit_state.hpp"
#include "specsyn/verifier.hpp"

namespace specsyn {

/// Placeholder that marks the POI under generation in prompts.
inline constexpr const char* kInfillMarker = "/* >>>INFILL<<< */";

/// Natural-language plan for a segment. Every regular POI index has an
/// entry in `per_poi_hints`, possibly empty.
struct Sketch {
  std::size_t segment_id = 0;
  std::string text;
  std::map<std::size_t, std::string> per_poi_hints;
};

/// Human-readable description of a POI ("loop at line 4 of f").
std::string describe_poi(const SegmentState& st, const PointOfInterest& poi);

Prompt sketch_prompt(const UnitState& unit, std::size_t seg_id);

/// One Sketch call. Segments without POIs get an empty Sketch without a
/// call; an empty response or a transport failure yields an empty Sketch
/// and a warning.
Sketch generate_sketch(const UnitState& unit, std::size_t seg_id, ModelClient& model,
                       std::vector<std::string>* warnings = nullptr);

/// Reads "POI <k>: ..." lines of a sketch response.
std::map<std::size_t, std::string> parse_sketch_hints(const std::string& text);

/// Generation prompt: sketch, segment code with the INFILL marker at the POI
/// (other clauses instrumented), task instructions, dependency code with
/// its verified clauses. Throws AttachmentError for a foreign POI.
Prompt assemble_generation_context(const UnitState& unit, std::size_t seg_id, std::size_t poi_index,
                                   const Sketch& sketch);

/// Appends the assistant response and a user turn listing each refuted
/// clause with its verifier diagnostic.
Prompt assemble_repair_context(const Prompt& ctx, const std::string& response,
                               const std::vector<SpecClause>& refuted, const std::vector<VerifierVerdict>& verdicts);

struct RepairRound {
  SpecSet accumulated;                  // previous set plus newly proved clauses
  std::vector<SpecClause> refuted;
  std::vector<VerifierVerdict> verdicts;  // one per checked candidate
  Prompt conversation;                  // ctx plus the assistant turn
  Prompt next_ctx;                      // conversation plus the repair request
  std::size_t candidates = 0;
};

/// One model call, candidate filtering (kind must fit the POI, duplicates
/// of accumulated clauses dropped), one verification with the other
/// verified clauses as assumptions. Throws ExtractionEmpty from the model.
RepairRound repair_round(UnitState& unit, std::size_t seg_id, std::size_t poi_index, const Prompt& ctx,
                         ModelClient& model, const Verifier& verifier, const SpecSet& accumulated,
                         ClauseOrigin origin, int round, EventLog* log = nullptr);

struct PoiGeneration {
  SpecSet specs;          // Verified clauses of the POI
  std::size_t calls = 0;  // model calls, at most cfg.n_repair
  std::size_t failed_iterations = 0;
  Prompt conversation;
};

/// Bounded repair loop starting from `start`. Stops when a round refutes
/// nothing, yields no candidate, or cfg.n_repair calls have been made.
/// Proved clauses are stored back into `unit`.
PoiGeneration generate_poi_specs(UnitState& unit, std::size_t seg_id, std::size_t poi_index, const Prompt& start,
                                 ModelClient& model, const Verifier& verifier, const RunConfig& cfg,
                                 ClauseOrigin first_origin, int round, EventLog* log = nullptr);

struct PoiRecord {
  PoiRef poi;
  std::string description;
  std::size_t generation_calls = 0;
  RefinementResult refinement;
};

struct SegmentRecord {
  std::size_t segment_id = 0;
  std::vector<std::string> members;
  Sketch sketch;
  std::vector<PoiRecord> pois;
  std::optional<std::string> error;
};

struct SynthesisResult {
  std::vector<SegmentRecord> segments;
  SpecSet specs;    // final merged set: Verified clauses plus targets
  SpecSet dropped;  // clauses that failed the final pass
  std::vector<VerifierVerdict> final_verdicts;
  std::size_t targets_total = 0;
  std::size_t targets_proved = 0;
  std::vector<std::string> warnings;
};

/// Bottom-up synthesis over all segments in topological order, then a final
/// pass over the whole instrumented unit. Clauses that fail the final pass
/// are marked Refuted and removed until the rest verifies; target verdicts
/// are reported. A failing segment is recorded and skipped.
SynthesisResult synthesize_program(UnitState& unit, ModelClient& model, const Verifier& verifier,
                                   VariantSource& mutator, const RunConfig& cfg, EventLog* log = nullptr);

}  // namespace specsyn
