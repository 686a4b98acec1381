#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specsyn/frontend.hpp"
#include "specsyn/poi.hpp"
#include "specsyn/segmentation.hpp"
#include "specsyn/spec.hpp"

namespace specsyn {

struct SegmentState {
  Segment seg;
  ParseContext ctx;
  std::vector<PointOfInterest> pois;  // regular POIs first, then target anchors
  std::size_t regular_pois = 0;
  SpecSet specs;                      // Verified clauses plus Target assertions
};

/// Program text ready for a verifier plus the clauses it checks. Clauses
/// whose POI does not exist in the checked code are left out of `checked`.
struct CheckProgram {
  InstrumentedSource source;
  SpecSet checked;
};

/// Segments of one translation unit with their POIs and accepted clauses.
/// Clause ids are unique across the unit.
class UnitState {
 public:
  UnitState(std::vector<Segment> segments, const std::vector<AttachedClause>& targets);

  /// Strips annotations from `unit`, keeps its assertions as targets and
  /// decomposes the remaining code. Other input annotations are dropped.
  static UnitState from_source(const SourceUnit& unit);

  std::vector<SegmentState> segments;
  std::uint64_t next_id = 1;
  std::size_t dropped_input_clauses = 0;

  std::uint64_t allocate_id() { return next_id++; }
  SegmentState& at(std::size_t seg_id) { return segments.at(seg_id); }
  const SegmentState& at(std::size_t seg_id) const { return segments.at(seg_id); }
  std::vector<Segment> plain_segments() const;

  /// Verified clauses of `seg_id` (targets excluded) at POI `poi_index`, or
  /// at every POI when `poi_index` is npos.
  SpecSet verified(std::size_t seg_id, std::size_t poi_index = static_cast<std::size_t>(-1)) const;
  SpecSet targets(std::size_t seg_id) const;

  /// Code of the dependency closure in topological order, each dependency
  /// instrumented with its verified clauses (or plain when `with_specs` is
  /// false).
  std::string dependency_text(std::size_t seg_id, bool with_specs = true) const;

  /// `code` (the segment's own code or a variant of it) instrumented with
  /// `assumed` and `checked`, preceded by the instrumented dependencies.
  /// Clause POIs are matched by owner, kind and path when `code` is a
  /// variant; unmatched clauses are dropped.
  CheckProgram program(std::size_t seg_id, const std::string& code, const SpecSet& assumed,
                       const SpecSet& checked) const;

  /// Every segment in topological order instrumented with its clauses.
  InstrumentedSource annotated_unit(bool include_targets = true) const;

  /// Union of all segment clause sets.
  SpecSet all_specs() const;

  /// Adds a clause at the regular POI of `owner` with the given kind and
  /// path. Returns its id, or the id of an existing clause with the same
  /// key. Throws UnresolvablePOI.
  std::uint64_t install_clause(const std::string& owner, PoiKind poi_kind, const Path& path, ClauseKind kind,
                               const std::string& predicate, ClauseStatus status, ClauseOrigin origin);

  /// Like from_source, but keeps the non-assertion clauses of `unit` as
  /// Verified clauses at their POIs.
  static UnitState from_annotated(const SourceUnit& unit);

  /// Replaces the Verified clauses at one POI.
  void set_poi_specs(std::size_t seg_id, std::size_t poi_index, const SpecSet& specs);
};

}  // namespace specsyn
