#include "specsyn/unit_state.hpp"

#include <algorithm>

#include "specsyn/error.hpp"
#include "specsyn/poi.hpp"

namespace specsyn {

namespace {

constexpr std::size_t kAllPois = static_cast<std::size_t>(-1);

bool is_target(const SpecClause& c) { return c.origin == ClauseOrigin::Target; }

const PointOfInterest* poi_by_ref(const std::vector<PointOfInterest>& pois, const PoiRef& ref) {
  for (const auto& p : pois)
    if (p.id == ref) return &p;
  return nullptr;
}

const PointOfInterest* poi_by_shape(const std::vector<PointOfInterest>& pois, const PointOfInterest& like) {
  for (const auto& p : pois)
    if (p.kind == like.kind && p.owner_name == like.owner_name && p.path == like.path) return &p;
  return nullptr;
}

}  // namespace

UnitState::UnitState(std::vector<Segment> segs, const std::vector<AttachedClause>& targets) {
  segments.reserve(segs.size());
  for (const auto& seg : segs) {
    SegmentState st;
    st.seg = seg;
    st.ctx = parse_context_for(seg, segs);
    st.pois = extract_points_of_interest(seg, st.ctx);
    st.regular_pois = st.pois.size();
    st.specs = attach_targets(seg, st.pois, targets, next_id);
    segments.push_back(std::move(st));
  }
}

UnitState UnitState::from_source(const SourceUnit& unit) {
  AnnotatedProgram prog = parse_annotated(unit.text);
  std::vector<AttachedClause> targets;
  std::size_t dropped = 0;
  for (const auto& c : prog.clauses) {
    if (c.kind == ClauseKind::Assert) targets.push_back(c);
    else ++dropped;
  }
  auto segs = compute_segments(build_dependency_graph(parse_unit({unit.path, prog.code, unit.preprocessed})));
  UnitState st(std::move(segs), targets);
  st.dropped_input_clauses = dropped;
  return st;
}

UnitState UnitState::from_annotated(const SourceUnit& unit) {
  AnnotatedProgram prog = parse_annotated(unit.text);
  std::vector<AttachedClause> targets;
  for (const auto& c : prog.clauses)
    if (c.kind == ClauseKind::Assert) targets.push_back(c);
  auto segs = compute_segments(build_dependency_graph(parse_unit({unit.path, prog.code, unit.preprocessed})));
  UnitState st(std::move(segs), targets);
  for (const auto& c : prog.clauses) {
    if (c.kind == ClauseKind::Assert) continue;
    PoiKind pk = c.where == AttachKind::Function ? PoiKind::FunctionContract : PoiKind::LoopHead;
    st.install_clause(c.owner, pk, c.path, c.kind, c.predicate, ClauseStatus::Verified, ClauseOrigin::Generated);
  }
  return st;
}

std::uint64_t UnitState::install_clause(const std::string& owner, PoiKind poi_kind, const Path& path, ClauseKind kind,
                                        const std::string& predicate, ClauseStatus status, ClauseOrigin origin) {
  for (auto& st : segments) {
    for (std::size_t i = 0; i < st.regular_pois; ++i) {
      const PointOfInterest& p = st.pois[i];
      if (p.owner_name != owner || p.kind != poi_kind || p.path != path) continue;
      SpecClause c;
      c.kind = kind;
      c.predicate = predicate;
      c.poi = p.id;
      c.status = status;
      c.origin = origin;
      for (const auto& e : st.specs)
        if (e.key() == c.key()) return e.id;
      c.id = allocate_id();
      st.specs.insert(c);
      return c.id;
    }
  }
  std::string where;
  for (std::size_t i = 0; i < path.size(); ++i) where += (i ? "." : "") + std::to_string(path[i]);
  throw UnresolvablePOI("no " + std::string(to_string(poi_kind)) + " point in " + owner + " at path '" + where + "'");
}

std::vector<Segment> UnitState::plain_segments() const {
  std::vector<Segment> out;
  for (const auto& s : segments) out.push_back(s.seg);
  return out;
}

SpecSet UnitState::verified(std::size_t seg_id, std::size_t poi_index) const {
  return at(seg_id).specs.filtered([&](const SpecClause& c) {
    return !is_target(c) && c.status == ClauseStatus::Verified && (poi_index == kAllPois || c.poi.index == poi_index);
  });
}

SpecSet UnitState::targets(std::size_t seg_id) const { return at(seg_id).specs.filtered(is_target); }

std::string UnitState::dependency_text(std::size_t seg_id, bool with_specs) const {
  std::string out;
  auto all = plain_segments();
  for (const auto& dep : dependency_closure(at(seg_id).seg, all)) {
    const SegmentState& ds = at(dep.id);
    if (!out.empty()) out += "\n";
    out += with_specs ? instrument(ds.seg.code, verified(dep.id), ds.pois, ds.ctx).text : ds.seg.code;
  }
  return out;
}

CheckProgram UnitState::program(std::size_t seg_id, const std::string& code, const SpecSet& assumed,
                                const SpecSet& checked) const {
  const SegmentState& st = at(seg_id);
  CheckProgram out;
  SpecSet to_attach;
  std::vector<PointOfInterest> pois;
  if (code == st.seg.code) {
    pois = st.pois;
    out.checked = checked;
    to_attach = checked.merged(assumed);
  } else {
    Segment variant = st.seg;
    variant.code = code;
    pois = extract_points_of_interest(variant, st.ctx);
    auto remap = [&](const SpecSet& in, SpecSet& dst) {
      for (SpecClause c : in) {
        const PointOfInterest* orig = poi_by_ref(st.pois, c.poi);
        if (!orig || orig->kind == PoiKind::Statement) continue;
        const PointOfInterest* now = poi_by_shape(pois, *orig);
        if (!now) continue;
        c.poi = now->id;
        dst.insert(std::move(c));
      }
    };
    remap(checked, out.checked);
    SpecSet assumed_mapped;
    remap(assumed, assumed_mapped);
    to_attach = out.checked.merged(assumed_mapped);
  }
  InstrumentedSource seg_src = instrument(code, to_attach, pois, st.ctx);
  std::string deps = dependency_text(seg_id);
  out.source.clause_labels = std::move(seg_src.clause_labels);
  out.source.text = deps.empty() ? seg_src.text : deps + "\n" + seg_src.text;
  return out;
}

InstrumentedSource UnitState::annotated_unit(bool include_targets) const {
  InstrumentedSource out;
  for (const auto& st : segments) {
    SpecSet specs = st.specs.filtered([&](const SpecClause& c) {
      return is_target(c) ? include_targets : c.status == ClauseStatus::Verified;
    });
    InstrumentedSource part = instrument(st.seg.code, specs, st.pois, st.ctx);
    if (!out.text.empty()) out.text += "\n";
    out.text += part.text;
    out.clause_labels.insert(part.clause_labels.begin(), part.clause_labels.end());
  }
  return out;
}

SpecSet UnitState::all_specs() const {
  SpecSet out;
  for (const auto& st : segments) out = out.merged(st.specs);
  return out;
}

void UnitState::set_poi_specs(std::size_t seg_id, std::size_t poi_index, const SpecSet& specs) {
  SpecSet& own = at(seg_id).specs;
  own.erase_if([&](const SpecClause& c) { return !is_target(c) && c.poi.index == poi_index; });
  for (const auto& c : specs) own.insert(c);
}

}  // namespace specsyn
