#include "specsyn/synthesis.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include "specsyn/acsl.hpp"
#include "specsyn/error.hpp"

namespace specsyn {

namespace {

bool is_target(const SpecClause& c) { return c.origin == ClauseOrigin::Target; }

bool generation_fits(ClauseKind ck, PoiKind pk) {
  switch (pk) {
    case PoiKind::FunctionContract: return ck == ClauseKind::Requires || ck == ClauseKind::Ensures;
    case PoiKind::LoopHead: return ck == ClauseKind::LoopInvariant;
    case PoiKind::Statement: return false;
  }
  return false;
}

const PointOfInterest& regular_poi(const SegmentState& st, std::size_t poi_index) {
  if (poi_index >= st.regular_pois)
    throw AttachmentError("POI " + std::to_string(poi_index) + " is not a point of segment " +
                          std::to_string(st.seg.id));
  return st.pois[poi_index];
}

std::size_t line_of(const std::string& text, std::size_t offset) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
}

std::string indentation_before(const std::string& text, std::size_t offset) {
  std::size_t start = text.rfind('\n', offset == 0 ? 0 : offset - 1);
  start = (start == std::string::npos || offset == 0) ? 0 : start + 1;
  std::string out;
  for (std::size_t i = start; i < offset && (text[i] == ' ' || text[i] == '\t'); ++i) out.push_back(text[i]);
  return out;
}

SpecSet others_at_segment(const UnitState& unit, std::size_t seg_id, std::size_t poi_index) {
  return unit.verified(seg_id).filtered([&](const SpecClause& c) { return c.poi.index != poi_index; });
}

std::string task_text(const SegmentState& st, const PointOfInterest& poi) {
  std::ostringstream os;
  if (poi.kind == PoiKind::FunctionContract) {
    os << "Write the contract of function `" << poi.owner_name
       << "` at the placeholder comment: `requires` clauses for what callers must guarantee and `ensures` clauses "
          "for what the function guarantees on return.";
  } else {
    os << "Write `loop invariant` clauses for the " << describe_poi(st, poi)
       << " at the placeholder comment. Each invariant must hold before the first iteration and be preserved by "
          "every iteration.";
  }
  os << "\nEvery clause must hold for the code exactly as written and be provable by a deductive verifier. "
        "Prefer clauses that help prove the verification targets and the contracts of callers. "
        "Reply with one clause per line inside a single ``` fence, without labels.";
  return os.str();
}

void emit(EventLog* log, const std::string& type, nlohmann::json fields) {
  if (log) log->emit(type, std::move(fields));
}

}  // namespace

std::string describe_poi(const SegmentState& st, const PointOfInterest& poi) {
  if (poi.kind == PoiKind::FunctionContract) return "contract of " + poi.owner_name;
  auto decls = parse_declarations(st.seg.code, st.ctx);
  auto off = locate_construct(decls, poi.owner_name, poi.kind, poi.path);
  std::string what = poi.kind == PoiKind::LoopHead ? "loop" : "assertion";
  if (!off) return what + " in " + poi.owner_name;
  return what + " at line " + std::to_string(line_of(st.seg.code, *off)) + " of " + poi.owner_name;
}

Prompt sketch_prompt(const UnitState& unit, std::size_t seg_id) {
  const SegmentState& st = unit.at(seg_id);
  std::ostringstream os;
  os << "Plan the ACSL specifications of the C segment below before any clause is written. "
        "For every point of interest listed, say which clause kinds it needs, about how many, and what they "
        "must express so that the verification targets and the callers can be proved. "
        "Write one line per point in the form \"POI <number>: <plan>\".\n\n";
  os << "## Points of interest\n";
  for (std::size_t i = 0; i < st.regular_pois; ++i) os << "POI " << i << ": " << describe_poi(st, st.pois[i]) << "\n";
  SpecSet targets = unit.targets(seg_id);
  if (!targets.empty()) {
    os << "\n## Verification targets\n";
    for (const auto& t : targets) os << "- " << t.text() << "\n";
  }
  os << "\n## Segment\n" << instrument(st.seg.code, targets, st.pois, st.ctx).text;
  std::string deps = unit.dependency_text(seg_id);
  os << "\n## Dependencies\n" << (deps.empty() ? "(none)\n" : deps);
  return Prompt::single(Purpose::Sketch, os.str());
}

std::map<std::size_t, std::string> parse_sketch_hints(const std::string& text) {
  static const std::regex line_re(R"(^\s*(?:[-*]\s*)?\**POI\s+(\d+)\**\s*[:.)-]\s*(.*)$)", std::regex::icase);
  std::map<std::size_t, std::string> out;
  std::istringstream in(text);
  std::optional<std::size_t> current;
  for (std::string line; std::getline(in, line);) {
    std::smatch m;
    if (std::regex_match(line, m, line_re)) {
      current = static_cast<std::size_t>(std::stoul(m[1].str()));
      out[*current] = m[2].str();
    } else if (current && !line.empty() && std::isspace(static_cast<unsigned char>(line[0]))) {
      out[*current] += "\n" + line;
    } else {
      current.reset();
    }
  }
  return out;
}

Sketch generate_sketch(const UnitState& unit, std::size_t seg_id, ModelClient& model,
                       std::vector<std::string>* warnings) {
  const SegmentState& st = unit.at(seg_id);
  Sketch sk;
  sk.segment_id = seg_id;
  for (std::size_t i = 0; i < st.regular_pois; ++i) sk.per_poi_hints[i] = "";
  if (st.regular_pois == 0) return sk;
  try {
    sk.text = model.complete(sketch_prompt(unit, seg_id)).text;
  } catch (const TransportError& e) {
    if (warnings) warnings->push_back("segment " + std::to_string(seg_id) + ": sketch unavailable: " + e.what());
    return sk;
  }
  if (sk.text.empty()) {
    if (warnings) warnings->push_back("segment " + std::to_string(seg_id) + ": empty sketch response");
    return sk;
  }
  for (auto& [k, v] : parse_sketch_hints(sk.text))
    if (sk.per_poi_hints.count(k)) sk.per_poi_hints[k] = v;
  return sk;
}

Prompt assemble_generation_context(const UnitState& unit, std::size_t seg_id, std::size_t poi_index,
                                   const Sketch& sketch) {
  const SegmentState& st = unit.at(seg_id);
  const PointOfInterest& poi = regular_poi(st, poi_index);
  auto decls = parse_declarations(st.seg.code, st.ctx);
  auto off = locate_construct(decls, poi.owner_name, poi.kind, poi.path);
  if (!off) throw AttachmentError("POI " + std::to_string(poi_index) + " not found in segment text");

  // The marker sits on its own line so the construct keeps its position
  // relative to any clause block inserted in front of it.
  std::string marked = st.seg.code.substr(0, *off) + kInfillMarker + "\n" + indentation_before(st.seg.code, *off) +
                       st.seg.code.substr(*off);
  SpecSet shown = unit.verified(seg_id).merged(unit.targets(seg_id));
  std::string segment_text = instrument(marked, shown, st.pois, st.ctx).text;

  std::ostringstream os;
  os << "## Specification sketch\n" << (sketch.text.empty() ? "(none)" : sketch.text) << "\n\n";
  os << "## Segment\n" << segment_text << "\n";
  os << "## Task\n" << task_text(st, poi) << "\n";
  auto hint = sketch.per_poi_hints.find(poi_index);
  if (hint != sketch.per_poi_hints.end() && !hint->second.empty()) os << "Plan for this point: " << hint->second << "\n";
  std::string deps = unit.dependency_text(seg_id);
  os << "\n## Dependencies\n" << (deps.empty() ? "(none)\n" : deps);
  return Prompt::single(Purpose::Generate, os.str());
}

Prompt assemble_repair_context(const Prompt& ctx, const std::string& response,
                               const std::vector<SpecClause>& refuted, const std::vector<VerifierVerdict>& verdicts) {
  Prompt next = ctx;
  next.purpose = Purpose::Repair;
  next.turns.push_back({"assistant", response});
  std::ostringstream os;
  os << "The verifier could not prove these clauses:\n";
  for (const auto& c : refuted) {
    os << "- `" << c.text() << "`";
    for (const auto& v : verdicts) {
      if (v.clause_id != c.id) continue;
      os << ": " << to_string(v.status);
      if (!v.diagnostic.empty()) os << ", " << v.diagnostic;
    }
    os << "\n";
  }
  os << "Propose corrected or weaker clauses for the same point. Clauses that were proved are kept and need not "
        "be repeated. Reply with one clause per line inside a single ``` fence.";
  next.turns.push_back({"user", os.str()});
  return next;
}

RepairRound repair_round(UnitState& unit, std::size_t seg_id, std::size_t poi_index, const Prompt& ctx,
                         ModelClient& model, const Verifier& verifier, const SpecSet& accumulated,
                         ClauseOrigin origin, int round, EventLog* log) {
  const PointOfInterest poi = regular_poi(unit.at(seg_id), poi_index);
  nlohmann::json where = {{"segment", seg_id}, {"poi", poi_index}, {"round", round}};

  ModelResponse resp;
  try {
    resp = model.complete(ctx);
  } catch (const ExtractionEmpty&) {
    emit(log, "model_call", {{"segment", seg_id}, {"poi", poi_index}, {"round", round},
                             {"purpose", to_string(ctx.purpose)}, {"digest", ctx.digest()}, {"clauses", 0}});
    throw;
  }
  emit(log, "model_call", {{"segment", seg_id}, {"poi", poi_index}, {"round", round},
                           {"purpose", to_string(ctx.purpose)}, {"digest", ctx.digest()},
                           {"clauses", resp.extracted_clauses.size()}});

  RepairRound out;
  out.accumulated = accumulated;
  out.conversation = ctx;
  out.conversation.turns.push_back({"assistant", resp.text});
  out.next_ctx = out.conversation;

  SpecSet candidates;
  for (const auto& text : resp.extracted_clauses) {
    auto parsed = parse_clause(text);
    if (!parsed || !generation_fits(parsed->kind, poi.kind)) continue;
    SpecClause c;
    c.kind = parsed->kind;
    c.predicate = parsed->predicate;
    c.poi = poi.id;
    c.status = ClauseStatus::Candidate;
    c.origin = origin;
    c.round = round;
    if (accumulated.contains_key(c.key()) || candidates.contains_key(c.key())) continue;
    c.id = unit.allocate_id();
    candidates.insert(std::move(c));
  }
  out.candidates = candidates.size();
  if (candidates.empty()) return out;

  SpecSet assumed = others_at_segment(unit, seg_id, poi_index).merged(accumulated);
  CheckProgram prog = unit.program(seg_id, unit.at(seg_id).seg.code, assumed, candidates);
  out.verdicts = verifier.verify(prog.source, prog.checked);
  std::size_t proved = 0;
  for (const auto& v : out.verdicts) {
    const SpecClause* c = candidates.find(v.clause_id);
    if (!c) continue;
    SpecClause done = *c;
    if (v.status == VerdictStatus::Proved) {
      done.status = ClauseStatus::Verified;
      out.accumulated.insert(done);
      ++proved;
    } else {
      done.status = ClauseStatus::Refuted;
      out.refuted.push_back(done);
    }
    emit(log, "clause_status", {{"segment", seg_id}, {"poi", poi_index}, {"round", round}, {"id", done.id},
                                {"clause", done.text()}, {"status", to_string(done.status)},
                                {"verdict", to_string(v.status)}});
  }
  emit(log, "verify_call", {{"segment", seg_id}, {"poi", poi_index}, {"round", round}, {"verifier", verifier.name()},
                            {"checked", candidates.size()}, {"proved", proved}});
  if (!out.refuted.empty()) out.next_ctx = assemble_repair_context(ctx, resp.text, out.refuted, out.verdicts);
  return out;
}

PoiGeneration generate_poi_specs(UnitState& unit, std::size_t seg_id, std::size_t poi_index, const Prompt& start,
                                 ModelClient& model, const Verifier& verifier, const RunConfig& cfg,
                                 ClauseOrigin first_origin, int round, EventLog* log) {
  PoiGeneration out;
  out.specs = unit.verified(seg_id, poi_index);
  out.conversation = start;
  Prompt ctx = start;
  ClauseOrigin origin = first_origin;
  for (int j = 0; j < cfg.n_repair; ++j) {
    ++out.calls;
    RepairRound rr;
    try {
      rr = repair_round(unit, seg_id, poi_index, ctx, model, verifier, out.specs, origin, round, log);
    } catch (const ExtractionEmpty&) {
      break;
    } catch (const TransportError&) {
      ++out.failed_iterations;
      continue;
    } catch (const MalformedOutput&) {
      ++out.failed_iterations;
      continue;
    }
    out.specs = rr.accumulated;
    out.conversation = rr.conversation;
    unit.set_poi_specs(seg_id, poi_index, out.specs);
    if (rr.refuted.empty()) break;
    ctx = rr.next_ctx;
    if (origin == ClauseOrigin::Generated) origin = ClauseOrigin::Repaired;
  }
  return out;
}

SynthesisResult synthesize_program(UnitState& unit, ModelClient& model, const Verifier& verifier,
                                   VariantSource& mutator, const RunConfig& cfg, EventLog* log) {
  SynthesisResult res;
  for (std::size_t s = 0; s < unit.segments.size(); ++s) {
    SegmentRecord rec;
    rec.segment_id = s;
    rec.members = unit.at(s).seg.member_names;
    try {
      std::size_t before = model.calls();
      rec.sketch = generate_sketch(unit, s, model, &res.warnings);
      if (model.calls() > before)
        emit(log, "model_call", {{"segment", s}, {"purpose", "Sketch"}, {"hints", rec.sketch.per_poi_hints.size()}});
      for (std::size_t p = 0; p < unit.at(s).regular_pois; ++p) {
        PoiRecord pr;
        pr.poi = unit.at(s).pois[p].id;
        pr.description = describe_poi(unit.at(s), unit.at(s).pois[p]);
        Prompt ctx = assemble_generation_context(unit, s, p, rec.sketch);
        PoiGeneration gen = generate_poi_specs(unit, s, p, ctx, model, verifier, cfg, ClauseOrigin::Generated, 1, log);
        pr.generation_calls = gen.calls;
        pr.refinement = refine_poi_specs(unit, s, p, gen.conversation, model, verifier, mutator, cfg, log);
        if (pr.refinement.skipped)
          res.warnings.push_back("segment " + std::to_string(s) + " POI " + std::to_string(p) +
                                 ": refinement skipped: " + pr.refinement.skip_reason);
        rec.pois.push_back(std::move(pr));
      }
    } catch (const ReplayMiss&) {
      throw;
    } catch (const BackendUnavailable&) {
      throw;
    } catch (const Error& e) {
      rec.error = e.kind() + ": " + e.what();
      res.warnings.push_back("segment " + std::to_string(s) + " failed: " + *rec.error);
    }
    res.segments.push_back(std::move(rec));
  }

  // Final pass: drop failing non-target clauses until the rest verifies.
  for (;;) {
    InstrumentedSource whole = unit.annotated_unit(true);
    SpecSet checked = unit.all_specs().filtered(
        [](const SpecClause& c) { return is_target(c) || c.status == ClauseStatus::Verified; });
    res.final_verdicts = checked.empty() ? std::vector<VerifierVerdict>{} : verifier.verify(whole, checked);
    emit(log, "verify_call", {{"phase", "final"}, {"verifier", verifier.name()}, {"checked", checked.size()}});
    std::set<std::uint64_t> failing;
    for (const auto& v : res.final_verdicts) {
      const SpecClause* c = checked.find(v.clause_id);
      if (c && !is_target(*c) && v.status != VerdictStatus::Proved) failing.insert(c->id);
    }
    if (failing.empty()) break;
    for (auto& st : unit.segments)
      for (auto id : failing)
        if (st.specs.find(id)) st.specs.set_status(id, ClauseStatus::Refuted);
    for (auto id : failing) {
      emit(log, "clause_status", {{"phase", "final"}, {"id", id}, {"status", "Refuted"}});
    }
  }

  SpecSet all = unit.all_specs();
  res.dropped = all.filtered([](const SpecClause& c) { return c.status == ClauseStatus::Refuted; });
  for (auto& st : unit.segments)
    st.specs.erase_if([](const SpecClause& c) { return c.status == ClauseStatus::Refuted; });
  for (const auto& v : res.final_verdicts) {
    for (auto& st : unit.segments) {
      const SpecClause* c = st.specs.find(v.clause_id);
      if (!c || !is_target(*c)) continue;
      ++res.targets_total;
      if (v.status == VerdictStatus::Proved) ++res.targets_proved;
      st.specs.set_status(c->id, v.status == VerdictStatus::Proved ? ClauseStatus::Verified : ClauseStatus::Refuted);
    }
  }
  res.specs = unit.all_specs();
  return res;
}

}  // namespace specsyn
