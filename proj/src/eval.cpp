#include "specsyn/eval.hpp"

#include <algorithm>
#include <set>

#include "specsyn/acsl.hpp"
#include "specsyn/error.hpp"
#include "specsyn/poi.hpp"
#include "specsyn/report.hpp"

namespace specsyn {

using nlohmann::json;

namespace {

LocatedClause from_attached(const AttachedClause& a) {
  LocatedClause c;
  c.kind = a.kind;
  c.predicate = a.predicate;
  c.owner = a.owner;
  c.path = a.path;
  switch (a.where) {
    case AttachKind::Function: c.poi_kind = PoiKind::FunctionContract; break;
    case AttachKind::Loop: c.poi_kind = PoiKind::LoopHead; break;
    case AttachKind::Statement: c.poi_kind = PoiKind::Statement; break;
  }
  return c;
}

AttachedClause to_target(const LocatedClause& c) {
  AttachedClause a;
  a.kind = ClauseKind::Assert;
  a.predicate = c.predicate;
  a.where = AttachKind::Statement;
  a.owner = c.owner;
  a.path = c.path;
  return a;
}

PoiKind poi_kind_from_string(const std::string& s) {
  if (s == "FunctionContract") return PoiKind::FunctionContract;
  if (s == "LoopHead") return PoiKind::LoopHead;
  if (s == "Statement") return PoiKind::Statement;
  throw MalformedOutput("unknown POI kind '" + s + "'");
}

bool same_point(const LocatedClause& a, const LocatedClause& b) {
  return a.owner == b.owner && a.poi_kind == b.poi_kind && a.path == b.path;
}

/// Subject code with its annotations stripped, split into segments, with
/// `generated` installed as Verified clauses. `ids[i]` is the clause id of
/// generated[i] (duplicates share an id).
struct Installed {
  UnitState unit;
  std::vector<std::uint64_t> ids;
};

Installed install(const std::string& code, const std::vector<LocatedClause>& targets,
                  const std::vector<LocatedClause>& generated) {
  std::vector<AttachedClause> attached;
  for (const auto& t : targets) attached.push_back(to_target(t));
  Installed out{UnitState(compute_segments(build_dependency_graph(parse_unit({"subject.c", code, true}))), attached),
                {}};
  for (const auto& g : generated) {
    if (g.poi_kind == PoiKind::Statement)
      throw UnresolvablePOI("assertion in " + g.owner + " is not a clause point");
    out.ids.push_back(out.unit.install_clause(g.owner, g.poi_kind, g.path, g.kind, g.predicate,
                                              ClauseStatus::Verified, ClauseOrigin::Generated));
  }
  return out;
}

}  // namespace

std::string_view to_string(CoverageMode m) { return m == CoverageMode::Entailment ? "entailment" : "textual"; }

GroundTruth load_ground_truth(const std::string& annotated_text) {
  GroundTruth gt;
  for (const auto& a : parse_annotated(annotated_text).clauses) {
    if (a.kind == ClauseKind::Assert) gt.targets.push_back(from_attached(a));
    else gt.clauses.push_back(from_attached(a));
  }
  return gt;
}

std::vector<LocatedClause> generated_from_report(const json& report) {
  std::vector<LocatedClause> out;
  if (!report.contains("clauses") || !report["clauses"].is_array())
    throw MalformedOutput("report has no clause list");
  for (const auto& r : report["clauses"]) {
    if (r.value("origin", "") == "Target") continue;
    LocatedClause c;
    c.kind = clause_kind_from_string(r.at("kind").get<std::string>());
    c.predicate = r.at("predicate").get<std::string>();
    c.owner = r.at("owner").get<std::string>();
    c.poi_kind = poi_kind_from_string(r.at("poi_kind").get<std::string>());
    c.path = parse_path(r.value("path", ""));
    out.push_back(std::move(c));
  }
  return out;
}

Fraction precision(const std::vector<VerifierVerdict>& verdicts) {
  if (verdicts.empty()) throw NoGenerated("no generated clause to measure precision on");
  Fraction f{0, verdicts.size()};
  for (const auto& v : verdicts)
    if (v.status == VerdictStatus::Proved) ++f.num;
  return f;
}

std::vector<VerifierVerdict> verify_generated(const std::string& subject, const std::vector<LocatedClause>& generated,
                                              const Verifier& verifier) {
  if (generated.empty()) return {};
  std::string code = parse_annotated(subject).code;
  Installed in = install(code, {}, generated);
  SpecSet checked = in.unit.all_specs();
  auto verdicts = verifier.verify(in.unit.annotated_unit(false), checked);
  std::vector<VerifierVerdict> out;
  for (auto id : in.ids) {
    auto it = std::find_if(verdicts.begin(), verdicts.end(), [&](const VerifierVerdict& v) { return v.clause_id == id; });
    out.push_back(it != verdicts.end() ? *it : VerifierVerdict{id, VerdictStatus::Invalid, "no verdict", ""});
  }
  return out;
}

RecallResult recall(const std::string& subject, const std::vector<LocatedClause>& generated, const GroundTruth& gt,
                    const Verifier& verifier) {
  RecallResult res;
  const auto* mock = dynamic_cast<const MockVerifier*>(&verifier);
  res.mode = mock ? CoverageMode::Entailment : CoverageMode::Textual;
  std::string code = parse_annotated(subject).code;
  // Resolving every clause up front reports foreign POIs before any check.
  install(code, {}, gt.clauses);
  res.recall.den = gt.clauses.size();
  for (const auto& g : gt.clauses) {
    bool covered = false;
    std::vector<std::string> premises, context;
    for (const auto& c : generated) {
      if (c.owner == g.owner && c.kind == ClauseKind::Requires && g.kind != ClauseKind::Requires)
        context.push_back(c.predicate);
      if (!same_point(c, g) || c.kind != g.kind) continue;
      premises.push_back(c.predicate);
      covered = covered || normalize_predicate(c.predicate) == normalize_predicate(g.predicate);
    }
    if (!covered && mock)
      covered = mock_entails(code, g.owner, g.kind, g.path, premises, g.predicate, context, mock->domain()) ==
                Entailment::Entailed;
    res.covered.push_back(covered);
    if (covered) ++res.recall.num;
  }
  return res;
}

Fraction count_proved_targets(const std::string& subject, const std::vector<LocatedClause>& generated,
                              const std::vector<LocatedClause>& targets, const Verifier& verifier) {
  if (targets.empty()) return {};
  std::string code = parse_annotated(subject).code;
  Installed in = install(code, targets, generated);
  // Generated clauses that fail are withdrawn so they cannot prop up a target.
  for (;;) {
    SpecSet checked = in.unit.all_specs().filtered([](const SpecClause& c) {
      return c.origin == ClauseOrigin::Target || c.status == ClauseStatus::Verified;
    });
    auto verdicts = verifier.verify(in.unit.annotated_unit(true), checked);
    std::set<std::uint64_t> failing;
    Fraction f{0, 0};
    for (const auto& v : verdicts) {
      const SpecClause* c = checked.find(v.clause_id);
      if (!c) continue;
      if (c->origin == ClauseOrigin::Target) {
        ++f.den;
        if (v.status == VerdictStatus::Proved) ++f.num;
      } else if (v.status != VerdictStatus::Proved) {
        failing.insert(c->id);
      }
    }
    if (failing.empty()) return f;
    for (auto& st : in.unit.segments)
      for (auto id : failing)
        if (st.specs.find(id)) st.specs.set_status(id, ClauseStatus::Refuted);
  }
}

MetricsReport evaluate(const std::string& subject, const std::string& ground_truth, const json& report,
                       const Verifier& verifier) {
  MetricsReport m;
  GroundTruth gt = load_ground_truth(ground_truth);
  auto generated = generated_from_report(report);
  m.generated_total = generated.size();
  auto verdicts = verify_generated(subject, generated, verifier);
  if (verdicts.empty()) {
    m.precision_defined = false;
  } else {
    m.precision = precision(verdicts);
    m.verified_total = m.precision.num;
  }
  // Only clauses that verify may cover ground truth.
  std::vector<LocatedClause> proved;
  for (std::size_t i = 0; i < verdicts.size(); ++i)
    if (verdicts[i].status == VerdictStatus::Proved) proved.push_back(generated[i]);
  RecallResult r = recall(subject, proved, gt, verifier);
  m.recall = r.recall;
  m.gt_total = r.recall.den;
  m.gt_covered = r.recall.num;
  m.coverage_mode = r.mode;

  std::vector<LocatedClause> targets;
  for (const auto& a : parse_annotated(subject).clauses)
    if (a.kind == ClauseKind::Assert) targets.push_back(from_attached(a));
  if (targets.empty()) targets = gt.targets;
  Fraction t = count_proved_targets(subject, generated, targets, verifier);
  m.targets_total = t.den;
  m.targets_proved = t.num;
  return m;
}

json metrics_json(const MetricsReport& m) {
  json j = {{"format", "specsyn-metrics"},
            {"version", 1},
            {"generated_total", m.generated_total},
            {"verified_total", m.verified_total},
            {"precision", {{"num", m.precision.num}, {"den", m.precision.den}, {"value", m.precision.value()}}},
            {"gt_total", m.gt_total},
            {"gt_covered", m.gt_covered},
            {"recall", {{"num", m.recall.num}, {"den", m.recall.den}, {"value", m.recall.value()}}},
            {"coverage_mode", std::string(to_string(m.coverage_mode))},
            {"targets_total", m.targets_total},
            {"targets_proved", m.targets_proved}};
  if (!m.precision_defined) j["precision"]["flag"] = "NoGenerated";
  return j;
}

}  // namespace specsyn
