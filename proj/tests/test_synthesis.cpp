#include <doctest.h>

#include <algorithm>
#include <regex>

#include "fig1_script.hpp"
#include "specsyn/config.hpp"
#include "specsyn/error.hpp"
#include "specsyn/refinement.hpp"
#include "specsyn/synthesis.hpp"
#include "test_util.hpp"

using namespace specsyn;

namespace {

const char* kInc = "int inc(int x)\n{\n  return x + 1;\n}\n";

// b calls a, c calls b, d calls c.
const char* kChain =
    "int d0(int x)\n{\n  return x;\n}\n\n"
    "int d1(int x)\n{\n  return d0(x);\n}\n\n"
    "int d2(int x)\n{\n  return d1(x);\n}\n\n"
    "int d3(int x)\n{\n  return d2(x);\n}\n";

UnitState unit_of(const std::string& text) { return UnitState::from_source({"t.c", text, true}); }

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + needle.size())) ++n;
  return n;
}

/// Fails the first `failures` calls, then delegates.
class FlakyBackend : public ModelBackend {
 public:
  FlakyBackend(std::shared_ptr<ModelBackend> inner, int failures) : inner_(std::move(inner)), left_(failures) {}
  std::string complete_raw(const Prompt& p) override {
    if (left_-- > 0) throw TransportError("connection reset");
    return inner_->complete_raw(p);
  }
  std::string name() const override { return "flaky"; }

 private:
  std::shared_ptr<ModelBackend> inner_;
  int left_;
};

}  // namespace

TEST_CASE("generation prompt: one marker, fixed section order, task names the point") {
  UnitState u = unit_of(kInc);
  Prompt p = assemble_generation_context(u, 0, 0, Sketch{});
  std::string body = p.body();
  CHECK(count_of(body, kInfillMarker) == 1);
  auto sk = body.find("## Specification sketch"), sg = body.find("## Segment"), tk = body.find("## Task"),
       dp = body.find("## Dependencies");
  REQUIRE(sk != std::string::npos);
  CHECK(sk < sg);
  CHECK(sg < tk);
  CHECK(tk < dp);
  CHECK(body.find("contract of function `inc`") != std::string::npos);
  // The marker precedes the function it stands for.
  CHECK(body.find(kInfillMarker) < body.find("int inc(int x)"));
  CHECK(p.purpose == Purpose::Generate);
}

TEST_CASE("generation prompt rejects a foreign POI") {
  UnitState u = unit_of(kInc);
  CHECK_THROWS_AS(assemble_generation_context(u, 0, 7, Sketch{}), AttachmentError);
}

TEST_CASE("sketch hints parse per POI and skip segments without POIs") {
  auto hints = parse_sketch_hints("Intro\nPOI 0: bounds\n  and more\n- POI 2) result\nPOI x: junk\n");
  CHECK(hints.size() == 2);
  CHECK(hints.at(0) == "bounds\n  and more");
  CHECK(hints.at(2) == "result");

  UnitState types = unit_of("struct point { int x; int y; };\n");
  auto sb = std::make_shared<ScriptedBackend>();
  ModelClient mc(sb);
  for (std::size_t s = 0; s < types.segments.size(); ++s) {
    Sketch sk = generate_sketch(types, s, mc);
    CHECK(sk.text.empty());
    CHECK(sk.per_poi_hints.empty());
  }
  CHECK(mc.calls() == 0);
}

TEST_CASE("empty sketch response leaves an empty sketch and a warning") {
  UnitState u = unit_of(kInc);
  ModelClient mc(std::make_shared<ScriptedBackend>());
  std::vector<std::string> warnings;
  Sketch sk = generate_sketch(u, 0, mc, &warnings);
  CHECK(sk.text.empty());
  CHECK(sk.per_poi_hints.at(0).empty());
  CHECK(warnings.size() == 1);
  CHECK(mc.calls() == 1);
}

TEST_CASE("repair round refutes a false postcondition and cites its counterexample") {
  UnitState u = unit_of(kInc);
  auto sb = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Rule>{
      {Purpose::Generate, {}, "```\nensures \\result == 2;\nensures \\result == x + 1;\n```", std::nullopt}});
  ModelClient mc(sb);
  MockVerifier v;
  Prompt ctx = assemble_generation_context(u, 0, 0, Sketch{});
  RepairRound rr = repair_round(u, 0, 0, ctx, mc, v, {}, ClauseOrigin::Generated, 1, nullptr);
  REQUIRE(rr.refuted.size() == 1);
  CHECK(rr.refuted[0].predicate == "\\result == 2");
  CHECK(rr.accumulated.size() == 1);
  CHECK(rr.accumulated.begin()->predicate == "\\result == x + 1");

  // Oracle: the counterexample input must really violate the clause.
  auto verdict = std::find_if(rr.verdicts.begin(), rr.verdicts.end(),
                              [&](const VerifierVerdict& x) { return x.clause_id == rr.refuted[0].id; });
  REQUIRE(verdict != rr.verdicts.end());
  std::smatch m;
  REQUIRE(std::regex_search(verdict->diagnostic, m, std::regex(R"(x\s*=\s*(-?\d+))")));
  CHECK(std::stoll(m[1].str()) + 1 != 2);

  std::string next = rr.next_ctx.body();
  CHECK(rr.next_ctx.purpose == Purpose::Repair);
  CHECK(next.find("ensures \\result == 2;") != std::string::npos);
  CHECK(next.find(verdict->diagnostic) != std::string::npos);
}

TEST_CASE("candidates are filtered by POI kind and deduplicated modulo whitespace") {
  UnitState u = unit_of(kInc);
  auto sb = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Rule>{
      {Purpose::Generate, {},
       "```\nensures \\result == x + 1;\nensures \\result==x+1;\nloop invariant x == x;\nensures \\result > x;\n```",
       std::nullopt}});
  ModelClient mc(sb);
  MockVerifier v;
  SpecSet acc;
  SpecClause prior;
  prior.id = u.allocate_id();
  prior.kind = ClauseKind::Ensures;
  prior.predicate = "\\result  >  x";
  prior.poi = u.at(0).pois[0].id;
  prior.status = ClauseStatus::Verified;
  acc.insert(prior);
  RepairRound rr = repair_round(u, 0, 0, assemble_generation_context(u, 0, 0, Sketch{}), mc, v, acc,
                                ClauseOrigin::Generated, 1, nullptr);
  CHECK(rr.candidates == 1);
  CHECK(rr.refuted.empty());
  CHECK(rr.accumulated.size() == 2);
}

TEST_CASE("generation loop: early exit, bound and failed iterations") {
  RunConfig cfg;
  MockVerifier v;

  SUBCASE("first response fully verifies: one call") {
    UnitState u = unit_of(kInc);
    ModelClient mc(std::make_shared<ScriptedBackend>(
        std::vector<ScriptedBackend::Rule>{{std::nullopt, {}, "```\nensures \\result == x + 1;\n```", std::nullopt}}));
    auto g = generate_poi_specs(u, 0, 0, assemble_generation_context(u, 0, 0, Sketch{}), mc, v, cfg,
                                ClauseOrigin::Generated, 1, nullptr);
    CHECK(g.calls == 1);
    CHECK(mc.calls() == 1);
    CHECK(g.specs.size() == 1);
  }
  SUBCASE("every round refuted: exactly n_repair calls") {
    UnitState u = unit_of(kInc);
    ModelClient mc(std::make_shared<ScriptedBackend>(
        std::vector<ScriptedBackend::Rule>{{std::nullopt, {}, "```\nensures \\result == 2;\n```", std::nullopt}}));
    auto g = generate_poi_specs(u, 0, 0, assemble_generation_context(u, 0, 0, Sketch{}), mc, v, cfg,
                                ClauseOrigin::Generated, 1, nullptr);
    CHECK(g.calls == static_cast<std::size_t>(cfg.n_repair));
    CHECK(mc.calls() == static_cast<std::size_t>(cfg.n_repair));
    CHECK(g.specs.empty());
    auto s = mc.session();
    CHECK(s.front().purpose == Purpose::Generate);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].purpose == Purpose::Repair);
  }
  SUBCASE("mixed rounds: union of verified clauses, origins follow the round") {
    UnitState u = unit_of(kInc);
    ModelClient mc(std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Rule>{
        {Purpose::Generate, {}, "```\nensures \\result > x;\nensures \\result == 0;\n```", std::nullopt},
        {Purpose::Repair, {}, "```\nensures \\result > x;\nensures \\result == x + 1;\n```", std::nullopt}}));
    auto g = generate_poi_specs(u, 0, 0, assemble_generation_context(u, 0, 0, Sketch{}), mc, v, cfg,
                                ClauseOrigin::Generated, 1, nullptr);
    CHECK(g.calls == 2);
    REQUIRE(g.specs.size() == 2);
    std::map<std::string, ClauseOrigin> origin;
    for (const auto& c : g.specs) origin[c.predicate] = c.origin;
    CHECK(origin.at("\\result > x") == ClauseOrigin::Generated);
    CHECK(origin.at("\\result == x + 1") == ClauseOrigin::Repaired);
    for (const auto& c : u.verified(0, 0)) CHECK(c.status == ClauseStatus::Verified);
  }
  SUBCASE("no extractable clause ends the loop") {
    UnitState u = unit_of(kInc);
    ModelClient mc(std::make_shared<ScriptedBackend>(
        std::vector<ScriptedBackend::Rule>{{std::nullopt, {}, "I cannot help with that.", std::nullopt}}));
    auto g = generate_poi_specs(u, 0, 0, assemble_generation_context(u, 0, 0, Sketch{}), mc, v, cfg,
                                ClauseOrigin::Generated, 1, nullptr);
    CHECK(g.calls == 1);
    CHECK(g.specs.empty());
  }
  SUBCASE("transport failures count as failed iterations") {
    UnitState u = unit_of(kInc);
    auto inner = std::make_shared<ScriptedBackend>(
        std::vector<ScriptedBackend::Rule>{{std::nullopt, {}, "```\nensures \\result == x + 1;\n```", std::nullopt}});
    ModelClient mc(std::make_shared<FlakyBackend>(inner, 2));
    auto g = generate_poi_specs(u, 0, 0, assemble_generation_context(u, 0, 0, Sketch{}), mc, v, cfg,
                                ClauseOrigin::Generated, 1, nullptr);
    CHECK(g.calls == 3);
    CHECK(g.failed_iterations == 2);
    CHECK(g.specs.size() == 1);
  }
}

TEST_CASE("dependency code follows topological order across a depth-3 closure") {
  UnitState u = unit_of(kChain);
  std::size_t top = 0;
  for (const auto& st : u.segments)
    if (st.seg.member_names == std::vector<std::string>{"d3"}) top = st.seg.id;
  std::string deps = u.dependency_text(top, false);
  // Oracle: callee-first order of the chain, read off the source itself.
  auto p0 = deps.find("int d0("), p1 = deps.find("int d1("), p2 = deps.find("int d2(");
  REQUIRE(p0 != std::string::npos);
  REQUIRE(p1 != std::string::npos);
  REQUIRE(p2 != std::string::npos);
  CHECK(p0 < p1);
  CHECK(p1 < p2);
  CHECK(deps.find("int d3(") == std::string::npos);
  std::string body = assemble_generation_context(u, top, 0, Sketch{}).body();
  CHECK(body.find(deps) > body.find("## Dependencies"));
}

TEST_CASE("segments are synthesized callee first with callee contracts fixed") {
  UnitState u = unit_of(kChain);
  auto sb = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Rule>{
      {Purpose::Generate, {}, "```\nensures \\result == x;\n```", std::nullopt}});
  ModelClient mc(sb);
  MockVerifier v;
  FixedVariants none({});
  RunConfig cfg;
  auto res = synthesize_program(u, mc, v, none, cfg);
  std::vector<std::string> order;
  for (const auto& e : mc.session()) {
    if (e.purpose != Purpose::Generate) continue;
    auto at = e.body.find("contract of function `");
    REQUIRE(at != std::string::npos);
    std::string name = e.body.substr(at + 22, 2);
    // Every callee already synthesized appears with its proved clause.
    std::string deps = e.body.substr(e.body.find("## Dependencies"));
    for (const auto& done : order) CHECK(deps.find("int " + done + "(") != std::string::npos);
    CHECK(count_of(deps, "ensures") == order.size());
    order.push_back(name);
  }
  CHECK(order == std::vector<std::string>{"d0", "d1", "d2", "d3"});
  for (const auto& c : res.specs) CHECK(c.status == ClauseStatus::Verified);
  CHECK(res.specs.size() == 4);
}

TEST_CASE("fig1: caller prompt carries the callee contract and the target is proved") {
  std::string text = testutil::read_file(testutil::data_path("fig1.c"));
  UnitState u = UnitState::from_source({"fig1.c", text, true});
  RunConfig cfg = load_config(testutil::data_path("fig1.toml"), {}, {});
  ModelClient mc(std::make_shared<ScriptedBackend>(fixtures::fig1_rules()));
  MockVerifier v(cfg.mock);
  CatalogMutator mut(static_cast<std::size_t>(cfg.mutation_budget), cfg.seed, cfg.toolchain);
  auto res = synthesize_program(u, mc, v, mut, cfg);

  bool seen = false;
  for (const auto& e : mc.session()) {
    if (e.purpose != Purpose::Generate || e.body.find("contract of function `check_same`") == std::string::npos)
      continue;
    seen = true;
    std::string deps = e.body.substr(e.body.find("## Dependencies"));
    CHECK(deps.find("int bufs_differ(") != std::string::npos);
    CHECK(deps.find("ensures") != std::string::npos);
    CHECK(deps.find("\\result == 0 || \\result == 1") != std::string::npos);
  }
  CHECK(seen);
  CHECK(res.targets_total == 1);
  CHECK(res.targets_proved == 1);
  CHECK(res.dropped.empty());
  for (const auto& c : res.specs)
    CHECK((c.origin == ClauseOrigin::Target || c.status == ClauseStatus::Verified));
}

TEST_CASE("final pass reports an unprovable target as refuted") {
  UnitState u = unit_of("int id(int x)\n{\n  return x;\n}\n\nint use(int y)\n{\n  int r = id(y);\n"
                        "  /*@ assert r == y; */\n  return r;\n}\n");
  ModelClient mc(std::make_shared<ScriptedBackend>());
  MockVerifier v;
  FixedVariants none({});
  auto res = synthesize_program(u, mc, v, none, RunConfig{});
  CHECK(res.targets_total == 1);
  CHECK(res.targets_proved == 0);
  REQUIRE(res.specs.size() == 1);
  CHECK(res.specs.begin()->origin == ClauseOrigin::Target);
  CHECK(res.specs.begin()->status == ClauseStatus::Refuted);
}

TEST_CASE("replay miss aborts synthesis") {
  UnitState u = unit_of(kInc);
  ModelClient mc(std::make_shared<ReplayBackend>(std::vector<TranscriptRecord>{}));
  MockVerifier v;
  FixedVariants none({});
  CHECK_THROWS_AS(synthesize_program(u, mc, v, none, RunConfig{}), ReplayMiss);
}

TEST_CASE("unit state installs clauses by location and rejects unknown points") {
  UnitState u = unit_of(kChain);
  auto id = u.install_clause("d1", PoiKind::FunctionContract, {}, ClauseKind::Ensures, "\\result == x",
                             ClauseStatus::Verified, ClauseOrigin::Generated);
  CHECK(u.install_clause("d1", PoiKind::FunctionContract, {}, ClauseKind::Ensures, "\\result==x",
                         ClauseStatus::Verified, ClauseOrigin::Generated) == id);
  CHECK(u.all_specs().size() == 1);
  CHECK_THROWS_AS(u.install_clause("d1", PoiKind::LoopHead, {0}, ClauseKind::LoopInvariant, "x == x",
                                   ClauseStatus::Verified, ClauseOrigin::Generated),
                  UnresolvablePOI);
  CHECK_THROWS_AS(u.install_clause("nope", PoiKind::FunctionContract, {}, ClauseKind::Ensures, "x == x",
                                   ClauseStatus::Verified, ClauseOrigin::Generated),
                  UnresolvablePOI);
  // from_annotated keeps clauses, from_source drops them.
  std::string annotated = u.annotated_unit(true).text;
  CHECK(UnitState::from_annotated({"a.c", annotated, true}).all_specs().size() == 1);
  UnitState plain = UnitState::from_source({"a.c", annotated, true});
  CHECK(plain.all_specs().empty());
  CHECK(plain.dropped_input_clauses == 1);
}
