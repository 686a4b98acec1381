#include <doctest.h>

#include <json.hpp>

#include "fig1_script.hpp"
#include "specsyn/config.hpp"
#include "specsyn/error.hpp"
#include "specsyn/eval.hpp"
#include "specsyn/report.hpp"
#include "test_util.hpp"

using namespace specsyn;
using nlohmann::json;

namespace {

struct Fig1Run {
  UnitState unit;
  SynthesisResult result;
  RunConfig cfg;
};

Fig1Run run_fig1() {
  RunConfig cfg = load_config(testutil::data_path("fig1.toml"), {}, {});
  UnitState unit =
      UnitState::from_source({"fig1.c", testutil::read_file(testutil::data_path("fig1.c")), true});
  ModelClient mc(std::make_shared<ScriptedBackend>(fixtures::fig1_rules()));
  MockVerifier v(cfg.mock);
  CatalogMutator mut(static_cast<std::size_t>(cfg.mutation_budget), cfg.seed, cfg.toolchain);
  SynthesisResult res = synthesize_program(unit, mc, v, mut, cfg);
  return {std::move(unit), std::move(res), cfg};
}

}  // namespace

TEST_CASE("path and POI strings") {
  CHECK(path_string({}) == "");
  CHECK(path_string({1, 0, 2}) == "1.0.2");
  CHECK(parse_path("1.0.2") == Path{1, 0, 2});
  CHECK(parse_path("") == Path{});
  CHECK_THROWS_AS(parse_path("1..2"), MalformedOutput);
  CHECK_THROWS_AS(parse_path("a"), MalformedOutput);
  CHECK(poi_string(PoiRef{3, 1}) == "3.1");
  CHECK(dump_json(json{{"a", 1}}) == "{\n  \"a\": 1\n}\n");
}

TEST_CASE("synthesis report layout and round trip through the evaluator") {
  Fig1Run run = run_fig1();
  ReportMeta meta{"fig1.c", "scripted", "mock", true, 1234, 12};
  json r = synthesis_report(run.unit, run.result, run.cfg, meta);
  CHECK(r.at("format") == "specsyn-report");
  CHECK(r.at("config").at("t") == 0.75);
  CHECK(r.at("config").at("mutation_budget") == 24);
  CHECK_FALSE(r.at("stats").contains("elapsed_ms"));
  meta.deterministic = false;
  CHECK(synthesis_report(run.unit, run.result, run.cfg, meta).at("stats").at("elapsed_ms") == 1234);

  CHECK(r.at("final_pass").at("targets_proved") == 1);
  CHECK(r.at("segments").size() == 2);
  for (const auto& seg : r.at("segments"))
    for (const auto& poi : seg.at("pois")) {
      REQUIRE(!poi.at("vdr_history").empty());
      for (const auto& h : poi.at("vdr_history")) {
        CHECK(h.at("objective") == h.at("total").get<int>() - h.at("refuted").get<int>());
        CHECK(h.at("outcomes").size() == h.at("total"));
      }
    }

  // Every non-target clause in the report verifies when re-installed.
  auto generated = generated_from_report(r);
  CHECK(generated.size() + 1 == run.result.specs.size());
  MockVerifier v(run.cfg.mock);
  auto verdicts = verify_generated(testutil::read_file(testutil::data_path("fig1.c")), generated, v);
  CHECK(precision(verdicts) == Fraction{generated.size(), generated.size()});
}

TEST_CASE("partial report carries the error section") {
  Fig1Run run = run_fig1();
  ReportMeta meta{"fig1.c", "replay", "mock", true, 0, 3};
  json p = partial_report(&run.unit, run.cfg, meta, "ReplayMiss", "no entry");
  CHECK(p.at("error").at("kind") == "ReplayMiss");
  CHECK(p.at("error").at("message") == "no entry");
  CHECK(p.at("clauses").size() == run.unit.all_specs().size());
  json q = partial_report(nullptr, run.cfg, meta, "ParseError", "1:1: bad");
  CHECK(q.at("clauses").empty());
  CHECK(q.at("stats").at("model_calls") == 3);
}

TEST_CASE("segments listing") {
  UnitState u = UnitState::from_source({"fig1.c", testutil::read_file(testutil::data_path("fig1.c")), true});
  json s = segments_json(u);
  CHECK(s.at("format") == "specsyn-segments");
  REQUIRE(s.at("segments").size() == 2);
  CHECK(s.at("segments")[0].at("members") == json::array({"bufs_differ"}));
  CHECK(s.at("segments")[1].at("deps") == json::array({0}));
  CHECK(s.at("segments")[0].at("pois").size() == 2);
}
