#include <doctest.h>

#include <json.hpp>

#include "specsyn/config.hpp"
#include "specsyn/error.hpp"
#include "specsyn/eval.hpp"
#include "test_util.hpp"

using namespace specsyn;
using nlohmann::json;

namespace {

std::string corpus(const std::string& name) { return testutil::read_file(testutil::data_path("eval/" + name)); }

MockVerifier corpus_verifier() {
  return MockVerifier(load_config(testutil::data_path("eval/eval.toml"), {}, {}).mock);
}

LocatedClause contract(const std::string& owner, ClauseKind k, const std::string& pred) {
  return {k, pred, owner, PoiKind::FunctionContract, {}};
}

const char* kAbs = "int iabs(int x)\n{\n  if (x < 0)\n    return -x;\n  return x;\n}\n";

}  // namespace

TEST_CASE("precision arithmetic") {
  std::vector<VerifierVerdict> v(10, VerifierVerdict{0, VerdictStatus::Proved, "", ""});
  CHECK(precision(v) == Fraction{10, 10});
  CHECK(precision(v).value() == 1.0);
  std::vector<VerifierVerdict> w(4, VerifierVerdict{0, VerdictStatus::Proved, "", ""});
  w[2].status = VerdictStatus::Timeout;
  CHECK(precision(w) == Fraction{3, 4});
  CHECK(precision(w).value() == 0.75);
  CHECK_THROWS_AS(precision({}), NoGenerated);
}

// Tallies worked out by hand from each corpus file (mock domain [-2, 2]).
//   abs:   3 generated, `\result > 0` fails at x = 0            -> 2/3.
//          gt 1 and 3 match textually, gt 2 follows from the two proved
//          clauses                                              -> 3/3.
//   max:   `\result == a` fails at a < b                        -> 1/2.
//          only `\result >= a` is proved; it implies neither
//          `\result >= b` nor the disjunction                   -> 1/3.
//   count: all three hold under `n >= 0`                        -> 3/3.
//          `0 <= i` follows from `i >= 0`, `i <= n` does not    -> 3/4.
//   fig1:  the extra `\result == 0` on check_same fails         -> 11/12.
//          the `\forall` form follows from the `\exists` form
//          plus the 0-or-1 bound; the rest match textually      -> 5/5.
//          The target holds once the false clause is withdrawn  -> 1/1.
//   zero:  nothing generated: precision undefined, recall 0/1,
//          target unproved without a contract                   -> 0/1.
TEST_CASE("metrics on the fixture corpus match the hand tally") {
  struct Row {
    std::string name;
    Fraction precision;
    bool defined;
    Fraction recall;
    std::vector<bool> covered;
    Fraction targets;
  };
  std::vector<Row> rows = {
      {"abs", {2, 3}, true, {3, 3}, {true, true, true}, {0, 0}},
      {"max", {1, 2}, true, {1, 3}, {true, false, false}, {0, 0}},
      {"count", {3, 3}, true, {3, 4}, {true, true, true, false}, {0, 0}},
      {"fig1", {11, 12}, true, {5, 5}, {true, true, true, true, true}, {1, 1}},
      {"zero", {0, 0}, false, {0, 1}, {false}, {0, 1}},
  };
  MockVerifier v = corpus_verifier();
  Fraction p_sum, r_sum;
  for (const auto& row : rows) {
    CAPTURE(row.name);
    std::string subject = corpus(row.name + ".c"), gt_text = corpus(row.name + "_gt.c");
    json report = json::parse(corpus(row.name + "_report.json"));
    MetricsReport m = evaluate(subject, gt_text, report, v);
    CHECK(m.precision_defined == row.defined);
    CHECK(m.precision == row.precision);
    CHECK(m.recall == row.recall);
    CHECK(m.generated_total == row.precision.den);
    CHECK(m.verified_total == row.precision.num);
    CHECK(m.targets_proved == row.targets.num);
    CHECK(m.targets_total == row.targets.den);
    CHECK(m.coverage_mode == CoverageMode::Entailment);

    // Per-clause coverage against the proved generated clauses.
    auto generated = generated_from_report(report);
    auto verdicts = verify_generated(subject, generated, v);
    std::vector<LocatedClause> proved;
    for (std::size_t i = 0; i < verdicts.size(); ++i)
      if (verdicts[i].status == VerdictStatus::Proved) proved.push_back(generated[i]);
    CHECK(recall(subject, proved, load_ground_truth(gt_text), v).covered == row.covered);

    json mj = metrics_json(m);
    CHECK(mj.at("coverage_mode") == "entailment");
    CHECK(mj.at("precision").at("num") == row.precision.num);
    CHECK(mj.at("recall").at("den") == row.recall.den);
    CHECK(mj.at("precision").contains("flag") == !row.defined);
    p_sum.num += m.precision.num;
    p_sum.den += m.precision.den;
    r_sum.num += m.recall.num;
    r_sum.den += m.recall.den;
  }
  CHECK(p_sum == Fraction{17, 20});
  CHECK(r_sum == Fraction{12, 16});
}

TEST_CASE("recall: textual mode, entailment mode and the empty set") {
  GroundTruth gt;
  gt.clauses = {contract("iabs", ClauseKind::Ensures, "\\result >= 0")};
  std::vector<LocatedClause> gen = {contract("iabs", ClauseKind::Ensures, "\\result>=0")};
  FramaCVerifier external;
  RecallResult textual = recall(kAbs, gen, gt, external);
  CHECK(textual.mode == CoverageMode::Textual);
  CHECK(textual.recall == Fraction{1, 1});

  // Entailed but not textually equal: covered only in entailment mode.
  std::vector<LocatedClause> bound = {contract("iabs", ClauseKind::Ensures, "\\result == 0 || \\result == 1")};
  CHECK(recall(kAbs, bound, gt, external).recall == Fraction{0, 1});
  CHECK(recall(kAbs, bound, gt, MockVerifier{}).recall == Fraction{1, 1});

  CHECK(recall(kAbs, {}, gt, MockVerifier{}).recall == Fraction{0, 1});
  CHECK(recall(kAbs, {}, gt, MockVerifier{}).recall.value() == 0.0);

  GroundTruth foreign;
  foreign.clauses = {contract("nowhere", ClauseKind::Ensures, "\\result >= 0")};
  CHECK_THROWS_AS(recall(kAbs, gen, foreign, MockVerifier{}), UnresolvablePOI);
}

TEST_CASE("recall coverage only grows as proved clauses are added") {
  std::vector<LocatedClause> pool = {
      contract("iabs", ClauseKind::Ensures, "\\result >= 0"),
      contract("iabs", ClauseKind::Ensures, "\\result == x || \\result == -x"),
      contract("iabs", ClauseKind::Ensures, "x <= 0 ==> \\result == -x"),
  };
  GroundTruth gt = load_ground_truth(corpus("abs_gt.c"));
  MockVerifier v = corpus_verifier();
  for (unsigned mask = 0; mask < 8; ++mask) {
    std::vector<LocatedClause> base;
    for (unsigned i = 0; i < 3; ++i)
      if (mask & (1u << i)) base.push_back(pool[i]);
    auto before = recall(kAbs, base, gt, v).covered;
    for (unsigned i = 0; i < 3; ++i) {
      if (mask & (1u << i)) continue;
      auto grown = base;
      grown.push_back(pool[i]);
      auto after = recall(kAbs, grown, gt, v).covered;
      for (std::size_t k = 0; k < before.size(); ++k) CHECK((!before[k] || after[k]));
    }
  }
}

TEST_CASE("target counting with and without contracts") {
  std::string subject = corpus("fig1.c");
  MockVerifier v = corpus_verifier();
  GroundTruth gt = load_ground_truth(corpus("fig1_gt.c"));
  REQUIRE(gt.targets.size() == 1);
  auto generated = generated_from_report(json::parse(corpus("fig1_report.json")));
  CHECK(count_proved_targets(subject, generated, gt.targets, v) == Fraction{1, 1});
  CHECK(count_proved_targets(subject, {}, gt.targets, v) == Fraction{0, 1});
  CHECK(count_proved_targets(subject, generated, {}, v) == Fraction{0, 0});
}

TEST_CASE("ground truth splits reference clauses from targets") {
  GroundTruth gt = load_ground_truth(corpus("count_gt.c"));
  CHECK(gt.targets.empty());
  REQUIRE(gt.clauses.size() == 4);
  std::size_t loops = 0;
  for (const auto& c : gt.clauses)
    if (c.poi_kind == PoiKind::LoopHead) {
      ++loops;
      CHECK(c.path == Path{1});
    }
  CHECK(loops == 2);
}

TEST_CASE("report parsing rejects malformed records") {
  CHECK_THROWS_AS(generated_from_report(json::object()), MalformedOutput);
  json bad = {{"clauses", {{{"kind", "ensures"}, {"predicate", "x"}, {"owner", "f"}, {"poi_kind", "Nowhere"}}}}};
  CHECK_THROWS_AS(generated_from_report(bad), MalformedOutput);
  json target = {{"clauses",
                  {{{"kind", "assert"}, {"predicate", "x"}, {"owner", "f"}, {"poi_kind", "Statement"},
                    {"origin", "Target"}}}}};
  CHECK(generated_from_report(target).empty());
}
