#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "fig1_script.hpp"
#include "specsyn/cli.hpp"
#include "specsyn/config.hpp"
#include "specsyn/io.hpp"
#include "specsyn/unit_state.hpp"
#include "test_util.hpp"

using namespace specsyn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args, const std::map<std::string, std::string>& env = {}) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err, env);
  return {code, out.str(), err.str()};
}

/// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("specsyn-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
  std::size_t temp_leftovers() const {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().filename().string().find(".tmp") != std::string::npos) ++n;
    return n;
  }
};

std::string data(const std::string& f) { return testutil::data_path(f); }

std::string golden_transcript() {
  return data(fixtures::fig1_transcript_name(load_config(data("fig1.toml"), process_environment(), {}).toolchain));
}

std::vector<std::string> golden_args(const Scratch& s, const std::string& report, const std::string& annotated) {
  return {"synthesize", "--input",   data("fig1.c"),      "--config", data("fig1.toml"), "--replay",
          golden_transcript(), "--out", s / report, "--emit-annotated", s / annotated, "--deterministic"};
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"segment"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  Run missing = cli({"segment", "--input", "/nonexistent/f.c"});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("not found") != std::string::npos);
  CHECK(cli({"synthesize", "--input", "/nonexistent/f.c"}).code == kExitUsage);
  CHECK(cli({"mutate", "--input", "/nonexistent/f.c"}).code == kExitUsage);
  CHECK(cli({"vdr", "--input", "/nonexistent/f.c"}).code == kExitUsage);
  CHECK(cli({"verify", "--input", "/nonexistent/f.c"}).code == kExitUsage);
  CHECK(cli({"eval", "--subject", "/nonexistent/f.c", "--ground-truth", "x", "--generated", "y"}).code ==
        kExitUsage);
}

TEST_CASE("configuration errors exit 2") {
  Scratch s("config");
  // No API key for the live backend.
  CHECK(cli({"synthesize", "--input", data("fig1.c"), "--out", s / "r.json"}).code == kExitUsage);
  Run bad_t = cli({"synthesize", "--input", data("fig1.c"), "--config", data("fig1.toml"), "--replay",
                   golden_transcript(), "--t", "1.5", "--out", s / "r.json"});
  CHECK(bad_t.code == kExitUsage);
  CHECK(bad_t.err.find("t: ") != std::string::npos);
  CHECK(cli({"synthesize", "--input", data("fig1.c"), "--config", "/nonexistent.toml"}).code == kExitUsage);
  CHECK(cli({"synthesize", "--input", data("fig1.c"), "--set", "nonsense"}).code == kExitUsage);
}

TEST_CASE("segment writes the listing") {
  Scratch s("segment");
  CHECK(cli({"segment", "--input", data("fig1.c"), "--out", s / "segments.json"}).code == kExitOk);
  json j = json::parse(read_text_file(s / "segments.json"));
  CHECK(j.at("segments").size() == 2);
  Run to_stdout = cli({"segment", "--input", data("fig1.c"), "--out", "-"});
  CHECK(json::parse(to_stdout.out) == j);
  CHECK(s.temp_leftovers() == 0);
}

TEST_CASE("golden synthesis is byte-identical and re-verifies") {
  Scratch s("golden");
  REQUIRE(cli(golden_args(s, "r1.json", "a1.c")).code == kExitOk);
  REQUIRE(cli(golden_args(s, "r2.json", "a2.c")).code == kExitOk);
  CHECK(read_text_file(s / "r1.json") == read_text_file(s / "r2.json"));
  CHECK(read_text_file(s / "a1.c") == read_text_file(s / "a2.c"));
  json r = json::parse(read_text_file(s / "r1.json"));
  CHECK(r.at("final_pass").at("targets_proved") == 1);
  CHECK(r.at("stats").at("model_calls") == 12);
  CHECK(s.temp_leftovers() == 0);

  Run verify = cli({"verify", "--input", s / "a1.c", "--config", data("fig1.toml")});
  REQUIRE(verify.code == kExitOk);
  json v = json::parse(verify.out);
  CHECK(v.at("total") == v.at("proved"));
  CHECK(v.at("total").get<std::size_t>() == r.at("clauses").size());
}

TEST_CASE("flags beat the configuration file") {
  Scratch s("precedence");
  std::string text = read_text_file(data("fig1.toml"));
  text.replace(text.find("t = 0.75"), 8, "t = 0.9");
  write_file_atomic(s / "cfg.toml", text);
  // An empty transcript stops the run at the first model call; the partial
  // report still records the effective configuration.
  write_file_atomic(s / "empty.jsonl", "{\"format\":\"specsyn-transcript\"}\n");
  std::vector<std::string> args = {"synthesize", "--input", data("fig1.c"), "--config", s / "cfg.toml",
                                   "--replay", s / "empty.jsonl", "--out", s / "r.json"};
  CHECK(cli(args).code == kExitPipeline);
  CHECK(json::parse(read_text_file(s / "r.json")).at("config").at("t") == 0.9);
  args.insert(args.end(), {"--t", "0.5", "--n-refine", "2"});
  CHECK(cli(args).code == kExitPipeline);
  json r = json::parse(read_text_file(s / "r.json"));
  CHECK(r.at("config").at("t") == 0.5);
  CHECK(r.at("config").at("n_refine") == 2);
  CHECK(r.at("config").at("n_repair") == 5);
}

TEST_CASE("a replay miss leaves a partial report and exits 1") {
  Scratch s("partial");
  write_file_atomic(s / "empty.jsonl", "{\"format\":\"specsyn-transcript\"}\n");
  Run r = cli({"synthesize", "--input", data("fig1.c"), "--config", data("fig1.toml"), "--replay",
               s / "empty.jsonl", "--out", s / "r.json"});
  CHECK(r.code == kExitPipeline);
  json p = json::parse(read_text_file(s / "r.json"));
  CHECK(p.at("error").at("kind") == "ReplayMiss");
  CHECK(p.contains("clauses"));
}

TEST_CASE("mutate writes variant files and an index") {
  Scratch s("mutate");
  REQUIRE(cli({"mutate", "--input", data("fig1.c"), "--budget", "5", "--seed", "3", "--out", s / "v"}).code ==
          kExitOk);
  json idx = json::parse(read_text_file(s / "v/index.json"));
  CHECK(idx.at("budget") == 5);
  CHECK(idx.at("seed") == 3);
  REQUIRE(idx.at("variants").size() == 10);
  std::string original = read_text_file(data("fig1.c"));
  for (const auto& v : idx.at("variants")) {
    std::string file = s / ("v/" + v.at("file").get<std::string>());
    REQUIRE(fs::exists(file));
    std::string text = read_text_file(file);
    CHECK(text != original);
    // Each file is a whole unit that still parses.
    CHECK(UnitState::from_source({"v.c", text, true}).segments.size() == 2);
  }
  // Same seed, same variants.
  REQUIRE(cli({"mutate", "--input", data("fig1.c"), "--budget", "5", "--seed", "3", "--out", s / "w"}).code ==
          kExitOk);
  CHECK(read_text_file(s / "v/index.json") == read_text_file(s / "w/index.json"));
}

TEST_CASE("vdr prints a consistent report") {
  Scratch s("vdr");
  REQUIRE(cli(golden_args(s, "r.json", "a.c")).code == kExitOk);
  Run r = cli({"vdr", "--input", s / "a.c", "--config", data("fig1.toml"), "--budget", "8", "--seed", "1"});
  REQUIRE(r.code == kExitOk);
  json j = json::parse(r.out);
  std::size_t total = 0, refuted = 0;
  for (const auto& seg : j.at("segments")) {
    CHECK(seg.at("unproved_on_original").empty());
    const auto& v = seg.at("vdr");
    total += v.at("total").get<std::size_t>();
    refuted += v.at("refuted").get<std::size_t>();
  }
  CHECK(j.at("total") == total);
  CHECK(j.at("refuted") == refuted);
  CHECK(j.at("objective") == total - refuted);
  CHECK(j.at("rate").get<double>() == doctest::Approx(static_cast<double>(refuted) / static_cast<double>(total)));
}

TEST_CASE("eval writes metrics with the coverage mode") {
  Scratch s("eval");
  Run r = cli({"eval", "--subject", data("eval/max.c"), "--ground-truth", data("eval/max_gt.c"), "--generated",
               data("eval/max_report.json"), "--config", data("eval/eval.toml"), "--out", s / "m.json"});
  REQUIRE(r.code == kExitOk);
  json m = json::parse(read_text_file(s / "m.json"));
  CHECK(m.at("coverage_mode") == "entailment");
  CHECK(m.at("precision").at("num") == 1);
  CHECK(m.at("precision").at("den") == 2);
  write_file_atomic(s / "junk.json", "not json");
  CHECK(cli({"eval", "--subject", data("eval/max.c"), "--ground-truth", data("eval/max_gt.c"), "--generated",
             s / "junk.json", "--out", s / "m2.json"})
            .code == kExitPipeline);
}
