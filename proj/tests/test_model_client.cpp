#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "specsyn/acsl.hpp"
#include "specsyn/error.hpp"
#include "specsyn/io.hpp"
#include "specsyn/model_client.hpp"

using namespace specsyn;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("specsyn-test-" + name)).string();
}

}  // namespace

TEST_CASE("sha256 matches published test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("prompt body and digest") {
  Prompt p = Prompt::single(Purpose::Generate, "write clauses");
  CHECK(p.body() == "write clauses");
  CHECK(p.digest() == sha256_hex("write clauses"));
  p.turns.push_back({"assistant", "```ensures \\result == 0;```"});
  p.turns.push_back({"user", "refuted"});
  CHECK(p.body() == "### user\nwrite clauses\n\n### assistant\n```ensures \\result == 0;```\n\n### user\nrefuted");
  CHECK(p.digest() != sha256_hex("write clauses"));
}

TEST_CASE("extraction from fences and annotation blocks") {
  CHECK(extract_clauses("```requires n >= 0;```") == std::vector<std::string>{"requires n >= 0;"});
  CHECK(extract_clauses("Here:\n```acsl\nensures \\result >= 0;\nensures \\result <= n;\n```\nDone.") ==
        std::vector<std::string>{"ensures \\result >= 0;", "ensures \\result <= n;"});
  CHECK(extract_clauses("first ```requires a > 0;``` then /*@ loop invariant 0 <= i <= n; */") ==
        std::vector<std::string>{"requires a > 0;", "loop invariant 0 <= i <= n;"});
  CHECK(extract_clauses("```c\n/*@ requires \\valid(p);\n    assigns *p; */\nvoid f(int *p);\n```") ==
        std::vector<std::string>{"requires \\valid(p);"});
  CHECK(extract_clauses("no code here").empty());
  CHECK(extract_clauses("```ensures \\result == ;```").empty());
  CHECK(extract_clauses("```ensures   x\n   == 1;```") == std::vector<std::string>{"ensures x == 1;"});
}

TEST_CASE("property: extracted clauses re-parse as exactly one clause") {
  std::vector<std::string> responses = {
      "```\nrequires n > 0;\nensures \\result == n * 2;\n```",
      "/*@ requires \\valid_read(a + (0 .. n-1)); ensures \\forall integer k; 0 <= k < n ==> a[k] == \\old(a[k]); */",
      "junk ``` loop invariant i >= 0; loop variant n - i; ``` more ```assert x != 0;```",
      "```ensures \\result == 0 || \\result == 1;``` ```ensures bad ( ;```",
  };
  for (const auto& r : responses) {
    for (const auto& c : extract_clauses(r)) {
      auto parts = split_clauses(c);
      REQUIRE(parts.size() == 1);
      auto parsed = parse_clause(parts[0]);
      REQUIRE(parsed);
      CHECK(render_clause(parsed->kind, parsed->predicate) == c);
    }
  }
}

TEST_CASE("client extraction errors by purpose") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Rule>{}, "no code here");
  ModelClient client(backend);
  CHECK_THROWS_AS(client.complete(Prompt::single(Purpose::Generate, "x")), ExtractionEmpty);
  CHECK_THROWS_AS(client.complete(Prompt::single(Purpose::Repair, "x")), ExtractionEmpty);
  auto r = client.complete(Prompt::single(Purpose::Sketch, "x"));
  CHECK(r.text == "no code here");
  CHECK(r.extracted_clauses.empty());
  CHECK(client.calls() == 3);
}

TEST_CASE("scripted rules: purpose, needles, use counts, fallback") {
  ScriptedBackend b;
  b.add({Purpose::Generate, {"alpha"}, "```ensures a;```", 1});
  b.add({Purpose::Generate, {"alpha"}, "```ensures b;```", std::nullopt});
  b.add({std::nullopt, {"beta", "gamma"}, "```ensures c;```", std::nullopt});
  CHECK(b.complete_raw(Prompt::single(Purpose::Generate, "alpha")) == "```ensures a;```");
  CHECK(b.complete_raw(Prompt::single(Purpose::Generate, "alpha")) == "```ensures b;```");
  CHECK(b.complete_raw(Prompt::single(Purpose::Refine, "alpha beta gamma")) == "```ensures c;```");
  CHECK(b.complete_raw(Prompt::single(Purpose::Refine, "beta")).empty());
}

TEST_CASE("transcript round trip and replay") {
  std::string path = temp_path("transcript.jsonl");
  auto scripted = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Rule>{
      {Purpose::Generate, {"one"}, "```requires n >= 0;```", std::nullopt},
      {Purpose::Generate, {"two"}, "```ensures \\result == 1;``` and ```ensures \\result > 0;```", std::nullopt},
      {Purpose::Sketch, {}, "plan", std::nullopt},
  });
  ModelClient live(scripted);
  auto a1 = live.complete(Prompt::single(Purpose::Generate, "one"));
  auto a2 = live.complete(Prompt::single(Purpose::Generate, "two"));
  auto a3 = live.complete(Prompt::single(Purpose::Sketch, "three"));
  CHECK(a2.extracted_clauses.size() == 2);
  record_transcript(live.session(), path);

  auto records = load_transcript(path);
  REQUIRE(records.size() == 3);
  CHECK(records[0].digest != records[1].digest);
  CHECK(records[1].digest != records[2].digest);
  CHECK(records[0].purpose == "Generate");

  ModelClient replay(std::shared_ptr<ModelBackend>(ReplayBackend::from_file(path)));
  CHECK(replay.complete(Prompt::single(Purpose::Generate, "one")).extracted_clauses == a1.extracted_clauses);
  CHECK(replay.complete(Prompt::single(Purpose::Generate, "two")).extracted_clauses == a2.extracted_clauses);
  CHECK(replay.complete(Prompt::single(Purpose::Sketch, "three")).text == a3.text);
  CHECK_THROWS_AS(replay.complete(Prompt::single(Purpose::Generate, "four")), ReplayMiss);
  std::filesystem::remove(path);
}

TEST_CASE("empty session writes only the header") {
  std::string path = temp_path("empty.jsonl");
  record_transcript({}, path);
  std::string text = read_text_file(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(nlohmann::json::parse(text).contains("format"));
  CHECK(load_transcript(path).empty());
  std::filesystem::remove(path);
}

TEST_CASE("replay serves repeated digests in order, then repeats the last") {
  std::string d = Prompt::single(Purpose::Generate, "same").digest();
  ReplayBackend b({{d, "Generate", "first"}, {d, "Generate", "second"}});
  Prompt p = Prompt::single(Purpose::Generate, "same");
  CHECK(b.complete_raw(p) == "first");
  CHECK(b.complete_raw(p) == "second");
  CHECK(b.complete_raw(p) == "second");
}

TEST_CASE("live backend request and response payloads") {
  CHECK_THROWS_AS(LiveBackend(ModelSettings{}), ConfigError);
  ModelSettings s;
  s.api_key = "k";
  s.model = "m";
  LiveBackend b(s);
  Prompt p = Prompt::single(Purpose::Generate, "hello");
  auto j = nlohmann::json::parse(b.request_json(p));
  CHECK(j["model"] == "m");
  CHECK(j["temperature"] == 0.0);
  REQUIRE(j["messages"].size() == 2);
  CHECK(j["messages"][0]["role"] == "system");
  CHECK(j["messages"][1]["content"] == "hello");
  CHECK(LiveBackend::parse_response(R"({"choices":[{"message":{"content":"ok"}}]})") == "ok");
  CHECK_THROWS_AS(LiveBackend::parse_response("{}"), TransportError);
}

TEST_CASE("live backend reports transport failure after retries") {
  ModelSettings s;
  s.api_key = "k";
  s.endpoint = "http://127.0.0.1:9";
  s.max_retries = 1;
  s.timeout_seconds = 2;
  LiveBackend b(s);
  CHECK_THROWS_AS(b.complete_raw(Prompt::single(Purpose::Generate, "x")), TransportError);
}
