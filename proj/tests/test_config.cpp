#include <doctest.h>

#include <filesystem>
#include <functional>

#include "specsyn/config.hpp"
#include "specsyn/error.hpp"
#include "specsyn/io.hpp"

using namespace specsyn;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  auto p = (std::filesystem::temp_directory_path() / ("specsyn-cfg-" + name)).string();
  write_file_atomic(p, text);
  return p;
}

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  RunConfig c = load_config(std::nullopt, {}, {});
  CHECK(c.n_refine == 5);
  CHECK(c.n_repair == 5);
  CHECK(c.t == 0.75);
  CHECK(c.mutation_budget == 24);
  CHECK(c.seed == 0);
  CHECK(c.model_backend == "live");
  CHECK(c.verifier_backend == "mock");
}

TEST_CASE("config text: sections, comments, quoting") {
  auto kv = parse_config_text("t = 0.9  # threshold\n[model]\nname = \"m # not a comment\"\n\n[verifier]\nint_min = -3\n");
  CHECK(kv.at("t") == "0.9");
  CHECK(kv.at("model.name") == "m # not a comment");
  CHECK(kv.at("verifier.int_min") == "-3");
  CHECK(field_of([] { parse_config_text("[model\n"); }) == "line 1");
  CHECK(field_of([] { parse_config_text("ok = 1\njunk\n"); }) == "line 2");
}

TEST_CASE("precedence: flags over environment over file over defaults") {
  std::string file = write_temp("prec.toml", "t = 0.9\nn_refine = 3\n[toolchain]\ncc = \"gcc\"\n");
  RunConfig from_file = load_config(file, {}, {});
  CHECK(from_file.t == 0.9);
  CHECK(from_file.n_refine == 3);
  CHECK(from_file.toolchain.cc == "gcc");

  RunConfig flagged = load_config(file, {}, {{"t", "0.5"}});
  CHECK(flagged.t == 0.5);
  CHECK(flagged.n_refine == 3);

  RunConfig env = load_config(file, {{"SPECSYN_CC", "clang"}}, {});
  CHECK(env.toolchain.cc == "clang");
  RunConfig both = load_config(file, {{"SPECSYN_CC", "clang"}}, {{"toolchain.cc", "tcc"}});
  CHECK(both.toolchain.cc == "tcc");
}

TEST_CASE("environment selects key and external verifier") {
  RunConfig c = load_config(std::nullopt, {{"SPECSYN_API_KEY", "k"}, {"SPECSYN_VERIFIER", "wp {file}"}}, {});
  CHECK(c.model.api_key == "k");
  CHECK(c.verifier_backend == "frama-c");
  CHECK(c.external.command_template == "wp {file}");
  CHECK(load_config(std::nullopt, {{"SPECSYN_VERIFIER", ""}}, {}).verifier_backend == "mock");
}

TEST_CASE("validation names the offending field") {
  CHECK(field_of([] { load_config(std::nullopt, {}, {{"t", "1.5"}}); }) == "t");
  CHECK(field_of([] { load_config(std::nullopt, {}, {{"t", "0"}}); }) == "t");
  CHECK(load_config(std::nullopt, {}, {{"t", "1"}}).t == 1.0);
  CHECK(field_of([] { load_config(std::nullopt, {}, {{"n_repair", "0"}}); }) == "n_repair");
  CHECK(field_of([] { load_config(std::nullopt, {}, {{"n_refine", "x"}}); }) == "n_refine");
  CHECK(field_of([] { load_config(std::nullopt, {}, {{"colour", "red"}}); }) == "colour");
  CHECK(field_of([] { load_config(std::nullopt, {}, {{"model.backend", "oracle"}}); }) == "model.backend");
  CHECK(field_of([] { load_config(std::nullopt, {}, {{"verifier.int_min", "3"}, {"verifier.int_max", "2"}}); }) ==
        "verifier.int_min");
}
