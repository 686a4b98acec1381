#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "specsyn/model_client.hpp"
#include "specsyn/mutation.hpp"
#include "specsyn/verifier.hpp"

namespace specsyn {

struct RunConfig {
  int n_refine = 5;
  int n_repair = 5;
  double t = 0.75;
  int mutation_budget = 24;
  std::uint64_t seed = 0;

  std::string model_backend = "live";  // live | replay
  ModelSettings model;

  std::string verifier_backend = "mock";  // mock | frama-c
  MockDomain mock;
  ExternalVerifierConfig external;

  Toolchain toolchain;
};

/// Flat `section.key -> raw value` view of a config file in a TOML subset:
/// `[section]` headers, `key = value` lines, `#` comments, quoted strings,
/// numbers and booleans. Throws ConfigError naming the offending line.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Layers defaults < file < environment < flags and validates the result.
/// Recognized environment variables: SPECSYN_API_KEY, SPECSYN_CC,
/// SPECSYN_VERIFIER. Flag keys use the same dotted names as the file.
/// Throws ConfigError with the field name on invalid values.
RunConfig load_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& env,
                      const std::map<std::string, std::string>& flags);

/// The three recognized variables from the process environment.
std::map<std::string, std::string> process_environment();

}  // namespace specsyn
