#include "specsyn/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>
#include <sstream>

#include "specsyn/error.hpp"
#include "specsyn/io.hpp"

namespace specsyn {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string unquote(const std::string& v, const std::string& field) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        char n = v[++i];
        out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
      } else {
        out.push_back(v[i]);
      }
    }
    return out;
  }
  if (!v.empty() && v.front() == '"') throw ConfigError(field, "unterminated string");
  return v;
}

const std::set<std::string> kKnownKeys = {
    "n_refine",          "n_repair",           "t",
    "mutation_budget",   "seed",               "model.backend",
    "model.endpoint",    "model.name",         "model.api_key",
    "model.temperature", "model.max_retries",  "model.timeout",
    "verifier.backend",  "verifier.command",   "verifier.timeout",
    "verifier.int_min",  "verifier.int_max",   "verifier.array_len_max",
    "verifier.loop_cap", "verifier.path_cap",  "toolchain.cc",
    "toolchain.flags",   "toolchain.fallback", "toolchain.timeout",
};

long long to_int(const std::string& field, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(field, "expected an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& field, const std::string& v) {
  char* end = nullptr;
  double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError(field, "expected a number, got '" + v + "'");
  return d;
}

bool to_bool(const std::string& field, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(field, "expected true or false, got '" + v + "'");
}

int positive(const std::string& field, const std::string& v) {
  long long n = to_int(field, v);
  if (n < 1 || n > 1000000) throw ConfigError(field, "must be a positive integer");
  return static_cast<int>(n);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where, "empty key");
    std::string full = section.empty() ? key : section + "." + key;
    out[full] = unquote(trim(line.substr(eq + 1)), full);
  }
  return out;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  for (const char* name : {"SPECSYN_API_KEY", "SPECSYN_CC", "SPECSYN_VERIFIER"})
    if (const char* v = std::getenv(name)) env[name] = v;
  return env;
}

RunConfig load_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& env,
                      const std::map<std::string, std::string>& flags) {
  std::map<std::string, std::string> kv;
  if (path) kv = parse_config_text(read_text_file(*path));
  if (auto it = env.find("SPECSYN_API_KEY"); it != env.end()) kv["model.api_key"] = it->second;
  if (auto it = env.find("SPECSYN_CC"); it != env.end()) kv["toolchain.cc"] = it->second;
  if (auto it = env.find("SPECSYN_VERIFIER"); it != env.end() && !it->second.empty()) {
    kv["verifier.command"] = it->second;
    kv["verifier.backend"] = "frama-c";
  }
  for (const auto& [k, v] : flags) kv[k] = v;

  RunConfig c;
  for (const auto& [k, v] : kv) {
    if (!kKnownKeys.count(k)) throw ConfigError(k, "unknown configuration key");
    if (k == "n_refine") c.n_refine = positive(k, v);
    else if (k == "n_repair") c.n_repair = positive(k, v);
    else if (k == "t") c.t = to_double(k, v);
    else if (k == "mutation_budget") c.mutation_budget = positive(k, v);
    else if (k == "seed") {
      long long s = to_int(k, v);
      if (s < 0) throw ConfigError(k, "must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    }
    else if (k == "model.backend") c.model_backend = v;
    else if (k == "model.endpoint") c.model.endpoint = v;
    else if (k == "model.name") c.model.model = v;
    else if (k == "model.api_key") c.model.api_key = v;
    else if (k == "model.temperature") c.model.temperature = to_double(k, v);
    else if (k == "model.max_retries") c.model.max_retries = static_cast<int>(to_int(k, v));
    else if (k == "model.timeout") c.model.timeout_seconds = positive(k, v);
    else if (k == "verifier.backend") c.verifier_backend = v;
    else if (k == "verifier.command") c.external.command_template = v;
    else if (k == "verifier.timeout") c.external.timeout_seconds = positive(k, v);
    else if (k == "verifier.int_min") c.mock.int_min = to_int(k, v);
    else if (k == "verifier.int_max") c.mock.int_max = to_int(k, v);
    else if (k == "verifier.array_len_max") c.mock.array_len_max = static_cast<std::size_t>(positive(k, v));
    else if (k == "verifier.loop_cap") c.mock.loop_cap = static_cast<std::size_t>(positive(k, v));
    else if (k == "verifier.path_cap") c.mock.path_cap = static_cast<std::size_t>(positive(k, v));
    else if (k == "toolchain.cc") c.toolchain.cc = v;
    else if (k == "toolchain.flags") {
      std::istringstream fs(v);
      c.toolchain.flags.clear();
      for (std::string f; fs >> f;) c.toolchain.flags.push_back(f);
    }
    else if (k == "toolchain.fallback") c.toolchain.fallback_when_missing = to_bool(k, v);
    else if (k == "toolchain.timeout") c.toolchain.timeout_seconds = positive(k, v);
  }

  if (!(c.t > 0.0 && c.t <= 1.0)) throw ConfigError("t", "must lie in (0, 1]");
  if (c.model_backend != "live" && c.model_backend != "replay")
    throw ConfigError("model.backend", "expected live or replay");
  if (c.verifier_backend != "mock" && c.verifier_backend != "frama-c")
    throw ConfigError("verifier.backend", "expected mock or frama-c");
  if (c.model.max_retries < 0) throw ConfigError("model.max_retries", "must be non-negative");
  if (c.model.temperature < 0.0) throw ConfigError("model.temperature", "must be non-negative");
  if (c.mock.int_min > c.mock.int_max) throw ConfigError("verifier.int_min", "exceeds verifier.int_max");
  if (c.toolchain.cc.empty()) throw ConfigError("toolchain.cc", "empty compiler command");
  return c;
}

}  // namespace specsyn
