#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <json.hpp>
#include <regex>

#include "specsyn/error.hpp"
#include "specsyn/model_client.hpp"

namespace specsyn {

using nlohmann::json;

LiveBackend::LiveBackend(ModelSettings settings) : settings_(std::move(settings)) {
  if (settings_.api_key.empty()) throw ConfigError("api_key", "live backend needs an API key (SPECSYN_API_KEY)");
  if (settings_.endpoint.empty()) throw ConfigError("endpoint", "live backend needs an endpoint URL");
}

std::string LiveBackend::request_json(const Prompt& prompt) const {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", prompt.role_header}});
  for (const auto& t : prompt.turns) messages.push_back({{"role", t.role}, {"content", t.content}});
  return json{{"model", settings_.model}, {"temperature", settings_.temperature}, {"messages", messages}}.dump();
}

std::string LiveBackend::parse_response(const std::string& payload) {
  try {
    json j = json::parse(payload);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("unexpected completion payload: ") + e.what());
  }
}

std::string LiveBackend::complete_raw(const Prompt& prompt) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(settings_.endpoint, m, url_re))
    throw ConfigError("endpoint", "not an http(s) URL: " + settings_.endpoint);
  std::string base = m[1].str();
  std::string path = m[2].str();
  while (!path.empty() && path.back() == '/') path.pop_back();
  path += "/chat/completions";

  httplib::Client client(base);
  client.set_connection_timeout(settings_.timeout_seconds);
  client.set_read_timeout(settings_.timeout_seconds);
  httplib::Headers headers{{"Authorization", "Bearer " + settings_.api_key}};
  std::string body = request_json(prompt);
  std::string last_error;
  for (int attempt = 0; attempt <= settings_.max_retries; ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status >= 400 && res->status < 500 && res->status != 429) break;
      continue;
    }
    return parse_response(res->body);
  }
  throw TransportError(last_error);
}

}  // namespace specsyn
