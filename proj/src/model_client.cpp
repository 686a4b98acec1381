#include "specsyn/model_client.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <json.hpp>
#include <sstream>

#include "specsyn/acsl.hpp"
#include "specsyn/error.hpp"
#include "specsyn/io.hpp"

namespace specsyn {

using nlohmann::json;

std::string_view to_string(Purpose p) {
  switch (p) {
    case Purpose::Sketch: return "Sketch";
    case Purpose::Generate: return "Generate";
    case Purpose::Repair: return "Repair";
    case Purpose::Refine: return "Refine";
  }
  return "?";
}

Purpose purpose_from_string(std::string_view s) {
  for (Purpose p : {Purpose::Sketch, Purpose::Generate, Purpose::Repair, Purpose::Refine})
    if (to_string(p) == s) return p;
  throw ConfigError("purpose", "unknown purpose '" + std::string(s) + "'");
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string Prompt::body() const {
  if (turns.size() == 1) return turns[0].content;
  std::string out;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (i) out += "\n\n";
    out += "### " + turns[i].role + "\n" + turns[i].content;
  }
  return out;
}

Prompt Prompt::single(Purpose purpose, std::string user_text) {
  Prompt p;
  p.role_header = default_role_header();
  p.purpose = purpose;
  p.turns.push_back({"user", std::move(user_text)});
  return p;
}

const std::string& default_role_header() {
  static const std::string header =
      "You write formal ACSL specifications for C code that a deductive verifier must be able to prove. "
      "Answer with clauses inside ``` fences, one clause per line, each terminated by a semicolon.";
  return header;
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

std::string collapse_space(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

void take_clauses(std::string_view annotation_body, std::vector<std::string>& out) {
  for (const auto& text : split_clauses(annotation_body)) {
    try {
      auto c = parse_clause(text);
      if (c) out.push_back(render_clause(c->kind, collapse_space(c->predicate)));
    } catch (const ParseError&) {
    }
  }
}

/// Content of a fence: annotation blocks when present, otherwise the whole
/// text (minus an info-string line such as "acsl") as a clause list.
void take_fence(std::string_view content, std::vector<std::string>& out) {
  if (content.find("/*@") != std::string_view::npos) {
    for (std::size_t p = content.find("/*@"); p != std::string_view::npos; p = content.find("/*@", p)) {
      std::size_t e = content.find("*/", p + 3);
      if (e == std::string_view::npos) break;
      take_clauses(content.substr(p + 3, e - p - 3), out);
      p = e + 2;
    }
    return;
  }
  std::size_t nl = content.find('\n');
  if (nl != std::string_view::npos) {
    std::string_view first = content.substr(0, nl);
    bool tag = !first.empty();
    for (char c : first)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '+') tag = false;
    if (tag) content = content.substr(nl + 1);
  }
  take_clauses(content, out);
}

}  // namespace

std::vector<std::string> extract_clauses(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 3, "```") == 0) {
      std::size_t close = text.find("```", i + 3);
      if (close == std::string_view::npos) break;
      take_fence(text.substr(i + 3, close - i - 3), out);
      i = close + 3;
    } else if (text.compare(i, 3, "/*@") == 0) {
      std::size_t close = text.find("*/", i + 3);
      if (close == std::string_view::npos) break;
      take_clauses(text.substr(i + 3, close - i - 3), out);
      i = close + 2;
    } else {
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Replay and scripted backends

ReplayBackend::ReplayBackend(std::vector<TranscriptRecord> records)
    : records_(std::move(records)), used_(records_.size(), false) {}

std::unique_ptr<ReplayBackend> ReplayBackend::from_file(const std::string& path) {
  return std::make_unique<ReplayBackend>(load_transcript(path));
}

std::string ReplayBackend::complete_raw(const Prompt& prompt) {
  std::string d = prompt.digest();
  std::lock_guard<std::mutex> lock(mu_);
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].digest != d) continue;
    if (!used_[i]) {
      used_[i] = true;
      return records_[i].response;
    }
    last = i;
  }
  if (last) return records_[*last].response;
  throw ReplayMiss("no transcript entry for " + std::string(to_string(prompt.purpose)) + " prompt " + d);
}

std::string ScriptedBackend::complete_raw(const Prompt& prompt) {
  std::string body = prompt.body();
  std::lock_guard<std::mutex> lock(mu_);
  served_.resize(rules_.size(), 0);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.purpose && *r.purpose != prompt.purpose) continue;
    if (r.uses && served_[i] >= *r.uses) continue;
    bool all = true;
    for (const auto& n : r.needles) all = all && body.find(n) != std::string::npos;
    if (!all) continue;
    ++served_[i];
    return r.response;
  }
  return fallback_;
}

// ---------------------------------------------------------------------------
// Client and transcripts

ModelResponse ModelClient::complete(const Prompt& prompt) {
  ModelResponse r;
  r.text = backend_->complete_raw(prompt);
  Exchange ex{prompt.digest(), prompt.purpose, prompt.body(), r.text};
  {
    std::lock_guard<std::mutex> lock(mu_);
    session_.push_back(ex);
  }
  if (on_exchange) on_exchange(ex);
  if (prompt.purpose == Purpose::Sketch) return r;
  r.extracted_clauses = extract_clauses(r.text);
  if (r.extracted_clauses.empty())
    throw ExtractionEmpty("no parseable clause in " + std::string(to_string(prompt.purpose)) + " response");
  return r;
}

std::vector<Exchange> ModelClient::session() const {
  std::lock_guard<std::mutex> lock(mu_);
  return session_;
}

std::size_t ModelClient::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return session_.size();
}

void record_transcript(const std::vector<Exchange>& session, const std::string& path) {
  std::string out = json{{"format", "specsyn-transcript"}, {"version", 1}}.dump() + "\n";
  for (const auto& e : session)
    out += json{{"digest", e.digest}, {"purpose", std::string(to_string(e.purpose))}, {"response", e.response}}.dump() +
           "\n";
  write_file_atomic(path, out);
}

std::vector<TranscriptRecord> load_transcript(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<TranscriptRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": malformed transcript line");
    }
    if (!j.is_object() || !j.contains("digest")) continue;
    out.push_back({j.at("digest").get<std::string>(), j.value("purpose", ""), j.value("response", "")});
  }
  return out;
}

}  // namespace specsyn
