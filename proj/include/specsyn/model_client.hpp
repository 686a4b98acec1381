#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specsyn {

enum class Purpose { Sketch, Generate, Repair, Refine };

std::string_view to_string(Purpose p);
Purpose purpose_from_string(std::string_view s);  // throws ConfigError("purpose")

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

struct Turn {
  std::string role;  // "user" or "assistant"
  std::string content;
};

/// One request to the model. `turns` is the linear per-POI conversation and
/// always ends with a user turn; the body is that conversation rendered as
/// text, so a single-turn prompt has the user message as its body.
struct Prompt {
  std::string role_header;
  Purpose purpose = Purpose::Generate;
  std::vector<Turn> turns;

  std::string body() const;
  std::string digest() const { return sha256_hex(body()); }

  static Prompt single(Purpose purpose, std::string user_text);
};

/// System text shared by every prompt.
const std::string& default_role_header();

struct ModelResponse {
  std::string text;
  std::vector<std::string> extracted_clauses;  // canonical "kind predicate;" texts
};

/// Clauses found in triple-backtick fences or bare `/*@ ... */` blocks, in
/// order of appearance. Only requires / ensures / loop invariant / assert
/// clauses that parse are kept; everything else is ignored.
std::vector<std::string> extract_clauses(std::string_view text);

struct ModelSettings {
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key;
  double temperature = 0.0;
  int max_retries = 2;
  int timeout_seconds = 120;
};

/// Raw completion source.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual std::string complete_raw(const Prompt& prompt) = 0;
  virtual std::string name() const = 0;
};

/// OpenAI-compatible chat-completions endpoint. Transport failures are
/// retried `max_retries` times before TransportError.
class LiveBackend : public ModelBackend {
 public:
  explicit LiveBackend(ModelSettings settings);
  std::string complete_raw(const Prompt& prompt) override;
  std::string name() const override { return "live"; }

  /// Request payload for `prompt` (exposed for tests).
  std::string request_json(const Prompt& prompt) const;
  /// Completion text of a response payload; throws TransportError.
  static std::string parse_response(const std::string& payload);

 private:
  ModelSettings settings_;
};

struct TranscriptRecord {
  std::string digest;
  std::string purpose;
  std::string response;
};

/// Serves recorded responses keyed by prompt digest. Repeated digests are
/// served in recording order; once exhausted the last response repeats.
class ReplayBackend : public ModelBackend {
 public:
  explicit ReplayBackend(std::vector<TranscriptRecord> records);
  static std::unique_ptr<ReplayBackend> from_file(const std::string& path);
  std::string complete_raw(const Prompt& prompt) override;
  std::string name() const override { return "replay"; }

 private:
  std::vector<TranscriptRecord> records_;
  std::vector<bool> used_;
  std::mutex mu_;
};

/// Rule-driven responder for fixtures: the first rule whose purpose matches
/// and whose every needle occurs in the body answers. A rule with `uses`
/// set answers that many times and is then skipped.
class ScriptedBackend : public ModelBackend {
 public:
  struct Rule {
    std::optional<Purpose> purpose;
    std::vector<std::string> needles;
    std::string response;
    std::optional<std::size_t> uses;
  };
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Rule> rules, std::string fallback = "")
      : rules_(std::move(rules)), fallback_(std::move(fallback)) {}
  void add(Rule r) { rules_.push_back(std::move(r)); }
  std::string complete_raw(const Prompt& prompt) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<Rule> rules_;
  std::vector<std::size_t> served_;
  std::string fallback_;
  std::mutex mu_;
};

struct Exchange {
  std::string digest;
  Purpose purpose = Purpose::Generate;
  std::string body;
  std::string response;
};

/// Front end used by the pipeline: runs the backend, extracts clauses and
/// keeps the ordered session of exchanges. Shareable across threads.
class ModelClient {
 public:
  explicit ModelClient(std::shared_ptr<ModelBackend> backend) : backend_(std::move(backend)) {}

  /// Throws ExtractionEmpty when a Generate/Repair/Refine response yields no
  /// clause; the exchange is still recorded.
  ModelResponse complete(const Prompt& prompt);

  std::vector<Exchange> session() const;
  std::size_t calls() const;
  const ModelBackend& backend() const { return *backend_; }

  /// Called after every exchange (logging).
  std::function<void(const Exchange&)> on_exchange;

 private:
  std::shared_ptr<ModelBackend> backend_;
  mutable std::mutex mu_;
  std::vector<Exchange> session_;
};

/// Writes a JSON Lines transcript: a header line, then one record per
/// exchange. Atomic (temp file + rename). Throws IoError.
void record_transcript(const std::vector<Exchange>& session, const std::string& path);

/// Reads a transcript; lines without a digest (the header) are skipped.
std::vector<TranscriptRecord> load_transcript(const std::string& path);

}  // namespace specsyn
