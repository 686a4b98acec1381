#pragma once

#include <json.hpp>
#include <mutex>
#include <string>
#include <vector>

namespace specsyn {

/// Structured JSON Lines log. Event types: model_call, verify_call, variant,
/// vdr_round, clause_status. Events keep emission order; a sequence number
/// replaces wall-clock time in deterministic mode.
class EventLog {
 public:
  explicit EventLog(bool deterministic = true) : deterministic_(deterministic) {}

  void emit(const std::string& type, nlohmann::json fields);

  std::vector<nlohmann::json> events() const;
  std::vector<nlohmann::json> events_of(const std::string& type) const;
  std::string to_jsonl() const;

 private:
  bool deterministic_;
  mutable std::mutex mu_;
  std::vector<nlohmann::json> events_;
};

}  // namespace specsyn
