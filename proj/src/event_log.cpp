#include "specsyn/event_log.hpp"

#include <chrono>

namespace specsyn {

void EventLog::emit(const std::string& type, nlohmann::json fields) {
  std::lock_guard<std::mutex> lock(mu_);
  fields["event"] = type;
  fields["seq"] = events_.size();
  if (!deterministic_)
    fields["time_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
  events_.push_back(std::move(fields));
}

std::vector<nlohmann::json> EventLog::events() const {
  std::lock_guard<std::mutex> lock(mu_);
  return events_;
}

std::vector<nlohmann::json> EventLog::events_of(const std::string& type) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<nlohmann::json> out;
  for (const auto& e : events_)
    if (e.value("event", "") == type) out.push_back(e);
  return out;
}

std::string EventLog::to_jsonl() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string out;
  for (const auto& e : events_) out += e.dump() + "\n";
  return out;
}

}  // namespace specsyn
