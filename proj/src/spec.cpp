#include "specsyn/spec.hpp"

#include <algorithm>

namespace specsyn {

std::string_view to_string(PoiKind k) {
  switch (k) {
    case PoiKind::FunctionContract: return "FunctionContract";
    case PoiKind::LoopHead: return "LoopHead";
    case PoiKind::Statement: return "Statement";
  }
  return "?";
}

std::string_view to_string(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::Candidate: return "Candidate";
    case ClauseStatus::Verified: return "Verified";
    case ClauseStatus::Refuted: return "Refuted";
  }
  return "?";
}

std::string_view to_string(ClauseOrigin o) {
  switch (o) {
    case ClauseOrigin::Generated: return "Generated";
    case ClauseOrigin::Repaired: return "Repaired";
    case ClauseOrigin::Refined: return "Refined";
    case ClauseOrigin::Target: return "Target";
  }
  return "?";
}

std::string SpecClause::key() const {
  return std::to_string(poi.segment) + "." + std::to_string(poi.index) + " " + dedup_key(kind, predicate);
}

bool SpecSet::insert(SpecClause clause) {
  auto k = clause.key();
  if (!keys_.insert(k).second) return false;
  clauses_.push_back(std::move(clause));
  return true;
}

const SpecClause* SpecSet::find(std::uint64_t id) const {
  for (const auto& c : clauses_)
    if (c.id == id) return &c;
  return nullptr;
}

void SpecSet::set_status(std::uint64_t id, ClauseStatus status) {
  for (auto& c : clauses_)
    if (c.id == id) c.status = status;
}

void SpecSet::erase_if(const std::function<bool(const SpecClause&)>& pred) {
  std::vector<SpecClause> kept;
  kept.reserve(clauses_.size());
  keys_.clear();
  for (auto& c : clauses_) {
    if (pred(c)) continue;
    keys_.insert(c.key());
    kept.push_back(std::move(c));
  }
  clauses_ = std::move(kept);
}

SpecSet SpecSet::filtered(const std::function<bool(const SpecClause&)>& pred) const {
  SpecSet out;
  for (const auto& c : clauses_)
    if (pred(c)) out.insert(c);
  return out;
}

SpecSet SpecSet::merged(const SpecSet& other) const {
  SpecSet out = *this;
  for (const auto& c : other) out.insert(c);
  return out;
}

}  // namespace specsyn
