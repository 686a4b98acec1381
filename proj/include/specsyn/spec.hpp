#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "specsyn/acsl.hpp"
#include "specsyn/ast.hpp"

namespace specsyn {

enum class PoiKind {
  FunctionContract,
  LoopHead,
  Statement,  // anchor of an input target assertion; never produced by POI extraction
};

/// Identifies a point of interest: segment id plus index within the segment.
struct PoiRef {
  std::size_t segment = 0;
  std::size_t index = 0;
  auto operator<=>(const PoiRef&) const = default;
};

struct PointOfInterest {
  PoiRef id;
  PoiKind kind = PoiKind::FunctionContract;
  std::size_t owner = 0;    // Declaration id of the enclosing function
  std::string owner_name;
  Path path;                // empty for FunctionContract
  std::size_t order_rank = 0;
};

enum class ClauseStatus { Candidate, Verified, Refuted };
enum class ClauseOrigin { Generated, Repaired, Refined, Target };

std::string_view to_string(PoiKind k);
std::string_view to_string(ClauseStatus s);
std::string_view to_string(ClauseOrigin o);

struct SpecClause {
  std::uint64_t id = 0;
  ClauseKind kind = ClauseKind::Ensures;
  std::string predicate;
  PoiRef poi;
  ClauseStatus status = ClauseStatus::Candidate;
  ClauseOrigin origin = ClauseOrigin::Generated;
  int round = 0;

  /// Dedup key: attachment point plus keyword and normalized predicate.
  std::string key() const;
  std::string text() const { return render_clause(kind, predicate); }
};

/// Ordered, deduplicated clause collection. Insertion order is preserved and
/// a clause whose key is already present is rejected.
class SpecSet {
 public:
  SpecSet() = default;

  /// Returns false (and leaves the set unchanged) on a duplicate key.
  bool insert(SpecClause clause);
  bool contains_key(const std::string& key) const { return keys_.count(key) != 0; }
  const SpecClause* find(std::uint64_t id) const;
  void set_status(std::uint64_t id, ClauseStatus status);
  void erase_if(const std::function<bool(const SpecClause&)>& pred);

  SpecSet filtered(const std::function<bool(const SpecClause&)>& pred) const;
  SpecSet merged(const SpecSet& other) const;

  const std::vector<SpecClause>& clauses() const { return clauses_; }
  const std::set<std::string>& dedup_keys() const { return keys_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }
  auto begin() const { return clauses_.begin(); }
  auto end() const { return clauses_.end(); }

 private:
  std::vector<SpecClause> clauses_;
  std::set<std::string> keys_;
};

}  // namespace specsyn
