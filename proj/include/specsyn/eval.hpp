#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "specsyn/frontend.hpp"
#include "specsyn/unit_state.hpp"
#include "specsyn/verifier.hpp"

namespace specsyn {

/// Exact ratio; `value()` is 0 when the denominator is 0.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
};

/// A clause located by owner function, POI kind and statement path, so it
/// can be installed into any parse of the same program.
struct LocatedClause {
  ClauseKind kind = ClauseKind::Ensures;
  std::string predicate;
  std::string owner;
  PoiKind poi_kind = PoiKind::FunctionContract;
  Path path;
};

/// Reference clauses and targets read from an annotated ground-truth file.
struct GroundTruth {
  std::vector<LocatedClause> clauses;
  std::vector<LocatedClause> targets;
};

GroundTruth load_ground_truth(const std::string& annotated_text);

/// Non-target clause records of a synthesis report.
std::vector<LocatedClause> generated_from_report(const nlohmann::json& report);

enum class CoverageMode { Entailment, Textual };
std::string_view to_string(CoverageMode m);

/// Proved over total. Throws NoGenerated when `verdicts` is empty.
Fraction precision(const std::vector<VerifierVerdict>& verdicts);

/// Verdicts for every clause of `generated` installed into `subject`, one
/// per clause in input order, from one whole-unit verification. Throws
/// UnresolvablePOI when a clause does not locate.
std::vector<VerifierVerdict> verify_generated(const std::string& subject, const std::vector<LocatedClause>& generated,
                                              const Verifier& verifier);

struct RecallResult {
  Fraction recall;
  CoverageMode mode = CoverageMode::Textual;
  std::vector<bool> covered;  // per ground-truth clause
};

/// A ground-truth clause is covered when the generated clauses of the same
/// kind at its POI entail it (mock verifier) or, in textual mode, when one
/// of them has the same normalized text. Throws UnresolvablePOI.
RecallResult recall(const std::string& subject, const std::vector<LocatedClause>& generated, const GroundTruth& gt,
                    const Verifier& verifier);

/// Final-pass verification of `targets` with `generated` installed.
Fraction count_proved_targets(const std::string& subject, const std::vector<LocatedClause>& generated,
                              const std::vector<LocatedClause>& targets, const Verifier& verifier);

struct MetricsReport {
  std::size_t generated_total = 0;
  std::size_t verified_total = 0;
  Fraction precision;
  bool precision_defined = true;
  std::size_t gt_total = 0;
  std::size_t gt_covered = 0;
  Fraction recall;
  CoverageMode coverage_mode = CoverageMode::Textual;
  std::size_t targets_total = 0;
  std::size_t targets_proved = 0;
};

/// Full evaluation: subject source, ground-truth source, generated report.
/// Recall counts coverage by the generated clauses that verify. Targets come from the subject's assertions, or from the ground truth
/// when the subject has none.
MetricsReport evaluate(const std::string& subject, const std::string& ground_truth, const nlohmann::json& report,
                       const Verifier& verifier);

nlohmann::json metrics_json(const MetricsReport& m);

}  // namespace specsyn
