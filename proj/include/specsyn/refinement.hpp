#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "specsyn/config.hpp"
#include "specsyn/event_log.hpp"
#include "specsyn/model_client.hpp"
#include "specsyn/mutation.hpp"
#include "specsyn/unit_state.hpp"
#include "specsyn/verifier.hpp"

namespace specsyn {

struct VariantOutcome {
  std::size_t variant_id = 0;
  std::string operator_id;
  bool refuted = false;
  std::vector<std::uint64_t> failing;  // checked clauses not proved on the variant
  std::string diagnostic;              // first failing clause's label and message
};

/// Invariants: refuted + undistinguished.size() == total; 0 <= rate <= 1.
struct VdrReport {
  int round = 0;
  std::size_t total = 0;
  std::size_t refuted = 0;
  double rate = 0.0;
  std::vector<std::size_t> undistinguished;
  std::vector<VariantOutcome> outcomes;  // variant-id order
};

/// Verifies `checked` on every variant (with `assumed` as context) and tallies
/// the variants on which some checked clause fails. Variants run in parallel;
/// the report is assembled in input order. Throws EmptyVariantSet.
VdrReport compute_vdr(const UnitState& unit, std::size_t seg_id, const SpecSet& checked, const SpecSet& assumed,
                      const std::vector<Variant>& variants, const Verifier& verifier, int round);

/// Undistinguished variant count, the quantity refinement minimizes.
inline std::size_t vdr_objective(const VdrReport& r) { return r.total - r.refuted; }

/// True when the report meets the stopping threshold (inclusive).
inline bool meets_threshold(const VdrReport& r, double t) { return r.total > 0 && r.rate >= t; }

/// Line-based unified diff (LCS) with `context` lines around each change.
std::string unified_diff(const std::string& a, const std::string& b, const std::string& a_name,
                         const std::string& b_name, std::size_t context = 2);

/// Produces the non-equivalent variants used in one refinement round.
class VariantSource {
 public:
  virtual ~VariantSource() = default;
  virtual std::vector<Variant> variants(const UnitState& unit, std::size_t seg_id, std::size_t poi_index,
                                        int round) = 0;
};

/// Catalog mutation plus the compiler-equivalence filter, reseeded per
/// segment, POI and round.
class CatalogMutator : public VariantSource {
 public:
  CatalogMutator(std::size_t budget, std::uint64_t seed, Toolchain toolchain,
                 std::vector<MutationOperator> catalog = default_catalog());
  std::vector<Variant> variants(const UnitState& unit, std::size_t seg_id, std::size_t poi_index,
                                int round) override;
  std::uint64_t round_seed(std::size_t seg_id, std::size_t poi_index, int round) const;
  const TceSummary& last_summary() const { return last_; }

 private:
  std::size_t budget_;
  std::uint64_t seed_;
  Toolchain toolchain_;
  std::vector<MutationOperator> catalog_;
  TceSummary last_;
};

/// Always returns the same variants, already classified.
class FixedVariants : public VariantSource {
 public:
  explicit FixedVariants(std::vector<Variant> vs) : vs_(std::move(vs)) {}
  std::vector<Variant> variants(const UnitState&, std::size_t, std::size_t, int) override { return vs_; }

 private:
  std::vector<Variant> vs_;
};

/// Extends `conversation` with a user turn that shows one undistinguished
/// variant, picked with `seed`, against the original (diff plus full text),
/// diffs of up to two further undistinguished variants, and the clauses
/// that already refute other variants. Requires a non-empty list.
Prompt assemble_refine_context(const Prompt& conversation, const std::vector<Variant>& undistinguished,
                               const std::string& original, const SpecSet& poi_specs, const VdrReport& report,
                               std::uint64_t seed);

struct RefinementResult {
  std::vector<VdrReport> history;
  std::vector<std::vector<std::uint64_t>> snapshots;  // POI clause ids per round
  std::size_t model_calls = 0;
  bool skipped = false;
  std::string skip_reason;
};

/// Refines the Verified clauses of one POI (already stored in `unit`) until
/// the VDR reaches cfg.t or cfg.n_refine rounds have run. Round 1 measures
/// the base set; each later round runs the repair loop on a refine context
/// and merges the additions proved on the original segment. Stores the
/// final set back into `unit`.
RefinementResult refine_poi_specs(UnitState& unit, std::size_t seg_id, std::size_t poi_index,
                                  const Prompt& conversation, ModelClient& model, const Verifier& verifier,
                                  VariantSource& mutator, const RunConfig& cfg, EventLog* log = nullptr);

}  // namespace specsyn
