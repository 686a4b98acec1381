#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "specsyn/frontend.hpp"
#include "specsyn/segmentation.hpp"

namespace specsyn {

enum class MutationCategory {
  OperatorSwap,
  OperandReplace,
  ConstantPerturb,
  StatementDelete,
  StatementDuplicate,
  ControlFlowAlter,
  ReturnAlter,
  DeclarationAlter,
};

std::string_view to_string(MutationCategory c);
MutationCategory mutation_category_from_string(std::string_view s);

/// Catalog entry. `transform` names a rewrite family; `from`/`to`/`value`/
/// `target` parametrize it.
struct MutationOperator {
  std::string id;
  MutationCategory category = MutationCategory::OperatorSwap;
  std::string transform;
  std::string from;
  std::string to;
  std::int64_t value = 0;
  std::string target;
  std::string description;
};

/// Loads a catalog file ({"operators": [...]}). Throws ConfigError/IoError.
std::vector<MutationOperator> load_catalog(const std::string& path);

/// Catalog shipped in the data directory.
const std::vector<MutationOperator>& default_catalog();

/// One applicable (operator, site) pair as a text edit of the segment code.
struct MutationSite {
  std::size_t op_index = 0;
  std::string site;  // "function:offset"
  Span span;
  std::string replacement;
};

/// Every applicable pair in deterministic order: operators in catalog order,
/// sites in source order.
std::vector<MutationSite> applicable_sites(const std::string& code, const std::vector<MutationOperator>& catalog,
                                           const ParseContext& ctx = {});

std::string apply_site(const std::string& code, const MutationSite& site);

enum class Equivalence { Unknown, NonEquivalent, Equivalent, CompileFailed };
std::string_view to_string(Equivalence e);

struct Variant {
  std::size_t id = 0;
  std::size_t segment_id = 0;
  std::string operator_id;
  MutationCategory category = MutationCategory::OperatorSwap;
  std::string site;
  std::string code;
  Equivalence equivalence = Equivalence::Unknown;
};

/// Uniform integer in [0, n) from raw 64-bit draws (rejection sampling), so
/// the sequence does not depend on the standard library's distributions.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

/// Samples (operator, site) pairs uniformly without replacement (seeded
/// Fisher-Yates) and keeps variants that re-parse and differ from the
/// original, collapsing identical code, until `budget` variants exist or the
/// pairs are exhausted. Throws NoApplicableSites.
std::vector<Variant> generate_variants(const Segment& seg, std::size_t budget, std::uint64_t seed,
                                       const ParseContext& ctx = {},
                                       const std::vector<MutationOperator>& catalog = default_catalog());

// ---------------------------------------------------------------------------
// Trivial compiler equivalence

struct Toolchain {
  std::string cc = "cc";
  std::vector<std::string> flags = {"-O2", "-g0", "-fno-ident", "-fno-asynchronous-unwind-tables", "-w"};
  bool fallback_when_missing = true;
  int timeout_seconds = 60;

  /// Compiler command line without file arguments (recorded in reports).
  std::string describe() const;
};

/// Compiles `prefix + original` and `prefix + variant.code` to object files
/// and compares them byte for byte. Throws ToolchainMissing.
Equivalence tce_classify(const std::string& original, const Variant& variant, const Toolchain& toolchain,
                         const std::string& prefix = "");

/// True when `toolchain` compiles a trivial unit.
bool toolchain_usable(const Toolchain& toolchain);

struct TceSummary {
  std::size_t equivalent = 0;
  std::size_t compile_failed = 0;
  std::size_t kept = 0;
  bool fallback_used = false;
  std::vector<std::string> warnings;
};

/// Assigns an equivalence class to every variant still Unknown (in
/// parallel), keeping order. Without a usable compiler and with the fallback
/// enabled, variants count as NonEquivalent and a warning is recorded.
std::vector<Variant> classify_variants(std::vector<Variant> variants, const std::string& original,
                                       const Toolchain& toolchain, const std::string& prefix = "",
                                       TceSummary* summary = nullptr);

/// classify_variants, then keeps the NonEquivalent ones in order.
std::vector<Variant> filter_non_equivalent(std::vector<Variant> variants, const std::string& original,
                                           const Toolchain& toolchain, const std::string& prefix = "",
                                           TceSummary* summary = nullptr);

}  // namespace specsyn
