#pragma once

// Scripted model responses for the fig1.c golden run. The first answer for
// the callee contract is wrong so that the repair path is exercised.

#include <string>
#include <vector>

#include "specsyn/model_client.hpp"
#include "specsyn/mutation.hpp"

namespace fixtures {

inline std::vector<specsyn::ScriptedBackend::Rule> fig1_rules() {
  using specsyn::Purpose;
  std::vector<specsyn::ScriptedBackend::Rule> rules;
  rules.push_back({Purpose::Sketch, {"check_same"},
                   "POI 0: the result is the comparison outcome of bufs_differ, 0 or 1", std::nullopt});
  rules.push_back({Purpose::Sketch, {},
                   "POI 0: i stays within 0..n and ret stays 0 while the prefix matches\n"
                   "POI 1: the result is 1 exactly when some byte differs, otherwise 0",
                   std::nullopt});
  rules.push_back({Purpose::Generate, {"loop at line"},
                   "```\nloop invariant 0 <= i <= n;\nloop invariant ret == 0;\n```", std::nullopt});
  rules.push_back({Purpose::Generate, {"contract of function `bufs_differ`"},
                   "```\nrequires \\valid_read(b1 + (0 .. n-1));\nrequires \\valid_read(b2 + (0 .. n-1));\n"
                   "ensures \\result == 2;\n```",
                   std::nullopt});
  rules.push_back({Purpose::Repair, {"contract of function `bufs_differ`"},
                   "```\nensures \\result == 0 || \\result == 1;\n```", std::nullopt});
  rules.push_back({Purpose::Generate, {"contract of function `check_same`"},
                   "```\nrequires \\valid_read(x + (0 .. len-1));\nrequires \\valid_read(y + (0 .. len-1));\n"
                   "ensures \\result == 0 || \\result == 1;\n```",
                   std::nullopt});
  rules.push_back({Purpose::Refine, {"contract of function `bufs_differ`"},
                   "```\nensures \\result == 1 <==> (\\exists integer k; 0 <= k < n && b1[k] != b2[k]);\n```",
                   std::nullopt});
  rules.push_back({Purpose::Refine, {"contract of function `check_same`"},
                   "```\nensures \\result == 1 <==> (\\exists integer k; 0 <= k < len && x[k] != y[k]);\n```",
                   std::nullopt});
  rules.push_back({Purpose::Refine, {"loop at line"},
                   "```\nloop invariant \\forall integer k; 0 <= k < i ==> b1[k] == b2[k];\n```", std::nullopt});

  return rules;
}

/// Recorded golden transcript matching the local compiler: equivalence
/// filtering changes the variant sets, and so the refine prompts.
inline std::string fig1_transcript_name(const specsyn::Toolchain& tc) {
  return specsyn::toolchain_usable(tc) ? "fig1_transcript.jsonl" : "fig1_transcript_nocc.jsonl";
}

}  // namespace fixtures
