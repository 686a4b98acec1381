#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specsyn/frontend.hpp"
#include "specsyn/spec.hpp"

namespace specsyn {

enum class VerdictStatus { Proved, Unproved, Timeout, Invalid };

std::string_view to_string(VerdictStatus s);

struct VerifierVerdict {
  std::uint64_t clause_id = 0;
  VerdictStatus status = VerdictStatus::Invalid;
  std::string diagnostic;
  std::string goal_name;
};

/// Everything that is not Proved counts as refuted.
inline bool is_refuted(VerdictStatus s) { return s != VerdictStatus::Proved; }
std::set<std::uint64_t> refuted_ids(const std::vector<VerifierVerdict>& verdicts);

/// Checks the clauses of `checked` inside `program`. Every other annotation
/// in the program text is an assumption. Returns one verdict per clause of
/// `checked`, in set order.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual std::vector<VerifierVerdict> verify(const InstrumentedSource& program, const SpecSet& checked) const = 0;
  virtual std::string name() const = 0;
};

/// Input domain of the bounded checker.
struct MockDomain {
  std::int64_t int_min = -8;
  std::int64_t int_max = 8;
  std::size_t array_len_max = 3;
  std::size_t loop_cap = 1000;        // loop iterations per execution
  std::size_t path_cap = 100000;      // call-result choice paths per input
};

/// Deterministic bounded checker. Enumerates inputs of every function that
/// carries a checked clause, executes the body concretely and evaluates
/// clauses on the reached states. Calls are summarized by the callee's
/// ensures clauses; callees are assumed not to write memory.
class MockVerifier : public Verifier {
 public:
  explicit MockVerifier(MockDomain domain = {}) : domain_(domain) {}
  std::vector<VerifierVerdict> verify(const InstrumentedSource& program, const SpecSet& checked) const override;
  std::string name() const override { return "mock"; }
  const MockDomain& domain() const { return domain_; }

 private:
  MockDomain domain_;
};

/// Checks a single clause already present (with label `label`) in the
/// annotated `program_text`.
VerifierVerdict mock_check(const std::string& program_text, const std::string& label, std::uint64_t clause_id,
                           const MockDomain& domain);

enum class Entailment { Entailed, NotEntailed, Invalid };

/// Whether the conjunction of `premises` implies `conclusion` in every state
/// of the domain at a construct of function `owner` in `program_code`
/// (unannotated). Function contracts range over parameters and \result
/// restricted by `context_requires`; loop heads range over the variables in
/// scope. An empty premise list is the constant true.
Entailment mock_entails(const std::string& program_code, const std::string& owner, ClauseKind kind, const Path& path,
                        const std::vector<std::string>& premises, const std::string& conclusion,
                        const std::vector<std::string>& context_requires, const MockDomain& domain);

/// Runs a verifier command (Frama-C/WP by default) on a temp file and maps
/// goal lines back to clauses through their labels.
struct ExternalVerifierConfig {
  std::string command_template = "frama-c -wp -wp-timeout {timeout} {file}";
  int timeout_seconds = 10;
  std::string goal_regex = R"(^\[wp\] \[(\w+)\] (\S+))";
  std::string summary_regex = R"(Proved goals:\s*(\d+)\s*/\s*(\d+))";
};

class FramaCVerifier : public Verifier {
 public:
  explicit FramaCVerifier(ExternalVerifierConfig cfg = {}) : cfg_(std::move(cfg)) {}
  std::vector<VerifierVerdict> verify(const InstrumentedSource& program, const SpecSet& checked) const override;
  std::string name() const override { return "frama-c"; }

  /// Maps raw verifier output to verdicts. Throws MalformedOutput when the
  /// summary line is missing.
  std::vector<VerifierVerdict> parse_output(const std::string& output, const InstrumentedSource& program,
                                            const SpecSet& checked) const;

 private:
  ExternalVerifierConfig cfg_;
};

/// Result of a subprocess run: exit status and combined stdout/stderr.
struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;
};

/// Runs `command` through /bin/sh with a wall-clock limit in seconds
/// (0 = none).
ProcessResult run_command(const std::string& command, int timeout_seconds = 0);

/// Quotes `s` for /bin/sh.
std::string shell_quote(const std::string& s);

}  // namespace specsyn
