#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specsyn/ast.hpp"

namespace specsyn {

enum class ClauseKind { Requires, Ensures, LoopInvariant, Assert };

std::string_view clause_keyword(ClauseKind kind);
ClauseKind clause_kind_from_string(std::string_view s);  // accepts keyword or enum name

/// One ACSL clause split into its parts. `predicate` excludes the keyword,
/// the optional `label:` prefix and the trailing semicolon.
struct ParsedClause {
  ClauseKind kind = ClauseKind::Requires;
  std::string predicate;
  std::optional<std::string> label;
  ExprPtr expr;
};

/// Parses `requires P;`, `ensures P;`, `loop invariant P;` or `assert P;`
/// (semicolon optional, optional `name:` label). Returns nullopt for other
/// well-formed ACSL clause forms (assigns, loop variant, ...), which the
/// pipeline does not model. Throws ParseError on malformed predicates.
std::optional<ParsedClause> parse_clause(std::string_view clause_text);

/// Parses a bare ACSL predicate.
ExprPtr parse_predicate(std::string_view text);

/// Splits an annotation body (text between `/*@` and `*/`) into clause texts
/// at top-level semicolons; `@` layout characters are dropped.
std::vector<std::string> split_clauses(std::string_view annotation_body);

/// Canonical token spelling: single spaces between tokens, no trailing `;`.
std::string normalize_predicate(std::string_view predicate);

/// Dedup key of a clause: keyword plus normalized predicate. Case is kept.
std::string dedup_key(ClauseKind kind, std::string_view predicate);

std::string render_clause(ClauseKind kind, std::string_view predicate, std::string_view label = {});

}  // namespace specsyn
