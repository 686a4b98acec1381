#include "specsyn/acsl.hpp"

#include <cctype>

#include "parser.hpp"
#include "specsyn/error.hpp"
#include "specsyn/lexer.hpp"

namespace specsyn {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string_view clause_keyword(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::Requires: return "requires";
    case ClauseKind::Ensures: return "ensures";
    case ClauseKind::LoopInvariant: return "loop invariant";
    case ClauseKind::Assert: return "assert";
  }
  return "?";
}

ClauseKind clause_kind_from_string(std::string_view s) {
  if (s == "requires" || s == "Requires") return ClauseKind::Requires;
  if (s == "ensures" || s == "Ensures") return ClauseKind::Ensures;
  if (s == "loop invariant" || s == "LoopInvariant") return ClauseKind::LoopInvariant;
  if (s == "assert" || s == "Assert") return ClauseKind::Assert;
  throw Error("UnknownClauseKind", "unknown clause kind: " + std::string(s));
}

ExprPtr parse_predicate(std::string_view text) {
  detail::Parser p(text, true);
  return p.parse_full_predicate();
}

std::optional<ParsedClause> parse_clause(std::string_view clause_text) {
  auto toks = tokenize(clause_text);
  if (toks.empty() || toks[0].kind == TokenKind::End) throw ParseError("empty clause", 1, 1);
  std::size_t i = 0;
  ParsedClause out;
  const Token& kw = toks[0];
  if (kw.is("requires")) {
    out.kind = ClauseKind::Requires;
    i = 1;
  } else if (kw.is("ensures")) {
    out.kind = ClauseKind::Ensures;
    i = 1;
  } else if (kw.is("assert")) {
    out.kind = ClauseKind::Assert;
    i = 1;
  } else if (kw.is("loop") && toks.size() > 1 && toks[1].is("invariant")) {
    out.kind = ClauseKind::LoopInvariant;
    i = 2;
  } else if (kw.kind == TokenKind::Identifier) {
    return std::nullopt;  // assigns, loop variant, decreases, behaviors, ...
  } else {
    throw ParseError("expected clause keyword", kw.line, kw.column);
  }
  if (toks[i].kind == TokenKind::Identifier && !toks[i].text.starts_with("\\") && toks[i + 1].is(":")) {
    out.label = toks[i].text;
    i += 2;
  }
  std::size_t last = toks.size() - 1;  // End token
  while (last > i && toks[last - 1].is(";")) --last;
  if (last <= i) throw ParseError("clause has no predicate", kw.line, kw.column);
  std::size_t begin = toks[i].offset;
  std::size_t end = toks[last - 1].end();
  out.predicate = trim(clause_text.substr(begin, end - begin));
  out.expr = parse_predicate(out.predicate);
  return out;
}

std::vector<std::string> split_clauses(std::string_view body) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  int pending_binders = 0;
  bool line_start = true;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '\n') {
      line_start = true;
      cur.push_back(' ');
      continue;
    }
    if (line_start && (c == ' ' || c == '\t')) continue;
    if (c == '@' && (line_start || i + 1 == body.size() || body.substr(i + 1).find_first_not_of(" \t\r\n") == std::string_view::npos)) {
      line_start = false;
      continue;
    }
    line_start = false;
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < body.size() && body[j] != c) {
        if (body[j] == '\\') ++j;
        ++j;
      }
      cur.append(body.substr(i, std::min(j + 1, body.size()) - i));
      i = j;
      continue;
    }
    if (c == '\\' && (body.substr(i).starts_with("\\forall") || body.substr(i).starts_with("\\exists")) && depth == 0)
      ++pending_binders;
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ';' && depth == 0) {
      if (pending_binders > 0) {
        --pending_binders;
        cur.push_back(c);
        continue;
      }
      auto t = trim(cur);
      if (!t.empty()) out.push_back(t + ";");
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  auto t = trim(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

std::string normalize_predicate(std::string_view predicate) {
  std::string out;
  try {
    auto toks = tokenize(predicate);
    std::size_t n = toks.size() - 1;
    while (n > 0 && toks[n - 1].is(";")) --n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!out.empty()) out.push_back(' ');
      out += toks[i].text;
    }
  } catch (const ParseError&) {
    bool space = false;
    for (char c : predicate) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        space = !out.empty();
        continue;
      }
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
    while (!out.empty() && (out.back() == ';' || out.back() == ' ')) out.pop_back();
  }
  return out;
}

std::string dedup_key(ClauseKind kind, std::string_view predicate) {
  return std::string(clause_keyword(kind)) + " " + normalize_predicate(predicate);
}

std::string render_clause(ClauseKind kind, std::string_view predicate, std::string_view label) {
  std::string out(clause_keyword(kind));
  out.push_back(' ');
  if (!label.empty()) {
    out += label;
    out += ": ";
  }
  out += predicate;
  out.push_back(';');
  return out;
}

}  // namespace specsyn
