#include "specsyn/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

#include "parser.hpp"
#include "specsyn/error.hpp"

namespace specsyn {

std::string_view to_string(DeclKind k) {
  switch (k) {
    case DeclKind::FunctionDef: return "FunctionDef";
    case DeclKind::Prototype: return "Prototype";
    case DeclKind::TypeDef: return "TypeDef";
    case DeclKind::StructOrUnionDef: return "StructOrUnionDef";
    case DeclKind::EnumDef: return "EnumDef";
    case DeclKind::GlobalVarDecl: return "GlobalVarDecl";
  }
  return "?";
}

std::vector<Declaration> parse_declarations(std::string_view text, const ParseContext& ctx) {
  detail::Parser p(text, false, ctx.typedef_names);
  return p.parse_translation_unit();
}

std::set<std::string> typedef_names_of(const std::vector<Declaration>& decls) {
  std::set<std::string> out;
  for (const auto& d : decls)
    if (d.kind == DeclKind::TypeDef)
      for (const auto& n : d.defined_names)
        if (!n.starts_with("struct ") && !n.starts_with("union ") && !n.starts_with("enum ")) out.insert(n);
  return out;
}

std::vector<Declaration> parse_unit(const SourceUnit& unit) {
  if (!unit.preprocessed) throw ParseError("source unit is not preprocessed: " + unit.path, 1, 1);
  auto raw = parse_declarations(unit.text);
  std::set<std::string> defined;
  for (const auto& d : raw)
    if (d.kind == DeclKind::FunctionDef) defined.insert(d.name);
  std::vector<Declaration> out;
  std::map<std::string, std::set<std::string>> proto_refs;
  for (auto& d : raw) {
    if (d.kind == DeclKind::Prototype && defined.count(d.name)) {
      proto_refs[d.name].insert(d.referenced_names.begin(), d.referenced_names.end());
      continue;
    }
    out.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = i;
    auto it = proto_refs.find(out[i].name);
    if (out[i].kind == DeclKind::FunctionDef && it != proto_refs.end())
      out[i].referenced_names.insert(it->second.begin(), it->second.end());
  }
  if (out.empty()) throw EmptyUnit("no declarations in " + unit.path);
  return out;
}

// ---------------------------------------------------------------------------
// Annotation blocks

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

/// A block alone on its line(s) takes the whole line with it: the pending
/// indentation in `out` is dropped and scanning resumes after the newline.
/// Otherwise only the block itself is removed.
std::size_t drop_block_line(std::string_view text, std::string& out, std::size_t stop) {
  std::size_t line_start = out.rfind('\n');
  line_start = line_start == std::string::npos ? 0 : line_start + 1;
  if (!blank(std::string_view(out).substr(line_start))) return stop;
  std::size_t eol = text.find('\n', stop);
  if (!blank(text.substr(stop, (eol == std::string_view::npos ? text.size() : eol) - stop))) return stop;
  out.resize(line_start);
  return eol == std::string_view::npos ? text.size() : eol + 1;
}

}  // namespace

StrippedSource extract_annotations(std::string_view text) {
  StrippedSource out;
  out.text.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != c && text[j] != '\n') {
        if (text[j] == '\\') ++j;
        ++j;
      }
      j = std::min(j + 1, text.size());
      out.text.append(text.substr(i, j - i));
      i = j;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      std::size_t close = text.find("*/", i + 2);
      std::size_t stop = close == std::string_view::npos ? text.size() : close + 2;
      if (i + 2 < text.size() && text[i + 2] == '@') {
        std::size_t body_end = close == std::string_view::npos ? text.size() : close;
        std::size_t resume = drop_block_line(text, out.text, stop);
        out.blocks.push_back(AnnotationBlock{std::string(text.substr(i + 3, body_end - (i + 3))), out.text.size(),
                                             Span{i, stop}});
        i = resume;
        continue;
      } else {
        out.text.append(text.substr(i, stop - i));
      }
      i = stop;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      std::size_t eol = text.find('\n', i);
      if (eol == std::string_view::npos) eol = text.size();
      if (i + 2 < text.size() && text[i + 2] == '@') {
        std::size_t resume = drop_block_line(text, out.text, eol);
        out.blocks.push_back(
            AnnotationBlock{std::string(text.substr(i + 3, eol - (i + 3))), out.text.size(), Span{i, eol}});
        i = resume;
        continue;
      } else {
        out.text.append(text.substr(i, eol - i));
      }
      i = eol;
      continue;
    }
    out.text.push_back(c);
    ++i;
  }
  return out;
}

std::string strip_instrumentation(std::string_view text) { return extract_annotations(text).text; }

namespace {

/// Offset of the first code character at or after `pos`, skipping
/// whitespace and ordinary comments.
std::size_t skip_trivia(std::string_view text, std::size_t pos) {
  while (pos < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    } else if (text.substr(pos).starts_with("//")) {
      pos = text.find('\n', pos);
      if (pos == std::string_view::npos) return text.size();
    } else if (text.substr(pos).starts_with("/*")) {
      auto close = text.find("*/", pos + 2);
      if (close == std::string_view::npos) return text.size();
      pos = close + 2;
    } else {
      break;
    }
  }
  return pos;
}

struct ConstructRef {
  AttachKind where;
  std::string owner;
  Path path;
  bool is_loop = false;
};

void index_statements(const StmtPtr& st, const std::string& owner, Path& path,
                      std::map<std::size_t, ConstructRef>& out) {
  if (!st) return;
  if (!path.empty()) {
    bool loop = st->kind == StmtKind::For || st->kind == StmtKind::While || st->kind == StmtKind::Do;
    out.emplace(st->span.begin, ConstructRef{loop ? AttachKind::Loop : AttachKind::Statement, owner, path, loop});
  }
  for (std::size_t i = 0; i < st->children.size(); ++i) {
    path.push_back(i);
    index_statements(st->children[i], owner, path, out);
    path.pop_back();
  }
}

bool is_loop_kind(StmtKind k) { return k == StmtKind::For || k == StmtKind::While || k == StmtKind::Do; }

}  // namespace

AnnotatedProgram parse_annotated(std::string_view text, const ParseContext& ctx) {
  auto stripped = extract_annotations(text);
  AnnotatedProgram prog;
  prog.code = stripped.text;
  prog.decls = parse_declarations(prog.code, ctx);

  std::map<std::size_t, ConstructRef> constructs;
  for (const auto& d : prog.decls) {
    if (!d.function) continue;
    // A contract before a prototype attaches to the function of that name.
    constructs.emplace(d.span.begin, ConstructRef{AttachKind::Function, d.name, {}, false});
    if (d.function->body) {
      Path path;
      index_statements(d.function->body, d.name, path, constructs);
    }
  }

  for (const auto& block : stripped.blocks) {
    auto clause_texts = split_clauses(block.body);
    std::vector<ParsedClause> parsed;
    for (const auto& ct : clause_texts) {
      auto pc = parse_clause(ct);
      if (pc) parsed.push_back(std::move(*pc));
    }
    if (parsed.empty()) continue;
    auto [line, col] = line_column(text, block.original.begin);
    std::size_t at = skip_trivia(prog.code, block.stripped_offset);
    auto it = constructs.find(at);
    if (it == constructs.end())
      throw AttachmentError("annotation at line " + std::to_string(line) + " does not precede a function, loop or statement");
    const ConstructRef& ref = it->second;
    for (auto& pc : parsed) {
      AttachedClause ac;
      ac.kind = pc.kind;
      ac.predicate = pc.predicate;
      ac.label = pc.label;
      ac.owner = ref.owner;
      ac.path = ref.path;
      ac.line = line;
      switch (pc.kind) {
        case ClauseKind::Requires:
        case ClauseKind::Ensures:
          if (ref.where != AttachKind::Function)
            throw AttachmentError("contract clause at line " + std::to_string(line) + " is not before a function");
          ac.where = AttachKind::Function;
          break;
        case ClauseKind::LoopInvariant:
          if (!ref.is_loop)
            throw AttachmentError("loop invariant at line " + std::to_string(line) + " is not before a loop");
          ac.where = AttachKind::Loop;
          break;
        case ClauseKind::Assert:
          if (ref.where == AttachKind::Function)
            throw AttachmentError("assertion at line " + std::to_string(line) + " is outside a function body");
          ac.where = AttachKind::Statement;
          break;
      }
      prog.clauses.push_back(std::move(ac));
    }
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Instrumentation

std::string clause_label(const PoiRef& poi, std::size_t seq) {
  return "SPSN_" + std::to_string(poi.segment) + "_" + std::to_string(poi.index) + "_" + std::to_string(seq);
}

std::optional<std::size_t> locate_construct(const std::vector<Declaration>& decls, const std::string& owner,
                                            PoiKind kind, const Path& path) {
  const Declaration* fn = nullptr;
  for (const auto& d : decls) {
    if (d.name != owner || !d.function) continue;
    if (d.kind == DeclKind::FunctionDef) {
      fn = &d;
      break;
    }
    if (!fn) fn = &d;
  }
  if (!fn) return std::nullopt;
  if (kind == PoiKind::FunctionContract) return fn->span.begin;
  if (!fn->function->body || path.empty()) return std::nullopt;
  auto st = stmt_at(fn->function->body, path);
  if (!st) return std::nullopt;
  if (kind == PoiKind::LoopHead && !is_loop_kind(st->kind)) return std::nullopt;
  return st->span.begin;
}

namespace {

bool clause_fits(ClauseKind ck, PoiKind pk) {
  switch (ck) {
    case ClauseKind::Requires:
    case ClauseKind::Ensures: return pk == PoiKind::FunctionContract;
    case ClauseKind::LoopInvariant: return pk == PoiKind::LoopHead;
    case ClauseKind::Assert: return pk == PoiKind::Statement || pk == PoiKind::LoopHead;
  }
  return false;
}

std::string indentation_at(std::string_view text, std::size_t offset) {
  std::size_t line_start = text.rfind('\n', offset == 0 ? 0 : offset - 1);
  line_start = (line_start == std::string_view::npos || offset == 0) ? 0 : line_start + 1;
  if (offset > 0 && text[offset - 1] == '\n') line_start = offset;
  std::string indent(text.substr(line_start, offset - line_start));
  for (char c : indent)
    if (c != ' ' && c != '\t') return "";
  return indent;
}

}  // namespace

InstrumentedSource instrument(std::string_view segment_text, const SpecSet& specs,
                              const std::vector<PointOfInterest>& pois, const ParseContext& ctx) {
  InstrumentedSource out;
  if (specs.empty()) {
    out.text = std::string(segment_text);
    return out;
  }
  auto decls = parse_declarations(segment_text, ctx);

  std::map<PoiRef, std::vector<const SpecClause*>> by_poi;
  for (const auto& c : specs) by_poi[c.poi].push_back(&c);

  struct Insertion {
    std::size_t offset;
    int order;  // assertions before loop annotations at the same offset
    std::string text;
  };
  std::vector<Insertion> inserts;
  for (auto& [ref, clauses] : by_poi) {
    auto pit = std::find_if(pois.begin(), pois.end(), [&](const PointOfInterest& p) { return p.id == ref; });
    if (pit == pois.end())
      throw AttachmentError("clause " + std::to_string(clauses.front()->id) + " references unknown POI " +
                            std::to_string(ref.segment) + "." + std::to_string(ref.index));
    auto offset = locate_construct(decls, pit->owner_name, pit->kind, pit->path);
    if (!offset) throw AttachmentError("POI " + std::to_string(ref.segment) + "." + std::to_string(ref.index) +
                                       " not found in segment text");
    std::sort(clauses.begin(), clauses.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::string indent = indentation_at(segment_text, *offset);
    std::string block = "/*@ ";
    std::vector<std::string> asserts;
    std::string body;
    for (std::size_t seq = 0; seq < clauses.size(); ++seq) {
      const SpecClause& c = *clauses[seq];
      if (!clause_fits(c.kind, pit->kind))
        throw AttachmentError("clause " + std::to_string(c.id) + " (" + std::string(clause_keyword(c.kind)) +
                              ") cannot attach to a " + std::string(to_string(pit->kind)) + " point");
      std::string label = clause_label(ref, seq);
      out.clause_labels[c.id] = label;
      if (!body.empty()) body += "\n" + indent + "    ";
      body += render_clause(c.kind, c.predicate, label);
    }
    int order = pit->kind == PoiKind::Statement ? 0 : 1;
    // On its own line when the construct starts a line; stripping then
    // removes the whole line again.
    std::size_t line_start = segment_text.rfind('\n', *offset == 0 ? 0 : *offset - 1);
    line_start = (line_start == std::string_view::npos || *offset == 0) ? 0 : line_start + 1;
    if (*offset > 0 && segment_text[*offset - 1] == '\n') line_start = *offset;
    bool own_line = blank(segment_text.substr(line_start, *offset - line_start));
    inserts.push_back(Insertion{*offset, order, "/*@ " + body + " */" + (own_line ? "\n" + indent : std::string())});
  }
  std::stable_sort(inserts.begin(), inserts.end(), [](const Insertion& a, const Insertion& b) {
    return a.offset != b.offset ? a.offset < b.offset : a.order < b.order;
  });
  std::size_t cursor = 0;
  for (const auto& ins : inserts) {
    out.text.append(segment_text.substr(cursor, ins.offset - cursor));
    out.text += ins.text;
    cursor = ins.offset;
  }
  out.text.append(segment_text.substr(cursor));
  return out;
}

}  // namespace specsyn
