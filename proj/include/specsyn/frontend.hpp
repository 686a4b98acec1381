#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "specsyn/acsl.hpp"
#include "specsyn/ast.hpp"
#include "specsyn/spec.hpp"

namespace specsyn {

struct SourceUnit {
  std::string path;
  std::string text;
  bool preprocessed = true;
};

enum class DeclKind { FunctionDef, Prototype, TypeDef, StructOrUnionDef, EnumDef, GlobalVarDecl };

std::string_view to_string(DeclKind k);

/// A top-level C entity. `defined_names` lists every ordinary identifier
/// and tag ("struct S", "enum E") the declaration introduces; `name` is the
/// primary one.
struct Declaration {
  std::size_t id = 0;
  DeclKind kind = DeclKind::FunctionDef;
  std::string name;
  std::vector<std::string> defined_names;
  Span span;
  std::string text;
  std::shared_ptr<const FunctionInfo> function;  // FunctionDef and Prototype
  std::vector<VarDecl> globals;                   // GlobalVarDecl
  std::vector<VarDecl> aliases;                   // TypeDef: aliased type per declared name
  std::vector<Enumerator> enumerators;
  std::vector<FieldDecl> fields;
  std::set<std::string> referenced_names;

  StmtPtr body() const { return function ? function->body : nullptr; }
};

/// Names the parser must treat as types although their typedefs live outside
/// the parsed text (a segment parsed apart from its dependencies).
struct ParseContext {
  std::set<std::string> typedef_names;
};

/// Parses a preprocessed translation unit into its top-level declarations in
/// source order. Prototypes of functions defined in the same unit are folded
/// into the definition. Throws ParseError / EmptyUnit.
std::vector<Declaration> parse_unit(const SourceUnit& unit);

/// Raw parse without prototype folding or the EmptyUnit check.
std::vector<Declaration> parse_declarations(std::string_view text, const ParseContext& ctx = {});

/// Every typedef name introduced by `decls`.
std::set<std::string> typedef_names_of(const std::vector<Declaration>& decls);

/// Returns `text` with every `/*@ ... */` block removed. Blocks inside string
/// or character literals and inside ordinary comments are left alone.
std::string strip_instrumentation(std::string_view text);

/// Annotation block found in source text, located by its offset in the
/// stripped text.
struct AnnotationBlock {
  std::string body;            // between `/*@` and `*/`
  std::size_t stripped_offset = 0;
  Span original;
};

struct StrippedSource {
  std::string text;
  std::vector<AnnotationBlock> blocks;
};

StrippedSource extract_annotations(std::string_view text);

enum class AttachKind { Function, Loop, Statement };

/// A clause read back from annotated source, attached to the construct that
/// follows its block.
struct AttachedClause {
  ClauseKind kind = ClauseKind::Ensures;
  std::string predicate;
  std::optional<std::string> label;
  AttachKind where = AttachKind::Function;
  std::string owner;  // enclosing function name
  Path path;          // statement path for Loop / Statement
  std::size_t line = 0;  // line of the block in the annotated text
};

struct AnnotatedProgram {
  std::string code;  // stripped text
  std::vector<Declaration> decls;
  std::vector<AttachedClause> clauses;
};

/// Parses annotated source: strips annotation blocks, parses the remaining
/// code and attaches each supported clause to its construct. Blocks that do
/// not precede a function, loop or statement raise AttachmentError.
AnnotatedProgram parse_annotated(std::string_view text, const ParseContext& ctx = {});

struct InstrumentedSource {
  std::string text;
  std::map<std::uint64_t, std::string> clause_labels;  // clause id -> label
};

/// Label embedded for a clause: SPSN_<segment>_<poi>_<seq>.
std::string clause_label(const PoiRef& poi, std::size_t seq);

/// Inserts each clause of `specs` as an ACSL block in front of its POI
/// (function contracts before the function, loop invariants before the loop,
/// assertions before their statement). Labels are assigned per POI in
/// clause-id order. Throws AttachmentError for clauses whose POI is missing.
InstrumentedSource instrument(std::string_view segment_text, const SpecSet& specs,
                              const std::vector<PointOfInterest>& pois, const ParseContext& ctx = {});

/// Byte offset in `text` where the construct named by (owner, kind, path)
/// starts, or nullopt.
std::optional<std::size_t> locate_construct(const std::vector<Declaration>& decls, const std::string& owner,
                                            PoiKind kind, const Path& path);

}  // namespace specsyn
