#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace specsyn {

/// Half-open byte range [begin, end) into the text a node was parsed from.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

/// A C type as written: base specifier words plus pointer depth and array
/// dimensions. `base` is normalized ("unsigned int", "struct node", "size_t").
struct CType {
  std::string base;
  int pointer_depth = 0;
  std::vector<std::optional<std::int64_t>> array_dims;
  bool is_const = false;

  bool is_void() const { return base == "void" && pointer_depth == 0 && array_dims.empty(); }
  bool is_pointer_like() const { return pointer_depth > 0 || !array_dims.empty(); }
};

enum class ExprKind {
  IntLit,
  CharLit,
  StrLit,
  FloatLit,
  BoolLit,   // \true, \false
  Ident,
  Result,    // \result
  Unary,     // op in {-, +, !, ~, *, &}
  Binary,    // arithmetic, comparison, logical, ==>, <==>
  Assign,    // op in {=, +=, -=, ...}
  PreIncDec,
  PostIncDec,
  Ternary,
  Call,      // kids[0] is callee (Ident), rest are args
  Index,
  Member,    // name = field, op = "." or "->"
  Cast,
  SizeofType,
  SizeofExpr,
  Comma,
  InitList,
  Old,       // \old(e) or \at(e, Pre)
  Quant,     // \forall / \exists; binders in `binders`, kids[0] body
  Valid,     // \valid / \valid_read over a pointer or pointer + range
  Range,     // lo .. hi inside \valid
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Binder {
  std::string type;
  std::string name;
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  std::string op;    // operator spelling, identifier, or literal text
  std::int64_t value = 0;
  std::vector<ExprPtr> kids;
  CType type;        // Cast / SizeofType
  std::vector<Binder> binders;
  Span span;
};

enum class StmtKind { Block, Decl, Expr, If, For, While, Do, Switch, Case, Default, Break, Continue, Return, Empty };

struct VarDecl {
  CType type;
  std::string name;
  ExprPtr init;  // may be null
  Span span;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

/// Statement node. `children` carries sub-statements addressed by
/// child-index paths: Block -> its statements, If -> [then, else?],
/// For/While/Do/Switch -> [body].
struct Stmt {
  StmtKind kind = StmtKind::Empty;
  Span span;
  std::vector<StmtPtr> children;
  ExprPtr cond;        // If/While/Do/For condition, Switch scrutinee, Case value, Return value, Expr
  StmtPtr init;        // For init clause (Decl or Expr statement), may be null
  ExprPtr step;        // For increment, may be null
  std::vector<VarDecl> decls;
};

struct Param {
  CType type;
  std::string name;
};

struct FunctionInfo {
  CType return_type;
  std::string name;
  std::vector<Param> params;
  StmtPtr body;        // null for prototypes
  Span header;         // from declaration start to the closing parenthesis
  bool is_static = false;
};

struct FieldDecl {
  CType type;
  std::string name;
};

struct Enumerator {
  std::string name;
  std::int64_t value = 0;
};

using Path = std::vector<std::size_t>;

/// Walks `path` from `root`; returns null when the path does not exist.
StmtPtr stmt_at(const StmtPtr& root, const Path& path);

}  // namespace specsyn
