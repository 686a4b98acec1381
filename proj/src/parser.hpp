#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "specsyn/ast.hpp"
#include "specsyn/frontend.hpp"
#include "specsyn/lexer.hpp"

namespace specsyn::detail {

/// Recursive-descent parser for the supported C subset and for ACSL
/// predicates. One instance parses one text.
class Parser {
 public:
  Parser(std::string_view text, bool acsl_mode, const std::set<std::string>& extra_types = {});

  std::vector<Declaration> parse_translation_unit();

  /// Parses an ACSL predicate that must span the whole input.
  ExprPtr parse_full_predicate();

  bool at_end() const { return peek().kind == TokenKind::End; }

 private:
  struct Specs {
    CType type;
    bool is_typedef = false;
    bool is_static = false;
    bool defines_aggregate = false;  // struct/union body present
    bool defines_enum = false;
    std::string tag;                  // "struct S" / "enum E" when a body is defined
    std::vector<FieldDecl> fields;
    std::vector<Enumerator> enumerators;
  };
  struct Declarator {
    std::string name;
    int pointer_depth = 0;
    std::vector<std::optional<std::int64_t>> dims;
    bool is_function = false;
    std::vector<Param> params;
    std::size_t end = 0;  // byte offset after the declarator
  };

  const Token& peek(std::size_t k = 0) const;
  const Token& next();
  bool accept(std::string_view p);
  const Token& expect(std::string_view p);
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail(const std::string& msg, const Token& at) const;
  std::size_t prev_end() const;

  bool is_type_start(const Token& t) const;
  Specs parse_decl_specifiers();
  void parse_struct_body(Specs& specs);
  void parse_enum_body(Specs& specs);
  Declarator parse_declarator(bool allow_abstract);
  std::vector<Param> parse_params();
  CType parse_type_name();
  CType make_type(const Specs& s, const Declarator& d) const;
  ExprPtr parse_initializer();

  StmtPtr parse_statement();
  StmtPtr parse_block();
  StmtPtr parse_decl_statement();

  ExprPtr parse_expr();
  ExprPtr parse_assign();
  ExprPtr parse_ternary();
  ExprPtr parse_binary(int level);
  ExprPtr parse_unary();
  ExprPtr parse_postfix();
  ExprPtr parse_primary();

  ExprPtr parse_pred();
  ExprPtr parse_pred_iff();
  ExprPtr parse_pred_implies();
  ExprPtr parse_pred_ternary();
  ExprPtr parse_pred_relational_chain();

  std::optional<std::int64_t> const_eval(const ExprPtr& e) const;

  void note_ref(const std::string& name);
  void push_scope() { scopes_.emplace_back(); }
  void pop_scope() { scopes_.pop_back(); }
  void bind_local(const std::string& name) {
    if (!scopes_.empty()) scopes_.back().insert(name);
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool acsl_;
  std::set<std::string> typedef_names_;
  std::map<std::string, std::int64_t> enum_values_;
  std::vector<std::set<std::string>> scopes_;
  std::set<std::string>* refs_ = nullptr;
};

std::shared_ptr<Expr> make_expr(ExprKind kind, std::string op, Span span);

}  // namespace specsyn::detail
