#include "parser.hpp"

#include <algorithm>
#include <array>

#include "specsyn/error.hpp"

namespace specsyn {

StmtPtr stmt_at(const StmtPtr& root, const Path& path) {
  StmtPtr cur = root;
  for (std::size_t idx : path) {
    if (!cur || idx >= cur->children.size()) return nullptr;
    cur = cur->children[idx];
  }
  return cur;
}

namespace detail {

namespace {

constexpr std::array<std::string_view, 26> kBuiltinTypeNames = {
    "size_t",  "ssize_t",  "ptrdiff_t", "intptr_t", "uintptr_t", "int8_t",  "int16_t",
    "int32_t", "int64_t",  "uint8_t",   "uint16_t", "uint32_t",  "uint64_t", "bool",
    "integer", "boolean",  "real",      "u8",       "u16",       "u32",     "u64",
    "s8",      "s16",      "s32",       "s64",      "wchar_t"};

bool is_type_keyword(std::string_view w) {
  static constexpr std::array<std::string_view, 10> kw = {"void",   "char",     "short", "int",   "long",
                                                          "float",  "double",   "signed", "unsigned", "_Bool"};
  return std::find(kw.begin(), kw.end(), w) != kw.end();
}

bool is_qualifier(std::string_view w) {
  return w == "const" || w == "volatile" || w == "restrict" || w == "__restrict" || w == "register" ||
         w == "auto" || w == "inline" || w == "__inline" || w == "extern";
}

/// Normalizes a multiset of C type keywords into a canonical spelling.
std::string normalize_base(const std::vector<std::string>& words) {
  int n_unsigned = 0, n_signed = 0, n_short = 0, n_long = 0, n_char = 0, n_int = 0;
  std::string other;
  for (const auto& w : words) {
    if (w == "unsigned") ++n_unsigned;
    else if (w == "signed") ++n_signed;
    else if (w == "short") ++n_short;
    else if (w == "long") ++n_long;
    else if (w == "char") ++n_char;
    else if (w == "int") ++n_int;
    else other = w;
  }
  if (!other.empty()) return other;
  std::string core;
  if (n_char) core = "char";
  else if (n_short) core = "short";
  else if (n_long >= 2) core = "long long";
  else if (n_long == 1) core = "long";
  else core = "int";
  if (n_unsigned) return "unsigned " + core;
  if (n_signed && n_char) return "signed char";
  return core;
}

// Binary operator precedence levels for C, lowest first.
const std::vector<std::vector<std::string_view>>& c_levels() {
  static const std::vector<std::vector<std::string_view>> levels = {
      {"||"}, {"&&"}, {"|"}, {"^"}, {"&"}, {"==", "!="}, {"<", "<=", ">", ">="}, {"<<", ">>"}, {"+", "-"}, {"*", "/", "%"}};
  return levels;
}

// ACSL merges equality and relational operators into one chainable level
// handled by parse_pred_relational_chain; these are the remaining levels.
const std::vector<std::vector<std::string_view>>& acsl_levels() {
  static const std::vector<std::vector<std::string_view>> levels = {
      {"||"}, {"&&"}, {"|"}, {"^"}, {"&"}, {"<<", ">>"}, {"+", "-"}, {"*", "/", "%"}};
  return levels;
}

bool is_relational(std::string_view op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

}  // namespace

std::shared_ptr<Expr> make_expr(ExprKind kind, std::string op, Span span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->op = std::move(op);
  e->span = span;
  return e;
}

Parser::Parser(std::string_view text, bool acsl_mode, const std::set<std::string>& extra_types)
    : text_(text), toks_(tokenize(text)), acsl_(acsl_mode), typedef_names_(extra_types) {
  for (auto n : kBuiltinTypeNames) typedef_names_.insert(std::string(n));
}

const Token& Parser::peek(std::size_t k) const {
  std::size_t i = std::min(pos_ + k, toks_.size() - 1);
  return toks_[i];
}

const Token& Parser::next() {
  const Token& t = toks_[pos_];
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool Parser::accept(std::string_view p) {
  if (peek().is(p)) {
    next();
    return true;
  }
  return false;
}

const Token& Parser::expect(std::string_view p) {
  if (!peek().is(p)) fail("expected '" + std::string(p) + "'");
  return next();
}

void Parser::fail(const std::string& msg) const { fail(msg, peek()); }

void Parser::fail(const std::string& msg, const Token& at) const {
  std::string near = at.kind == TokenKind::End ? "end of input" : "'" + at.text + "'";
  throw ParseError(msg + " near " + near, at.line, at.column);
}

std::size_t Parser::prev_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].end(); }

void Parser::note_ref(const std::string& name) {
  if (!refs_) return;
  for (const auto& scope : scopes_)
    if (scope.count(name)) return;
  refs_->insert(name);
}

bool Parser::is_type_start(const Token& t) const {
  if (t.kind != TokenKind::Identifier) return false;
  const std::string& w = t.text;
  if (is_type_keyword(w) || w == "struct" || w == "union" || w == "enum" || w == "typedef" || w == "static" ||
      is_qualifier(w))
    return true;
  if (typedef_names_.count(w)) {
    for (const auto& scope : scopes_)
      if (scope.count(w)) return false;
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Declarations

Parser::Specs Parser::parse_decl_specifiers() {
  Specs s;
  std::vector<std::string> words;
  bool have_base = false;
  while (true) {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) break;
    const std::string& w = t.text;
    if (w == "typedef") {
      s.is_typedef = true;
      next();
    } else if (w == "static") {
      s.is_static = true;
      next();
    } else if (w == "const") {
      s.type.is_const = true;
      next();
    } else if (is_qualifier(w)) {
      next();
    } else if (w == "asm" || w == "__asm__" || w == "__attribute__") {
      fail("unsupported construct");
    } else if (is_type_keyword(w)) {
      words.push_back(w);
      have_base = true;
      next();
    } else if (w == "struct" || w == "union" || w == "enum") {
      if (have_base) fail("unexpected aggregate specifier");
      next();
      std::string tag_name;
      if (peek().kind == TokenKind::Identifier && !peek().is("{")) tag_name = next().text;
      std::string tag = w + " " + (tag_name.empty() ? "<anonymous>" : tag_name);
      if (peek().is("{")) {
        if (w == "enum") {
          s.defines_enum = true;
          parse_enum_body(s);
        } else {
          s.defines_aggregate = true;
          parse_struct_body(s);
        }
        if (!tag_name.empty()) s.tag = tag;
      } else {
        if (tag_name.empty()) fail("expected tag name");
        note_ref(tag);
      }
      words.push_back(tag);
      have_base = true;
    } else if (!have_base && typedef_names_.count(w)) {
      bool shadowed = false;
      for (const auto& scope : scopes_)
        if (scope.count(w)) shadowed = true;
      if (shadowed) break;
      words.push_back(w);
      if (std::find(kBuiltinTypeNames.begin(), kBuiltinTypeNames.end(), w) == kBuiltinTypeNames.end()) note_ref(w);
      have_base = true;
      next();
    } else {
      break;
    }
  }
  if (!have_base) fail("expected type specifier");
  s.type.base = normalize_base(words);
  return s;
}

void Parser::parse_struct_body(Specs& s) {
  expect("{");
  while (!accept("}")) {
    if (at_end()) fail("unterminated struct");
    Specs fs = parse_decl_specifiers();
    if (accept(";")) continue;  // anonymous nested aggregate
    do {
      Declarator d = parse_declarator(false);
      if (accept(":")) parse_ternary();  // bit-field width
      s.fields.push_back(FieldDecl{make_type(fs, d), d.name});
    } while (accept(","));
    expect(";");
  }
}

void Parser::parse_enum_body(Specs& s) {
  expect("{");
  std::int64_t value = 0;
  while (!accept("}")) {
    if (peek().kind != TokenKind::Identifier) fail("expected enumerator");
    std::string name = next().text;
    if (accept("=")) {
      auto e = parse_ternary();
      auto v = const_eval(e);
      if (!v) fail("enumerator value is not a constant");
      value = *v;
    }
    s.enumerators.push_back(Enumerator{name, value});
    enum_values_[name] = value;
    ++value;
    if (!accept(",")) {
      expect("}");
      break;
    }
  }
}

Parser::Declarator Parser::parse_declarator(bool allow_abstract) {
  Declarator d;
  while (accept("*")) {
    ++d.pointer_depth;
    while (peek().is("const") || peek().is("volatile") || peek().is("restrict") || peek().is("__restrict")) next();
  }
  if (peek().is("(")) fail("unsupported declarator (function pointer or parenthesized declarator)");
  if (peek().kind == TokenKind::Identifier && !is_c_keyword(peek().text)) {
    d.name = next().text;
  } else if (!allow_abstract) {
    fail("expected identifier in declarator");
  }
  while (true) {
    if (accept("[")) {
      if (accept("]")) {
        d.dims.push_back(std::nullopt);
        continue;
      }
      auto e = parse_ternary();
      d.dims.push_back(const_eval(e));
      expect("]");
    } else if (peek().is("(") && !d.is_function && !d.name.empty()) {
      next();
      d.is_function = true;
      d.params = parse_params();
    } else {
      break;
    }
  }
  d.end = prev_end();
  return d;
}

std::vector<Param> Parser::parse_params() {
  std::vector<Param> params;
  if (accept(")")) return params;
  if (peek().is("void") && peek(1).is(")")) {
    next();
    next();
    return params;
  }
  while (true) {
    if (peek().is("...")) fail("variadic functions are not supported");
    Specs s = parse_decl_specifiers();
    Declarator d = parse_declarator(true);
    CType t = make_type(s, d);
    if (!t.array_dims.empty()) {  // array parameters decay to pointers
      t.array_dims.clear();
      t.pointer_depth += 1;
    }
    params.push_back(Param{t, d.name});
    if (accept(")")) break;
    expect(",");
  }
  return params;
}

CType Parser::make_type(const Specs& s, const Declarator& d) const {
  CType t = s.type;
  t.pointer_depth = d.pointer_depth;
  t.array_dims = d.dims;
  return t;
}

CType Parser::parse_type_name() {
  Specs s = parse_decl_specifiers();
  Declarator d = parse_declarator(true);
  if (!d.name.empty()) fail("unexpected identifier in type name");
  return make_type(s, d);
}

ExprPtr Parser::parse_initializer() {
  if (peek().is("{")) {
    auto open = next();
    auto list = make_expr(ExprKind::InitList, "{}", Span{open.offset, 0});
    while (!accept("}")) {
      if (peek().is(".") || peek().is("[")) fail("designated initializers are not supported");
      list->kids.push_back(parse_initializer());
      if (!accept(",")) {
        expect("}");
        break;
      }
    }
    list->span.end = prev_end();
    return list;
  }
  return parse_assign();
}

std::vector<Declaration> Parser::parse_translation_unit() {
  std::vector<Declaration> decls;
  while (!at_end()) {
    if (accept(";")) continue;
    std::set<std::string> refs;
    refs_ = &refs;
    const Token& first = peek();
    std::size_t start = first.offset;
    if (first.is("asm") || first.is("__asm__")) fail("inline assembly is not supported");
    Specs specs = parse_decl_specifiers();

    Declaration decl;
    decl.span.begin = start;
    std::vector<std::string> own;
    if (!specs.tag.empty()) own.push_back(specs.tag);
    for (const auto& en : specs.enumerators) own.push_back(en.name);
    decl.enumerators = specs.enumerators;
    decl.fields = specs.fields;

    if (specs.is_typedef) {
      decl.kind = DeclKind::TypeDef;
      do {
        Declarator d = parse_declarator(false);
        if (d.is_function) fail("function typedefs are not supported");
        typedef_names_.insert(d.name);
        decl.aliases.push_back(VarDecl{make_type(specs, d), d.name, nullptr, Span{start, d.end}});
        if (decl.name.empty()) decl.name = d.name;
        own.push_back(d.name);
      } while (accept(","));
      expect(";");
    } else if (peek().is(";")) {
      next();
      if (specs.defines_enum) {
        decl.kind = DeclKind::EnumDef;
      } else if (specs.defines_aggregate) {
        decl.kind = DeclKind::StructOrUnionDef;
      } else {
        fail("declaration declares nothing");
      }
      decl.name = specs.tag.empty() ? (decl.enumerators.empty() ? "<anonymous>" : decl.enumerators.front().name)
                                    : specs.tag.substr(specs.tag.find(' ') + 1);
    } else {
      Declarator d = parse_declarator(false);
      if (d.is_function) {
        auto fn = std::make_shared<FunctionInfo>();
        fn->name = d.name;
        fn->return_type = make_type(specs, Declarator{"", d.pointer_depth, {}, false, {}, 0});
        fn->params = d.params;
        fn->is_static = specs.is_static;
        fn->header = Span{start, d.end};
        decl.name = d.name;
        own.push_back(d.name);
        if (peek().is("{")) {
          decl.kind = DeclKind::FunctionDef;
          push_scope();
          for (const auto& p : fn->params)
            if (!p.name.empty()) bind_local(p.name);
          fn->body = parse_block();
          pop_scope();
        } else {
          decl.kind = DeclKind::Prototype;
          expect(";");
        }
        decl.function = fn;
      } else {
        decl.kind = DeclKind::GlobalVarDecl;
        decl.name = d.name;
        while (true) {
          VarDecl v;
          v.type = make_type(specs, d);
          v.name = d.name;
          v.span.begin = start;
          if (accept("=")) v.init = parse_initializer();
          v.span.end = prev_end();
          own.push_back(d.name);
          decl.globals.push_back(std::move(v));
          if (!accept(",")) break;
          d = parse_declarator(false);
          if (d.is_function) fail("mixed function and variable declarators are not supported");
        }
        expect(";");
      }
    }
    decl.span.end = prev_end();
    decl.text = std::string(text_.substr(decl.span.begin, decl.span.end - decl.span.begin));
    decl.defined_names = own;
    for (const auto& n : own) {
      if (decl.kind == DeclKind::FunctionDef && n == decl.name) continue;  // recursion keeps the self reference
      refs.erase(n);
    }
    decl.referenced_names = std::move(refs);
    refs_ = nullptr;
    decl.id = decls.size();
    decls.push_back(std::move(decl));
  }
  return decls;
}

// ---------------------------------------------------------------------------
// Statements

StmtPtr Parser::parse_block() {
  const Token& open = expect("{");
  auto blk = std::make_shared<Stmt>();
  blk->kind = StmtKind::Block;
  blk->span.begin = open.offset;
  push_scope();
  while (!accept("}")) {
    if (at_end()) fail("unterminated block");
    blk->children.push_back(parse_statement());
  }
  pop_scope();
  blk->span.end = prev_end();
  return blk;
}

StmtPtr Parser::parse_decl_statement() {
  auto st = std::make_shared<Stmt>();
  st->kind = StmtKind::Decl;
  st->span.begin = peek().offset;
  Specs specs = parse_decl_specifiers();
  if (specs.is_typedef) fail("local typedefs are not supported");
  if (!accept(";")) {
    do {
      Declarator d = parse_declarator(false);
      if (d.is_function) fail("local function declarations are not supported");
      VarDecl v;
      v.type = make_type(specs, d);
      v.name = d.name;
      v.span.begin = st->span.begin;
      bind_local(d.name);
      if (accept("=")) v.init = parse_initializer();
      v.span.end = prev_end();
      st->decls.push_back(std::move(v));
    } while (accept(","));
    expect(";");
  }
  st->span.end = prev_end();
  return st;
}

StmtPtr Parser::parse_statement() {
  const Token& t = peek();
  if (t.is("{")) return parse_block();
  auto st = std::make_shared<Stmt>();
  st->span.begin = t.offset;
  auto finish = [&]() -> StmtPtr {
    st->span.end = prev_end();
    return st;
  };
  if (t.kind == TokenKind::Identifier) {
    const std::string& w = t.text;
    if (w == "if") {
      next();
      st->kind = StmtKind::If;
      expect("(");
      st->cond = parse_expr();
      expect(")");
      st->children.push_back(parse_statement());
      if (accept("else")) st->children.push_back(parse_statement());
      return finish();
    }
    if (w == "while") {
      next();
      st->kind = StmtKind::While;
      expect("(");
      st->cond = parse_expr();
      expect(")");
      st->children.push_back(parse_statement());
      return finish();
    }
    if (w == "do") {
      next();
      st->kind = StmtKind::Do;
      st->children.push_back(parse_statement());
      expect("while");
      expect("(");
      st->cond = parse_expr();
      expect(")");
      expect(";");
      return finish();
    }
    if (w == "for") {
      next();
      st->kind = StmtKind::For;
      expect("(");
      push_scope();
      if (!accept(";")) {
        if (is_type_start(peek())) {
          st->init = parse_decl_statement();
        } else {
          auto init = std::make_shared<Stmt>();
          init->kind = StmtKind::Expr;
          init->span.begin = peek().offset;
          init->cond = parse_expr();
          expect(";");
          init->span.end = prev_end();
          st->init = init;
        }
      }
      if (!peek().is(";")) st->cond = parse_expr();
      expect(";");
      if (!peek().is(")")) st->step = parse_expr();
      expect(")");
      st->children.push_back(parse_statement());
      pop_scope();
      return finish();
    }
    if (w == "switch") {
      next();
      st->kind = StmtKind::Switch;
      expect("(");
      st->cond = parse_expr();
      expect(")");
      st->children.push_back(parse_statement());
      return finish();
    }
    if (w == "case") {
      next();
      st->kind = StmtKind::Case;
      st->cond = parse_ternary();
      expect(":");
      return finish();
    }
    if (w == "default") {
      next();
      st->kind = StmtKind::Default;
      expect(":");
      return finish();
    }
    if (w == "break" || w == "continue") {
      next();
      st->kind = w == "break" ? StmtKind::Break : StmtKind::Continue;
      expect(";");
      return finish();
    }
    if (w == "return") {
      next();
      st->kind = StmtKind::Return;
      if (!peek().is(";")) st->cond = parse_expr();
      expect(";");
      return finish();
    }
    if (w == "goto") fail("goto is not supported");
    if (w == "asm" || w == "__asm__") fail("inline assembly is not supported");
    if (!is_c_keyword(w) && peek(1).is(":")) fail("labels are not supported");
    if (is_type_start(t)) return parse_decl_statement();
  }
  if (accept(";")) {
    st->kind = StmtKind::Empty;
    return finish();
  }
  st->kind = StmtKind::Expr;
  st->cond = parse_expr();
  expect(";");
  return finish();
}

// ---------------------------------------------------------------------------
// Expressions

ExprPtr Parser::parse_expr() {
  auto lhs = parse_assign();
  if (acsl_ || !peek().is(",")) return lhs;
  auto comma = make_expr(ExprKind::Comma, ",", lhs->span);
  comma->kids.push_back(lhs);
  while (accept(",")) comma->kids.push_back(parse_assign());
  comma->span.end = prev_end();
  return comma;
}

ExprPtr Parser::parse_assign() {
  auto lhs = parse_ternary();
  static constexpr std::array<std::string_view, 11> ops = {"=",  "+=", "-=", "*=",  "/=", "%=",
                                                           "&=", "|=", "^=", "<<=", ">>="};
  for (auto op : ops) {
    if (peek().is(op)) {
      next();
      auto rhs = parse_assign();
      auto e = make_expr(ExprKind::Assign, std::string(op), Span{lhs->span.begin, rhs->span.end});
      e->kids = {lhs, rhs};
      return e;
    }
  }
  return lhs;
}

ExprPtr Parser::parse_ternary() {
  auto c = parse_binary(0);
  if (!peek().is("?")) return c;
  next();
  auto a = parse_expr();
  expect(":");
  auto b = parse_ternary();
  auto e = make_expr(ExprKind::Ternary, "?:", Span{c->span.begin, b->span.end});
  e->kids = {c, a, b};
  return e;
}

ExprPtr Parser::parse_binary(int level) {
  const auto& levels = acsl_ ? acsl_levels() : c_levels();
  if (level >= static_cast<int>(levels.size())) return parse_unary();
  // In ACSL the relational chain sits between bitwise-and and shifts.
  auto operand = [&]() -> ExprPtr {
    if (acsl_ && level == 4) return parse_pred_relational_chain();
    return parse_binary(level + 1);
  };
  auto lhs = operand();
  while (true) {
    bool matched = false;
    for (auto op : levels[static_cast<std::size_t>(level)]) {
      if (peek().is(op)) {
        next();
        auto rhs = operand();
        auto e = make_expr(ExprKind::Binary, std::string(op), Span{lhs->span.begin, rhs->span.end});
        e->kids = {lhs, rhs};
        lhs = e;
        matched = true;
        break;
      }
    }
    if (!matched) return lhs;
  }
}

ExprPtr Parser::parse_pred_relational_chain() {
  auto first = parse_binary(5);
  if (!is_relational(peek().text) || peek().kind != TokenKind::Punct) return first;
  ExprPtr result;
  ExprPtr lhs = first;
  while (peek().kind == TokenKind::Punct && is_relational(peek().text)) {
    std::string op = next().text;
    auto rhs = parse_binary(5);
    auto cmp = make_expr(ExprKind::Binary, op, Span{lhs->span.begin, rhs->span.end});
    cmp->kids = {lhs, rhs};
    if (!result) {
      result = cmp;
    } else {
      auto conj = make_expr(ExprKind::Binary, "&&", Span{first->span.begin, rhs->span.end});
      conj->kids = {result, cmp};
      result = conj;
    }
    lhs = rhs;
  }
  return result;
}

ExprPtr Parser::parse_unary() {
  const Token& t = peek();
  if (t.kind == TokenKind::Punct) {
    if (t.text == "++" || t.text == "--") {
      auto op = next();
      auto operand = parse_unary();
      auto e = make_expr(ExprKind::PreIncDec, op.text, Span{op.offset, operand->span.end});
      e->kids = {operand};
      return e;
    }
    if (t.text == "-" || t.text == "+" || t.text == "!" || t.text == "~" || t.text == "*" || t.text == "&") {
      auto op = next();
      auto operand = parse_unary();
      auto e = make_expr(ExprKind::Unary, op.text, Span{op.offset, operand->span.end});
      e->kids = {operand};
      return e;
    }
    if (t.text == "(" && is_type_start(peek(1))) {
      auto open = next();
      CType type = parse_type_name();
      expect(")");
      if (peek().is("{")) fail("compound literals are not supported");
      auto operand = parse_unary();
      auto e = make_expr(ExprKind::Cast, "cast", Span{open.offset, operand->span.end});
      e->type = type;
      e->kids = {operand};
      return e;
    }
  }
  if (t.is("sizeof")) {
    auto kw = next();
    if (peek().is("(") && is_type_start(peek(1))) {
      next();
      CType type = parse_type_name();
      expect(")");
      auto e = make_expr(ExprKind::SizeofType, "sizeof", Span{kw.offset, prev_end()});
      e->type = type;
      return e;
    }
    auto operand = parse_unary();
    auto e = make_expr(ExprKind::SizeofExpr, "sizeof", Span{kw.offset, operand->span.end});
    e->kids = {operand};
    return e;
  }
  return parse_postfix();
}

ExprPtr Parser::parse_postfix() {
  auto e = parse_primary();
  while (true) {
    if (peek().is("[")) {
      next();
      auto idx = acsl_ ? parse_pred() : parse_expr();
      if (acsl_ && accept("..")) {
        auto hi = parse_pred();
        auto r = make_expr(ExprKind::Range, "..", Span{idx->span.begin, hi->span.end});
        r->kids = {idx, hi};
        idx = r;
      }
      expect("]");
      auto ix = make_expr(ExprKind::Index, "[]", Span{e->span.begin, prev_end()});
      ix->kids = {e, idx};
      e = ix;
    } else if (peek().is("(")) {
      if (e->kind != ExprKind::Ident) fail("calls through expressions are not supported");
      next();
      auto call = make_expr(ExprKind::Call, e->op, Span{e->span.begin, 0});
      call->kids.push_back(e);
      if (!accept(")")) {
        while (true) {
          call->kids.push_back(acsl_ ? parse_pred() : parse_assign());
          if (accept(")")) break;
          expect(",");
        }
      }
      call->span.end = prev_end();
      e = call;
    } else if (peek().is(".") || peek().is("->")) {
      std::string op = next().text;
      if (peek().kind != TokenKind::Identifier) fail("expected member name");
      std::string field = next().text;
      auto m = make_expr(ExprKind::Member, op, Span{e->span.begin, prev_end()});
      m->kids = {e};
      m->binders.push_back(Binder{"", field});
      e = m;
    } else if (!acsl_ && (peek().is("++") || peek().is("--"))) {
      std::string op = next().text;
      auto p = make_expr(ExprKind::PostIncDec, op, Span{e->span.begin, prev_end()});
      p->kids = {e};
      e = p;
    } else {
      return e;
    }
  }
}

ExprPtr Parser::parse_primary() {
  const Token& t = peek();
  switch (t.kind) {
    case TokenKind::IntLiteral: {
      auto tok = next();
      auto e = make_expr(ExprKind::IntLit, tok.text, Span{tok.offset, tok.end()});
      e->value = int_literal_value(tok);
      return e;
    }
    case TokenKind::CharLiteral: {
      auto tok = next();
      auto e = make_expr(ExprKind::CharLit, tok.text, Span{tok.offset, tok.end()});
      e->value = char_literal_value(tok);
      return e;
    }
    case TokenKind::FloatLiteral: {
      auto tok = next();
      return make_expr(ExprKind::FloatLit, tok.text, Span{tok.offset, tok.end()});
    }
    case TokenKind::StringLiteral: {
      auto tok = next();
      auto e = make_expr(ExprKind::StrLit, tok.text, Span{tok.offset, tok.end()});
      while (peek().kind == TokenKind::StringLiteral) {
        auto more = next();
        e->op += more.text;
        e->span.end = more.end();
      }
      return e;
    }
    case TokenKind::Identifier: {
      if (is_c_keyword(t.text) && !acsl_) fail("unexpected keyword");
      auto tok = next();
      Span sp{tok.offset, tok.end()};
      if (acsl_ && tok.text.starts_with("\\")) {
        const std::string& w = tok.text;
        if (w == "\\result") return make_expr(ExprKind::Result, w, sp);
        if (w == "\\true" || w == "\\false") {
          auto e = make_expr(ExprKind::BoolLit, w, sp);
          e->value = w == "\\true" ? 1 : 0;
          return e;
        }
        if (w == "\\null") {
          auto e = make_expr(ExprKind::IntLit, "0", sp);
          return e;
        }
        if (w == "\\old" || w == "\\at") {
          expect("(");
          auto inner = parse_pred();
          if (w == "\\at") {
            expect(",");
            if (peek().kind != TokenKind::Identifier) fail("expected label in \\at");
            std::string label = next().text;
            if (label != "Pre" && label != "Old") fail("only \\at(e, Pre) is supported");
          }
          expect(")");
          auto e = make_expr(ExprKind::Old, "\\old", Span{sp.begin, prev_end()});
          e->kids = {inner};
          return e;
        }
        if (w == "\\valid" || w == "\\valid_read") {
          expect("(");
          auto inner = parse_pred();
          expect(")");
          auto e = make_expr(ExprKind::Valid, w, Span{sp.begin, prev_end()});
          e->kids = {inner};
          return e;
        }
        if (w == "\\forall" || w == "\\exists") fail("quantifier must be parenthesized here");
        return make_expr(ExprKind::Ident, w, sp);
      }
      if (!acsl_) note_ref(tok.text);
      return make_expr(ExprKind::Ident, tok.text, sp);
    }
    case TokenKind::Punct:
      if (t.is("(")) {
        auto open = next();
        ExprPtr inner = acsl_ ? parse_pred() : parse_expr();
        if (acsl_ && accept("..")) {
          auto hi = parse_pred();
          auto r = make_expr(ExprKind::Range, "..", Span{inner->span.begin, hi->span.end});
          r->kids = {inner, hi};
          inner = r;
        }
        expect(")");
        // Keep the parenthesized extent so mutations can rewrite it as a unit.
        auto copy = std::make_shared<Expr>(*inner);
        copy->span = Span{open.offset, prev_end()};
        return copy;
      }
      break;
    case TokenKind::End:
      break;
  }
  fail("expected expression");
}

// ---------------------------------------------------------------------------
// ACSL predicates

ExprPtr Parser::parse_pred() {
  if (peek().is("\\forall") || peek().is("\\exists")) {
    auto kw = next();
    auto q = make_expr(ExprKind::Quant, kw.text, Span{kw.offset, 0});
    do {
      // binder type words, then names
      std::vector<std::string> words;
      while (peek().kind == TokenKind::Identifier && peek(1).kind == TokenKind::Identifier) words.push_back(next().text);
      if (peek().kind != TokenKind::Identifier) fail("expected binder name");
      if (words.empty()) fail("expected binder type");
      std::string type = normalize_base(words);
      std::string name = next().text;
      q->binders.push_back(Binder{type, name});
      while (peek().is(",") && peek(1).kind == TokenKind::Identifier &&
             (peek(2).is(",") || peek(2).is(";"))) {
        next();
        q->binders.push_back(Binder{type, next().text});
      }
    } while (accept(","));
    expect(";");
    q->kids.push_back(parse_pred());
    q->span.end = prev_end();
    return q;
  }
  return parse_pred_iff();
}

ExprPtr Parser::parse_pred_iff() {
  auto lhs = parse_pred_implies();
  while (peek().is("<==>")) {
    next();
    auto rhs = (peek().is("\\forall") || peek().is("\\exists")) ? parse_pred() : parse_pred_implies();
    auto e = make_expr(ExprKind::Binary, "<==>", Span{lhs->span.begin, rhs->span.end});
    e->kids = {lhs, rhs};
    lhs = e;
  }
  return lhs;
}

ExprPtr Parser::parse_pred_implies() {
  auto lhs = parse_pred_ternary();
  if (!peek().is("==>")) return lhs;
  next();
  auto rhs = (peek().is("\\forall") || peek().is("\\exists")) ? parse_pred() : parse_pred_implies();
  auto e = make_expr(ExprKind::Binary, "==>", Span{lhs->span.begin, rhs->span.end});
  e->kids = {lhs, rhs};
  return e;
}

ExprPtr Parser::parse_pred_ternary() {
  auto c = parse_binary(0);
  if (!peek().is("?")) return c;
  next();
  auto a = parse_pred();
  expect(":");
  auto b = parse_pred_ternary();
  auto e = make_expr(ExprKind::Ternary, "?:", Span{c->span.begin, b->span.end});
  e->kids = {c, a, b};
  return e;
}

ExprPtr Parser::parse_full_predicate() {
  auto e = parse_pred();
  if (!at_end()) fail("trailing tokens in predicate");
  return e;
}

std::optional<std::int64_t> Parser::const_eval(const ExprPtr& e) const {
  if (!e) return std::nullopt;
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::CharLit:
      return e->value;
    case ExprKind::Ident: {
      auto it = enum_values_.find(e->op);
      if (it == enum_values_.end()) return std::nullopt;
      return it->second;
    }
    case ExprKind::Unary: {
      auto v = const_eval(e->kids[0]);
      if (!v) return std::nullopt;
      if (e->op == "-") return -*v;
      if (e->op == "+") return *v;
      if (e->op == "~") return ~*v;
      if (e->op == "!") return *v == 0 ? 1 : 0;
      return std::nullopt;
    }
    case ExprKind::Binary: {
      auto a = const_eval(e->kids[0]);
      auto b = const_eval(e->kids[1]);
      if (!a || !b) return std::nullopt;
      const std::string& op = e->op;
      if (op == "+") return *a + *b;
      if (op == "-") return *a - *b;
      if (op == "*") return *a * *b;
      if (op == "/") return *b == 0 ? std::nullopt : std::optional<std::int64_t>(*a / *b);
      if (op == "%") return *b == 0 ? std::nullopt : std::optional<std::int64_t>(*a % *b);
      if (op == "<<") return *a << *b;
      if (op == ">>") return *a >> *b;
      if (op == "|") return *a | *b;
      if (op == "&") return *a & *b;
      if (op == "^") return *a ^ *b;
      return std::nullopt;
    }
    case ExprKind::SizeofType: {
      const CType& t = e->type;
      if (t.pointer_depth > 0) return 8;
      if (t.base == "char" || t.base == "unsigned char" || t.base == "signed char" || t.base == "uint8_t" ||
          t.base == "int8_t" || t.base == "_Bool" || t.base == "bool")
        return 1;
      if (t.base == "short" || t.base == "unsigned short" || t.base == "int16_t" || t.base == "uint16_t") return 2;
      if (t.base == "int" || t.base == "unsigned int" || t.base == "int32_t" || t.base == "uint32_t") return 4;
      return 8;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace detail
}  // namespace specsyn
