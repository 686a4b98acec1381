#include "specsyn/mutation.hpp"

#include <algorithm>
#include <cctype>
#include <json.hpp>
#include <map>
#include <set>

#include "specsyn/error.hpp"
#include "specsyn/io.hpp"

namespace specsyn {

using nlohmann::json;

namespace {

constexpr MutationCategory kCategories[] = {
    MutationCategory::OperatorSwap,       MutationCategory::OperandReplace,   MutationCategory::ConstantPerturb,
    MutationCategory::StatementDelete,    MutationCategory::StatementDuplicate, MutationCategory::ControlFlowAlter,
    MutationCategory::ReturnAlter,        MutationCategory::DeclarationAlter,
};

const std::set<std::string> kTransforms = {
    "binary_op",   "assign_op",     "incdec",         "ident_replace",  "operand_const",   "literal_delta",
    "literal_set", "literal_negate", "stmt_delete",   "stmt_duplicate", "cond_negate",     "cond_const",
    "else_delete", "break_to_continue", "return_const", "return_delta", "return_negate",   "decl_init_const",
    "decl_init_delta", "decl_unsigned",
};

bool is_decimal(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_scalar(const CType& t) {
  static const std::set<std::string> ints = {"char", "signed char", "unsigned char", "short", "unsigned short", "int",
                                             "unsigned int", "long", "unsigned long", "long long",
                                             "unsigned long long", "size_t", "int8_t", "uint8_t", "int16_t",
                                             "uint16_t", "int32_t", "uint32_t", "int64_t", "uint64_t", "_Bool"};
  return t.pointer_depth == 0 && t.array_dims.empty() && ints.count(t.base);
}

/// Collects the sites of one function body.
class SiteWalker {
 public:
  SiteWalker(const std::string& code, const std::vector<MutationOperator>& catalog, const FunctionInfo& fn,
             std::vector<std::vector<MutationSite>>& per_op)
      : code_(code), catalog_(catalog), fn_(fn), per_op_(per_op) {
    for (const auto& p : fn.params)
      if (is_scalar(p.type)) params_.push_back({p.name, p.type.base});
    if (fn.body && fn.body->kind == StmtKind::Block)
      for (const auto& s : fn.body->children)
        if (s->kind == StmtKind::Decl)
          for (const auto& d : s->decls)
            if (is_scalar(d.type)) top_locals_.push_back({d.name, d.type.base, s->span.end});
    collect_types(fn.body);
  }

  void run() { stmt(fn_.body, 0); }

 private:
  struct Local {
    std::string name;
    std::string base;
    std::size_t declared_end = 0;
  };

  std::string text(Span s) const { return code_.substr(s.begin, s.end - s.begin); }

  void emit(std::size_t op, Span span, std::string replacement) {
    if (text(span) == replacement) return;
    MutationSite m;
    m.op_index = op;
    m.site = fn_.name + ":" + std::to_string(span.begin);
    m.span = span;
    m.replacement = std::move(replacement);
    per_op_[op].push_back(std::move(m));
  }

  template <typename F>
  void each(const std::string& transform, F&& f) {
    for (std::size_t i = 0; i < catalog_.size(); ++i)
      if (catalog_[i].transform == transform) f(i, catalog_[i]);
  }

  void collect_types(const StmtPtr& s) {
    if (!s) return;
    for (const auto& d : s->decls) var_types_[d.name] = d.type;
    collect_types(s->init);
    for (const auto& c : s->children) collect_types(c);
  }

  bool scalar_var(const std::string& name) const {
    auto it = var_types_.find(name);
    if (it != var_types_.end()) return is_scalar(it->second);
    for (const auto& p : fn_.params)
      if (p.name == name) return is_scalar(p.type);
    return false;
  }

  std::string base_of(const std::string& name) const {
    auto it = var_types_.find(name);
    if (it != var_types_.end()) return it->second.base;
    for (const auto& p : fn_.params)
      if (p.name == name) return p.type.base;
    return "";
  }

  /// Offset of operator `op` in the gap between two operands.
  std::optional<std::size_t> op_between(const Expr& e, const std::string& op) const {
    std::size_t lo = e.kids[0]->span.end, hi = e.kids[1]->span.begin;
    if (hi < lo) return std::nullopt;
    std::size_t p = code_.find(op, lo);
    if (p == std::string::npos || p + op.size() > hi) return std::nullopt;
    return p;
  }

  void expr(const ExprPtr& ep, bool lvalue) {
    if (!ep) return;
    const Expr& e = *ep;
    switch (e.kind) {
      case ExprKind::Binary:
        each("binary_op", [&](std::size_t i, const MutationOperator& m) {
          if (e.op != m.from) return;
          if (auto p = op_between(e, e.op)) emit(i, Span{*p, *p + e.op.size()}, m.to);
        });
        break;
      case ExprKind::Assign:
        each("assign_op", [&](std::size_t i, const MutationOperator& m) {
          if (e.op != m.from) return;
          if (auto p = op_between(e, e.op)) emit(i, Span{*p, *p + e.op.size()}, m.to);
        });
        break;
      case ExprKind::PreIncDec:
      case ExprKind::PostIncDec:
        each("incdec", [&](std::size_t i, const MutationOperator& m) {
          if (e.op != m.from) return;
          std::size_t p = e.kind == ExprKind::PreIncDec ? e.span.begin : e.span.end - 2;
          if (code_.compare(p, 2, e.op) == 0) emit(i, Span{p, p + 2}, m.to);
        });
        break;
      case ExprKind::IntLit: {
        std::string lit = text(e.span);
        if (!is_decimal(lit)) break;
        each("literal_delta", [&](std::size_t i, const MutationOperator& m) {
          if (e.value + m.value >= 0) emit(i, e.span, std::to_string(e.value + m.value));
        });
        each("literal_set", [&](std::size_t i, const MutationOperator& m) {
          if (e.value != m.value && m.value >= 0) emit(i, e.span, std::to_string(m.value));
        });
        each("literal_negate", [&](std::size_t i, const MutationOperator&) {
          if (e.value != 0) emit(i, e.span, "(-" + lit + ")");
        });
        break;
      }
      case ExprKind::Ident:
        if (!scalar_var(e.op)) break;
        each("ident_replace", [&](std::size_t i, const MutationOperator&) {
          std::string base = base_of(e.op);
          std::vector<std::string> alts;
          for (const auto& p : params_)
            if (p.name != e.op && p.base == base) alts.push_back(p.name);
          for (const auto& l : top_locals_)
            if (l.name != e.op && l.base == base && l.declared_end <= e.span.begin) alts.push_back(l.name);
          for (const auto& a : alts) emit(i, e.span, a);
        });
        if (!lvalue)
          each("operand_const", [&](std::size_t i, const MutationOperator& m) { emit(i, e.span, std::to_string(m.value)); });
        break;
      default: break;
    }
    bool kid_lvalue0 = e.kind == ExprKind::Assign || e.kind == ExprKind::PreIncDec || e.kind == ExprKind::PostIncDec ||
                       (e.kind == ExprKind::Unary && e.op == "&");
    for (std::size_t k = 0; k < e.kids.size(); ++k) {
      if (e.kind == ExprKind::Call && k == 0) continue;
      expr(e.kids[k], k == 0 && kid_lvalue0);
    }
  }

  void stmt(const StmtPtr& sp, int loop_depth) {
    if (!sp) return;
    const Stmt& s = *sp;
    switch (s.kind) {
      case StmtKind::Expr:
        each("stmt_delete", [&](std::size_t i, const MutationOperator& m) {
          if (m.target == "expr") emit(i, s.span, ";");
        });
        each("stmt_duplicate", [&](std::size_t i, const MutationOperator&) {
          std::string t = text(s.span);
          emit(i, s.span, "{ " + t + " " + t + " }");
        });
        break;
      case StmtKind::Break:
        each("stmt_delete", [&](std::size_t i, const MutationOperator& m) {
          if (m.target == "break") emit(i, s.span, ";");
        });
        if (loop_depth > 0)
          each("break_to_continue", [&](std::size_t i, const MutationOperator&) { emit(i, s.span, "continue;"); });
        break;
      case StmtKind::Continue:
        each("stmt_delete", [&](std::size_t i, const MutationOperator& m) {
          if (m.target == "continue") emit(i, s.span, ";");
        });
        break;
      case StmtKind::If:
        if (s.cond) {
          each("cond_negate", [&](std::size_t i, const MutationOperator& m) {
            if (m.target == "if") emit(i, s.cond->span, "!(" + text(s.cond->span) + ")");
          });
          each("cond_const", [&](std::size_t i, const MutationOperator& m) {
            emit(i, s.cond->span, std::to_string(m.value));
          });
        }
        if (s.children.size() == 2 && s.children[0] && s.children[1])
          each("else_delete", [&](std::size_t i, const MutationOperator&) {
            emit(i, Span{s.children[0]->span.end, s.children[1]->span.end}, "");
          });
        break;
      case StmtKind::For:
      case StmtKind::While:
      case StmtKind::Do:
        if (s.cond)
          each("cond_negate", [&](std::size_t i, const MutationOperator& m) {
            if (m.target == "loop") emit(i, s.cond->span, "!(" + text(s.cond->span) + ")");
          });
        break;
      case StmtKind::Return:
        if (s.cond && !fn_.return_type.is_void()) {
          std::string v = text(s.cond->span);
          each("return_const", [&](std::size_t i, const MutationOperator& m) {
            emit(i, s.cond->span, std::to_string(m.value));
          });
          each("return_delta", [&](std::size_t i, const MutationOperator& m) {
            emit(i, s.cond->span, "(" + v + ") + " + std::to_string(m.value));
          });
          each("return_negate", [&](std::size_t i, const MutationOperator&) { emit(i, s.cond->span, "-(" + v + ")"); });
        }
        break;
      case StmtKind::Decl: {
        for (const auto& d : s.decls) {
          if (!d.init || !is_scalar(d.type)) continue;
          std::string v = text(d.init->span);
          each("decl_init_const", [&](std::size_t i, const MutationOperator& m) {
            emit(i, d.init->span, std::to_string(m.value));
          });
          each("decl_init_delta", [&](std::size_t i, const MutationOperator& m) {
            emit(i, d.init->span, "(" + v + ") + " + std::to_string(m.value));
          });
        }
        if (!s.decls.empty() && s.decls[0].type.base == "int" && is_scalar(s.decls[0].type) &&
            code_.compare(s.span.begin, 4, "int ") == 0)
          each("decl_unsigned", [&](std::size_t i, const MutationOperator&) {
            emit(i, Span{s.span.begin, s.span.begin + 3}, "unsigned int");
          });
        break;
      }
      default: break;
    }
    // Expressions in source order: init, condition, step, then declarators.
    if (s.init) stmt(s.init, loop_depth);
    for (const auto& d : s.decls) expr(d.init, false);
    if (s.kind != StmtKind::Case) expr(s.cond, false);
    expr(s.step, false);
    bool loop = s.kind == StmtKind::For || s.kind == StmtKind::While || s.kind == StmtKind::Do;
    for (const auto& c : s.children) stmt(c, loop_depth + (loop ? 1 : 0));
  }

  const std::string& code_;
  const std::vector<MutationOperator>& catalog_;
  const FunctionInfo& fn_;
  std::vector<std::vector<MutationSite>>& per_op_;
  std::vector<Local> params_;
  std::vector<Local> top_locals_;
  std::map<std::string, CType> var_types_;
};

}  // namespace

std::string_view to_string(MutationCategory c) {
  switch (c) {
    case MutationCategory::OperatorSwap: return "OperatorSwap";
    case MutationCategory::OperandReplace: return "OperandReplace";
    case MutationCategory::ConstantPerturb: return "ConstantPerturb";
    case MutationCategory::StatementDelete: return "StatementDelete";
    case MutationCategory::StatementDuplicate: return "StatementDuplicate";
    case MutationCategory::ControlFlowAlter: return "ControlFlowAlter";
    case MutationCategory::ReturnAlter: return "ReturnAlter";
    case MutationCategory::DeclarationAlter: return "DeclarationAlter";
  }
  return "?";
}

MutationCategory mutation_category_from_string(std::string_view s) {
  for (MutationCategory c : kCategories)
    if (to_string(c) == s) return c;
  throw ConfigError("category", "unknown mutation category '" + std::string(s) + "'");
}

std::string_view to_string(Equivalence e) {
  switch (e) {
    case Equivalence::Unknown: return "Unknown";
    case Equivalence::NonEquivalent: return "NonEquivalent";
    case Equivalence::Equivalent: return "Equivalent";
    case Equivalence::CompileFailed: return "CompileFailed";
  }
  return "?";
}

std::vector<MutationOperator> load_catalog(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("catalog", path + ": " + e.what());
  }
  std::vector<MutationOperator> out;
  std::set<std::string> ids;
  for (const auto& o : j.at("operators")) {
    MutationOperator m;
    m.id = o.at("id").get<std::string>();
    m.category = mutation_category_from_string(o.at("category").get<std::string>());
    m.transform = o.at("transform").get<std::string>();
    if (!kTransforms.count(m.transform)) throw ConfigError("transform", "unknown transform '" + m.transform + "'");
    m.from = o.value("from", "");
    m.to = o.value("to", "");
    m.value = o.value("value", std::int64_t{0});
    m.target = o.value("target", "");
    m.description = o.value("description", "");
    if (!ids.insert(m.id).second) throw ConfigError("id", "duplicate operator id '" + m.id + "'");
    out.push_back(std::move(m));
  }
  return out;
}

const std::vector<MutationOperator>& default_catalog() {
  static const std::vector<MutationOperator> catalog = load_catalog(std::string(SPECSYN_DATA_DIR) + "/mutation_catalog.json");
  return catalog;
}

std::vector<MutationSite> applicable_sites(const std::string& code, const std::vector<MutationOperator>& catalog,
                                           const ParseContext& ctx) {
  std::vector<std::vector<MutationSite>> per_op(catalog.size());
  for (const auto& d : parse_declarations(code, ctx)) {
    if (d.kind != DeclKind::FunctionDef || !d.body()) continue;
    SiteWalker(code, catalog, *d.function, per_op).run();
  }
  std::vector<MutationSite> out;
  for (auto& v : per_op) {
    std::stable_sort(v.begin(), v.end(), [](const MutationSite& a, const MutationSite& b) {
      return a.span.begin < b.span.begin;
    });
    for (auto& s : v) out.push_back(std::move(s));
  }
  return out;
}

std::string apply_site(const std::string& code, const MutationSite& site) {
  std::string out = code.substr(0, site.span.begin);
  out += site.replacement;
  out += code.substr(site.span.end);
  return out;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  while (true) {
    std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

std::vector<Variant> generate_variants(const Segment& seg, std::size_t budget, std::uint64_t seed,
                                       const ParseContext& ctx, const std::vector<MutationOperator>& catalog) {
  auto sites = applicable_sites(seg.code, catalog, ctx);
  if (sites.empty()) throw NoApplicableSites("segment " + std::to_string(seg.id) + " has no mutable site");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

  std::vector<Variant> out;
  std::set<std::string> seen{seg.code};
  for (std::size_t idx : order) {
    if (out.size() >= budget) break;
    const MutationSite& s = sites[idx];
    std::string code = apply_site(seg.code, s);
    if (!seen.insert(code).second) continue;
    try {
      parse_declarations(code, ctx);
    } catch (const ParseError&) {
      continue;
    }
    Variant v;
    v.id = out.size();
    v.segment_id = seg.id;
    v.operator_id = catalog[s.op_index].id;
    v.category = catalog[s.op_index].category;
    v.site = s.site;
    v.code = std::move(code);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace specsyn
