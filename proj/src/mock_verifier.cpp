#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "specsyn/error.hpp"
#include "specsyn/verifier.hpp"

namespace specsyn {

namespace {

using Num = __int128;

std::string num_str(Num v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  while (u) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// Types and values

struct IntType {
  int bits = 32;
  bool is_signed = true;
  bool is_bool = false;
  bool logic = false;  // mathematical integer
};

const IntType kInt{32, true, false, false};
const IntType kLong{64, true, false, false};
const IntType kLogic{64, true, false, true};

Num type_min(const IntType& t) {
  if (t.logic) return -(Num(1) << 100);
  if (t.is_bool) return 0;
  return t.is_signed ? -(Num(1) << (t.bits - 1)) : 0;
}
Num type_max(const IntType& t) {
  if (t.logic) return Num(1) << 100;
  if (t.is_bool) return 1;
  return t.is_signed ? (Num(1) << (t.bits - 1)) - 1 : (Num(1) << t.bits) - 1;
}

Num wrap(Num v, const IntType& t) {
  if (t.logic) return v;
  if (t.is_bool) return v != 0 ? 1 : 0;
  Num mod = Num(1) << t.bits;
  Num r = v % mod;
  if (r < 0) r += mod;
  if (t.is_signed && r > type_max(t)) r -= mod;
  return r;
}

IntType promote(const IntType& t) {
  if (t.logic) return t;
  if (t.bits < 32 || t.is_bool) return kInt;
  return t;
}

IntType common_type(IntType a, IntType b) {
  a = promote(a);
  b = promote(b);
  if (a.logic || b.logic) return kLogic;
  if (a.bits == b.bits && a.is_signed == b.is_signed) return a;
  if (a.is_signed == b.is_signed) return a.bits >= b.bits ? a : b;
  const IntType& u = a.is_signed ? b : a;
  const IntType& s = a.is_signed ? a : b;
  if (u.bits >= s.bits) return u;
  return s;
}

struct Unsupported {
  std::string msg;
};
struct Prune {};
struct Fault {
  std::string msg;
};
struct TimedOut {};

struct VarType {
  IntType scalar;
  bool is_ptr = false;
  std::optional<Num> array_len;  // local or global array object
};

struct Val {
  bool ptr = false;
  Num v = 0;
  int obj = -1;  // -1 with ptr = null pointer
  Num off = 0;
  IntType t = kInt;   // scalar type, or element type for pointers
};

Val int_val(Num v, IntType t = kInt) {
  Val r;
  r.v = wrap(v, t);
  r.t = t;
  return r;
}

struct Object {
  std::vector<Num> cells;
  IntType elem;
};
using Memory = std::vector<Object>;

struct Slot {
  VarType type;
  Val val;
};
using Scope = std::map<std::string, Slot>;

// ---------------------------------------------------------------------------
// Program model

struct Program {
  AnnotatedProgram annotated;
  std::map<std::string, CType> typedefs;
  std::map<std::string, Num> enum_consts;
  std::map<std::string, const Declaration*> functions;  // definition preferred over prototype
  std::vector<const VarDecl*> globals;

  explicit Program(AnnotatedProgram ap) : annotated(std::move(ap)) {
    for (const auto& d : annotated.decls) {
      for (const auto& a : d.aliases) typedefs[a.name] = a.type;
      for (const auto& e : d.enumerators) enum_consts[e.name] = e.value;
      if (d.function) {
        auto it = functions.find(d.name);
        if (it == functions.end() || d.kind == DeclKind::FunctionDef) functions[d.name] = &d;
      }
      for (const auto& g : d.globals) globals.push_back(&g);
    }
  }

  IntType int_type(const std::string& base) const {
    static const std::map<std::string, IntType> table = {
        {"char", {8, true}},        {"signed char", {8, true}},       {"int8_t", {8, true}},
        {"unsigned char", {8, false}}, {"uint8_t", {8, false}},       {"short", {16, true}},
        {"int16_t", {16, true}},     {"unsigned short", {16, false}}, {"uint16_t", {16, false}},
        {"int", {32, true}},         {"int32_t", {32, true}},         {"unsigned int", {32, false}},
        {"uint32_t", {32, false}},   {"long", {64, true}},            {"long long", {64, true}},
        {"int64_t", {64, true}},     {"ssize_t", {64, true}},         {"ptrdiff_t", {64, true}},
        {"intptr_t", {64, true}},    {"unsigned long", {64, false}},  {"unsigned long long", {64, false}},
        {"uint64_t", {64, false}},   {"size_t", {64, false}},         {"uintptr_t", {64, false}},
        {"_Bool", {8, false, true}}, {"bool", {8, false, true}},      {"integer", {64, true, false, true}},
    };
    auto it = table.find(base);
    if (it != table.end()) return it->second;
    if (base.starts_with("enum ")) return kInt;
    throw Unsupported{"unsupported type '" + base + "'"};
  }

  /// Resolves typedef chains. Rejects aggregates, floating point and
  /// multi-level indirection.
  VarType resolve(const CType& t) const {
    std::string base = t.base;
    int depth = t.pointer_depth;
    std::vector<std::optional<std::int64_t>> dims = t.array_dims;
    for (int guard = 0; guard < 32; ++guard) {
      auto it = typedefs.find(base);
      if (it == typedefs.end()) break;
      base = it->second.base;
      depth += it->second.pointer_depth;
      dims.insert(dims.end(), it->second.array_dims.begin(), it->second.array_dims.end());
    }
    if (depth + static_cast<int>(dims.size()) > 1) throw Unsupported{"multi-level pointers and arrays are not modelled"};
    VarType out;
    if (base == "void") {
      if (depth == 0 && dims.empty()) throw Unsupported{"void value"};
      throw Unsupported{"void pointers are not modelled"};
    }
    out.scalar = int_type(base);
    out.is_ptr = depth == 1;
    if (dims.size() == 1) {
      if (!dims[0]) throw Unsupported{"array without size"};
      out.array_len = *dims[0];
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Clause bookkeeping

struct Annot {
  AttachedClause clause;
  ExprPtr expr;
  std::optional<std::size_t> checked;  // index into the verdict list
  bool invalid = false;                // statically ill-formed; never assumed
};

struct CheckState {
  std::vector<VerifierVerdict> verdicts;
  std::vector<bool> decided;   // Unproved or Invalid recorded
  std::vector<bool> timeout;

  void fail(std::size_t i, const std::string& diag) {
    if (decided[i]) return;
    decided[i] = true;
    verdicts[i].status = VerdictStatus::Unproved;
    verdicts[i].diagnostic = diag;
  }
  void invalid(std::size_t i, const std::string& diag) {
    if (decided[i] && verdicts[i].status == VerdictStatus::Invalid) return;
    decided[i] = true;
    verdicts[i].status = VerdictStatus::Invalid;
    verdicts[i].diagnostic = diag;
  }
};

// ---------------------------------------------------------------------------
// Machine

struct LogicCtx {
  const std::vector<Scope>* scopes = nullptr;
  const Scope* globals = nullptr;
  const Memory* mem = nullptr;
  const LogicCtx* old = nullptr;
  std::optional<Val> result;
  std::vector<std::pair<std::string, Num>>* binders = nullptr;
};

class Machine {
 public:
  Machine(const Program& prog, const MockDomain& dom) : prog_(prog), dom_(dom) {}

  // Call summaries
  std::map<std::string, std::vector<const Annot*>> ensures_of;
  std::map<std::string, std::vector<const Annot*>> checked_requires_of;
  std::map<const Stmt*, std::vector<const Annot*>> asserts_at;
  std::map<const Stmt*, std::vector<const Annot*>> invariants_at;
  CheckState* state = nullptr;
  std::string input_desc;

  // Per execution
  Memory mem;
  Scope globals;
  std::vector<Scope> scopes;
  LogicCtx entry;
  std::vector<Scope> entry_scopes;
  Memory entry_mem;
  std::vector<std::size_t> choices;
  std::vector<std::size_t> arity;
  std::size_t choice_pos = 0;
  std::size_t iterations = 0;

  // ----- values

  Val read_cell(const Val& p, const Memory& m, bool logic) const {
    if (p.obj < 0) fault_or_prune(logic, "null dereference");
    const Object& o = m.at(static_cast<std::size_t>(p.obj));
    if (p.off < 0 || p.off >= static_cast<Num>(o.cells.size())) fault_or_prune(logic, "out-of-bounds read");
    return int_val(o.cells[static_cast<std::size_t>(p.off)], o.elem);
  }

  [[noreturn]] void fault_or_prune(bool logic, const std::string& msg) const {
    if (logic) throw Fault{msg};
    throw Prune{};
  }

  static Num truth(const Val& v) { return v.ptr ? (v.obj >= 0 ? 1 : 0) : (v.v != 0 ? 1 : 0); }

  Val arith(const std::string& op, const Val& a, const Val& b, bool logic) const {
    if (a.ptr || b.ptr) return pointer_arith(op, a, b, logic);
    if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") {
      IntType t = logic ? kLogic : common_type(a.t, b.t);
      Num x = wrap(a.v, t), y = wrap(b.v, t);
      bool r = op == "==" ? x == y : op == "!=" ? x != y : op == "<" ? x < y : op == "<=" ? x <= y : op == ">" ? x > y : x >= y;
      return int_val(r ? 1 : 0);
    }
    bool shift = op == "<<" || op == ">>";
    IntType t = logic ? kLogic : shift ? promote(a.t) : common_type(a.t, b.t);
    Num x = wrap(a.v, t), y = shift ? b.v : wrap(b.v, t);
    Num r = 0;
    if (op == "+") r = x + y;
    else if (op == "-") r = x - y;
    else if (op == "*") r = x * y;
    else if (op == "/" || op == "%") {
      if (y == 0) fault_or_prune(logic, "division by zero");
      r = op == "/" ? x / y : x % y;
    } else if (shift) {
      int width = logic ? 100 : t.bits;
      if (y < 0 || y >= width) fault_or_prune(logic, "invalid shift");
      r = op == "<<" ? x * (Num(1) << static_cast<int>(y)) : (x >= 0 ? x >> static_cast<int>(y) : -((-x - 1) >> static_cast<int>(y)) - 1);
    } else if (op == "&") r = x & y;
    else if (op == "|") r = x | y;
    else if (op == "^") r = x ^ y;
    else throw Unsupported{"operator '" + op + "'"};
    return int_val(r, t);
  }

  Val pointer_arith(const std::string& op, const Val& a, const Val& b, bool logic) const {
    if (op == "+" || op == "-") {
      if (a.ptr && !b.ptr) {
        Val r = a;
        r.off = op == "+" ? a.off + b.v : a.off - b.v;
        return r;
      }
      if (!a.ptr && b.ptr && op == "+") {
        Val r = b;
        r.off = b.off + a.v;
        return r;
      }
      if (a.ptr && b.ptr && op == "-") {
        if (a.obj != b.obj) fault_or_prune(logic, "pointer difference across objects");
        return int_val(a.off - b.off, logic ? kLogic : kLong);
      }
    }
    if (op == "==" || op == "!=") {
      bool eq;
      if (a.ptr && b.ptr) eq = a.obj == b.obj && (a.obj < 0 || a.off == b.off);
      else eq = (a.ptr ? a.obj < 0 : a.v == 0) && (b.ptr ? b.obj < 0 : b.v == 0);
      return int_val((op == "==") == eq ? 1 : 0);
    }
    if (a.ptr && b.ptr && (op == "<" || op == "<=" || op == ">" || op == ">=")) {
      if (a.obj != b.obj) fault_or_prune(logic, "pointer comparison across objects");
      return arith(op, int_val(a.off, kLong), int_val(b.off, kLong), logic);
    }
    throw Unsupported{"pointer operator '" + op + "'"};
  }

  // ----- logic evaluation

  const Slot* lookup_in(const std::vector<Scope>* sc, const Scope* gl, const std::string& n) const {
    if (sc)
      for (auto it = sc->rbegin(); it != sc->rend(); ++it) {
        auto f = it->find(n);
        if (f != it->end()) return &f->second;
      }
    if (gl) {
      auto f = gl->find(n);
      if (f != gl->end()) return &f->second;
    }
    return nullptr;
  }

  Val leval(const Expr& e, const LogicCtx& c) const {
    switch (e.kind) {
      case ExprKind::IntLit:
      case ExprKind::CharLit:
      case ExprKind::BoolLit: return int_val(e.value, kLogic);
      case ExprKind::Ident: {
        if (c.binders)
          for (auto it = c.binders->rbegin(); it != c.binders->rend(); ++it)
            if (it->first == e.op) return int_val(it->second, kLogic);
        if (const Slot* s = lookup_in(c.scopes, c.globals, e.op)) return s->val;
        auto en = prog_.enum_consts.find(e.op);
        if (en != prog_.enum_consts.end()) return int_val(en->second, kLogic);
        throw Unsupported{"unknown identifier '" + e.op + "'"};
      }
      case ExprKind::Result:
        if (!c.result) throw Unsupported{"\\result outside a postcondition"};
        return *c.result;
      case ExprKind::Old: {
        if (!c.old) throw Unsupported{"\\old outside a postcondition"};
        LogicCtx o = *c.old;
        o.binders = c.binders;
        o.result = c.result;
        return leval(*e.kids[0], o);
      }
      case ExprKind::Unary: {
        if (e.op == "*") {
          Val p = leval(*e.kids[0], c);
          if (!p.ptr) throw Unsupported{"dereference of a non-pointer"};
          return read_cell(p, *c.mem, true);
        }
        if (e.op == "&") throw Unsupported{"address-of in a predicate"};
        Val v = leval(*e.kids[0], c);
        if (e.op == "!") return int_val(truth(v) ? 0 : 1, kLogic);
        if (v.ptr) throw Unsupported{"arithmetic on a pointer"};
        if (e.op == "-") return int_val(-v.v, kLogic);
        if (e.op == "+") return int_val(v.v, kLogic);
        if (e.op == "~") return int_val(~v.v, kLogic);
        throw Unsupported{"unary '" + e.op + "'"};
      }
      case ExprKind::Binary: {
        const std::string& op = e.op;
        if (op == "&&") return int_val(truth(leval(*e.kids[0], c)) && truth(leval(*e.kids[1], c)), kLogic);
        if (op == "||") return int_val(truth(leval(*e.kids[0], c)) || truth(leval(*e.kids[1], c)), kLogic);
        if (op == "==>") return int_val(!truth(leval(*e.kids[0], c)) || truth(leval(*e.kids[1], c)), kLogic);
        if (op == "<==>") return int_val(truth(leval(*e.kids[0], c)) == truth(leval(*e.kids[1], c)), kLogic);
        Val a = leval(*e.kids[0], c);
        Val b = leval(*e.kids[1], c);
        return arith(op, a, b, true);
      }
      case ExprKind::Ternary:
        return truth(leval(*e.kids[0], c)) ? leval(*e.kids[1], c) : leval(*e.kids[2], c);
      case ExprKind::Index: {
        Val p = leval(*e.kids[0], c);
        if (!p.ptr) throw Unsupported{"indexing a non-pointer"};
        if (e.kids[1]->kind == ExprKind::Range) throw Unsupported{"range outside \\valid"};
        Val i = leval(*e.kids[1], c);
        p.off += i.v;
        return read_cell(p, *c.mem, true);
      }
      case ExprKind::Cast: {
        Val v = leval(*e.kids[0], c);
        VarType t = prog_.resolve(e.type);
        if (t.is_ptr || t.array_len) {
          if (!v.ptr) throw Unsupported{"integer to pointer cast"};
          v.t = t.scalar;
          return v;
        }
        if (v.ptr) throw Unsupported{"pointer to integer cast"};
        return int_val(v.v, t.scalar);
      }
      case ExprKind::Quant: {
        std::vector<std::pair<std::string, Num>> local = c.binders ? *c.binders : std::vector<std::pair<std::string, Num>>{};
        LogicCtx inner = c;
        inner.binders = &local;
        bool forall = e.op == "\\forall";
        std::vector<std::pair<Num, Num>> ranges;
        for (const auto& b : e.binders) {
          IntType bt = prog_.int_type(b.type);
          Num lo = std::min<Num>(dom_.int_min, 0) - 1;
          Num hi = std::max<Num>(dom_.int_max, static_cast<Num>(dom_.array_len_max)) + 1;
          lo = std::max(lo, type_min(bt));
          hi = std::min(hi, type_max(bt));
          ranges.push_back({lo, hi});
          local.push_back({b.name, lo});
        }
        std::size_t base = local.size() - e.binders.size();
        while (true) {
          bool v = truth(leval(*e.kids[0], inner)) != 0;
          if (forall && !v) return int_val(0, kLogic);
          if (!forall && v) return int_val(1, kLogic);
          std::size_t k = e.binders.size();
          while (k > 0) {
            --k;
            if (local[base + k].second < ranges[k].second) {
              ++local[base + k].second;
              break;
            }
            local[base + k].second = ranges[k].first;
            if (k == 0) return int_val(forall ? 1 : 0, kLogic);
          }
          if (e.binders.empty()) return int_val(forall ? 1 : 0, kLogic);
        }
      }
      case ExprKind::Valid: {
        const Expr& arg = *e.kids[0];
        Val p;
        Num lo = 0, hi = 0;
        if (arg.kind == ExprKind::Binary && (arg.op == "+" || arg.op == "-") && arg.kids[1]->kind == ExprKind::Range) {
          p = leval(*arg.kids[0], c);
          lo = leval(*arg.kids[1]->kids[0], c).v;
          hi = leval(*arg.kids[1]->kids[1], c).v;
          if (arg.op == "-") {
            std::swap(lo, hi);
            lo = -lo;
            hi = -hi;
          }
        } else if (arg.kind == ExprKind::Index && arg.kids[1]->kind == ExprKind::Range) {
          p = leval(*arg.kids[0], c);
          lo = leval(*arg.kids[1]->kids[0], c).v;
          hi = leval(*arg.kids[1]->kids[1], c).v;
        } else {
          p = leval(arg, c);
        }
        if (!p.ptr) throw Unsupported{"\\valid of a non-pointer"};
        if (lo > hi) return int_val(1, kLogic);
        if (p.obj < 0) return int_val(0, kLogic);
        Num size = static_cast<Num>(c.mem->at(static_cast<std::size_t>(p.obj)).cells.size());
        return int_val(p.off + lo >= 0 && p.off + hi < size ? 1 : 0, kLogic);
      }
      case ExprKind::SizeofType: return int_val(sizeof_type(e.type), kLogic);
      default: throw Unsupported{"construct not supported in predicates"};
    }
  }

  Num sizeof_type(const CType& t) const {
    VarType v = prog_.resolve(t);
    if (v.is_ptr) return 8;
    Num elem = v.scalar.bits / 8;
    return v.array_len ? elem * *v.array_len : elem;
  }

  bool holds(const Annot& a, const LogicCtx& c) const { return truth(leval(*a.expr, c)) != 0; }

  // ----- choice points

  std::size_t choose(std::size_t n) {
    if (n == 0) throw Prune{};
    if (choice_pos == choices.size()) {
      choices.push_back(0);
      arity.push_back(n);
    }
    arity[choice_pos] = n;
    return choices[choice_pos++];
  }

  /// Advances to the next unexplored choice path; false when exhausted.
  bool next_path() {
    choices.resize(choice_pos);
    arity.resize(choice_pos);
    while (!choices.empty()) {
      if (choices.back() + 1 < arity.back()) {
        ++choices.back();
        return true;
      }
      choices.pop_back();
      arity.pop_back();
    }
    return false;
  }

  // ----- C evaluation

  Slot* lookup(const std::string& n) {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) return &f->second;
    }
    auto f = globals.find(n);
    if (f != globals.end()) return &f->second;
    return nullptr;
  }

  struct LRef {
    Slot* slot = nullptr;
    Val cell;  // pointer to a memory cell when slot is null
  };

  LRef lvalue(const Expr& e) {
    if (e.kind == ExprKind::Ident) {
      Slot* s = lookup(e.op);
      if (!s) throw Unsupported{"unknown identifier '" + e.op + "'"};
      if (s->type.array_len) throw Unsupported{"assignment to an array"};
      return {s, {}};
    }
    if (e.kind == ExprKind::Index) {
      Val p = ceval(*e.kids[0]);
      Val i = ceval(*e.kids[1]);
      if (!p.ptr || i.ptr) throw Unsupported{"indexing a non-pointer"};
      p.off += i.v;
      return {nullptr, p};
    }
    if (e.kind == ExprKind::Unary && e.op == "*") {
      Val p = ceval(*e.kids[0]);
      if (!p.ptr) throw Unsupported{"dereference of a non-pointer"};
      return {nullptr, p};
    }
    throw Unsupported{"unsupported assignment target"};
  }

  Val load(const LRef& r) {
    if (r.slot) return r.slot->val;
    return read_cell(r.cell, mem, false);
  }

  void store(const LRef& r, Val v) {
    if (r.slot) {
      r.slot->val = convert(v, r.slot->type);
      return;
    }
    const Val& p = r.cell;
    if (p.obj < 0) throw Prune{};
    Object& o = mem.at(static_cast<std::size_t>(p.obj));
    if (p.off < 0 || p.off >= static_cast<Num>(o.cells.size())) throw Prune{};
    if (v.ptr) throw Unsupported{"storing a pointer into memory"};
    o.cells[static_cast<std::size_t>(p.off)] = wrap(v.v, o.elem);
  }

  Val convert(Val v, const VarType& t) const {
    if (t.is_ptr) {
      if (!v.ptr) {
        if (v.v != 0) throw Unsupported{"integer to pointer conversion"};
        Val n;
        n.ptr = true;
        n.t = t.scalar;
        return n;
      }
      return v;
    }
    if (v.ptr) throw Unsupported{"pointer to integer conversion"};
    return int_val(v.v, t.scalar);
  }

  Val ceval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: {
        IntType t = e.value > 0x7fffffff ? kLong : kInt;
        if (e.op.find_first_of("uU") != std::string::npos) t.is_signed = false;
        if (e.op.find_first_of("lL") != std::string::npos) t.bits = 64;
        return int_val(e.value, t);
      }
      case ExprKind::CharLit: return int_val(e.value, kInt);
      case ExprKind::Ident: {
        if (Slot* s = lookup(e.op)) return s->val;
        auto en = prog_.enum_consts.find(e.op);
        if (en != prog_.enum_consts.end()) return int_val(en->second, kInt);
        throw Unsupported{"unknown identifier '" + e.op + "'"};
      }
      case ExprKind::Unary: {
        if (e.op == "*") {
          Val p = ceval(*e.kids[0]);
          if (!p.ptr) throw Unsupported{"dereference of a non-pointer"};
          return read_cell(p, mem, false);
        }
        if (e.op == "&") {
          const Expr& k = *e.kids[0];
          if (k.kind == ExprKind::Index) return lvalue(k).cell;
          if (k.kind == ExprKind::Unary && k.op == "*") return ceval(*k.kids[0]);
          throw Unsupported{"address of a scalar"};
        }
        Val v = ceval(*e.kids[0]);
        if (e.op == "!") return int_val(truth(v) ? 0 : 1);
        if (v.ptr) throw Unsupported{"arithmetic on a pointer"};
        IntType t = promote(v.t);
        if (e.op == "-") return int_val(-v.v, t);
        if (e.op == "+") return int_val(v.v, t);
        if (e.op == "~") return int_val(~wrap(v.v, t), t);
        throw Unsupported{"unary '" + e.op + "'"};
      }
      case ExprKind::Binary: {
        if (e.op == "&&") return int_val(truth(ceval(*e.kids[0])) && truth(ceval(*e.kids[1])) ? 1 : 0);
        if (e.op == "||") return int_val(truth(ceval(*e.kids[0])) || truth(ceval(*e.kids[1])) ? 1 : 0);
        Val a = ceval(*e.kids[0]);
        Val b = ceval(*e.kids[1]);
        return arith(e.op, a, b, false);
      }
      case ExprKind::Assign: {
        LRef r = lvalue(*e.kids[0]);
        Val rhs = ceval(*e.kids[1]);
        Val v = rhs;
        if (e.op != "=") {
          std::string op = e.op.substr(0, e.op.size() - 1);
          v = arith(op, load(r), rhs, false);
        }
        store(r, v);
        return load(r);
      }
      case ExprKind::PreIncDec:
      case ExprKind::PostIncDec: {
        LRef r = lvalue(*e.kids[0]);
        Val old = load(r);
        Val nv = arith(e.op == "++" ? "+" : "-", old, int_val(1), false);
        store(r, nv);
        return e.kind == ExprKind::PreIncDec ? load(r) : old;
      }
      case ExprKind::Ternary: return truth(ceval(*e.kids[0])) ? ceval(*e.kids[1]) : ceval(*e.kids[2]);
      case ExprKind::Call: return call(e);
      case ExprKind::Index: return load(lvalue(e));
      case ExprKind::Cast: {
        Val v = ceval(*e.kids[0]);
        if (e.type.is_void()) return int_val(0);
        VarType t = prog_.resolve(e.type);
        if (t.is_ptr) {
          v = convert(v, t);
          v.t = t.scalar;
          return v;
        }
        return convert(v, t);
      }
      case ExprKind::SizeofType: return int_val(sizeof_type(e.type), IntType{64, false});
      case ExprKind::SizeofExpr: {
        const Expr& k = *e.kids[0];
        if (k.kind == ExprKind::Ident)
          if (Slot* s = lookup(k.op)) {
            Num elem = s->type.is_ptr ? 8 : s->type.scalar.bits / 8;
            return int_val(s->type.array_len ? elem * *s->type.array_len : elem, IntType{64, false});
          }
        throw Unsupported{"sizeof of an expression"};
      }
      case ExprKind::Comma: {
        Val v;
        for (const auto& k : e.kids) v = ceval(*k);
        return v;
      }
      default: throw Unsupported{"construct not supported by the bounded checker"};
    }
  }

  std::vector<Num> value_range(const IntType& t) const {
    Num lo = std::max<Num>(dom_.int_min, type_min(t));
    Num hi = std::min<Num>(dom_.int_max, type_max(t));
    std::vector<Num> out;
    for (Num v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }

  Val call(const Expr& e) {
    const std::string& name = e.kids[0]->op;
    auto fit = prog_.functions.find(name);
    if (fit == prog_.functions.end()) throw Unsupported{"call to undeclared function '" + name + "'"};
    const FunctionInfo& fn = *fit->second->function;
    if (fn.params.size() != e.kids.size() - 1) throw Unsupported{"arity mismatch in call to '" + name + "'"};
    Scope callee;
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      VarType pt = prog_.resolve(fn.params[i].type);
      if (pt.array_len) {
        pt.array_len.reset();
        pt.is_ptr = true;
      }
      Val a = convert(ceval(*e.kids[i + 1]), pt);
      callee[fn.params[i].name] = Slot{pt, a};
    }
    std::vector<Scope> callee_scopes{callee};
    LogicCtx pre;
    pre.scopes = &callee_scopes;
    pre.globals = &globals;
    pre.mem = &mem;
    pre.old = &pre;
    auto req = checked_requires_of.find(name);
    if (req != checked_requires_of.end()) {
      for (const Annot* a : req->second) {
        bool ok;
        std::string why = "precondition of '" + name + "' violated at call site";
        try {
          ok = holds(*a, pre);
        } catch (const Fault& f) {
          ok = false;
          why += " (" + f.msg + ")";
        } catch (const Unsupported& u) {
          state->invalid(*a->checked, u.msg);
          continue;
        }
        if (!ok) state->fail(*a->checked, why + "; counterexample: " + input_desc);
      }
    }
    if (fn.return_type.is_void()) return int_val(0);
    VarType rt = prog_.resolve(fn.return_type);
    if (rt.is_ptr || rt.array_len) throw Unsupported{"pointer-returning call"};
    std::vector<Num> options;
    auto ens = ensures_of.find(name);
    for (Num v : value_range(rt.scalar)) {
      LogicCtx post = pre;
      post.result = int_val(v, rt.scalar);
      bool ok = true;
      if (ens != ensures_of.end())
        for (const Annot* a : ens->second) {
          try {
            if (!holds(*a, post)) ok = false;
          } catch (const Fault&) {
            ok = false;
          }
          if (!ok) break;
        }
      if (ok) options.push_back(v);
    }
    return int_val(options[choose(options.size())], rt.scalar);
  }

  // ----- statements

  enum class Flow { Normal, Break, Continue, Return };
  Val ret_val;
  bool returned_value = false;
  VarType ret_type;
  bool void_fn = false;

  LogicCtx here() const {
    LogicCtx c;
    c.scopes = &scopes;
    c.globals = &globals;
    c.mem = &mem;
    c.old = &entry;
    return c;
  }

  void check_all(const std::vector<const Annot*>& annots) {
    LogicCtx c = here();
    for (const Annot* a : annots) {
      bool ok;
      std::string why;
      try {
        ok = holds(*a, c);
      } catch (const Fault& f) {
        ok = false;
        why = " (" + f.msg + ")";
      }
      if (!ok) {
        std::string what = a->clause.kind == ClauseKind::LoopInvariant ? "loop invariant" : "assertion";
        state->fail(*a->checked, what + " violated" + why + "; counterexample: " + input_desc);
      }
    }
  }

  void declare(const VarDecl& d) {
    VarType t = prog_.resolve(d.type);
    Slot s{t, {}};
    if (t.array_len) {
      Object o;
      o.elem = t.scalar;
      o.cells.assign(static_cast<std::size_t>(*t.array_len), 0);
      if (d.init) {
        if (d.init->kind != ExprKind::InitList) throw Unsupported{"array initializer"};
        for (std::size_t i = 0; i < d.init->kids.size() && i < o.cells.size(); ++i) {
          Val v = ceval(*d.init->kids[i]);
          if (v.ptr) throw Unsupported{"pointer in array initializer"};
          o.cells[i] = wrap(v.v, o.elem);
        }
      }
      mem.push_back(std::move(o));
      s.val.ptr = true;
      s.val.obj = static_cast<int>(mem.size() - 1);
      s.val.t = t.scalar;
    } else if (d.init) {
      if (d.init->kind == ExprKind::InitList) throw Unsupported{"scalar initializer list"};
      s.val = convert(ceval(*d.init), t);
    } else {
      // Uninitialized locals start at zero.
      s.val = convert(int_val(0), t);
    }
    scopes.back()[d.name] = s;
  }

  void tick() {
    if (++iterations > dom_.loop_cap) throw TimedOut{};
  }

  void loop_head(const Stmt& s) {
    auto it = invariants_at.find(&s);
    if (it != invariants_at.end()) check_all(it->second);
  }

  Flow exec(const Stmt& s) {
    auto at = asserts_at.find(&s);
    if (at != asserts_at.end()) check_all(at->second);
    switch (s.kind) {
      case StmtKind::Empty:
      case StmtKind::Case:
      case StmtKind::Default: return Flow::Normal;
      case StmtKind::Block: {
        scopes.emplace_back();
        Flow f = Flow::Normal;
        for (const auto& c : s.children) {
          f = exec(*c);
          if (f != Flow::Normal) break;
        }
        scopes.pop_back();
        return f;
      }
      case StmtKind::Decl:
        for (const auto& d : s.decls) declare(d);
        return Flow::Normal;
      case StmtKind::Expr:
        if (s.cond) ceval(*s.cond);
        return Flow::Normal;
      case StmtKind::If:
        if (truth(ceval(*s.cond))) return exec(*s.children[0]);
        if (s.children.size() > 1 && s.children[1]) return exec(*s.children[1]);
        return Flow::Normal;
      case StmtKind::While:
        while (true) {
          loop_head(s);
          if (!truth(ceval(*s.cond))) break;
          tick();
          Flow f = exec(*s.children[0]);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
        }
        return Flow::Normal;
      case StmtKind::Do:
        loop_head(s);
        while (true) {
          tick();
          Flow f = exec(*s.children[0]);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
          loop_head(s);
          if (!truth(ceval(*s.cond))) break;
        }
        return Flow::Normal;
      case StmtKind::For: {
        scopes.emplace_back();
        if (s.init) exec(*s.init);
        Flow out = Flow::Normal;
        while (true) {
          loop_head(s);
          if (s.cond && !truth(ceval(*s.cond))) break;
          tick();
          Flow f = exec(*s.children[0]);
          if (f == Flow::Break) break;
          if (f == Flow::Return) {
            out = f;
            break;
          }
          if (s.step) ceval(*s.step);
        }
        scopes.pop_back();
        return out;
      }
      case StmtKind::Switch: {
        Val v = ceval(*s.cond);
        const Stmt& body = *s.children[0];
        if (body.kind != StmtKind::Block) return Flow::Normal;
        std::optional<std::size_t> start, dflt;
        for (std::size_t i = 0; i < body.children.size(); ++i) {
          const Stmt& c = *body.children[i];
          if (c.kind == StmtKind::Case && !start && truth(arith("==", v, ceval(*c.cond), false))) start = i;
          if (c.kind == StmtKind::Default) dflt = i;
        }
        if (!start) start = dflt;
        if (!start) return Flow::Normal;
        scopes.emplace_back();
        Flow out = Flow::Normal;
        for (std::size_t i = *start; i < body.children.size(); ++i) {
          Flow f = exec(*body.children[i]);
          if (f == Flow::Break) break;
          if (f != Flow::Normal) {
            out = f;
            break;
          }
        }
        scopes.pop_back();
        return out;
      }
      case StmtKind::Break: return Flow::Break;
      case StmtKind::Continue: return Flow::Continue;
      case StmtKind::Return:
        if (s.cond) {
          if (void_fn) throw Unsupported{"value returned from a void function"};
          ret_val = convert(ceval(*s.cond), ret_type);
          returned_value = true;
        }
        return Flow::Return;
    }
    return Flow::Normal;
  }

  void reset_globals() {
    globals.clear();
    scopes.clear();
    scopes.emplace_back();
    for (const VarDecl* g : prog_.globals) declare(*g);
    globals = std::move(scopes.back());
    scopes.clear();
  }

 private:
  const Program& prog_;
  const MockDomain& dom_;
};

// ---------------------------------------------------------------------------
// Inputs

struct ParamDomain {
  std::string name;
  VarType type;
  std::vector<Num> scalars;  // scalar values, or element values for arrays
  std::size_t max_len = 0;
  std::vector<std::size_t> level_start;  // first index of each array length
  std::size_t size = 0;
};

ParamDomain make_domain(const std::string& name, VarType t, const MockDomain& dom) {
  ParamDomain p;
  p.name = name;
  p.type = t;
  Num lo = std::max<Num>(dom.int_min, type_min(t.scalar));
  Num hi = std::min<Num>(dom.int_max, type_max(t.scalar));
  for (Num v = lo; v <= hi; ++v) p.scalars.push_back(v);
  if (!t.is_ptr) {
    p.size = p.scalars.size();
    return p;
  }
  p.max_len = dom.array_len_max;
  std::size_t count = 0, level = 1;
  for (std::size_t len = 0; len <= p.max_len; ++len) {
    p.level_start.push_back(count);
    count += level;
    level *= std::max<std::size_t>(p.scalars.size(), 1);
    if (count > 50000000) throw Unsupported{"array input domain too large"};
  }
  p.size = count;
  return p;
}

/// Array contents for index `idx` of the domain: lengths ascending, then
/// lexicographic element order.
std::vector<Num> array_at(const ParamDomain& p, std::size_t idx) {
  std::size_t len = 0;
  while (len + 1 < p.level_start.size() && p.level_start[len + 1] <= idx) ++len;
  std::size_t rel = idx - p.level_start[len];
  std::vector<Num> out(len);
  std::size_t k = p.scalars.size();
  for (std::size_t i = len; i > 0; --i) {
    out[i - 1] = p.scalars[rel % k];
    rel /= k;
  }
  return out;
}

std::string describe(const std::string& name, const std::vector<Num>& arr) {
  std::string s = name + "=[";
  for (std::size_t i = 0; i < arr.size(); ++i) s += (i ? "," : "") + num_str(arr[i]);
  return s + "]";
}

/// Binds parameter values for input `idx` (mixed radix, first parameter most
/// significant) and returns the counterexample description.
std::string bind_inputs(Machine& m, const std::vector<ParamDomain>& params, std::size_t idx) {
  std::vector<std::size_t> digit(params.size());
  for (std::size_t i = params.size(); i > 0; --i) {
    digit[i - 1] = idx % params[i - 1].size;
    idx /= params[i - 1].size;
  }
  std::string desc;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParamDomain& p = params[i];
    Slot s{p.type, {}};
    if (!desc.empty()) desc += ", ";
    if (p.type.is_ptr) {
      auto arr = array_at(p, digit[i]);
      Object o;
      o.elem = p.type.scalar;
      o.cells = arr;
      m.mem.push_back(std::move(o));
      s.val.ptr = true;
      s.val.obj = static_cast<int>(m.mem.size() - 1);
      s.val.t = p.type.scalar;
      desc += describe(p.name, arr);
    } else {
      s.val = int_val(p.scalars[digit[i]], p.type.scalar);
      desc += p.name + "=" + num_str(p.scalars[digit[i]]);
    }
    m.scopes.back()[p.name] = s;
  }
  return desc;
}

// ---------------------------------------------------------------------------
// Static checks

void collect_idents(const Expr& e, std::set<std::string>& bound, std::vector<std::string>& free, bool& uses_result,
                    bool& uses_old, bool& has_call) {
  switch (e.kind) {
    case ExprKind::Ident:
      if (!bound.count(e.op)) free.push_back(e.op);
      return;
    case ExprKind::Result: uses_result = true; return;
    case ExprKind::Old: uses_old = true; break;
    case ExprKind::Call: has_call = true; return;
    case ExprKind::Quant: {
      std::set<std::string> inner = bound;
      for (const auto& b : e.binders) inner.insert(b.name);
      for (const auto& k : e.kids) collect_idents(*k, inner, free, uses_result, uses_old, has_call);
      return;
    }
    default: break;
  }
  for (const auto& k : e.kids)
    if (k) collect_idents(*k, bound, free, uses_result, uses_old, has_call);
}

bool result_under_old(const Expr& e, bool in_old) {
  if (e.kind == ExprKind::Result) return in_old;
  bool inner = in_old || e.kind == ExprKind::Old;
  for (const auto& k : e.kids)
    if (k && result_under_old(*k, inner)) return true;
  return false;
}

/// Local variables (with types) visible at the statement at `path`.
std::map<std::string, CType> visible_locals(const FunctionInfo& fn, const Path& path) {
  std::map<std::string, CType> out;
  for (const auto& p : fn.params) out[p.name] = p.type;
  StmtPtr node = fn.body;
  for (std::size_t depth = 0; depth <= path.size() && node; ++depth) {
    if (node->kind == StmtKind::For && node->init && node->init->kind == StmtKind::Decl)
      for (const auto& d : node->init->decls) out[d.name] = d.type;
    if (depth == path.size()) break;
    std::size_t idx = path[depth];
    if (node->kind == StmtKind::Block)
      for (std::size_t i = 0; i < idx && i < node->children.size(); ++i)
        if (node->children[i]->kind == StmtKind::Decl)
          for (const auto& d : node->children[i]->decls) out[d.name] = d.type;
    node = idx < node->children.size() ? node->children[idx] : nullptr;
  }
  return out;
}

std::optional<std::string> static_problem(const Program& prog, const AttachedClause& c, const Expr& e) {
  auto fit = prog.functions.find(c.owner);
  if (fit == prog.functions.end()) return "clause attached to unknown function '" + c.owner + "'";
  const FunctionInfo& fn = *fit->second->function;
  std::set<std::string> bound;
  std::vector<std::string> free;
  bool uses_result = false, uses_old = false, has_call = false;
  collect_idents(e, bound, free, uses_result, uses_old, has_call);
  if (has_call) return std::string("logic function calls are not supported");
  if (uses_result && (c.kind != ClauseKind::Ensures || fn.return_type.is_void()))
    return std::string("\\result is not available here");
  if (uses_old && c.kind == ClauseKind::Requires) return std::string("\\old is not available in a precondition");
  if (result_under_old(e, false)) return std::string("\\result cannot appear under \\old");
  std::map<std::string, CType> visible;
  if (c.where == AttachKind::Function) {
    for (const auto& p : fn.params) visible[p.name] = p.type;
  } else {
    if (!fn.body) return std::string("clause inside a function without body");
    visible = visible_locals(fn, c.path);
  }
  std::set<std::string> globals;
  for (const VarDecl* g : prog.globals) globals.insert(g->name);
  for (const auto& n : free) {
    if (visible.count(n) || globals.count(n) || prog.enum_consts.count(n)) continue;
    return "unknown identifier '" + n + "'";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

struct FunctionRun {
  const Declaration* decl = nullptr;
  std::vector<std::size_t> checked;  // verdict indices owned by this function
};

bool calls_any(const StmtPtr& s, const std::set<std::string>& names);

bool expr_calls(const ExprPtr& e, const std::set<std::string>& names) {
  if (!e) return false;
  if (e->kind == ExprKind::Call && names.count(e->kids[0]->op)) return true;
  for (const auto& k : e->kids)
    if (expr_calls(k, names)) return true;
  return false;
}

bool calls_any(const StmtPtr& s, const std::set<std::string>& names) {
  if (!s) return false;
  if (expr_calls(s->cond, names) || expr_calls(s->step, names) || calls_any(s->init, names)) return true;
  for (const auto& d : s->decls)
    if (expr_calls(d.init, names)) return true;
  for (const auto& c : s->children)
    if (calls_any(c, names)) return true;
  return false;
}

class Checker {
 public:
  Checker(const Program& prog, const MockDomain& dom, std::vector<Annot>& annots, CheckState& state)
      : prog_(prog), dom_(dom), annots_(annots), state_(state) {}

  void run() {
    std::set<std::string> with_checked_requires;
    std::map<std::string, FunctionRun> runs;
    for (auto& a : annots_) {
      if (!a.checked || a.invalid) continue;
      const std::string& owner = a.clause.owner;
      if (a.clause.kind == ClauseKind::Requires) {
        with_checked_requires.insert(owner);
        continue;
      }
      auto fit = prog_.functions.find(owner);
      if (fit == prog_.functions.end() || !fit->second->function->body) {
        state_.invalid(*a.checked, "function '" + owner + "' has no body to check against");
        continue;
      }
      runs[owner].decl = fit->second;
      runs[owner].checked.push_back(*a.checked);
    }
    if (!with_checked_requires.empty())
      for (const auto& [name, d] : prog_.functions)
        if (d->kind == DeclKind::FunctionDef && calls_any(d->function->body, with_checked_requires)) runs[name].decl = d;

    // Functions run in source order so the first counterexample is stable.
    std::vector<const FunctionRun*> order;
    for (const auto& [name, r] : runs) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->decl->id < b->decl->id; });
    for (const FunctionRun* r : order) run_function(*r);
  }

 private:
  void setup_machine(Machine& m, const std::string& fname) {
    m.state = &state_;
    for (auto& a : annots_) {
      if (a.invalid) continue;
      const auto& c = a.clause;
      if (c.kind == ClauseKind::Ensures) m.ensures_of[c.owner].push_back(&a);
      if (c.kind == ClauseKind::Requires && a.checked) m.checked_requires_of[c.owner].push_back(&a);
      if (!a.checked || c.owner != fname) continue;
      if (c.kind != ClauseKind::Assert && c.kind != ClauseKind::LoopInvariant) continue;
      const FunctionInfo& fn = *prog_.functions.at(c.owner)->function;
      StmtPtr st = stmt_at(fn.body, c.path);
      if (!st) {
        state_.invalid(*a.checked, "clause position not found");
        continue;
      }
      if (c.kind == ClauseKind::Assert)
        m.asserts_at[st.get()].push_back(&a);
      else
        m.invariants_at[st.get()].push_back(&a);
    }
  }

  void run_function(const FunctionRun& r) {
    const Declaration& d = *r.decl;
    const FunctionInfo& fn = *d.function;
    Machine m(prog_, dom_);
    setup_machine(m, d.name);
    std::vector<const Annot*> own_requires, own_ensures;
    for (auto& a : annots_) {
      if (a.invalid || a.clause.owner != d.name) continue;
      if (a.clause.kind == ClauseKind::Requires) own_requires.push_back(&a);
      if (a.clause.kind == ClauseKind::Ensures && a.checked) own_ensures.push_back(&a);
    }
    auto mark_invalid = [&](const std::string& msg) {
      for (auto i : r.checked) state_.invalid(i, msg);
    };
    try {
      std::vector<ParamDomain> params;
      std::size_t total = 1;
      for (const auto& p : fn.params) {
        VarType t = prog_.resolve(p.type);
        if (t.array_len) {
          t.array_len.reset();
          t.is_ptr = true;
        }
        params.push_back(make_domain(p.name, t, dom_));
        total *= std::max<std::size_t>(params.back().size, 1);
        if (params.back().size == 0) total = 0;
        if (total > kInputCap) {
          for (auto i : r.checked) state_.timeout[i] = true;
          return;
        }
      }
      m.void_fn = fn.return_type.is_void();
      if (!m.void_fn) m.ret_type = prog_.resolve(fn.return_type);
      if (m.ret_type.is_ptr) throw Unsupported{"pointer return type"};
      for (std::size_t idx = 0; idx < total; ++idx) {
        m.mem.clear();
        m.reset_globals();
        m.scopes.clear();
        m.scopes.emplace_back();
        m.input_desc = bind_inputs(m, params, idx);
        m.entry_scopes = m.scopes;
        m.entry_mem = m.mem;
        m.entry = LogicCtx{};
        m.entry.scopes = &m.entry_scopes;
        m.entry.globals = &m.globals;
        m.entry.mem = &m.entry_mem;
        m.entry.old = &m.entry;
        bool admitted = true;
        for (const Annot* a : own_requires) {
          try {
            if (!m.holds(*a, m.entry)) admitted = false;
          } catch (const Fault&) {
            admitted = false;
          }
          if (!admitted) break;
        }
        if (!admitted) continue;
        Memory input_mem = m.mem;
        Scope input_globals = m.globals;
        std::vector<Scope> input_scopes = m.scopes;
        m.choices.clear();
        m.arity.clear();
        std::size_t paths = 0;
        while (true) {
          m.mem = input_mem;
          m.globals = input_globals;
          m.scopes = input_scopes;
          m.choice_pos = 0;
          m.iterations = 0;
          m.returned_value = false;
          try {
            m.exec(*fn.body);
            if (!m.void_fn && !m.returned_value) throw Prune{};
            LogicCtx post;
            post.scopes = &m.entry_scopes;
            post.globals = &m.globals;
            post.mem = &m.mem;
            post.old = &m.entry;
            if (!m.void_fn) post.result = m.ret_val;
            for (const Annot* a : own_ensures) {
              bool ok;
              std::string why;
              try {
                ok = m.holds(*a, post);
              } catch (const Fault& f) {
                ok = false;
                why = " (" + f.msg + ")";
              }
              if (!ok) state_.fail(*a->checked, "postcondition violated" + why + "; counterexample: " + m.input_desc);
            }
          } catch (const Prune&) {
          } catch (const TimedOut&) {
            for (auto i : r.checked) state_.timeout[i] = true;
            for (const auto& [name, list] : m.checked_requires_of)
              for (const Annot* a : list) state_.timeout[*a->checked] = true;
          }
          if (!m.next_path()) break;
          if (++paths > dom_.path_cap) {
            for (auto i : r.checked) state_.timeout[i] = true;
            break;
          }
        }
      }
    } catch (const Unsupported& u) {
      mark_invalid(u.msg);
      for (const auto& [name, list] : m.checked_requires_of)
        for (const Annot* a : list) state_.invalid(*a->checked, u.msg);
    }
  }

  static constexpr std::size_t kInputCap = 5000000;
  const Program& prog_;
  const MockDomain& dom_;
  std::vector<Annot>& annots_;
  CheckState& state_;
};

std::vector<VerifierVerdict> run_mock(const std::string& text, const std::map<std::string, std::size_t>& label_to_index,
                                      std::vector<VerifierVerdict> verdicts, const MockDomain& dom) {
  CheckState state;
  state.verdicts = std::move(verdicts);
  state.decided.assign(state.verdicts.size(), false);
  state.timeout.assign(state.verdicts.size(), false);
  std::vector<bool> seen(state.verdicts.size(), false);
  try {
    Program prog(parse_annotated(text));
    std::vector<Annot> annots;
    for (const auto& c : prog.annotated.clauses) {
      Annot a;
      a.clause = c;
      a.expr = parse_predicate(c.predicate);
      if (c.label) {
        auto it = label_to_index.find(*c.label);
        if (it != label_to_index.end()) {
          a.checked = it->second;
          seen[it->second] = true;
        }
      }
      if (auto problem = static_problem(prog, c, *a.expr)) {
        a.invalid = true;
        if (a.checked) state.invalid(*a.checked, *problem);
      }
      annots.push_back(std::move(a));
    }
    Checker(prog, dom, annots, state).run();
  } catch (const ParseError& e) {
    for (std::size_t i = 0; i < state.verdicts.size(); ++i) state.invalid(i, std::string("parse error: ") + e.what());
  } catch (const AttachmentError& e) {
    for (std::size_t i = 0; i < state.verdicts.size(); ++i) state.invalid(i, e.what());
  }
  for (std::size_t i = 0; i < state.verdicts.size(); ++i) {
    auto& v = state.verdicts[i];
    if (!seen[i] && !state.decided[i]) {
      v.status = VerdictStatus::Invalid;
      v.diagnostic = "clause label not found in program text";
    } else if (!state.decided[i]) {
      v.status = state.timeout[i] ? VerdictStatus::Timeout : VerdictStatus::Proved;
      v.diagnostic = state.timeout[i] ? "exploration bound exceeded" : "";
    }
  }
  return state.verdicts;
}

}  // namespace

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Proved: return "Proved";
    case VerdictStatus::Unproved: return "Unproved";
    case VerdictStatus::Timeout: return "Timeout";
    case VerdictStatus::Invalid: return "Invalid";
  }
  return "?";
}

std::set<std::uint64_t> refuted_ids(const std::vector<VerifierVerdict>& verdicts) {
  std::set<std::uint64_t> out;
  for (const auto& v : verdicts)
    if (is_refuted(v.status)) out.insert(v.clause_id);
  return out;
}

std::vector<VerifierVerdict> MockVerifier::verify(const InstrumentedSource& program, const SpecSet& checked) const {
  if (checked.empty()) return {};
  std::vector<VerifierVerdict> verdicts;
  std::map<std::string, std::size_t> label_to_index;
  for (const auto& c : checked) {
    VerifierVerdict v;
    v.clause_id = c.id;
    auto it = program.clause_labels.find(c.id);
    if (it != program.clause_labels.end()) {
      v.goal_name = it->second;
      label_to_index[it->second] = verdicts.size();
    }
    verdicts.push_back(std::move(v));
  }
  return run_mock(program.text, label_to_index, std::move(verdicts), domain_);
}

VerifierVerdict mock_check(const std::string& program_text, const std::string& label, std::uint64_t clause_id,
                           const MockDomain& domain) {
  VerifierVerdict v;
  v.clause_id = clause_id;
  v.goal_name = label;
  return run_mock(program_text, {{label, 0}}, {v}, domain).front();
}

Entailment mock_entails(const std::string& program_code, const std::string& owner, ClauseKind kind, const Path& path,
                        const std::vector<std::string>& premises, const std::string& conclusion,
                        const std::vector<std::string>& context_requires, const MockDomain& domain) {
  try {
    Program prog(parse_annotated(program_code));
    auto fit = prog.functions.find(owner);
    if (fit == prog.functions.end()) return Entailment::Invalid;
    const FunctionInfo& fn = *fit->second->function;
    AttachKind where = kind == ClauseKind::LoopInvariant || kind == ClauseKind::Assert ? AttachKind::Loop
                                                                                       : AttachKind::Function;
    auto make = [&](const std::string& pred, ClauseKind k) -> std::optional<Annot> {
      Annot a;
      a.clause.kind = k;
      a.clause.owner = owner;
      a.clause.path = path;
      a.clause.where = k == ClauseKind::Requires ? AttachKind::Function : where;
      a.clause.predicate = pred;
      a.expr = parse_predicate(pred);
      if (static_problem(prog, a.clause, *a.expr)) return std::nullopt;
      return a;
    };
    std::vector<Annot> prem, ctx;
    for (const auto& p : premises) {
      auto a = make(p, kind);
      if (!a) return Entailment::Invalid;
      prem.push_back(*a);
    }
    for (const auto& p : context_requires) {
      auto a = make(p, ClauseKind::Requires);
      if (!a) return Entailment::Invalid;
      ctx.push_back(*a);
    }
    auto goal = make(conclusion, kind);
    if (!goal) return Entailment::Invalid;

    std::vector<ParamDomain> vars;
    std::map<std::string, CType> scope;
    if (where == AttachKind::Function) {
      for (const auto& p : fn.params) scope[p.name] = p.type;
    } else {
      scope = visible_locals(fn, path);
    }
    // Parameters first in declaration order, then locals by name.
    std::vector<std::string> names;
    for (const auto& p : fn.params) names.push_back(p.name);
    for (const auto& [n, t] : scope)
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    std::size_t total = 1;
    for (const auto& n : names) {
      VarType t = prog.resolve(scope.at(n));
      if (t.array_len) {
        t.array_len.reset();
        t.is_ptr = true;
      }
      vars.push_back(make_domain(n, t, domain));
      total *= std::max<std::size_t>(vars.back().size, 1);
    }
    std::vector<Num> results{0};
    bool with_result = kind == ClauseKind::Ensures && !fn.return_type.is_void();
    IntType rt = kInt;
    if (with_result) {
      rt = prog.resolve(fn.return_type).scalar;
      results.clear();
      for (Num v = std::max<Num>(domain.int_min, type_min(rt)); v <= std::min<Num>(domain.int_max, type_max(rt)); ++v)
        results.push_back(v);
    }
    if (total * results.size() > 20000000) return Entailment::Invalid;
    Machine m(prog, domain);
    for (std::size_t idx = 0; idx < total; ++idx) {
      m.mem.clear();
      m.reset_globals();
      m.scopes.clear();
      m.scopes.emplace_back();
      bind_inputs(m, vars, idx);
      LogicCtx c;
      c.scopes = &m.scopes;
      c.globals = &m.globals;
      c.mem = &m.mem;
      c.old = &c;
      bool admitted = true;
      for (const auto& a : ctx) {
        try {
          if (!m.holds(a, c)) admitted = false;
        } catch (const Fault&) {
          admitted = false;
        }
        if (!admitted) break;
      }
      if (!admitted) continue;
      for (Num r : results) {
        if (with_result) c.result = int_val(r, rt);
        bool all = true;
        for (const auto& a : prem) {
          try {
            if (!m.holds(a, c)) all = false;
          } catch (const Fault&) {
            all = false;
          }
          if (!all) break;
        }
        if (!all) continue;
        bool ok;
        try {
          ok = m.holds(*goal, c);
        } catch (const Fault&) {
          ok = false;
        }
        if (!ok) return Entailment::NotEntailed;
      }
    }
    return Entailment::Entailed;
  } catch (const Unsupported&) {
    return Entailment::Invalid;
  } catch (const ParseError&) {
    return Entailment::Invalid;
  }
}

}  // namespace specsyn
