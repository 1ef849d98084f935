#ifndef INVFORGE_AST_HPP
#define INVFORGE_AST_HPP

// Abstract syntax for the mini verification language: expressions/formulas,
// statements, declarations, and whole programs.  Nodes are immutable and
// shared; all transformations build new trees.

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace invforge {

struct Pos {
  int line = 0;
  int col = 0;
};

enum class Type : unsigned char { Unknown, Int, Bool, Map };

inline const char* type_name(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::Map: return "array int";
    default: return "<unknown>";
  }
}

enum class ExprKind : unsigned char {
  IntLit,    // syntactic class Number
  BoolLit,
  Var,       // syntactic class Id
  MapSel,    // syntactic class Map: m[e]
  MapStore,  // store(m, e, v) — whole-map update
  Unary,
  Binary,
  Quant,
  FunApp
};

enum class UnOp : unsigned char { Neg, Not };

enum class BinOp : unsigned char {
  Mul, Div,
  Add, Sub,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Imp
};

enum class QuantKind : unsigned char { Forall, Exists };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Binder {
  std::string name;
  Type type = Type::Int;
  Pos pos{};
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  Type type = Type::Unknown;  // filled in by the type checker
  Pos pos{};

  long long int_val = 0;               // IntLit
  bool bool_val = false;               // BoolLit
  std::string name;                    // Var / FunApp
  UnOp un = UnOp::Neg;                 // Unary
  BinOp bin = BinOp::Add;              // Binary
  QuantKind quant = QuantKind::Forall; // Quant
  std::vector<Binder> binders;         // Quant
  // Children: MapSel {map, index}; MapStore {map, index, value};
  // Unary {operand}; Binary {lhs, rhs}; Quant {body}; FunApp {args...}.
  std::vector<ExprPtr> kids;
};

// ---------------------------------------------------------------- builders

inline ExprPtr mk_int(long long v, Pos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->type = Type::Int;
  e->pos = pos;
  e->int_val = v;
  return e;
}

inline ExprPtr mk_bool(bool v, Pos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->type = Type::Bool;
  e->pos = pos;
  e->bool_val = v;
  return e;
}

inline ExprPtr mk_var(std::string name, Pos pos = {}, Type type = Type::Unknown) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->type = type;
  e->pos = pos;
  e->name = std::move(name);
  return e;
}

inline ExprPtr mk_sel(ExprPtr map, ExprPtr index, Pos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::MapSel;
  e->type = Type::Int;
  e->pos = pos;
  e->kids = {std::move(map), std::move(index)};
  return e;
}

inline ExprPtr mk_store(ExprPtr map, ExprPtr index, ExprPtr value, Pos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::MapStore;
  e->type = Type::Map;
  e->pos = pos;
  e->kids = {std::move(map), std::move(index), std::move(value)};
  return e;
}

inline ExprPtr mk_un(UnOp op, ExprPtr operand, Pos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->type = op == UnOp::Neg ? Type::Int : Type::Bool;
  e->pos = pos;
  e->un = op;
  e->kids = {std::move(operand)};
  return e;
}

inline ExprPtr mk_bin(BinOp op, ExprPtr lhs, ExprPtr rhs, Pos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->type = op <= BinOp::Sub ? Type::Int : Type::Bool;
  e->pos = pos;
  e->bin = op;
  e->kids = {std::move(lhs), std::move(rhs)};
  return e;
}

inline ExprPtr mk_quant(QuantKind q, std::vector<Binder> binders, ExprPtr body,
                        Pos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Quant;
  e->type = Type::Bool;
  e->pos = pos;
  e->quant = q;
  e->binders = std::move(binders);
  e->kids = {std::move(body)};
  return e;
}

inline ExprPtr mk_app(std::string name, std::vector<ExprPtr> args, Pos pos = {},
                      Type type = Type::Unknown) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::FunApp;
  e->type = type;
  e->pos = pos;
  e->name = std::move(name);
  e->kids = std::move(args);
  return e;
}

inline ExprPtr mk_and(ExprPtr l, ExprPtr r) { return mk_bin(BinOp::And, std::move(l), std::move(r)); }
inline ExprPtr mk_or(ExprPtr l, ExprPtr r) { return mk_bin(BinOp::Or, std::move(l), std::move(r)); }
inline ExprPtr mk_imp(ExprPtr l, ExprPtr r) { return mk_bin(BinOp::Imp, std::move(l), std::move(r)); }
inline ExprPtr mk_not(ExprPtr e) { return mk_un(UnOp::Not, std::move(e)); }

// Conjunction of a list; empty list yields `true`.
inline ExprPtr mk_conj(const std::vector<ExprPtr>& fs) {
  if (fs.empty()) return mk_bool(true);
  ExprPtr acc = fs.front();
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_and(acc, fs[i]);
  return acc;
}

// ------------------------------------------------------------- comparisons

// Structural equality modulo source spans and type tags.  Binder names count
// (no alpha-equivalence here); used for occurrence matching in substitution.
inline bool eq_struct(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::IntLit:
      if (a->int_val != b->int_val) return false;
      break;
    case ExprKind::BoolLit:
      if (a->bool_val != b->bool_val) return false;
      break;
    case ExprKind::Var:
    case ExprKind::FunApp:
      if (a->name != b->name) return false;
      break;
    case ExprKind::Unary:
      if (a->un != b->un) return false;
      break;
    case ExprKind::Binary:
      if (a->bin != b->bin) return false;
      break;
    case ExprKind::Quant:
      if (a->quant != b->quant || a->binders.size() != b->binders.size()) return false;
      for (size_t i = 0; i < a->binders.size(); ++i)
        if (a->binders[i].name != b->binders[i].name ||
            a->binders[i].type != b->binders[i].type)
          return false;
      break;
    default:
      break;
  }
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!eq_struct(a->kids[i], b->kids[i])) return false;
  return true;
}

namespace detail {

// Serializes an expression to a canonical string with bound variables in
// de Bruijn form.  With `flatten`, associative chains of && (and of ||) are
// collapsed into one n-ary node, preserving operand order.
inline void canon_key(const Expr& e, std::vector<const std::string*>& env,
                      bool flatten, std::string& out) {
  switch (e.kind) {
    case ExprKind::IntLit:
      out += 'n';
      out += std::to_string(e.int_val);
      return;
    case ExprKind::BoolLit:
      out += e.bool_val ? "bt" : "bf";
      return;
    case ExprKind::Var: {
      for (size_t i = env.size(); i-- > 0;) {
        if (*env[i] == e.name) {
          out += '$';
          out += std::to_string(env.size() - 1 - i);
          return;
        }
      }
      out += 'v';
      out += e.name;
      return;
    }
    case ExprKind::MapSel:
      out += "(S ";
      canon_key(*e.kids[0], env, flatten, out);
      out += ' ';
      canon_key(*e.kids[1], env, flatten, out);
      out += ')';
      return;
    case ExprKind::MapStore:
      out += "(W ";
      canon_key(*e.kids[0], env, flatten, out);
      out += ' ';
      canon_key(*e.kids[1], env, flatten, out);
      out += ' ';
      canon_key(*e.kids[2], env, flatten, out);
      out += ')';
      return;
    case ExprKind::Unary:
      out += e.un == UnOp::Neg ? "(- " : "(! ";
      canon_key(*e.kids[0], env, flatten, out);
      out += ')';
      return;
    case ExprKind::Binary: {
      static const char* names[] = {"*", "/", "+", "-", "=", "!=", "<",
                                    "<=", ">", ">=", "&&", "||", "==>"};
      if (flatten && (e.bin == BinOp::And || e.bin == BinOp::Or)) {
        out += e.bin == BinOp::And ? "(& " : "(| ";
        // In-order walk of the same-operator chain.
        const BinOp op = e.bin;
        const auto emit = [&](const Expr& node, const auto& self) -> void {
          if (node.kind == ExprKind::Binary && node.bin == op) {
            self(*node.kids[0], self);
            out += ' ';
            self(*node.kids[1], self);
          } else {
            canon_key(node, env, flatten, out);
          }
        };
        emit(*e.kids[0], emit);
        out += ' ';
        emit(*e.kids[1], emit);
        out += ')';
        return;
      }
      out += '(';
      out += names[static_cast<int>(e.bin)];
      out += ' ';
      canon_key(*e.kids[0], env, flatten, out);
      out += ' ';
      canon_key(*e.kids[1], env, flatten, out);
      out += ')';
      return;
    }
    case ExprKind::Quant: {
      out += e.quant == QuantKind::Forall ? "(A" : "(E";
      for (const Binder& b : e.binders) {
        out += ' ';
        out += type_name(b.type);
      }
      out += " . ";
      for (const Binder& b : e.binders) env.push_back(&b.name);
      canon_key(*e.kids[0], env, flatten, out);
      env.resize(env.size() - e.binders.size());
      out += ')';
      return;
    }
    case ExprKind::FunApp: {
      out += "(f ";
      out += e.name;
      for (const ExprPtr& k : e.kids) {
        out += ' ';
        canon_key(*k, env, flatten, out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace detail

// Canonical key under bound-variable renaming only.
inline std::string alpha_key(const ExprPtr& e) {
  std::string out;
  std::vector<const std::string*> env;
  detail::canon_key(*e, env, /*flatten=*/false, out);
  return out;
}

// Canonical key under bound-variable renaming plus flattening of associative
// && and || chains (operand order preserved; no arithmetic normalization).
// This is the candidate-deduplication key.
inline std::string normal_key(const ExprPtr& e) {
  std::string out;
  std::vector<const std::string*> env;
  detail::canon_key(*e, env, /*flatten=*/true, out);
  return out;
}

inline bool eq_alpha(const ExprPtr& a, const ExprPtr& b) {
  return alpha_key(a) == alpha_key(b);
}

// ---------------------------------------------------------- variable facts

namespace detail {

inline void free_vars_rec(const Expr& e, std::vector<const std::string*>& env,
                          std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) {
    for (size_t i = env.size(); i-- > 0;)
      if (*env[i] == e.name) return;
    out.insert(e.name);
    return;
  }
  if (e.kind == ExprKind::Quant) {
    for (const Binder& b : e.binders) env.push_back(&b.name);
    free_vars_rec(*e.kids[0], env, out);
    env.resize(env.size() - e.binders.size());
    return;
  }
  for (const ExprPtr& k : e.kids) free_vars_rec(*k, env, out);
}

}  // namespace detail

// Free (program) variables of a formula; quantifier-bound names excluded.
inline std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> out;
  std::vector<const std::string*> env;
  detail::free_vars_rec(*e, env, out);
  return out;
}

// Every name used as a quantifier binder anywhere in the formula.
inline void collect_binder_names(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == ExprKind::Quant)
    for (const Binder& b : e->binders) out.insert(b.name);
  for (const ExprPtr& k : e->kids) collect_binder_names(k, out);
}

inline std::set<std::string> binder_names(const ExprPtr& e) {
  std::set<std::string> out;
  collect_binder_names(e, out);
  return out;
}

// ------------------------------------------------------------- statements

enum class StmtKind : unsigned char { Assert, Assume, Havoc, Assign, Call, If, While };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct Stmt {
  StmtKind kind = StmtKind::Assert;
  Pos pos{};
  ExprPtr expr;                       // Assert/Assume formula; Assign rhs; If/While guard
  std::string var;                    // Havoc target; Assign lhs; Call callee
  std::vector<std::string> call_outs; // Call result variables
  std::vector<ExprPtr> call_args;
  std::vector<ExprPtr> invariants;    // While
  Block body;                         // If-then block / While body
  Block orelse;                       // If-else block
};

inline StmtPtr mk_assert(ExprPtr f, Pos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assert;
  s->pos = pos;
  s->expr = std::move(f);
  return s;
}

inline StmtPtr mk_assume(ExprPtr f, Pos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assume;
  s->pos = pos;
  s->expr = std::move(f);
  return s;
}

inline StmtPtr mk_havoc(std::string var, Pos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Havoc;
  s->pos = pos;
  s->var = std::move(var);
  return s;
}

inline StmtPtr mk_assign(std::string var, ExprPtr rhs, Pos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assign;
  s->pos = pos;
  s->var = std::move(var);
  s->expr = std::move(rhs);
  return s;
}

inline StmtPtr mk_call(std::vector<std::string> outs, std::string callee,
                       std::vector<ExprPtr> args, Pos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Call;
  s->pos = pos;
  s->var = std::move(callee);
  s->call_outs = std::move(outs);
  s->call_args = std::move(args);
  return s;
}

inline StmtPtr mk_if(ExprPtr guard, Block then_block, Block else_block, Pos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->pos = pos;
  s->expr = std::move(guard);
  s->body = std::move(then_block);
  s->orelse = std::move(else_block);
  return s;
}

inline StmtPtr mk_while(ExprPtr guard, std::vector<ExprPtr> invariants, Block body,
                        Pos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::While;
  s->pos = pos;
  s->expr = std::move(guard);
  s->invariants = std::move(invariants);
  s->body = std::move(body);
  return s;
}

// ------------------------------------------------------------ declarations

struct VarDecl {
  std::string name;
  Type type = Type::Int;
  Pos pos{};
};

struct FunctionDecl {
  std::string name;
  std::vector<VarDecl> params;
  Type result = Type::Bool;
  ExprPtr body;  // null for uninterpreted functions
  Pos pos{};
};

struct ProcedureDecl {
  std::string name;
  Pos pos{};
  Pos end{};  // last token of the declaration (closing brace or final ';')
  std::vector<VarDecl> ins;
  std::vector<VarDecl> outs;
  std::vector<ExprPtr> requires_cl;
  std::vector<ExprPtr> ensures_cl;
  std::vector<std::string> modifies;
  bool has_body = false;
  std::vector<VarDecl> locals;
  Block body;
};

struct Program {
  std::vector<VarDecl> globals;
  std::vector<FunctionDecl> functions;
  std::vector<ExprPtr> axioms;
  std::vector<ProcedureDecl> procedures;

  const VarDecl* global(const std::string& name) const {
    for (const VarDecl& g : globals)
      if (g.name == name) return &g;
    return nullptr;
  }
  const FunctionDecl* function(const std::string& name) const {
    for (const FunctionDecl& f : functions)
      if (f.name == name) return &f;
    return nullptr;
  }
  const ProcedureDecl* procedure(const std::string& name) const {
    for (const ProcedureDecl& p : procedures)
      if (p.name == name) return &p;
    return nullptr;
  }
};

// Structural equality of whole programs (modulo spans and type tags), used by
// the round-trip tests.
inline bool eq_struct(const StmtPtr& a, const StmtPtr& b) {
  if (a->kind != b->kind || a->var != b->var) return false;
  if (static_cast<bool>(a->expr) != static_cast<bool>(b->expr)) return false;
  if (a->expr && !eq_struct(a->expr, b->expr)) return false;
  auto eq_list = [](const std::vector<ExprPtr>& x, const std::vector<ExprPtr>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!eq_struct(x[i], y[i])) return false;
    return true;
  };
  auto eq_block = [](const Block& x, const Block& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!eq_struct(x[i], y[i])) return false;
    return true;
  };
  return a->call_outs == b->call_outs && eq_list(a->call_args, b->call_args) &&
         eq_list(a->invariants, b->invariants) && eq_block(a->body, b->body) &&
         eq_block(a->orelse, b->orelse);
}

inline bool eq_struct(const VarDecl& a, const VarDecl& b) {
  return a.name == b.name && a.type == b.type;
}

inline bool eq_struct(const Program& a, const Program& b) {
  auto eq_vars = [](const std::vector<VarDecl>& x, const std::vector<VarDecl>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!eq_struct(x[i], y[i])) return false;
    return true;
  };
  auto eq_exprs = [](const std::vector<ExprPtr>& x, const std::vector<ExprPtr>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!eq_struct(x[i], y[i])) return false;
    return true;
  };
  if (!eq_vars(a.globals, b.globals)) return false;
  if (a.functions.size() != b.functions.size()) return false;
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const FunctionDecl& f = a.functions[i];
    const FunctionDecl& g = b.functions[i];
    if (f.name != g.name || f.result != g.result || !eq_vars(f.params, g.params))
      return false;
    if (static_cast<bool>(f.body) != static_cast<bool>(g.body)) return false;
    if (f.body && !eq_struct(f.body, g.body)) return false;
  }
  if (!eq_exprs(a.axioms, b.axioms)) return false;
  if (a.procedures.size() != b.procedures.size()) return false;
  for (size_t i = 0; i < a.procedures.size(); ++i) {
    const ProcedureDecl& p = a.procedures[i];
    const ProcedureDecl& q = b.procedures[i];
    if (p.name != q.name || !eq_vars(p.ins, q.ins) || !eq_vars(p.outs, q.outs))
      return false;
    if (!eq_exprs(p.requires_cl, q.requires_cl) || !eq_exprs(p.ensures_cl, q.ensures_cl))
      return false;
    if (p.modifies != q.modifies || p.has_body != q.has_body) return false;
    if (!eq_vars(p.locals, q.locals)) return false;
    if (p.body.size() != q.body.size()) return false;
    for (size_t j = 0; j < p.body.size(); ++j)
      if (!eq_struct(p.body[j], q.body[j])) return false;
  }
  return true;
}

}  // namespace invforge

#endif  // INVFORGE_AST_HPP
