#ifndef INVFORGE_ANALYSIS_HPP
#define INVFORGE_ANALYSIS_HPP

// Syntactic analyses feeding the weakening heuristics and the verifier:
// loop discovery with stable identifiers, loop target sets, typed
// sub-expression enumeration with pre-order positional indexing, and the
// indexed/global replacement operators.

#include <set>
#include <string>
#include <vector>

#include "invforge/ast.hpp"
#include "invforge/error.hpp"

namespace invforge {

// ------------------------------------------------------------------- loops

// One step on the path from a procedure body to a statement.  Intermediate
// steps descend through a while body or an if branch; the final step names
// the while statement itself.
struct LoopPathStep {
  enum class Kind : unsigned char { While, Then, Else };
  int index = 0;  // statement index within the enclosing block
  Kind kind = Kind::While;
};

struct LoopInfo {
  std::string id;    // "<procedure>#<dotted path>", e.g. "partition#4.1"
  std::string proc;  // owning procedure
  std::vector<LoopPathStep> path;
  std::string parent;  // id of the nearest enclosing loop, or empty
  int depth = 0;       // nesting depth; 0 for outer loops
  Pos pos{};
  ExprPtr guard;
  std::vector<ExprPtr> invariants;  // declared in the source
  StmtPtr stmt;                     // the while statement
  std::set<std::string> targets;    // name-sorted
};

// Assignment/havoc/call-modification targets of a block, transitively through
// nested statements; calls contribute their bound results plus the callee's
// modifies set.
inline void collect_targets(const Program& prog, const Block& block,
                            std::set<std::string>& out) {
  for (const StmtPtr& s : block) {
    switch (s->kind) {
      case StmtKind::Assign:
      case StmtKind::Havoc:
        out.insert(s->var);
        break;
      case StmtKind::Call: {
        for (const std::string& o : s->call_outs) out.insert(o);
        const ProcedureDecl* callee = prog.procedure(s->var);
        if (!callee)
          throw AnalysisError("call to unresolved procedure '" + s->var + "'");
        for (const std::string& m : callee->modifies) out.insert(m);
        break;
      }
      case StmtKind::If:
        collect_targets(prog, s->body, out);
        collect_targets(prog, s->orelse, out);
        break;
      case StmtKind::While:
        collect_targets(prog, s->body, out);
        break;
      default:
        break;
    }
  }
}

inline std::set<std::string> block_targets(const Program& prog, const Block& block) {
  std::set<std::string> out;
  collect_targets(prog, block, out);
  return out;
}

namespace detail {

inline std::string loop_id(const std::string& proc, const std::vector<LoopPathStep>& path) {
  std::string id = proc;
  id += '#';
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) id += '.';
    id += std::to_string(path[i].index);
    if (path[i].kind == LoopPathStep::Kind::Then) id += 't';
    if (path[i].kind == LoopPathStep::Kind::Else) id += 'e';
  }
  return id;
}

inline void collect_loops(const Program& prog, const std::string& proc_name,
                          const Block& block, std::vector<LoopPathStep>& prefix,
                          const std::string& parent, int depth,
                          std::vector<LoopInfo>& out) {
  for (size_t i = 0; i < block.size(); ++i) {
    const StmtPtr& s = block[i];
    if (s->kind == StmtKind::While) {
      prefix.push_back({static_cast<int>(i), LoopPathStep::Kind::While});
      LoopInfo info;
      info.id = loop_id(proc_name, prefix);
      info.proc = proc_name;
      info.path = prefix;
      info.parent = parent;
      info.depth = depth;
      info.pos = s->pos;
      info.guard = s->expr;
      info.invariants = s->invariants;
      info.stmt = s;
      info.targets = block_targets(prog, s->body);
      out.push_back(info);
      collect_loops(prog, proc_name, s->body, prefix, info.id, depth + 1, out);
      prefix.pop_back();
    } else if (s->kind == StmtKind::If) {
      prefix.push_back({static_cast<int>(i), LoopPathStep::Kind::Then});
      collect_loops(prog, proc_name, s->body, prefix, parent, depth, out);
      prefix.back().kind = LoopPathStep::Kind::Else;
      collect_loops(prog, proc_name, s->orelse, prefix, parent, depth, out);
      prefix.pop_back();
    }
  }
}

}  // namespace detail

// All loops of the procedure, pre-order (a loop precedes the loops nested in
// it; siblings in source order).
inline std::vector<LoopInfo> all_loops(const Program& prog, const ProcedureDecl& proc) {
  std::vector<LoopInfo> out;
  std::vector<LoopPathStep> prefix;
  detail::collect_loops(prog, proc.name, proc.body, prefix, "", 0, out);
  return out;
}

// Loops not nested within any other loop, in source order.
inline std::vector<LoopInfo> outer_loops(const Program& prog, const ProcedureDecl& proc) {
  std::vector<LoopInfo> out;
  for (LoopInfo& l : all_loops(prog, proc))
    if (l.parent.empty()) out.push_back(std::move(l));
  return out;
}

inline const LoopInfo* find_loop(const std::vector<LoopInfo>& loops, const std::string& id) {
  for (const LoopInfo& l : loops)
    if (l.id == id) return &l;
  return nullptr;
}

// All variables visible within the procedure: its locals and every global.
// Exposed for completeness; the weakening heuristics derive their variable
// pools from loop targets instead.
inline std::set<std::string> variables(const Program& prog, const ProcedureDecl& proc) {
  std::set<std::string> out;
  for (const VarDecl& g : prog.globals) out.insert(g.name);
  for (const VarDecl& l : proc.locals) out.insert(l.name);
  return out;
}

// ------------------------------------------------- sub-expression indexing

enum class SynClass : unsigned char { Id, Number, Map };

struct Occurrence {
  ExprPtr expr;      // the sub-expression (a synthesized Var for binder slots)
  int position = 0;  // 1-based ordinal in pre-order, dense per class
  bool binder_slot = false;  // Id occurrence that is a quantifier binder
};

namespace detail {

inline void collect_class(const ExprPtr& e, SynClass cls, std::vector<Occurrence>& out) {
  switch (e->kind) {
    case ExprKind::Var:
      if (cls == SynClass::Id) out.push_back({e, 0, false});
      return;
    case ExprKind::IntLit:
      if (cls == SynClass::Number) out.push_back({e, 0, false});
      return;
    case ExprKind::BoolLit:
      return;
    case ExprKind::MapSel:
      if (cls == SynClass::Map) out.push_back({e, 0, false});
      break;  // then enumerate children: the map operand is an Id occurrence
    case ExprKind::Quant:
      if (cls == SynClass::Id)
        for (const Binder& b : e->binders)
          out.push_back({mk_var(b.name, b.pos, b.type), 0, true});
      break;
    default:
      break;  // MapStore / Unary / Binary / FunApp contribute children only
  }
  for (const ExprPtr& k : e->kids) collect_class(k, cls, out);
}

}  // namespace detail

// Every occurrence of the syntactic class in pre-order.  Quantifier binders
// are visited before the body and count as Id occurrences (the constant test
// in the weakening module filters them out).  Function applications are not
// expanded.
inline std::vector<Occurrence> subexpressions(const ExprPtr& f, SynClass cls) {
  std::vector<Occurrence> out;
  detail::collect_class(f, cls, out);
  for (size_t i = 0; i < out.size(); ++i) out[i].position = static_cast<int>(i) + 1;
  return out;
}

// ------------------------------------------------------------- replacement

namespace detail {

// Shared walker for replace_all / replace_nth / the simultaneous two-position
// replacement.  `targets` maps 1-based occurrence indices to replacements; an
// entry with index 0 means "every occurrence".  Returns the rewritten tree
// and counts matches in `counter`.
struct ReplaceSpec {
  int position;  // 0 = all occurrences
  ExprPtr replacement;
};

inline const ExprPtr* spec_for(const std::vector<ReplaceSpec>& specs, int n) {
  for (const ReplaceSpec& s : specs)
    if (s.position == 0 || s.position == n) return &s.replacement;
  return nullptr;
}

inline ExprPtr replace_rec(const ExprPtr& f, const ExprPtr& old,
                           const std::vector<ReplaceSpec>& specs, int& counter) {
  if (eq_struct(f, old)) {
    ++counter;
    if (const ExprPtr* repl = spec_for(specs, counter)) return *repl;
    // A matched node cannot contain another occurrence of itself (any strict
    // sub-expression is smaller), so there is nothing further to visit.
    return f;
  }
  if (f->kind == ExprKind::Quant) {
    std::vector<Binder> binders = f->binders;
    bool changed = false;
    if (old->kind == ExprKind::Var) {
      for (Binder& b : binders) {
        if (b.name != old->name) continue;
        ++counter;
        if (const ExprPtr* repl = spec_for(specs, counter)) {
          if ((*repl)->kind != ExprKind::Var)
            throw SubstError("cannot replace the bound variable '" + b.name +
                             "' with a non-variable expression");
          b.name = (*repl)->name;
          changed = true;
        }
      }
    }
    ExprPtr body = replace_rec(f->kids[0], old, specs, counter);
    if (!changed && body == f->kids[0]) return f;
    return mk_quant(f->quant, std::move(binders), std::move(body), f->pos);
  }
  std::vector<ExprPtr> kids;
  kids.reserve(f->kids.size());
  bool changed = false;
  for (const ExprPtr& k : f->kids) {
    ExprPtr nk = replace_rec(k, old, specs, counter);
    changed |= (nk != k);
    kids.push_back(std::move(nk));
  }
  if (!changed) return f;
  auto copy = std::make_shared<Expr>(*f);
  copy->kids = std::move(kids);
  return copy;
}

inline void require_same_type(const ExprPtr& old, const ExprPtr& neu) {
  if (old->type != Type::Unknown && neu->type != Type::Unknown && old->type != neu->type)
    throw SubstError(std::string("replacement type mismatch: ") + type_name(old->type) +
                     " vs " + type_name(neu->type));
}

}  // namespace detail

// Number of structural occurrences of `old` in `f` (binder slots included
// when `old` is a variable).
inline int occurrence_count(const ExprPtr& f, const ExprPtr& old) {
  int counter = 0;
  detail::replace_rec(f, old, {}, counter);
  return counter;
}

// Replaces every occurrence of `old` by `neu`.
inline ExprPtr replace_all(const ExprPtr& f, const ExprPtr& old, const ExprPtr& neu) {
  detail::require_same_type(old, neu);
  int counter = 0;
  return detail::replace_rec(f, old, {{0, neu}}, counter);
}

// Replaces exactly the n-th pre-order occurrence (1-based) of `old`.
inline ExprPtr replace_nth(const ExprPtr& f, const ExprPtr& old, const ExprPtr& neu, int n) {
  detail::require_same_type(old, neu);
  if (n < 1) throw SubstError("occurrence index must be >= 1, got " + std::to_string(n));
  int counter = 0;
  ExprPtr out = detail::replace_rec(f, old, {{n, neu}}, counter);
  if (counter < n)
    throw SubstError("occurrence index " + std::to_string(n) + " exceeds the " +
                     std::to_string(counter) + " occurrence(s) present");
  return out;
}

// Simultaneously replaces occurrences n1 and n2 (n1 < n2, both 1-based) with
// two replacements in a single pass over `f`.
inline ExprPtr replace_two(const ExprPtr& f, const ExprPtr& old, const ExprPtr& neu1,
                           int n1, const ExprPtr& neu2, int n2) {
  detail::require_same_type(old, neu1);
  detail::require_same_type(old, neu2);
  if (n1 < 1 || n2 <= n1)
    throw SubstError("two-position replacement needs 1 <= n1 < n2");
  int counter = 0;
  ExprPtr out = detail::replace_rec(f, old, {{n1, neu1}, {n2, neu2}}, counter);
  if (counter < n2)
    throw SubstError("occurrence index " + std::to_string(n2) + " exceeds the " +
                     std::to_string(counter) + " occurrence(s) present");
  return out;
}

// True when no free variable of `e` is a loop target — the loop-constancy
// test used by the weakening heuristics.
inline bool is_loop_constant(const ExprPtr& e, const std::set<std::string>& targets) {
  for (const std::string& v : free_vars(e))
    if (targets.count(v)) return false;
  return true;
}

inline bool is_loop_constant(const ExprPtr& e, const LoopInfo& loop) {
  return is_loop_constant(e, loop.targets);
}

}  // namespace invforge

#endif  // INVFORGE_ANALYSIS_HPP
