#ifndef INVFORGE_WP_HPP
#define INVFORGE_WP_HPP

// Verification conditions for candidate loop invariants, built as weakest
// preconditions over the statement language.  The loop under scrutiny gets
// two obligations:
//
//   initiation  — the candidate holds when control first reaches the loop
//                 head, starting from any state satisfying the requires
//                 clauses;
//   consecution — starting from an arbitrary head state satisfying the
//                 assumed head facts and the guard, one pass through the
//                 body re-establishes the candidate.
//
// Every other loop along the way is abstracted: its targets become fresh
// symbols, the facts known at its head (declared invariants plus whatever
// candidate instances are currently instrumented) are assumed, and once
// control has passed the loop its negated guard is assumed as well.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <invforge/analysis.hpp>
#include <invforge/ast.hpp>
#include <invforge/error.hpp>

namespace invforge {

namespace detail {

inline ExprPtr subst_rec(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      return e;
    case ExprKind::Var: {
      auto it = sub.find(e->name);
      return it == sub.end() ? e : it->second;
    }
    case ExprKind::Quant: {
      // Binders shadow; drop the entries they hide.
      std::map<std::string, ExprPtr> live;
      for (const auto& [name, rep] : sub) {
        bool shadowed = false;
        for (const Binder& b : e->binders) shadowed = shadowed || b.name == name;
        if (!shadowed) live.emplace(name, rep);
      }
      if (live.empty()) return e;
      // A binder whose name occurs free in an incoming replacement would
      // capture it; rename such binders before descending.
      std::set<std::string> hazard;
      for (const auto& [name, rep] : live) {
        std::set<std::string> fv = free_vars(rep);
        hazard.insert(fv.begin(), fv.end());
      }
      std::vector<Binder> binders = e->binders;
      ExprPtr body = e->kids[0];
      std::set<std::string> avoid = hazard;
      for (const auto& [name, rep] : live) avoid.insert(name);
      {
        std::set<std::string> fv = free_vars(body);
        avoid.insert(fv.begin(), fv.end());
      }
      for (const Binder& b : binders) avoid.insert(b.name);
      for (Binder& b : binders) {
        if (!hazard.count(b.name)) continue;
        std::string fresh;
        for (int k = 1;; ++k) {
          fresh = b.name + "!" + std::to_string(k);
          if (!avoid.count(fresh)) break;
        }
        avoid.insert(fresh);
        std::map<std::string, ExprPtr> rename;
        rename.emplace(b.name, mk_var(fresh, b.pos, b.type));
        body = subst_rec(body, rename);
        b.name = fresh;
      }
      ExprPtr nb = subst_rec(body, live);
      if (nb == e->kids[0]) return e;  // nothing renamed, nothing replaced
      return mk_quant(e->quant, std::move(binders), std::move(nb), e->pos);
    }
    default: {
      std::vector<ExprPtr> kids;
      kids.reserve(e->kids.size());
      bool changed = false;
      for (const ExprPtr& k : e->kids) {
        kids.push_back(subst_rec(k, sub));
        changed = changed || kids.back() != k;
      }
      if (!changed) return e;
      switch (e->kind) {
        case ExprKind::MapSel:
          return mk_sel(std::move(kids[0]), std::move(kids[1]), e->pos);
        case ExprKind::MapStore:
          return mk_store(std::move(kids[0]), std::move(kids[1]), std::move(kids[2]), e->pos);
        case ExprKind::Unary:
          return mk_un(e->un, std::move(kids[0]), e->pos);
        case ExprKind::Binary:
          return mk_bin(e->bin, std::move(kids[0]), std::move(kids[1]), e->pos);
        case ExprKind::FunApp:
          return mk_app(e->name, std::move(kids), e->pos, e->type);
        default:
          throw SubstError("internal: unexpected node in substitution");
      }
    }
  }
}

}  // namespace detail

// Simultaneous capture-avoiding substitution of free variables.
inline ExprPtr subst(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
  if (!e || sub.empty()) return e;
  return detail::subst_rec(e, sub);
}

inline ExprPtr subst(const ExprPtr& e, const std::string& name, const ExprPtr& rep) {
  std::map<std::string, ExprPtr> sub;
  sub.emplace(name, rep);
  return subst(e, sub);
}

// One proof obligation about one loop instance.  The formula is implicitly
// universally closed over its free symbols; it is valid iff the obligation
// holds.  `fresh` lists the symbols minted by havoc abstraction (in mint
// order) together with their sorts.
struct VerificationCondition {
  std::string obligation;  // "initiation" | "consecution"
  std::string loop_id;
  ExprPtr formula;
  std::vector<std::pair<std::string, Type>> fresh;
};

// Facts assumed to hold whenever control sits at a loop's head, keyed by
// loop id: the loop's declared invariants plus any instrumented candidate
// instances or externally assumed invariants.
using HeadFacts = std::map<std::string, std::vector<ExprPtr>>;

// Head facts carrying just the declared invariants of each loop.
inline HeadFacts declared_facts(const std::vector<LoopInfo>& loops) {
  HeadFacts facts;
  for (const LoopInfo& l : loops) facts[l.id] = l.invariants;
  return facts;
}

class VcGen {
 public:
  VcGen(const Program& prog, const ProcedureDecl& proc, HeadFacts facts)
      : prog_(prog), proc_(proc), facts_(std::move(facts)),
        loops_(all_loops(prog, proc)) {
    for (const VarDecl& v : prog.globals) types_.emplace(v.name, v.type);
    for (const VarDecl& v : proc.ins) types_[v.name] = v.type;
    for (const VarDecl& v : proc.outs) types_[v.name] = v.type;
    for (const VarDecl& v : proc.locals) types_[v.name] = v.type;
    for (const LoopInfo& l : loops_) by_stmt_[l.stmt.get()] = &l;
  }

  // The candidate holds on first arrival at the loop head.
  VerificationCondition initiation(const LoopInfo& loop, const ExprPtr& goal) {
    begin();
    ExprPtr vc = wp_prefix(proc_.body, loop.path, 0, goal);
    if (!proc_.requires_cl.empty()) vc = mk_imp(mk_conj(proc_.requires_cl), vc);
    return {"initiation", loop.id, std::move(vc), std::move(fresh_)};
  }

  // One body pass from an arbitrary head state re-establishes the candidate.
  VerificationCondition consecution(const LoopInfo& loop, const ExprPtr& goal) {
    begin();
    std::vector<ExprPtr> assumed = facts_at(loop.id);
    assumed.push_back(loop.guard);
    ExprPtr vc = mk_imp(mk_conj(assumed), wp_block(loop.stmt->body, goal));
    return {"consecution", loop.id, std::move(vc), std::move(fresh_)};
  }

 private:
  void begin() {
    fresh_.clear();
    counter_ = 1;
  }

  std::vector<ExprPtr> facts_at(const std::string& loop_id) const {
    auto it = facts_.find(loop_id);
    return it == facts_.end() ? std::vector<ExprPtr>{} : it->second;
  }

  const LoopInfo& loop_of(const Stmt* s) const {
    auto it = by_stmt_.find(s);
    if (it == by_stmt_.end())
      throw AnalysisError("internal: while statement without loop info");
    return *it->second;
  }

  ExprPtr mk_fresh(const std::string& base) {
    std::string name = base + "!" + std::to_string(counter_++);
    auto it = types_.find(base);
    Type t = it == types_.end() ? Type::Int : it->second;
    fresh_.emplace_back(name, t);
    return mk_var(name, {}, t);
  }

  ExprPtr havoc_set(const std::set<std::string>& vars, const ExprPtr& q) {
    std::map<std::string, ExprPtr> sub;
    for (const std::string& v : vars) sub.emplace(v, mk_fresh(v));
    return subst(q, sub);
  }

  // WP of the prefix of `block` leading to the loop named by path[step..],
  // with `at_head` required at that loop's head.
  ExprPtr wp_prefix(const Block& block, const std::vector<LoopPathStep>& path,
                    size_t step, const ExprPtr& at_head) {
    const LoopPathStep& ps = path[step];
    const StmtPtr& s = block[static_cast<size_t>(ps.index)];
    ExprPtr q;
    if (step + 1 == path.size()) {
      q = at_head;  // s is the target loop itself
    } else {
      switch (ps.kind) {
        case LoopPathStep::Kind::While: {
          // Entering an enclosing loop's body: its targets are arbitrary,
          // its head facts and its guard hold.
          const LoopInfo& li = loop_of(s.get());
          ExprPtr inner = wp_prefix(s->body, path, step + 1, at_head);
          std::vector<ExprPtr> facts = facts_at(li.id);
          facts.push_back(li.guard);
          q = havoc_set(li.targets, mk_imp(mk_conj(facts), inner));
          break;
        }
        case LoopPathStep::Kind::Then:
          q = mk_imp(s->expr, wp_prefix(s->body, path, step + 1, at_head));
          break;
        case LoopPathStep::Kind::Else:
          q = mk_imp(mk_not(s->expr), wp_prefix(s->orelse, path, step + 1, at_head));
          break;
      }
    }
    for (int i = ps.index - 1; i >= 0; --i)
      q = wp_stmt(block[static_cast<size_t>(i)], q);
    return q;
  }

  ExprPtr wp_block(const Block& block, ExprPtr q) {
    for (auto it = block.rbegin(); it != block.rend(); ++it) q = wp_stmt(*it, q);
    return q;
  }

  ExprPtr wp_stmt(const StmtPtr& s, const ExprPtr& q) {
    switch (s->kind) {
      case StmtKind::Assign:
        return subst(q, s->var, s->expr);
      case StmtKind::Havoc:
        return subst(q, s->var, mk_fresh(s->var));
      case StmtKind::Assume:
        return mk_imp(s->expr, q);
      case StmtKind::Assert:
        return mk_and(s->expr, q);
      case StmtKind::If: {
        ExprPtr then_wp = wp_block(s->body, q);
        ExprPtr else_wp = wp_block(s->orelse, q);
        return mk_and(mk_imp(s->expr, then_wp), mk_imp(mk_not(s->expr), else_wp));
      }
      case StmtKind::While: {
        // Control has passed this loop: targets arbitrary, head facts hold,
        // guard is false.
        const LoopInfo& li = loop_of(s.get());
        std::vector<ExprPtr> facts = facts_at(li.id);
        facts.push_back(mk_not(li.guard));
        return havoc_set(li.targets, mk_imp(mk_conj(facts), q));
      }
      case StmtKind::Call: {
        const ProcedureDecl* callee = prog_.procedure(s->var);
        if (!callee) throw AnalysisError("internal: call to unknown procedure " + s->var);
        // Arguments are evaluated in the pre-state; snapshot them so the
        // havoc of modified globals cannot reach into them.
        std::map<std::string, ExprPtr> formal_to_snap;
        std::map<std::string, ExprPtr> snap_to_arg;
        for (size_t i = 0; i < callee->ins.size(); ++i) {
          ExprPtr snap = mk_fresh(callee->ins[i].name);
          formal_to_snap.emplace(callee->ins[i].name, snap);
          snap_to_arg.emplace(snap->name, s->call_args[i]);
        }
        std::map<std::string, ExprPtr> post_sub = formal_to_snap;
        for (size_t i = 0; i < callee->outs.size(); ++i) {
          auto it = types_.find(s->call_outs[i]);
          Type t = it == types_.end() ? callee->outs[i].type : it->second;
          post_sub.emplace(callee->outs[i].name, mk_var(s->call_outs[i], s->pos, t));
        }
        ExprPtr r = q;
        if (!callee->ensures_cl.empty())
          r = mk_imp(subst(mk_conj(callee->ensures_cl), post_sub), r);
        std::set<std::string> clobbered(s->call_outs.begin(), s->call_outs.end());
        for (const std::string& g : callee->modifies) clobbered.insert(g);
        r = havoc_set(clobbered, r);
        if (!callee->requires_cl.empty())
          r = mk_and(subst(mk_conj(callee->requires_cl), formal_to_snap), r);
        return subst(r, snap_to_arg);
      }
    }
    throw AnalysisError("internal: unhandled statement kind");
  }

  const Program& prog_;
  const ProcedureDecl& proc_;
  HeadFacts facts_;
  std::vector<LoopInfo> loops_;
  std::map<const Stmt*, const LoopInfo*> by_stmt_;
  std::map<std::string, Type> types_;
  std::vector<std::pair<std::string, Type>> fresh_;
  int counter_ = 1;
};

}  // namespace invforge

#endif  // INVFORGE_WP_HPP
