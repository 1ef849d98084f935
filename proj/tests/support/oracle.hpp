#ifndef INVFORGE_TESTS_SUPPORT_ORACLE_HPP
#define INVFORGE_TESTS_SUPPORT_ORACLE_HPP

// Brute-force enumeration of postcondition weakenings, written as plain
// nested loops over constants x variables x occurrences x aged forms.  This
// is a deliberate re-implementation of the generation rules — it shares only
// the AST substrate (parse, replace, occurrence counting) with the engine —
// and is compared against generate_candidates() for set equality.

#include <set>
#include <string>
#include <vector>

#include <invforge/analysis.hpp>
#include <invforge/printer.hpp>
#include <invforge/weakening.hpp>

namespace oracle {

using namespace invforge;

namespace detail {

struct Scan {
  std::vector<std::string> id_order;
  std::set<std::string> ids;
  std::set<std::string> bound;
  std::vector<long long> num_order;
  std::set<long long> nums;
  std::vector<ExprPtr> sel_order;
  std::set<std::string> sels;
};

inline void scan(const ExprPtr& e, Scan& s) {
  if (e->kind == ExprKind::Var) {
    if (s.ids.insert(e->name).second) s.id_order.push_back(e->name);
    return;
  }
  if (e->kind == ExprKind::IntLit) {
    if (s.nums.insert(e->int_val).second) s.num_order.push_back(e->int_val);
    return;
  }
  if (e->kind == ExprKind::MapSel &&
      s.sels.insert(print_expr(e)).second)
    s.sel_order.push_back(e);
  if (e->kind == ExprKind::Quant)
    for (const Binder& b : e->binders) s.bound.insert(b.name);
  for (const ExprPtr& k : e->kids) scan(k, s);
}

inline std::map<std::string, Type> var_types(const Program& prog,
                                             const ProcedureDecl& proc) {
  std::map<std::string, Type> t;
  for (const VarDecl& v : prog.globals) t[v.name] = v.type;
  for (const VarDecl& v : proc.ins) t[v.name] = v.type;
  for (const VarDecl& v : proc.outs) t[v.name] = v.type;
  for (const VarDecl& v : proc.locals) t[v.name] = v.type;
  return t;
}

inline bool mentions_target(const ExprPtr& e, const std::set<std::string>& targets) {
  for (const std::string& v : free_vars(e))
    if (targets.count(v)) return true;
  return false;
}

// Previous-iteration expressions for `var`, rescanned from scratch: walk the
// loop body for var := var + c / var := c + var / var := var - c.
inline void scan_aged(const Block& block, const std::string& var,
                      const std::set<std::string>& targets,
                      std::vector<ExprPtr>& out, std::set<std::string>& seen) {
  for (const StmtPtr& st : block) {
    if (st->kind == StmtKind::If || st->kind == StmtKind::While) {
      scan_aged(st->body, var, targets, out, seen);
      scan_aged(st->orelse, var, targets, out, seen);
      continue;
    }
    if (st->kind != StmtKind::Assign || st->var != var) continue;
    const ExprPtr& rhs = st->expr;
    if (rhs->kind != ExprKind::Binary) continue;
    ExprPtr other;
    BinOp inverse;
    if (rhs->bin == BinOp::Add && rhs->kids[0]->kind == ExprKind::Var &&
        rhs->kids[0]->name == var) {
      other = rhs->kids[1];
      inverse = BinOp::Sub;
    } else if (rhs->bin == BinOp::Add && rhs->kids[1]->kind == ExprKind::Var &&
               rhs->kids[1]->name == var) {
      other = rhs->kids[0];
      inverse = BinOp::Sub;
    } else if (rhs->bin == BinOp::Sub && rhs->kids[0]->kind == ExprKind::Var &&
               rhs->kids[0]->name == var) {
      other = rhs->kids[1];
      inverse = BinOp::Add;
    } else {
      continue;
    }
    if (mentions_target(other, targets)) continue;
    ExprPtr aged = mk_bin(inverse, mk_var(var, {}), other, {});
    if (seen.insert(print_expr(aged)).second) out.push_back(aged);
  }
}

inline std::vector<ExprPtr> aged_forms(const std::string& var, const LoopInfo& loop) {
  std::vector<ExprPtr> out;
  std::set<std::string> seen;
  scan_aged(loop.stmt->body, var, loop.targets, out, seen);
  return out;
}

}  // namespace detail

// Alpha-normalized keys of every weakening the heuristics at `level` should
// produce for `proc`.
inline std::set<std::string> weakening_keys(const Program& prog,
                                            const ProcedureDecl& proc,
                                            const HeuristicLevel& level) {
  std::set<std::string> keys;
  const std::map<std::string, Type> types = detail::var_types(prog, proc);

  // Postcondition pool: each ensures clause, plus (with splitting) each of
  // its top-level conjuncts, found with an explicit worklist.
  std::vector<ExprPtr> posts;
  for (const ExprPtr& clause : proc.ensures_cl) {
    posts.push_back(clause);
    if (!level.conjunct_split) continue;
    std::vector<ExprPtr> work{clause}, parts;
    while (!work.empty()) {
      ExprPtr e = work.back();
      work.pop_back();
      if (e->kind == ExprKind::Binary && e->bin == BinOp::And) {
        work.push_back(e->kids[1]);
        work.push_back(e->kids[0]);
      } else {
        parts.push_back(e);
      }
    }
    if (parts.size() >= 2)
      for (const ExprPtr& part : parts) posts.push_back(part);
  }

  for (const LoopInfo& loop : outer_loops(prog, proc)) {
    for (const ExprPtr& post : posts) {
      keys.insert(normal_key(post));
      if (!level.relaxation) continue;

      detail::Scan s;
      detail::scan(post, s);

      // Aged replacement pool per variable.
      auto reps = [&](const std::string& var) {
        std::vector<ExprPtr> r{mk_var(var, {})};
        if (level.aging)
          for (const ExprPtr& a : detail::aged_forms(var, loop)) r.push_back(a);
        return r;
      };

      // The relaxable constants.
      std::vector<std::pair<ExprPtr, Type>> consts;
      for (const std::string& name : s.id_order) {
        if (s.bound.count(name) || loop.targets.count(name)) continue;
        auto it = types.find(name);
        if (it == types.end()) continue;
        consts.emplace_back(mk_var(name, {}), it->second);
      }
      for (long long v : s.num_order) consts.emplace_back(mk_int(v, {}), Type::Int);
      for (const ExprPtr& sel : s.sel_order)
        if (!detail::mentions_target(sel, loop.targets))
          consts.emplace_back(sel, Type::Int);

      for (const auto& [c, ctype] : consts) {
        const int k = occurrence_count(post, c);
        if (k == 0) continue;
        for (const std::string& var : loop.targets) {
          auto it = types.find(var);
          if (it == types.end() || it->second != ctype) continue;
          for (const ExprPtr& r : reps(var)) {
            keys.insert(normal_key(replace_all(post, c, r)));
            if (level.uncoupling)
              for (int n = 1; n <= k; ++n)
                keys.insert(normal_key(replace_nth(post, c, r, n)));
          }
        }
        if (level.double_uncoupling && k >= 2) {
          for (const std::string& v1 : loop.targets) {
            auto t1 = types.find(v1);
            if (t1 == types.end() || t1->second != ctype) continue;
            for (const std::string& v2 : loop.targets) {
              auto t2 = types.find(v2);
              if (v2 == v1 || t2 == types.end() || t2->second != ctype) continue;
              for (const ExprPtr& r1 : reps(v1))
                for (const ExprPtr& r2 : reps(v2))
                  for (int n1 = 1; n1 <= k; ++n1)
                    for (int n2 = n1 + 1; n2 <= k; ++n2)
                      // Replacing the later occurrence first leaves the
                      // earlier index untouched.
                      keys.insert(normal_key(
                          replace_nth(replace_nth(post, c, r2, n2), c, r1, n1)));
            }
          }
        }
      }

      // Occurrences of one target variable rewired to a different target.
      if (level.uncoupling) {
        for (const std::string& t : loop.targets) {
          if (s.bound.count(t)) continue;
          auto tt = types.find(t);
          if (tt == types.end()) continue;
          ExprPtr c = mk_var(t, {});
          const int k = occurrence_count(post, c);
          if (k == 0) continue;
          for (const std::string& var : loop.targets) {
            auto it = types.find(var);
            if (var == t || it == types.end() || it->second != tt->second) continue;
            for (const ExprPtr& r : reps(var))
              for (int n = 1; n <= k; ++n)
                keys.insert(normal_key(replace_nth(post, c, r, n)));
          }
        }
      }
    }
  }
  return keys;
}

// Convenience: the engine's candidate formulas as the same kind of key set.
inline std::set<std::string> engine_keys(const std::vector<Candidate>& cands) {
  std::set<std::string> keys;
  for (const Candidate& c : cands) keys.insert(normal_key(c.formula));
  return keys;
}

}  // namespace oracle

#endif  // INVFORGE_TESTS_SUPPORT_ORACLE_HPP
