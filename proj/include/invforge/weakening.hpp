#ifndef INVFORGE_WEAKENING_HPP
#define INVFORGE_WEAKENING_HPP

// Candidate invariant generation: weakenings of a procedure's postcondition
// obtained by term dropping, constant relaxation, uncoupling, and variable
// aging.  Everything here is pure and deterministic; the verifier decides
// which candidates actually hold.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "analysis.hpp"
#include "ast.hpp"
#include "error.hpp"
#include "printer.hpp"

namespace invforge {

// ----------------------------------------------------------- heuristic level

struct HeuristicLevel {
  bool relaxation = false;         // constant -> target variable
  bool aging = false;              // also substitute the previous-iteration value
  bool uncoupling = false;         // relax single occurrences independently
  bool conjunct_split = false;     // drop terms at top-level-conjunct granularity
  bool double_uncoupling = false;  // two occurrences -> two distinct variables

  // Levels stack strictly: each one adds heuristics on top of the previous.
  //   0 unchanged clauses only; 1 +relaxation; 2 +aging;
  //   3 +uncoupling +conjunct split (default); 4 +double uncoupling.
  static HeuristicLevel from_level(int level) {
    HeuristicLevel h;
    h.relaxation = level >= 1;
    h.aging = level >= 2;
    h.uncoupling = level >= 3;
    h.conjunct_split = level >= 3;
    h.double_uncoupling = level >= 4;
    return h;
  }

  static HeuristicLevel defaults() { return from_level(3); }

  // Pointwise flag implication: every heuristic enabled here is also enabled
  // in `other`.  Candidate sets are monotone along this order.
  bool subsumed_by(const HeuristicLevel& other) const {
    return (!relaxation || other.relaxation) && (!aging || other.aging) &&
           (!uncoupling || other.uncoupling) &&
           (!conjunct_split || other.conjunct_split) &&
           (!double_uncoupling || other.double_uncoupling);
  }
};

// ------------------------------------------------------------------- traces

// One recorded heuristic application.  A candidate's trace replays against
// its origin ensures clause to reproduce the candidate formula exactly.
struct TraceStep {
  enum class Kind : unsigned char {
    Relax,  // substitution of a constant occurrence (or all of them)
    Split,  // selection of one top-level conjunct (term dropping)
  };

  Kind kind = Kind::Relax;

  // Split payload: 1-based index into the flattened top-level conjuncts.
  int conjunct = 0;

  // Relax payload.
  ExprPtr constant;     // the sub-expression replaced
  ExprPtr replacement;  // what it became (the variable, possibly aged)
  int constant_rank = 0;   // position in the constant enumeration (ordering)
  int occurrence = 0;      // 1-based pre-order occurrence; 0 = every occurrence
  std::string variable;    // the target variable substituted in
  bool aged = false;       // replacement is the variable's previous-iteration value
};

namespace detail {

using StepKey = std::tuple<int, int, int, int, std::string, int, std::string>;

inline StepKey step_key(const TraceStep& s) {
  if (s.kind == TraceStep::Kind::Split)
    return {1, s.conjunct, 0, 0, "", 0, ""};
  return {0, 0, s.constant_rank, s.occurrence, s.variable, s.aged ? 1 : 0,
          s.replacement ? normal_key(s.replacement) : ""};
}

}  // namespace detail

inline bool trace_less(const std::vector<TraceStep>& a, const std::vector<TraceStep>& b) {
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    detail::StepKey ka = detail::step_key(a[i]), kb = detail::step_key(b[i]);
    if (ka != kb) return ka < kb;
  }
  return a.size() < b.size();
}

// --------------------------------------------------------------- candidates

struct Candidate {
  ExprPtr formula;
  int ensures_index = 0;    // which ensures clause the trace starts from
  std::string source_loop;  // loop whose target set drove the substitutions
  std::vector<TraceStep> trace;
};

inline bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.ensures_index != b.ensures_index) return a.ensures_index < b.ensures_index;
  return trace_less(a.trace, b.trace);
}

// -------------------------------------------------------------- term dropping

// Top-level conjuncts of a formula, flattening nested && only.
inline void flatten_conjuncts(const ExprPtr& f, std::vector<ExprPtr>& out) {
  if (f->kind == ExprKind::Binary && f->bin == BinOp::And) {
    flatten_conjuncts(f->kids[0], out);
    flatten_conjuncts(f->kids[1], out);
    return;
  }
  out.push_back(f);
}

inline std::vector<ExprPtr> flatten_conjuncts(const ExprPtr& f) {
  std::vector<ExprPtr> out;
  flatten_conjuncts(f, out);
  return out;
}

// A postcondition formula to weaken: either a whole ensures clause
// (conjunct == 0) or one of its flattened top-level conjuncts (1-based).
struct PostClause {
  ExprPtr formula;
  int ensures_index = 0;
  int conjunct = 0;
};

// One clause per ensures; with conjunct splitting also each top-level
// conjunct.  Duplicates (alpha-equivalent formulas) are dropped, first wins.
inline std::vector<PostClause> postconditions(const ProcedureDecl& proc,
                                              const HeuristicLevel& level) {
  std::vector<PostClause> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < proc.ensures_cl.size(); ++i) {
    const ExprPtr& clause = proc.ensures_cl[i];
    if (seen.insert(normal_key(clause)).second)
      out.push_back({clause, static_cast<int>(i), 0});
    if (!level.conjunct_split) continue;
    std::vector<ExprPtr> parts = flatten_conjuncts(clause);
    if (parts.size() < 2) continue;
    for (size_t c = 0; c < parts.size(); ++c)
      if (seen.insert(normal_key(parts[c])).second)
        out.push_back({parts[c], static_cast<int>(i), static_cast<int>(c) + 1});
  }
  return out;
}

// ------------------------------------------------------------------- aging

namespace detail {

inline void collect_assignments(const Block& block, const std::string& var,
                                std::vector<ExprPtr>& rhs) {
  for (const StmtPtr& s : block) {
    switch (s->kind) {
      case StmtKind::Assign:
        if (s->var == var) rhs.push_back(s->expr);
        break;
      case StmtKind::If:
        collect_assignments(s->body, var, rhs);
        collect_assignments(s->orelse, var, rhs);
        break;
      case StmtKind::While:
        collect_assignments(s->body, var, rhs);
        break;
      default:
        break;
    }
  }
}

}  // namespace detail

// The expressions denoting `var`'s value one iteration earlier: each
// assignment of the invertible affine shape var := var + c / var := c + var /
// var := var - c (c loop-constant) contributes the inverse expression
// var - c / var + c.  Flow-insensitive over the whole loop body; anything
// else contributes nothing.  Duplicates removed, source order kept.
inline std::vector<ExprPtr> aging_exprs(const std::string& var, const LoopInfo& loop) {
  std::vector<ExprPtr> rhs;
  detail::collect_assignments(loop.stmt->body, var, rhs);

  std::vector<ExprPtr> out;
  auto add = [&out](ExprPtr e) {
    for (const ExprPtr& have : out)
      if (eq_struct(have, e)) return;
    out.push_back(std::move(e));
  };

  for (const ExprPtr& e : rhs) {
    if (e->kind != ExprKind::Binary) continue;
    const ExprPtr& l = e->kids[0];
    const ExprPtr& r = e->kids[1];
    auto is_var = [&var](const ExprPtr& x) {
      return x->kind == ExprKind::Var && x->name == var;
    };
    if (e->bin == BinOp::Add) {
      if (is_var(l) && is_loop_constant(r, loop))
        add(mk_bin(BinOp::Sub, mk_var(var, {}, l->type), r, e->pos));
      else if (is_var(r) && is_loop_constant(l, loop))
        add(mk_bin(BinOp::Sub, mk_var(var, {}, r->type), l, e->pos));
    } else if (e->bin == BinOp::Sub) {
      if (is_var(l) && is_loop_constant(r, loop))
        add(mk_bin(BinOp::Add, mk_var(var, {}, l->type), r, e->pos));
    }
  }
  return out;
}

// --------------------------------------------------------------- constants

namespace detail {

// A relaxable source: a loop-constant sub-expression, or (for uncoupling
// only) a target variable whose single occurrences may be rewired to a
// different target.
struct RelaxSource {
  ExprPtr expr;
  Type type = Type::Unknown;
  int rank = 0;            // enumeration order, used by the trace sort key
  bool target_var = false; // true for the uncoupling-only variable sources
};

// Names that occur as quantifier binders anywhere in the formula.  An
// identifier with a bound occurrence is never treated as a constant (and a
// target variable sharing a binder name is not rewired): replacement would
// have to rename the binder and change the formula's meaning.
inline std::set<std::string> bound_names(const ExprPtr& f) {
  std::set<std::string> out;
  for (const Occurrence& occ : subexpressions(f, SynClass::Id))
    if (occ.binder_slot) out.insert(occ.expr->name);
  return out;
}

inline std::map<std::string, Type> scope_types(const Program& prog,
                                               const ProcedureDecl& proc) {
  std::map<std::string, Type> types;
  for (const VarDecl& g : prog.globals) types[g.name] = g.type;
  for (const VarDecl& v : proc.ins) types[v.name] = v.type;
  for (const VarDecl& v : proc.outs) types[v.name] = v.type;
  for (const VarDecl& v : proc.locals) types[v.name] = v.type;
  return types;
}

// Enumerate the relaxation sources of `post` with respect to `loop`:
// identifier constants, number literals (by value), loop-constant map
// selections — in that class order, each class by first occurrence — then
// the target-variable sources in name order.
inline std::vector<RelaxSource> relax_sources(const ExprPtr& post, const LoopInfo& loop,
                                              const std::map<std::string, Type>& types,
                                              bool with_target_vars) {
  std::vector<RelaxSource> out;
  const std::set<std::string> bound = bound_names(post);

  std::set<std::string> seen_ids;
  for (const Occurrence& occ : subexpressions(post, SynClass::Id)) {
    const std::string& name = occ.expr->name;
    if (occ.binder_slot || bound.count(name) || loop.targets.count(name)) continue;
    if (!seen_ids.insert(name).second) continue;
    auto it = types.find(name);
    if (it == types.end()) continue;  // a free name the scope does not know
    out.push_back({mk_var(name, {}, it->second), it->second,
                   static_cast<int>(out.size()), false});
  }

  std::set<long long> seen_values;
  for (const Occurrence& occ : subexpressions(post, SynClass::Number)) {
    if (!seen_values.insert(occ.expr->int_val).second) continue;
    out.push_back({mk_int(occ.expr->int_val, {}), Type::Int,
                   static_cast<int>(out.size()), false});
  }

  std::set<std::string> seen_sels;
  for (const Occurrence& occ : subexpressions(post, SynClass::Map)) {
    if (!is_loop_constant(occ.expr, loop)) continue;
    if (!seen_sels.insert(normal_key(occ.expr)).second) continue;
    out.push_back({occ.expr, Type::Int, static_cast<int>(out.size()), false});
  }

  if (with_target_vars) {
    for (const std::string& t : loop.targets) {  // std::set: name order
      if (bound.count(t)) continue;
      auto it = types.find(t);
      if (it == types.end()) continue;
      ExprPtr var = mk_var(t, {}, it->second);
      if (occurrence_count(post, var) == 0) continue;
      out.push_back({var, it->second, static_cast<int>(out.size()), true});
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- weakening

// All weakenings of one postcondition clause against one loop: the clause
// itself, every coupled relaxation (all occurrences of a constant at once),
// every uncoupled relaxation (one occurrence at a time), and — with double
// uncoupling — every pair of occurrences rewired to two distinct variables.
// Aged variants substitute the variable's previous-iteration expressions.
inline std::vector<Candidate> build_weakenings(const Program& prog,
                                               const ProcedureDecl& proc,
                                               const PostClause& post,
                                               const LoopInfo& loop,
                                               const HeuristicLevel& level) {
  std::vector<Candidate> out;
  std::vector<TraceStep> base_trace;
  if (post.conjunct > 0) {
    TraceStep split;
    split.kind = TraceStep::Kind::Split;
    split.conjunct = post.conjunct;
    base_trace.push_back(split);
  }
  out.push_back({post.formula, post.ensures_index, loop.id, base_trace});
  if (!level.relaxation) return out;

  const std::map<std::string, Type> types = detail::scope_types(prog, proc);
  const std::vector<detail::RelaxSource> sources =
      detail::relax_sources(post.formula, loop, types, level.uncoupling);

  // Replacement pool for a target variable: the variable itself, then its
  // aged forms.
  auto replacements = [&](const std::string& var) {
    std::vector<std::pair<ExprPtr, bool>> reps;  // (expression, aged?)
    auto it = types.find(var);
    const Type t = it == types.end() ? Type::Unknown : it->second;
    reps.emplace_back(mk_var(var, {}, t), false);
    if (level.aging)
      for (const ExprPtr& a : aging_exprs(var, loop)) reps.emplace_back(a, true);
    return reps;
  };

  auto emit = [&](ExprPtr formula, const TraceStep& step) {
    std::vector<TraceStep> trace = base_trace;
    trace.push_back(step);
    out.push_back({std::move(formula), post.ensures_index, loop.id, std::move(trace)});
  };

  for (const detail::RelaxSource& src : sources) {
    const int occurrences = occurrence_count(post.formula, src.expr);
    if (occurrences == 0) continue;

    for (const std::string& var : loop.targets) {
      auto vt = types.find(var);
      if (vt == types.end() || vt->second != src.type) continue;
      if (src.target_var && var == src.expr->name) continue;

      for (const auto& [rep, aged] : replacements(var)) {
        TraceStep step;
        step.kind = TraceStep::Kind::Relax;
        step.constant = src.expr;
        step.replacement = rep;
        step.constant_rank = src.rank;
        step.variable = var;
        step.aged = aged;

        if (!src.target_var) {
          step.occurrence = 0;
          emit(replace_all(post.formula, src.expr, rep), step);
        }
        if (level.uncoupling || src.target_var) {
          for (int n = 1; n <= occurrences; ++n) {
            step.occurrence = n;
            emit(replace_nth(post.formula, src.expr, rep, n), step);
          }
        }
      }
    }

    // Double uncoupling: two occurrences of the same constant, two distinct
    // variables.  The second step's occurrence index is recorded against the
    // formula after the first step, so the trace replays sequentially.
    if (level.double_uncoupling && !src.target_var && occurrences >= 2) {
      for (const std::string& v1 : loop.targets) {
        auto t1 = types.find(v1);
        if (t1 == types.end() || t1->second != src.type) continue;
        for (const std::string& v2 : loop.targets) {
          if (v2 == v1) continue;
          auto t2 = types.find(v2);
          if (t2 == types.end() || t2->second != src.type) continue;
          for (const auto& [rep1, aged1] : replacements(v1)) {
            for (const auto& [rep2, aged2] : replacements(v2)) {
              for (int n1 = 1; n1 < occurrences; ++n1) {
                for (int n2 = n1 + 1; n2 <= occurrences; ++n2) {
                  TraceStep s1;
                  s1.kind = TraceStep::Kind::Relax;
                  s1.constant = src.expr;
                  s1.replacement = rep1;
                  s1.constant_rank = src.rank;
                  s1.occurrence = n1;
                  s1.variable = v1;
                  s1.aged = aged1;
                  TraceStep s2 = s1;
                  s2.replacement = rep2;
                  // After step one, occurrence n1 is gone and the inserted
                  // replacement may itself contain the constant.
                  s2.occurrence = n2 - 1 + occurrence_count(rep1, src.expr);
                  s2.variable = v2;
                  s2.aged = aged2;

                  std::vector<TraceStep> trace = base_trace;
                  trace.push_back(s1);
                  trace.push_back(s2);
                  out.push_back({replace_two(post.formula, src.expr, rep1, n1, rep2, n2),
                                 post.ensures_index, loop.id, std::move(trace)});
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- generation

// All candidates for the procedure: every weakening of every postcondition
// clause against every outer loop, in a deterministic order (ensures clause,
// then trace), deduplicated by alpha-equivalence (first occurrence wins).
inline std::vector<Candidate> generate_candidates(const Program& prog,
                                                  const ProcedureDecl& proc,
                                                  const HeuristicLevel& level) {
  std::vector<Candidate> all;
  const std::vector<PostClause> posts = postconditions(proc, level);
  for (const LoopInfo& loop : outer_loops(prog, proc))
    for (const PostClause& post : posts)
      for (Candidate& c : build_weakenings(prog, proc, post, loop, level))
        all.push_back(std::move(c));

  std::stable_sort(all.begin(), all.end(), candidate_less);

  std::vector<Candidate> out;
  std::set<std::string> seen;
  for (Candidate& c : all)
    if (seen.insert(normal_key(c.formula)).second) out.push_back(std::move(c));
  return out;
}

// Replays a candidate's recorded heuristic applications against its origin
// ensures clause.  The result must equal the candidate's formula; used by
// tests and the candidate dump to audit provenance.
inline ExprPtr replay_trace(const ProcedureDecl& proc, const Candidate& cand) {
  if (cand.ensures_index < 0 ||
      cand.ensures_index >= static_cast<int>(proc.ensures_cl.size()))
    throw AnalysisError("candidate origin index " + std::to_string(cand.ensures_index) +
                        " out of range");
  ExprPtr f = proc.ensures_cl[cand.ensures_index];
  for (const TraceStep& step : cand.trace) {
    if (step.kind == TraceStep::Kind::Split) {
      std::vector<ExprPtr> parts = flatten_conjuncts(f);
      if (step.conjunct < 1 || step.conjunct > static_cast<int>(parts.size()))
        throw AnalysisError("trace conjunct " + std::to_string(step.conjunct) +
                            " out of range");
      f = parts[step.conjunct - 1];
    } else if (step.occurrence == 0) {
      f = replace_all(f, step.constant, step.replacement);
    } else {
      f = replace_nth(f, step.constant, step.replacement, step.occurrence);
    }
  }
  return f;
}

}  // namespace invforge

#endif  // INVFORGE_WEAKENING_HPP
