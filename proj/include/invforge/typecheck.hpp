#ifndef INVFORGE_TYPECHECK_HPP
#define INVFORGE_TYPECHECK_HPP

// Name resolution and type checking.  Checking rebuilds expressions with type
// tags filled in and returns a new, fully typed Program; inputs are untouched.
//
// Scope rules:
//   - requires clauses range over ins + globals;
//   - ensures clauses range over ins + outs + globals;
//   - bodies range over ins (read-only) + outs + locals + globals;
//   - assignment/havoc targets are outs, locals, or globals listed in the
//     procedure's modifies clause;
//   - a callee's modifies set must be contained in the caller's;
//   - function bodies may reference only previously declared functions (this
//     also rules out recursive definitions, which the solver backend could
//     not encode as definitions);
//   - axioms range over globals and functions.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "invforge/ast.hpp"
#include "invforge/error.hpp"
#include "invforge/parser.hpp"

namespace invforge {

// Flat variable environment for formula checking.
struct Scope {
  const Program* prog = nullptr;
  std::map<std::string, Type> vars;
};

inline Scope globals_scope(const Program& prog) {
  Scope s;
  s.prog = &prog;
  for (const VarDecl& g : prog.globals) s.vars[g.name] = g.type;
  return s;
}

// ins + outs + locals + globals: what a loop-head formula may mention.
inline Scope proc_scope(const Program& prog, const ProcedureDecl& proc) {
  Scope s = globals_scope(prog);
  for (const VarDecl& v : proc.ins) s.vars[v.name] = v.type;
  for (const VarDecl& v : proc.outs) s.vars[v.name] = v.type;
  for (const VarDecl& v : proc.locals) s.vars[v.name] = v.type;
  return s;
}

class TypeChecker {
 public:
  TypeChecker(const Program& prog, std::string file)
      : prog_(prog), file_(std::move(file)) {}

  Program check_program() {
    Program out;
    std::set<std::string> names;
    for (const VarDecl& g : prog_.globals) {
      if (!names.insert(g.name).second)
        fail(g.pos, "duplicate global '" + g.name + "'");
      out.globals.push_back(g);
    }
    std::set<std::string> fun_names;
    size_t fun_limit = 0;
    for (const FunctionDecl& f : prog_.functions) {
      if (!fun_names.insert(f.name).second)
        fail(f.pos, "duplicate function '" + f.name + "'");
      FunctionDecl tf = f;
      if (f.body) {
        Scope s;  // function bodies see only their parameters
        s.prog = &prog_;
        std::set<std::string> pnames;
        for (const VarDecl& p : f.params) {
          if (!pnames.insert(p.name).second)
            fail(f.pos, "duplicate parameter '" + p.name + "' in function '" + f.name + "'");
          s.vars[p.name] = p.type;
        }
        visible_functions_ = fun_limit;  // only earlier functions are callable
        tf.body = check(s, f.body, f.result);
      }
      out.functions.push_back(std::move(tf));
      ++fun_limit;
    }
    visible_functions_ = prog_.functions.size();
    {
      Scope s = globals_scope(prog_);
      for (const ExprPtr& ax : prog_.axioms)
        out.axioms.push_back(check(s, ax, Type::Bool));
    }
    std::set<std::string> proc_names;
    for (const ProcedureDecl& p : prog_.procedures) {
      if (!proc_names.insert(p.name).second)
        fail(p.pos, "duplicate procedure '" + p.name + "'");
      out.procedures.push_back(check_procedure(p));
    }
    return out;
  }

  // Checks a standalone formula (e.g. a candidate invariant) in a scope.
  ExprPtr check_formula(const Scope& scope, const ExprPtr& f, Type expected = Type::Bool) {
    visible_functions_ = prog_.functions.size();
    return check(scope, f, expected);
  }

 private:
  [[noreturn]] void fail(Pos pos, const std::string& msg) const {
    throw TypeError(file_, pos, msg);
  }

  ProcedureDecl check_procedure(const ProcedureDecl& p) {
    ProcedureDecl out = p;
    std::set<std::string> params;
    auto declare = [&](const VarDecl& v, const char* what) {
      if (prog_.global(v.name))
        fail(v.pos, std::string(what) + " '" + v.name + "' shadows a global");
      if (!params.insert(v.name).second)
        fail(v.pos, std::string("duplicate declaration of '") + v.name + "'");
    };
    for (const VarDecl& v : p.ins) declare(v, "parameter");
    for (const VarDecl& v : p.outs) declare(v, "result parameter");
    for (const VarDecl& v : p.locals) declare(v, "local");

    for (const std::string& m : p.modifies)
      if (!prog_.global(m))
        fail(p.pos, "modifies lists '" + m + "', which is not a global");

    Scope pre = globals_scope(prog_);
    for (const VarDecl& v : p.ins) pre.vars[v.name] = v.type;
    out.requires_cl.clear();
    for (const ExprPtr& r : p.requires_cl) out.requires_cl.push_back(check(pre, r, Type::Bool));

    Scope post = pre;
    for (const VarDecl& v : p.outs) post.vars[v.name] = v.type;
    out.ensures_cl.clear();
    for (const ExprPtr& e : p.ensures_cl) out.ensures_cl.push_back(check(post, e, Type::Bool));

    if (p.has_body) {
      Scope body = post;
      for (const VarDecl& v : p.locals) body.vars[v.name] = v.type;
      cur_proc_ = &p;
      out.body.clear();
      for (const StmtPtr& s : p.body) out.body.push_back(check_stmt(body, s));
      cur_proc_ = nullptr;
    }
    return out;
  }

  // True when `name` may be assigned or havoced inside the current procedure.
  void require_assignable(const Scope& scope, const std::string& name, Pos pos) {
    for (const VarDecl& v : cur_proc_->ins)
      if (v.name == name) fail(pos, "cannot assign to input parameter '" + name + "'");
    for (const VarDecl& v : cur_proc_->outs)
      if (v.name == name) return;
    for (const VarDecl& v : cur_proc_->locals)
      if (v.name == name) return;
    if (prog_.global(name)) {
      for (const std::string& m : cur_proc_->modifies)
        if (m == name) return;
      fail(pos, "assignment to global '" + name + "' requires listing it in modifies");
    }
    fail(pos, "undeclared variable '" + name + "'");
  }

  StmtPtr check_stmt(const Scope& scope, const StmtPtr& s) {
    switch (s->kind) {
      case StmtKind::Assert:
        return mk_assert(check(scope, s->expr, Type::Bool), s->pos);
      case StmtKind::Assume:
        return mk_assume(check(scope, s->expr, Type::Bool), s->pos);
      case StmtKind::Havoc: {
        require_assignable(scope, s->var, s->pos);
        return mk_havoc(s->var, s->pos);
      }
      case StmtKind::Assign: {
        require_assignable(scope, s->var, s->pos);
        auto it = scope.vars.find(s->var);
        ExprPtr rhs = check(scope, s->expr, it->second);
        return mk_assign(s->var, std::move(rhs), s->pos);
      }
      case StmtKind::Call: {
        const ProcedureDecl* callee = prog_.procedure(s->var);
        if (!callee) fail(s->pos, "call to undeclared procedure '" + s->var + "'");
        if (s->call_args.size() != callee->ins.size())
          fail(s->pos, "call to '" + s->var + "' passes " +
                           std::to_string(s->call_args.size()) + " argument(s), expected " +
                           std::to_string(callee->ins.size()));
        std::vector<ExprPtr> args;
        for (size_t i = 0; i < s->call_args.size(); ++i)
          args.push_back(check(scope, s->call_args[i], callee->ins[i].type));
        if (!s->call_outs.empty()) {
          if (s->call_outs.size() != callee->outs.size())
            fail(s->pos, "call to '" + s->var + "' binds " +
                             std::to_string(s->call_outs.size()) + " result(s), expected " +
                             std::to_string(callee->outs.size()));
          std::set<std::string> seen;
          for (size_t i = 0; i < s->call_outs.size(); ++i) {
            const std::string& o = s->call_outs[i];
            if (!seen.insert(o).second)
              fail(s->pos, "duplicate call result variable '" + o + "'");
            require_assignable(scope, o, s->pos);
            if (scope.vars.at(o) != callee->outs[i].type)
              fail(s->pos, "call result '" + o + "' has type " +
                               type_name(scope.vars.at(o)) + ", expected " +
                               type_name(callee->outs[i].type));
          }
        }
        for (const std::string& m : callee->modifies) {
          bool covered = false;
          for (const std::string& cm : cur_proc_->modifies) covered |= (cm == m);
          if (!covered)
            fail(s->pos, "callee '" + callee->name + "' modifies '" + m +
                             "', which the caller does not list in modifies");
        }
        return mk_call(s->call_outs, s->var, std::move(args), s->pos);
      }
      case StmtKind::If: {
        ExprPtr guard = check(scope, s->expr, Type::Bool);
        Block then_block, else_block;
        for (const StmtPtr& t : s->body) then_block.push_back(check_stmt(scope, t));
        for (const StmtPtr& t : s->orelse) else_block.push_back(check_stmt(scope, t));
        return mk_if(std::move(guard), std::move(then_block), std::move(else_block), s->pos);
      }
      case StmtKind::While: {
        ExprPtr guard = check(scope, s->expr, Type::Bool);
        std::vector<ExprPtr> invs;
        for (const ExprPtr& inv : s->invariants) invs.push_back(check(scope, inv, Type::Bool));
        Block body;
        for (const StmtPtr& t : s->body) body.push_back(check_stmt(scope, t));
        return mk_while(std::move(guard), std::move(invs), std::move(body), s->pos);
      }
    }
    fail(s->pos, "malformed statement");
  }

  ExprPtr check(const Scope& scope, const ExprPtr& e, Type expected) {
    std::vector<Binder> env;
    ExprPtr typed = infer(scope, env, e);
    if (expected != Type::Unknown && typed->type != expected)
      fail(e->pos, std::string("expected ") + type_name(expected) + ", got " +
                       type_name(typed->type));
    return typed;
  }

  ExprPtr infer(const Scope& scope, std::vector<Binder>& env, const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit:
        return mk_int(e->int_val, e->pos);
      case ExprKind::BoolLit:
        return mk_bool(e->bool_val, e->pos);
      case ExprKind::Var: {
        for (size_t i = env.size(); i-- > 0;)
          if (env[i].name == e->name) return mk_var(e->name, e->pos, env[i].type);
        auto it = scope.vars.find(e->name);
        if (it == scope.vars.end())
          fail(e->pos, "undeclared identifier '" + e->name + "'");
        return mk_var(e->name, e->pos, it->second);
      }
      case ExprKind::MapSel: {
        ExprPtr m = infer(scope, env, e->kids[0]);
        if (m->type != Type::Map)
          fail(e->kids[0]->pos, std::string("map selection applied to ") + type_name(m->type));
        ExprPtr i = infer(scope, env, e->kids[1]);
        if (i->type != Type::Int)
          fail(e->kids[1]->pos, std::string("map index must be int, got ") + type_name(i->type));
        return mk_sel(std::move(m), std::move(i), e->pos);
      }
      case ExprKind::MapStore: {
        ExprPtr m = infer(scope, env, e->kids[0]);
        if (m->type != Type::Map)
          fail(e->kids[0]->pos, std::string("store applied to ") + type_name(m->type));
        ExprPtr i = infer(scope, env, e->kids[1]);
        if (i->type != Type::Int)
          fail(e->kids[1]->pos, std::string("store index must be int, got ") + type_name(i->type));
        ExprPtr v = infer(scope, env, e->kids[2]);
        if (v->type != Type::Int)
          fail(e->kids[2]->pos, std::string("stored value must be int, got ") + type_name(v->type));
        return mk_store(std::move(m), std::move(i), std::move(v), e->pos);
      }
      case ExprKind::Unary: {
        ExprPtr k = infer(scope, env, e->kids[0]);
        const Type want = e->un == UnOp::Neg ? Type::Int : Type::Bool;
        if (k->type != want)
          fail(e->pos, std::string(e->un == UnOp::Neg ? "-" : "!") + " applied to " +
                           type_name(k->type));
        return mk_un(e->un, std::move(k), e->pos);
      }
      case ExprKind::Binary: {
        ExprPtr l = infer(scope, env, e->kids[0]);
        ExprPtr r = infer(scope, env, e->kids[1]);
        switch (e->bin) {
          case BinOp::Mul: case BinOp::Div: case BinOp::Add: case BinOp::Sub:
            if (l->type != Type::Int || r->type != Type::Int)
              fail(e->pos, std::string("arithmetic on ") + type_name(l->type) + " and " +
                               type_name(r->type));
            break;
          case BinOp::Eq: case BinOp::Ne:
            if (l->type != r->type)
              fail(e->pos, std::string("comparison of ") + type_name(l->type) + " and " +
                               type_name(r->type));
            break;
          case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
            if (l->type != Type::Int || r->type != Type::Int)
              fail(e->pos, std::string("ordering of ") + type_name(l->type) + " and " +
                               type_name(r->type));
            break;
          case BinOp::And: case BinOp::Or: case BinOp::Imp:
            if (l->type != Type::Bool || r->type != Type::Bool)
              fail(e->pos, std::string("boolean connective on ") + type_name(l->type) +
                               " and " + type_name(r->type));
            break;
        }
        return mk_bin(e->bin, std::move(l), std::move(r), e->pos);
      }
      case ExprKind::Quant: {
        for (const Binder& b : e->binders) env.push_back(b);
        ExprPtr body = infer(scope, env, e->kids[0]);
        env.resize(env.size() - e->binders.size());
        if (body->type != Type::Bool)
          fail(e->kids[0]->pos, std::string("quantifier body must be bool, got ") +
                                    type_name(body->type));
        return mk_quant(e->quant, e->binders, std::move(body), e->pos);
      }
      case ExprKind::FunApp: {
        const FunctionDecl* f = nullptr;
        for (size_t i = 0; i < visible_functions_; ++i)
          if (prog_.functions[i].name == e->name) {
            f = &prog_.functions[i];
            break;
          }
        if (!f) {
          if (prog_.function(e->name))
            fail(e->pos, "function '" + e->name + "' used before its declaration");
          fail(e->pos, "undeclared function '" + e->name + "'");
        }
        if (e->kids.size() != f->params.size())
          fail(e->pos, "function '" + e->name + "' takes " +
                           std::to_string(f->params.size()) + " argument(s), got " +
                           std::to_string(e->kids.size()));
        std::vector<ExprPtr> args;
        for (size_t i = 0; i < e->kids.size(); ++i) {
          ExprPtr a = infer(scope, env, e->kids[i]);
          if (a->type != f->params[i].type)
            fail(e->kids[i]->pos, "argument " + std::to_string(i + 1) + " of '" + e->name +
                                      "' has type " + std::string(type_name(a->type)) +
                                      ", expected " + type_name(f->params[i].type));
          args.push_back(std::move(a));
        }
        return mk_app(e->name, std::move(args), e->pos, f->result);
      }
    }
    fail(e->pos, "malformed expression");
  }

  const Program& prog_;
  std::string file_;
  const ProcedureDecl* cur_proc_ = nullptr;
  size_t visible_functions_ = 0;
};

// Checks a raw Program, returning a fully typed copy.
inline Program typecheck(const Program& raw, const std::string& file = "") {
  return TypeChecker(raw, file).check_program();
}

// Parse + resolve + typecheck in one step.
inline Program load_program(std::string_view src, const std::string& file = "") {
  return typecheck(parse_program(src, file), file);
}

// Checks a formula against a procedure's full scope (ins + outs + locals +
// globals) — the scope in which candidate invariants must live.
inline ExprPtr check_in_proc(const Program& prog, const ProcedureDecl& proc,
                             const ExprPtr& f, const std::string& file = "") {
  TypeChecker tc(prog, file);
  return tc.check_formula(proc_scope(prog, proc), f, Type::Bool);
}

}  // namespace invforge

#endif  // INVFORGE_TYPECHECK_HPP
