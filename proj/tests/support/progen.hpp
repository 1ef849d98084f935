#ifndef INVFORGE_TESTS_SUPPORT_PROGEN_HPP
#define INVFORGE_TESTS_SUPPORT_PROGEN_HPP

// Seeded generator of random well-typed programs.  Round-trip tests print a
// generated program, parse the text back, and demand a structurally equal
// result — so the generator aims for breadth: every declaration form, every
// statement, every operator, quantifiers with shadowing binders, nested
// stores and selects, bodiless functions and procedures, calls, and so on.
//
// Generated ASTs mirror the parser's conventions (negative numbers are a
// unary minus around a non-negative literal) so structural comparison is
// meaningful.

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <invforge/ast.hpp>

namespace progen {

class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  invforge::Program program() {
    prog_ = invforge::Program{};
    const int n_globals = pick(0, 2);
    for (int i = 0; i < n_globals; ++i)
      prog_.globals.push_back(
          {"g" + std::to_string(i), pick_type(/*maps=*/true), {}});
    const int n_functions = pick(0, 2);
    for (int i = 0; i < n_functions; ++i) gen_function(i);
    const int n_procs = pick(1, 2);
    for (int i = 0; i < n_procs; ++i) gen_procedure(i);
    return prog_;
  }

 private:
  using Type = invforge::Type;
  using ExprPtr = invforge::ExprPtr;
  using StmtPtr = invforge::StmtPtr;

  std::mt19937 rng_;
  invforge::Program prog_;
  std::vector<std::pair<std::string, Type>> scope_;  // readable variables
  std::vector<std::string> assignable_;              // assign/havoc targets
  std::vector<std::string> modifies_;                // current procedure's
  int binder_seq_ = 0;

  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool chance(int pct) { return pick(1, 100) <= pct; }

  Type pick_type(bool maps) {
    int r = pick(1, maps ? 10 : 7);
    if (r <= 5) return Type::Int;
    if (r <= 7) return Type::Bool;
    return Type::Map;
  }

  std::vector<std::string> vars_of(Type t) const {
    std::vector<std::string> out;
    for (const auto& [name, type] : scope_)
      if (type == t) out.push_back(name);
    return out;
  }

  std::optional<std::string> pick_var(Type t) {
    std::vector<std::string> names = vars_of(t);
    if (names.empty()) return std::nullopt;
    return names[static_cast<std::size_t>(pick(0, int(names.size()) - 1))];
  }

  // ------------------------------------------------------------ expressions

  ExprPtr int_leaf() {
    if (chance(45))
      if (auto v = pick_var(Type::Int)) return invforge::mk_var(*v);
    ExprPtr lit = invforge::mk_int(pick(0, 9));
    if (chance(20)) return invforge::mk_un(invforge::UnOp::Neg, std::move(lit));
    return lit;
  }

  ExprPtr gen_int(int depth) {
    if (depth <= 0 || chance(30)) return int_leaf();
    switch (pick(0, 5)) {
      case 0:
      case 1: {
        static const invforge::BinOp ops[] = {
            invforge::BinOp::Add, invforge::BinOp::Sub, invforge::BinOp::Mul,
            invforge::BinOp::Div};
        return invforge::mk_bin(ops[pick(0, 3)], gen_int(depth - 1),
                                gen_int(depth - 1));
      }
      case 2:
        return invforge::mk_un(invforge::UnOp::Neg, gen_int(depth - 1));
      case 3: {
        if (ExprPtr m = gen_map(depth - 1))
          return invforge::mk_sel(std::move(m), gen_int(depth - 1));
        return int_leaf();
      }
      case 4:
        if (ExprPtr f = gen_funapp(Type::Int, depth - 1)) return f;
        return int_leaf();
      default:
        return int_leaf();
    }
  }

  ExprPtr bool_leaf() {
    if (chance(40))
      if (auto v = pick_var(Type::Bool)) return invforge::mk_var(*v);
    return invforge::mk_bool(chance(50));
  }

  ExprPtr gen_bool(int depth) {
    if (depth <= 0 || chance(20)) return bool_leaf();
    switch (pick(0, 9)) {
      case 0:
      case 1:
      case 2: {  // comparison between integers — the workhorse
        static const invforge::BinOp ops[] = {
            invforge::BinOp::Eq, invforge::BinOp::Ne, invforge::BinOp::Lt,
            invforge::BinOp::Le, invforge::BinOp::Gt, invforge::BinOp::Ge};
        return invforge::mk_bin(ops[pick(0, 5)], gen_int(depth - 1),
                                gen_int(depth - 1));
      }
      case 3:
      case 4: {
        static const invforge::BinOp ops[] = {
            invforge::BinOp::And, invforge::BinOp::Or, invforge::BinOp::Imp};
        return invforge::mk_bin(ops[pick(0, 2)], gen_bool(depth - 1),
                                gen_bool(depth - 1));
      }
      case 5:
        return invforge::mk_un(invforge::UnOp::Not, gen_bool(depth - 1));
      case 6: {  // equality at bool or map type
        if (chance(50)) {
          if (ExprPtr l = gen_map(depth - 1))
            if (ExprPtr r = gen_map(depth - 1))
              return invforge::mk_bin(
                  chance(50) ? invforge::BinOp::Eq : invforge::BinOp::Ne,
                  std::move(l), std::move(r));
        }
        return invforge::mk_bin(
            chance(50) ? invforge::BinOp::Eq : invforge::BinOp::Ne,
            gen_bool(depth - 1), gen_bool(depth - 1));
      }
      case 7: {  // quantifier, possibly shadowing an outer name
        int n = pick(1, 2);
        std::vector<invforge::Binder> binders;
        std::size_t mark = scope_.size();
        for (int i = 0; i < n; ++i) {
          std::string name;
          auto shadow = pick_var(Type::Int);
          if (shadow && chance(25))
            name = *shadow;
          else
            name = "q" + std::to_string(binder_seq_++);
          binders.push_back({name, Type::Int, {}});
          scope_.emplace_back(name, Type::Int);
        }
        ExprPtr body = gen_bool(depth - 1);
        scope_.resize(mark);
        return invforge::mk_quant(chance(70) ? invforge::QuantKind::Forall
                                             : invforge::QuantKind::Exists,
                                  std::move(binders), std::move(body));
      }
      case 8:
        if (ExprPtr f = gen_funapp(Type::Bool, depth - 1)) return f;
        return bool_leaf();
      default:
        return bool_leaf();
    }
  }

  // Null when no map variable is visible: the language has no map literals.
  ExprPtr gen_map(int depth) {
    auto base = pick_var(Type::Map);
    if (!base) return nullptr;
    ExprPtr m = invforge::mk_var(*base);
    int stores = depth > 0 && chance(35) ? pick(1, 2) : 0;
    for (int i = 0; i < stores; ++i)
      m = invforge::mk_store(std::move(m), gen_int(depth - 1),
                             gen_int(depth - 1));
    return m;
  }

  ExprPtr gen_funapp(Type result, int depth) {
    std::vector<const invforge::FunctionDecl*> fits;
    for (const invforge::FunctionDecl& f : prog_.functions) {
      if (f.result != result) continue;
      bool ok = true;
      for (const invforge::VarDecl& p : f.params)
        if (p.type == Type::Map && vars_of(Type::Map).empty()) ok = false;
      if (ok) fits.push_back(&f);
    }
    if (fits.empty()) return nullptr;
    const invforge::FunctionDecl* f =
        fits[static_cast<std::size_t>(pick(0, int(fits.size()) - 1))];
    std::vector<ExprPtr> args;
    for (const invforge::VarDecl& p : f->params) {
      if (p.type == Type::Map)
        args.push_back(gen_map(depth - 1));
      else if (p.type == Type::Bool)
        args.push_back(gen_bool(depth - 1));
      else
        args.push_back(gen_int(depth - 1));
    }
    auto e = std::make_shared<invforge::Expr>();
    e->kind = invforge::ExprKind::FunApp;
    e->type = result;
    e->name = f->name;
    e->kids = std::move(args);
    return e;
  }

  ExprPtr gen_of(Type t, int depth) {
    if (t == Type::Map) return gen_map(depth);
    if (t == Type::Bool) return gen_bool(depth);
    return gen_int(depth);
  }

  // ------------------------------------------------------------- statements

  StmtPtr gen_stmt(int depth) {
    int r = pick(1, 100);
    if (r <= 40 && !assignable_.empty()) {  // assignment
      const std::string& name =
          assignable_[static_cast<std::size_t>(pick(0, int(assignable_.size()) - 1))];
      Type t = Type::Int;
      for (const auto& [n, ty] : scope_)
        if (n == name) t = ty;
      if (ExprPtr rhs = gen_of(t, 2)) return invforge::mk_assign(name, rhs);
      return invforge::mk_assume(invforge::mk_bool(true));
    }
    if (r <= 48 && !assignable_.empty()) {  // havoc
      const std::string& name =
          assignable_[static_cast<std::size_t>(pick(0, int(assignable_.size()) - 1))];
      return invforge::mk_havoc(name);
    }
    if (r <= 56) return invforge::mk_assume(gen_bool(2));
    if (r <= 62) return invforge::mk_assert(gen_bool(2));
    if (r <= 78 && depth > 0) {  // if, with or without else
      invforge::Block then_block = gen_block(depth - 1, pick(1, 2));
      invforge::Block else_block;
      if (chance(50)) else_block = gen_block(depth - 1, pick(1, 2));
      return invforge::mk_if(gen_bool(2), std::move(then_block),
                             std::move(else_block));
    }
    if (r <= 90 && depth > 0) {  // while with optional declared invariants
      std::vector<ExprPtr> invs;
      int n = pick(0, 2);
      for (int i = 0; i < n; ++i) invs.push_back(gen_bool(2));
      return invforge::mk_while(gen_bool(2), std::move(invs),
                                gen_block(depth - 1, pick(1, 2)));
    }
    if (StmtPtr call = gen_call()) return call;
    return invforge::mk_assume(gen_bool(2));
  }

  // Calls a previously generated procedure whose modifies set is covered and
  // whose signature we can satisfy in the current scope; null when none fits.
  StmtPtr gen_call() {
    std::vector<const invforge::ProcedureDecl*> fits;
    for (const invforge::ProcedureDecl& p : prog_.procedures) {
      bool ok = true;
      for (const std::string& m : p.modifies) {
        bool covered = false;
        for (const std::string& cm : modifies_) covered |= (cm == m);
        ok &= covered;
      }
      for (const invforge::VarDecl& in : p.ins)
        if (in.type == Type::Map && vars_of(Type::Map).empty()) ok = false;
      if (ok) fits.push_back(&p);
    }
    if (fits.empty()) return nullptr;
    const invforge::ProcedureDecl* callee =
        fits[static_cast<std::size_t>(pick(0, int(fits.size()) - 1))];

    std::vector<ExprPtr> args;
    for (const invforge::VarDecl& in : callee->ins)
      args.push_back(gen_of(in.type, 1));

    // Bind every result to a distinct assignable variable of the right type,
    // or drop all results — the grammar allows both.
    std::vector<std::string> outs;
    if (!callee->outs.empty() && chance(75)) {
      std::vector<std::string> used;
      for (const invforge::VarDecl& o : callee->outs) {
        std::string found;
        for (const std::string& name : assignable_) {
          bool taken = false;
          for (const std::string& u : used) taken |= (u == name);
          if (taken) continue;
          for (const auto& [n, ty] : scope_)
            if (n == name && ty == o.type) found = name;
          if (!found.empty()) break;
        }
        if (found.empty()) return nullptr;  // cannot bind this signature
        used.push_back(found);
      }
      outs = used;
    }
    return invforge::mk_call(std::move(outs), callee->name, std::move(args));
  }

  invforge::Block gen_block(int depth, int len) {
    invforge::Block b;
    for (int i = 0; i < len; ++i) b.push_back(gen_stmt(depth));
    return b;
  }

  // ----------------------------------------------------------- declarations

  void gen_function(int idx) {
    invforge::FunctionDecl f;
    f.name = "f" + std::to_string(idx);
    int n_params = pick(0, 3);
    for (int i = 0; i < n_params; ++i)
      f.params.push_back(
          {"x" + std::to_string(i), pick_type(/*maps=*/true), {}});
    f.result = chance(70) ? Type::Int : Type::Bool;

    if (chance(50)) {  // give it a body over its parameters alone
      scope_.clear();
      for (const invforge::VarDecl& p : f.params)
        scope_.emplace_back(p.name, p.type);
      f.body = f.result == Type::Bool ? gen_bool(2) : gen_int(2);
    }
    prog_.functions.push_back(std::move(f));

    if (chance(40)) {  // a defining fact about it, over fresh binders
      scope_.clear();
      for (const invforge::VarDecl& g : prog_.globals)
        scope_.emplace_back(g.name, g.type);
      int n = pick(0, 2);
      std::vector<invforge::Binder> binders;
      for (int i = 0; i < n; ++i) {
        std::string name = "q" + std::to_string(binder_seq_++);
        binders.push_back({name, Type::Int, {}});
        scope_.emplace_back(name, Type::Int);
      }
      ExprPtr body = gen_bool(2);
      prog_.axioms.push_back(
          binders.empty()
              ? std::move(body)
              : invforge::mk_quant(invforge::QuantKind::Forall,
                                   std::move(binders), std::move(body)));
    }
  }

  void gen_procedure(int idx) {
    invforge::ProcedureDecl p;
    p.name = "p" + std::to_string(idx);
    int n_ins = pick(0, 3);
    for (int i = 0; i < n_ins; ++i)
      p.ins.push_back({"a" + std::to_string(i), pick_type(/*maps=*/true), {}});
    int n_outs = pick(0, 2);
    for (int i = 0; i < n_outs; ++i)
      p.outs.push_back(
          {"r" + std::to_string(i), pick_type(/*maps=*/false), {}});
    for (const invforge::VarDecl& g : prog_.globals)
      if (chance(40)) p.modifies.push_back(g.name);

    modifies_ = p.modifies;

    scope_.clear();  // requires clauses: ins + globals
    for (const invforge::VarDecl& g : prog_.globals)
      scope_.emplace_back(g.name, g.type);
    for (const invforge::VarDecl& in : p.ins)
      scope_.emplace_back(in.name, in.type);
    int n_req = pick(0, 2);
    for (int i = 0; i < n_req; ++i) p.requires_cl.push_back(gen_bool(2));

    for (const invforge::VarDecl& o : p.outs)  // ensures add the outs
      scope_.emplace_back(o.name, o.type);
    int n_ens = pick(0, 2);
    for (int i = 0; i < n_ens; ++i) p.ensures_cl.push_back(gen_bool(2));

    if (chance(20)) {  // bodiless: a specification-only procedure
      p.has_body = false;
      prog_.procedures.push_back(std::move(p));
      return;
    }

    p.has_body = true;
    int n_locals = pick(0, 3);
    for (int i = 0; i < n_locals; ++i)
      p.locals.push_back(
          {"t" + std::to_string(i), pick_type(/*maps=*/true), {}});
    for (const invforge::VarDecl& l : p.locals)
      scope_.emplace_back(l.name, l.type);

    assignable_.clear();
    for (const invforge::VarDecl& o : p.outs) assignable_.push_back(o.name);
    for (const invforge::VarDecl& l : p.locals) assignable_.push_back(l.name);
    for (const std::string& m : p.modifies) assignable_.push_back(m);

    p.body = gen_block(2, pick(1, 5));
    prog_.procedures.push_back(std::move(p));
  }
};

}  // namespace progen

#endif  // INVFORGE_TESTS_SUPPORT_PROGEN_HPP
