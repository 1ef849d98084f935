#ifndef INVFORGE_SMTLIB_HPP
#define INVFORGE_SMTLIB_HPP

// Deterministic SMT-LIB v2 rendering of a verification condition: the
// program's function symbols and axioms form the background theory, every
// program variable in scope becomes a constant, havoc symbols follow in
// first-traversal order, and the script asserts the negation of the VC so
// that `unsat` means the obligation is valid.

#include <set>
#include <string>
#include <vector>

#include <invforge/ast.hpp>
#include <invforge/error.hpp>
#include <invforge/wp.hpp>

namespace invforge {

namespace detail {

// Identifiers that mean something to an SMT-LIB parser.  Surface identifiers
// colliding with one are prefixed; the prefix contains '!', which the surface
// language cannot produce, so mangled names never clash with program names.
inline bool smt_reserved(const std::string& s) {
  static const std::set<std::string> words = {
      "and", "or",  "not", "xor", "ite", "distinct", "let", "as", "par",
      "div", "mod", "abs", "Int", "Bool", "Array", "assert", "true", "false",
      "select", "store", "forall", "exists", "sat", "unsat", "unknown"};
  return words.count(s) != 0;
}

inline std::string smt_symbol(const std::string& name) {
  return smt_reserved(name) ? "iv!" + name : name;
}

inline const char* smt_sort(Type t) {
  switch (t) {
    case Type::Int: return "Int";
    case Type::Bool: return "Bool";
    case Type::Map: return "(Array Int Int)";
    default: throw SolverError("internal: untyped symbol reaches emission");
  }
}

inline void emit_expr(const ExprPtr& e, std::string& out) {
  switch (e->kind) {
    case ExprKind::IntLit:
      if (e->int_val < 0) {
        out += "(- ";
        out += std::to_string(-e->int_val);
        out += ')';
      } else {
        out += std::to_string(e->int_val);
      }
      return;
    case ExprKind::BoolLit:
      out += e->bool_val ? "true" : "false";
      return;
    case ExprKind::Var:
      out += smt_symbol(e->name);
      return;
    case ExprKind::MapSel:
      out += "(select ";
      emit_expr(e->kids[0], out);
      out += ' ';
      emit_expr(e->kids[1], out);
      out += ')';
      return;
    case ExprKind::MapStore:
      out += "(store ";
      emit_expr(e->kids[0], out);
      out += ' ';
      emit_expr(e->kids[1], out);
      out += ' ';
      emit_expr(e->kids[2], out);
      out += ')';
      return;
    case ExprKind::Unary:
      out += e->un == UnOp::Neg ? "(- " : "(not ";
      emit_expr(e->kids[0], out);
      out += ')';
      return;
    case ExprKind::Binary: {
      const char* op = nullptr;
      switch (e->bin) {
        case BinOp::Mul: op = "*"; break;
        case BinOp::Div: op = "div"; break;
        case BinOp::Add: op = "+"; break;
        case BinOp::Sub: op = "-"; break;
        case BinOp::Eq: op = "="; break;
        case BinOp::Ne: op = "distinct"; break;
        case BinOp::Lt: op = "<"; break;
        case BinOp::Le: op = "<="; break;
        case BinOp::Gt: op = ">"; break;
        case BinOp::Ge: op = ">="; break;
        case BinOp::And: op = "and"; break;
        case BinOp::Or: op = "or"; break;
        case BinOp::Imp: op = "=>"; break;
      }
      out += '(';
      out += op;
      out += ' ';
      emit_expr(e->kids[0], out);
      out += ' ';
      emit_expr(e->kids[1], out);
      out += ')';
      return;
    }
    case ExprKind::Quant: {
      out += e->quant == QuantKind::Forall ? "(forall (" : "(exists (";
      for (size_t i = 0; i < e->binders.size(); ++i) {
        if (i) out += ' ';
        out += '(';
        out += smt_symbol(e->binders[i].name);
        out += ' ';
        out += smt_sort(e->binders[i].type);
        out += ')';
      }
      out += ") ";
      emit_expr(e->kids[0], out);
      out += ')';
      return;
    }
    case ExprKind::FunApp: {
      if (e->kids.empty()) {
        out += smt_symbol(e->name);
        return;
      }
      out += '(';
      out += smt_symbol(e->name);
      for (const ExprPtr& a : e->kids) {
        out += ' ';
        emit_expr(a, out);
      }
      out += ')';
      return;
    }
  }
}

// Free variables in pre-order of first occurrence.
inline void free_vars_ordered(const ExprPtr& e, std::vector<std::string>& env,
                              std::vector<std::string>& out,
                              std::set<std::string>& seen) {
  switch (e->kind) {
    case ExprKind::Var: {
      for (const std::string& b : env)
        if (b == e->name) return;
      if (seen.insert(e->name).second) out.push_back(e->name);
      return;
    }
    case ExprKind::Quant: {
      size_t mark = env.size();
      for (const Binder& b : e->binders) env.push_back(b.name);
      free_vars_ordered(e->kids[0], env, out, seen);
      env.resize(mark);
      return;
    }
    default:
      for (const ExprPtr& k : e->kids) free_vars_ordered(k, env, out, seen);
      return;
  }
}

}  // namespace detail

inline std::string emit_smtlib(const VerificationCondition& vc, const Program& prog,
                               const ProcedureDecl& proc) {
  std::string out;
  out += "; ";
  out += vc.obligation;
  out += ' ';
  out += vc.loop_id;
  out += "\n(set-logic ALL)\n";

  // Background theory: function symbols in declaration order, then axioms.
  for (const FunctionDecl& f : prog.functions) {
    if (f.body) {
      out += "(define-fun ";
      out += detail::smt_symbol(f.name);
      out += " (";
      for (size_t i = 0; i < f.params.size(); ++i) {
        if (i) out += ' ';
        out += '(';
        out += detail::smt_symbol(f.params[i].name);
        out += ' ';
        out += detail::smt_sort(f.params[i].type);
        out += ')';
      }
      out += ") ";
      out += detail::smt_sort(f.result);
      out += ' ';
      detail::emit_expr(f.body, out);
      out += ")\n";
    } else {
      out += "(declare-fun ";
      out += detail::smt_symbol(f.name);
      out += " (";
      for (size_t i = 0; i < f.params.size(); ++i) {
        if (i) out += ' ';
        out += detail::smt_sort(f.params[i].type);
      }
      out += ") ";
      out += detail::smt_sort(f.result);
      out += ")\n";
    }
  }
  for (const ExprPtr& ax : prog.axioms) {
    out += "(assert ";
    detail::emit_expr(ax, out);
    out += ")\n";
  }

  // Program variables in declaration order: globals, ins, outs, locals.
  std::set<std::string> declared;
  auto declare = [&](const VarDecl& v) {
    if (!declared.insert(v.name).second) return;
    out += "(declare-const ";
    out += detail::smt_symbol(v.name);
    out += ' ';
    out += detail::smt_sort(v.type);
    out += ")\n";
  };
  for (const VarDecl& v : prog.globals) declare(v);
  for (const VarDecl& v : proc.ins) declare(v);
  for (const VarDecl& v : proc.outs) declare(v);
  for (const VarDecl& v : proc.locals) declare(v);

  // Havoc symbols, in order of first occurrence in the formula.
  {
    std::vector<std::string> env, order;
    std::set<std::string> seen;
    detail::free_vars_ordered(vc.formula, env, order, seen);
    for (const std::string& name : order) {
      if (declared.count(name)) continue;
      Type t = Type::Unknown;
      for (const auto& [fn, ft] : vc.fresh)
        if (fn == name) {
          t = ft;
          break;
        }
      if (t == Type::Unknown)
        throw SolverError("internal: unknown symbol in VC: " + name);
      out += "(declare-const ";
      out += detail::smt_symbol(name);
      out += ' ';
      out += detail::smt_sort(t);
      out += ")\n";
    }
  }

  out += "(assert (not ";
  detail::emit_expr(vc.formula, out);
  out += "))\n(check-sat)\n";
  return out;
}

}  // namespace invforge

#endif  // INVFORGE_SMTLIB_HPP
