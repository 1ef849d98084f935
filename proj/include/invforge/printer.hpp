#ifndef INVFORGE_PRINTER_HPP
#define INVFORGE_PRINTER_HPP

// Canonical pretty-printer.  Output re-parses to a structurally equal AST
// (the round-trip property); parentheses are minimal w.r.t. the expression
// grammar, binder types are always explicit, and map updates whose right-hand
// side is a single store on the assigned variable print in the sugared
// `A[i] := e` form.

#include <string>

#include "invforge/ast.hpp"

namespace invforge {

namespace detail {

// Binding strength; a node is parenthesized when its strength is below the
// context's minimum.  Quantifiers are weakest: they extend maximally right.
inline int expr_prec(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Quant: return 0;
    case ExprKind::Binary:
      switch (e.bin) {
        case BinOp::Imp: return 1;
        case BinOp::Or: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq: case BinOp::Ne: case BinOp::Lt:
        case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 4;
        case BinOp::Add: case BinOp::Sub: return 5;
        case BinOp::Mul: case BinOp::Div: return 6;
      }
      return 6;
    case ExprKind::Unary: return 7;
    case ExprKind::MapSel: return 8;
    default: return 9;
  }
}

inline const char* binop_text(BinOp op) {
  switch (op) {
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Imp: return "==>";
  }
  return "?";
}

inline void print_expr_rec(const Expr& e, int min_prec, std::string& out) {
  const int prec = expr_prec(e);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case ExprKind::IntLit:
      out += std::to_string(e.int_val);
      break;
    case ExprKind::BoolLit:
      out += e.bool_val ? "true" : "false";
      break;
    case ExprKind::Var:
      out += e.name;
      break;
    case ExprKind::MapSel:
      print_expr_rec(*e.kids[0], 8, out);
      out += '[';
      print_expr_rec(*e.kids[1], 0, out);
      out += ']';
      break;
    case ExprKind::MapStore:
      out += "store(";
      print_expr_rec(*e.kids[0], 0, out);
      out += ", ";
      print_expr_rec(*e.kids[1], 0, out);
      out += ", ";
      print_expr_rec(*e.kids[2], 0, out);
      out += ')';
      break;
    case ExprKind::Unary:
      out += e.un == UnOp::Neg ? '-' : '!';
      print_expr_rec(*e.kids[0], 7, out);
      break;
    case ExprKind::Binary: {
      const bool right_assoc = e.bin == BinOp::Imp;
      const bool non_assoc = prec == 4;
      print_expr_rec(*e.kids[0], prec + (right_assoc || non_assoc ? 1 : 0), out);
      out += ' ';
      out += binop_text(e.bin);
      out += ' ';
      print_expr_rec(*e.kids[1], prec + (right_assoc ? 0 : 1), out);
      break;
    }
    case ExprKind::Quant: {
      out += e.quant == QuantKind::Forall ? "forall " : "exists ";
      for (size_t i = 0; i < e.binders.size(); ++i) {
        if (i) out += ", ";
        out += e.binders[i].name;
        out += ": ";
        out += type_name(e.binders[i].type);
      }
      out += " :: ";
      print_expr_rec(*e.kids[0], 0, out);
      break;
    }
    case ExprKind::FunApp: {
      out += e.name;
      out += '(';
      for (size_t i = 0; i < e.kids.size(); ++i) {
        if (i) out += ", ";
        print_expr_rec(*e.kids[i], 0, out);
      }
      out += ')';
      break;
    }
  }
  if (parens) out += ')';
}

inline void indent(int depth, std::string& out) {
  out.append(static_cast<size_t>(depth) * 2, ' ');
}

}  // namespace detail

inline std::string print_expr(const ExprPtr& e) {
  std::string out;
  detail::print_expr_rec(*e, 0, out);
  return out;
}

inline void print_stmt(const StmtPtr& s, int depth, std::string& out) {
  using detail::indent;
  switch (s->kind) {
    case StmtKind::Assert:
      indent(depth, out);
      out += "assert ";
      out += print_expr(s->expr);
      out += ";\n";
      break;
    case StmtKind::Assume:
      indent(depth, out);
      out += "assume ";
      out += print_expr(s->expr);
      out += ";\n";
      break;
    case StmtKind::Havoc:
      indent(depth, out);
      out += "havoc ";
      out += s->var;
      out += ";\n";
      break;
    case StmtKind::Assign: {
      indent(depth, out);
      const Expr& rhs = *s->expr;
      if (rhs.kind == ExprKind::MapStore && rhs.kids[0]->kind == ExprKind::Var &&
          rhs.kids[0]->name == s->var) {
        out += s->var;
        out += '[';
        out += print_expr(rhs.kids[1]);
        out += "] := ";
        out += print_expr(rhs.kids[2]);
      } else {
        out += s->var;
        out += " := ";
        out += print_expr(s->expr);
      }
      out += ";\n";
      break;
    }
    case StmtKind::Call: {
      indent(depth, out);
      out += "call ";
      for (size_t i = 0; i < s->call_outs.size(); ++i) {
        if (i) out += ", ";
        out += s->call_outs[i];
      }
      if (!s->call_outs.empty()) out += " := ";
      out += s->var;
      out += '(';
      for (size_t i = 0; i < s->call_args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(s->call_args[i]);
      }
      out += ");\n";
      break;
    }
    case StmtKind::If: {
      indent(depth, out);
      out += "if (";
      out += print_expr(s->expr);
      out += ") {\n";
      for (const StmtPtr& t : s->body) print_stmt(t, depth + 1, out);
      indent(depth, out);
      out += '}';
      const Stmt* chain = s.get();
      // `else if` chains print flat.
      if (chain->orelse.size() == 1 && chain->orelse[0]->kind == StmtKind::If) {
        out += " else ";
        std::string tail;
        print_stmt(chain->orelse[0], depth, tail);
        // Strip the chained statement's leading indentation.
        out += tail.substr(static_cast<size_t>(depth) * 2);
        break;
      }
      if (!chain->orelse.empty()) {
        out += " else {\n";
        for (const StmtPtr& t : chain->orelse) print_stmt(t, depth + 1, out);
        indent(depth, out);
        out += '}';
      }
      out += '\n';
      break;
    }
    case StmtKind::While: {
      indent(depth, out);
      out += "while (";
      out += print_expr(s->expr);
      out += ")";
      if (s->invariants.empty()) {
        out += " {\n";
      } else {
        out += '\n';
        for (const ExprPtr& inv : s->invariants) {
          indent(depth + 1, out);
          out += "invariant ";
          out += print_expr(inv);
          out += ";\n";
        }
        indent(depth, out);
        out += "{\n";
      }
      for (const StmtPtr& t : s->body) print_stmt(t, depth + 1, out);
      indent(depth, out);
      out += "}\n";
      break;
    }
  }
}

inline std::string print_program(const Program& p) {
  std::string out;
  auto print_params = [&](const std::vector<VarDecl>& params) {
    for (size_t i = 0; i < params.size(); ++i) {
      if (i) out += ", ";
      out += params[i].name;
      out += ": ";
      out += type_name(params[i].type);
    }
  };
  for (const VarDecl& g : p.globals) {
    out += "var ";
    out += g.name;
    out += ": ";
    out += type_name(g.type);
    out += ";\n";
  }
  if (!p.globals.empty()) out += '\n';
  for (const FunctionDecl& f : p.functions) {
    out += "function ";
    out += f.name;
    out += '(';
    print_params(f.params);
    out += ") returns (";
    out += type_name(f.result);
    out += ')';
    if (f.body) {
      out += " {\n  ";
      out += print_expr(f.body);
      out += "\n}\n\n";
    } else {
      out += ";\n\n";
    }
  }
  for (const ExprPtr& ax : p.axioms) {
    out += "axiom ";
    out += print_expr(ax);
    out += ";\n";
  }
  if (!p.axioms.empty()) out += '\n';
  for (const ProcedureDecl& proc : p.procedures) {
    out += "procedure ";
    out += proc.name;
    out += '(';
    print_params(proc.ins);
    out += ')';
    if (!proc.outs.empty()) {
      out += " returns (";
      print_params(proc.outs);
      out += ')';
    }
    if (!proc.has_body) out += ';';
    out += '\n';
    for (const ExprPtr& r : proc.requires_cl) {
      out += "  requires ";
      out += print_expr(r);
      out += ";\n";
    }
    if (!proc.modifies.empty()) {
      out += "  modifies ";
      for (size_t i = 0; i < proc.modifies.size(); ++i) {
        if (i) out += ", ";
        out += proc.modifies[i];
      }
      out += ";\n";
    }
    for (const ExprPtr& e : proc.ensures_cl) {
      out += "  ensures ";
      out += print_expr(e);
      out += ";\n";
    }
    if (!proc.has_body) {
      out += '\n';
      continue;
    }
    out += "{\n";
    for (const VarDecl& v : proc.locals) {
      out += "  var ";
      out += v.name;
      out += ": ";
      out += type_name(v.type);
      out += ";\n";
    }
    for (const StmtPtr& s : proc.body) print_stmt(s, 1, out);
    out += "}\n\n";
  }
  // Drop the trailing blank line.
  while (out.size() >= 2 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n')
    out.pop_back();
  return out;
}

}  // namespace invforge

#endif  // INVFORGE_PRINTER_HPP
