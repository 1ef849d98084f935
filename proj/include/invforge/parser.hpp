#ifndef INVFORGE_PARSER_HPP
#define INVFORGE_PARSER_HPP

// Recursive-descent parser.  Grammar (see docs/grammar.md):
//
//   program    ::= (global | function | axiom | procedure)*
//   global     ::= 'var' Id ':' type ';'
//   type       ::= 'int' | 'bool' | 'array' 'int'
//   function   ::= 'function' Id '(' params? ')' 'returns' '(' type ')'
//                  ( '{' formula '}' | ';' )
//   axiom      ::= 'axiom' formula ';'
//   procedure  ::= 'procedure' Id '(' params? ')' [ 'returns' '(' params ')' ]
//                  ( ';' spec* | spec* '{' local* statement* '}' )
//   spec       ::= 'requires' formula ';' | 'ensures' formula ';'
//                | 'modifies' Id (',' Id)* ';'
//   statement  ::= 'assert' formula ';' | 'assume' formula ';' | 'havoc' Id ';'
//                | Id ':=' expr ';' | Id '[' expr ']' ':=' expr ';'
//                | 'call' [ Id (',' Id)* ':=' ] Id '(' exprs? ')' ';'
//                | 'if' '(' formula ')' block [ 'else' (block | if-statement) ]
//                | 'while' '(' formula ')' ('invariant' formula ';')* block
//
// Expressions: ==> (right) < || < && < relations (non-associative) < + -
// < * / < unary - ! < postfix [] < primary.  Quantifiers extend maximally to
// the right and must be parenthesized in operand position.  Map assignment
// `A[i] := e` is desugared to `A := store(A, i, e)`.

#include <string>
#include <string_view>
#include <vector>

#include "invforge/ast.hpp"
#include "invforge/error.hpp"
#include "invforge/lexer.hpp"

namespace invforge {

class Parser {
 public:
  Parser(std::string_view src, std::string file)
      : file_(std::move(file)), toks_(tokenize(src, file_)) {}

  Program program() {
    Program p;
    while (!at(Tok::Eof)) {
      switch (cur().kind) {
        case Tok::KwVar: p.globals.push_back(var_decl()); break;
        case Tok::KwFunction: p.functions.push_back(function_decl()); break;
        case Tok::KwAxiom: {
          advance();
          p.axioms.push_back(formula());
          expect(Tok::Semi, "';' after axiom");
          break;
        }
        case Tok::KwProcedure: p.procedures.push_back(procedure_decl()); break;
        default:
          fail("expected a declaration (var, function, axiom, or procedure), got " +
               std::string(token_name(cur().kind)));
      }
    }
    return p;
  }

  // Parses the whole input as one formula/expression.
  ExprPtr formula_only() {
    ExprPtr e = formula();
    if (!at(Tok::Eof))
      fail("unexpected " + std::string(token_name(cur().kind)) + " after expression");
    return e;
  }

 private:
  // ------------------------------------------------------------- utilities
  const Token& cur() const { return toks_[idx_]; }
  const Token& peek(size_t off = 1) const {
    const size_t i = idx_ + off;
    return toks_[i < toks_.size() ? i : toks_.size() - 1];
  }
  void advance() {
    if (idx_ + 1 < toks_.size()) ++idx_;
  }
  const Token& prev() const { return toks_[idx_ > 0 ? idx_ - 1 : 0]; }
  bool at(Tok t) const { return cur().kind == t; }
  bool eat(Tok t) {
    if (!at(t)) return false;
    advance();
    return true;
  }
  Token expect(Tok t, const char* what) {
    if (!at(t))
      fail("expected " + std::string(what) + ", got " + token_name(cur().kind));
    Token tok = cur();
    advance();
    return tok;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(file_, cur().pos, msg);
  }

  // ----------------------------------------------------------- declarations
  Type type_ref() {
    if (eat(Tok::KwInt)) return Type::Int;
    if (eat(Tok::KwBool)) return Type::Bool;
    if (eat(Tok::KwArray)) {
      expect(Tok::KwInt, "'int' after 'array'");
      return Type::Map;
    }
    fail("expected a type (int, bool, or array int)");
  }

  VarDecl var_decl() {
    expect(Tok::KwVar, "'var'");
    VarDecl d;
    Token name = expect(Tok::Ident, "variable name");
    d.name = name.text;
    d.pos = name.pos;
    expect(Tok::Colon, "':' in variable declaration");
    d.type = type_ref();
    expect(Tok::Semi, "';' after variable declaration");
    return d;
  }

  std::vector<VarDecl> param_list() {
    std::vector<VarDecl> params;
    if (at(Tok::RParen)) return params;
    do {
      VarDecl d;
      Token name = expect(Tok::Ident, "parameter name");
      d.name = name.text;
      d.pos = name.pos;
      expect(Tok::Colon, "':' in parameter declaration");
      d.type = type_ref();
      params.push_back(std::move(d));
    } while (eat(Tok::Comma));
    return params;
  }

  FunctionDecl function_decl() {
    expect(Tok::KwFunction, "'function'");
    FunctionDecl f;
    Token name = expect(Tok::Ident, "function name");
    f.name = name.text;
    f.pos = name.pos;
    expect(Tok::LParen, "'(' after function name");
    f.params = param_list();
    expect(Tok::RParen, "')' after parameters");
    expect(Tok::KwReturns, "'returns'");
    expect(Tok::LParen, "'(' after 'returns'");
    f.result = type_ref();
    expect(Tok::RParen, "')' after return type");
    if (eat(Tok::LBrace)) {
      f.body = formula();
      expect(Tok::RBrace, "'}' after function body");
    } else {
      expect(Tok::Semi, "';' or body after function signature");
    }
    return f;
  }

  ProcedureDecl procedure_decl() {
    expect(Tok::KwProcedure, "'procedure'");
    ProcedureDecl p;
    Token name = expect(Tok::Ident, "procedure name");
    p.name = name.text;
    p.pos = name.pos;
    expect(Tok::LParen, "'(' after procedure name");
    p.ins = param_list();
    expect(Tok::RParen, "')' after parameters");
    if (eat(Tok::KwReturns)) {
      expect(Tok::LParen, "'(' after 'returns'");
      p.outs = param_list();
      expect(Tok::RParen, "')' after result parameters");
    }
    // A ';' directly after the signature declares a bodiless procedure.
    const bool bodiless = eat(Tok::Semi);
    for (;;) {
      if (eat(Tok::KwRequires)) {
        p.requires_cl.push_back(formula());
        expect(Tok::Semi, "';' after requires clause");
      } else if (eat(Tok::KwEnsures)) {
        p.ensures_cl.push_back(formula());
        expect(Tok::Semi, "';' after ensures clause");
      } else if (eat(Tok::KwModifies)) {
        do {
          p.modifies.push_back(expect(Tok::Ident, "global name in modifies").text);
        } while (eat(Tok::Comma));
        expect(Tok::Semi, "';' after modifies clause");
      } else {
        break;
      }
    }
    if (bodiless) {
      p.end = prev().pos;  // the final ';'
      return p;
    }
    expect(Tok::LBrace, "procedure body or ';'");
    p.has_body = true;
    while (at(Tok::KwVar)) p.locals.push_back(var_decl());
    while (!at(Tok::RBrace)) {
      if (at(Tok::KwVar))
        fail("local declarations must precede statements");
      p.body.push_back(statement());
    }
    p.end = expect(Tok::RBrace, "'}' at end of procedure body").pos;
    return p;
  }

  // ------------------------------------------------------------- statements
  Block block() {
    expect(Tok::LBrace, "'{'");
    Block b;
    while (!at(Tok::RBrace)) b.push_back(statement());
    expect(Tok::RBrace, "'}'");
    return b;
  }

  StmtPtr statement() {
    const Pos pos = cur().pos;
    switch (cur().kind) {
      case Tok::KwAssert: {
        advance();
        ExprPtr f = formula();
        expect(Tok::Semi, "';' after assert");
        return mk_assert(std::move(f), pos);
      }
      case Tok::KwAssume: {
        advance();
        ExprPtr f = formula();
        expect(Tok::Semi, "';' after assume");
        return mk_assume(std::move(f), pos);
      }
      case Tok::KwHavoc: {
        advance();
        Token v = expect(Tok::Ident, "variable after 'havoc'");
        expect(Tok::Semi, "';' after havoc");
        return mk_havoc(v.text, pos);
      }
      case Tok::KwCall: {
        advance();
        std::vector<std::string> outs;
        const size_t mark = idx_;
        if (at(Tok::Ident)) {
          outs.push_back(cur().text);
          advance();
          while (eat(Tok::Comma)) outs.push_back(expect(Tok::Ident, "variable").text);
          if (!eat(Tok::Walrus)) {
            outs.clear();
            idx_ = mark;  // no result list: first identifier was the callee
          }
        }
        Token callee = expect(Tok::Ident, "procedure name after 'call'");
        expect(Tok::LParen, "'(' after callee name");
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
          do {
            args.push_back(formula());
          } while (eat(Tok::Comma));
        }
        expect(Tok::RParen, "')' after call arguments");
        expect(Tok::Semi, "';' after call");
        return mk_call(std::move(outs), callee.text, std::move(args), pos);
      }
      case Tok::KwIf: {
        advance();
        expect(Tok::LParen, "'(' after 'if'");
        ExprPtr guard = formula();
        expect(Tok::RParen, "')' after if condition");
        Block then_block = block();
        Block else_block;
        if (eat(Tok::KwElse)) {
          if (at(Tok::KwIf))
            else_block.push_back(statement());
          else
            else_block = block();
        }
        return mk_if(std::move(guard), std::move(then_block), std::move(else_block), pos);
      }
      case Tok::KwWhile: {
        advance();
        expect(Tok::LParen, "'(' after 'while'");
        ExprPtr guard = formula();
        expect(Tok::RParen, "')' after loop guard");
        std::vector<ExprPtr> invs;
        while (eat(Tok::KwInvariant)) {
          invs.push_back(formula());
          expect(Tok::Semi, "';' after invariant");
        }
        Block body = block();
        return mk_while(std::move(guard), std::move(invs), std::move(body), pos);
      }
      case Tok::Ident: {
        Token name = cur();
        advance();
        if (eat(Tok::LBracket)) {
          ExprPtr index = formula();
          expect(Tok::RBracket, "']' in map assignment");
          expect(Tok::Walrus, "':=' in map assignment");
          ExprPtr value = formula();
          expect(Tok::Semi, "';' after assignment");
          // Desugar A[i] := e into the whole-map update A := store(A, i, e).
          ExprPtr store = mk_store(mk_var(name.text, name.pos), std::move(index),
                                   std::move(value), pos);
          return mk_assign(name.text, std::move(store), pos);
        }
        expect(Tok::Walrus, "':=' in assignment");
        ExprPtr rhs = formula();
        expect(Tok::Semi, "';' after assignment");
        return mk_assign(name.text, std::move(rhs), pos);
      }
      default:
        fail("expected a statement, got " + std::string(token_name(cur().kind)));
    }
  }

  // ------------------------------------------------------------ expressions
  ExprPtr formula() { return imp_expr(); }

  ExprPtr imp_expr() {
    if (at(Tok::KwForall) || at(Tok::KwExists)) return quant_expr();
    ExprPtr lhs = or_expr();
    if (at(Tok::Implies)) {
      const Pos pos = cur().pos;
      advance();
      return mk_bin(BinOp::Imp, std::move(lhs), imp_expr(), pos);  // right-assoc
    }
    return lhs;
  }

  ExprPtr quant_expr() {
    const Pos pos = cur().pos;
    const QuantKind q = at(Tok::KwForall) ? QuantKind::Forall : QuantKind::Exists;
    advance();
    std::vector<Binder> binders;
    do {
      Binder b;
      Token name = expect(Tok::Ident, "bound variable name");
      b.name = name.text;
      b.pos = name.pos;
      b.type = eat(Tok::Colon) ? type_ref() : Type::Int;
      binders.push_back(std::move(b));
    } while (eat(Tok::Comma));
    expect(Tok::ColonColon, "'::' after quantifier binders");
    return mk_quant(q, std::move(binders), imp_expr(), pos);
  }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (at(Tok::OrOr)) {
      const Pos pos = cur().pos;
      advance();
      lhs = mk_bin(BinOp::Or, std::move(lhs), and_expr(), pos);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = rel_expr();
    while (at(Tok::AndAnd)) {
      const Pos pos = cur().pos;
      advance();
      lhs = mk_bin(BinOp::And, std::move(lhs), rel_expr(), pos);
    }
    return lhs;
  }

  ExprPtr rel_expr() {
    ExprPtr lhs = add_expr();
    BinOp op;
    switch (cur().kind) {
      case Tok::Eq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      default: return lhs;
    }
    const Pos pos = cur().pos;
    advance();
    ExprPtr rhs = add_expr();
    switch (cur().kind) {
      case Tok::Eq: case Tok::Ne: case Tok::Lt:
      case Tok::Le: case Tok::Gt: case Tok::Ge:
        fail("relational operators are non-associative; parenthesize");
      default:
        break;
    }
    return mk_bin(op, std::move(lhs), std::move(rhs), pos);
  }

  ExprPtr add_expr() {
    ExprPtr lhs = mul_expr();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      const Pos pos = cur().pos;
      advance();
      lhs = mk_bin(op, std::move(lhs), mul_expr(), pos);
    }
    return lhs;
  }

  ExprPtr mul_expr() {
    ExprPtr lhs = un_expr();
    while (at(Tok::Star) || at(Tok::Slash)) {
      const BinOp op = at(Tok::Star) ? BinOp::Mul : BinOp::Div;
      const Pos pos = cur().pos;
      advance();
      lhs = mk_bin(op, std::move(lhs), un_expr(), pos);
    }
    return lhs;
  }

  ExprPtr un_expr() {
    if (at(Tok::Minus)) {
      const Pos pos = cur().pos;
      advance();
      return mk_un(UnOp::Neg, un_expr(), pos);
    }
    if (at(Tok::Bang)) {
      const Pos pos = cur().pos;
      advance();
      return mk_un(UnOp::Not, un_expr(), pos);
    }
    return postfix_expr();
  }

  ExprPtr postfix_expr() {
    ExprPtr e = primary_expr();
    while (at(Tok::LBracket)) {
      advance();
      ExprPtr index = formula();
      expect(Tok::RBracket, "']' after map index");
      // The selection node inherits the base expression's position so that
      // pre-order occurrence numbering follows source order.
      const Pos pos = e->pos;
      e = mk_sel(std::move(e), std::move(index), pos);
    }
    return e;
  }

  ExprPtr primary_expr() {
    const Pos pos = cur().pos;
    switch (cur().kind) {
      case Tok::Number: {
        const long long v = cur().value;
        advance();
        return mk_int(v, pos);
      }
      case Tok::KwTrue: advance(); return mk_bool(true, pos);
      case Tok::KwFalse: advance(); return mk_bool(false, pos);
      case Tok::KwStore: {
        advance();
        expect(Tok::LParen, "'(' after 'store'");
        ExprPtr m = formula();
        expect(Tok::Comma, "',' in store");
        ExprPtr i = formula();
        expect(Tok::Comma, "',' in store");
        ExprPtr v = formula();
        expect(Tok::RParen, "')' after store");
        return mk_store(std::move(m), std::move(i), std::move(v), pos);
      }
      case Tok::Ident: {
        const std::string name = cur().text;
        advance();
        if (eat(Tok::LParen)) {
          std::vector<ExprPtr> args;
          if (!at(Tok::RParen)) {
            do {
              args.push_back(formula());
            } while (eat(Tok::Comma));
          }
          expect(Tok::RParen, "')' after function arguments");
          return mk_app(name, std::move(args), pos);
        }
        return mk_var(name, pos);
      }
      case Tok::LParen: {
        advance();
        ExprPtr e = formula();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        fail("expected an expression, got " + std::string(token_name(cur().kind)));
    }
  }

  std::string file_;
  std::vector<Token> toks_;
  size_t idx_ = 0;
};

// Parses source text into a raw (unchecked) Program.
inline Program parse_program(std::string_view src, const std::string& file = "") {
  return Parser(src, file).program();
}

// Parses a single formula/expression (unchecked).
inline ExprPtr parse_formula(std::string_view src, const std::string& file = "") {
  return Parser(src, file).formula_only();
}

}  // namespace invforge

#endif  // INVFORGE_PARSER_HPP
