#ifndef INVFORGE_LEXER_HPP
#define INVFORGE_LEXER_HPP

// Hand-written lexer for the mini verification language.  Produces the whole
// token stream up front; the parser indexes into it.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "invforge/error.hpp"

namespace invforge {

enum class Tok : unsigned char {
  Eof,
  Ident,
  Number,
  // keywords
  KwProcedure, KwFunction, KwAxiom, KwVar, KwReturns,
  KwRequires, KwEnsures, KwModifies, KwInvariant,
  KwAssert, KwAssume, KwHavoc, KwCall, KwIf, KwElse, KwWhile,
  KwForall, KwExists, KwInt, KwBool, KwArray, KwStore, KwTrue, KwFalse,
  // punctuation and operators
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Semi, Colon, ColonColon, Walrus,
  Eq, Ne, Le, Ge, Lt, Gt,
  Plus, Minus, Star, Slash,
  AndAnd, OrOr, Implies, Bang
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  long long value = 0;  // Number payload
  Pos pos{};
};

inline const char* token_name(Tok t) {
  switch (t) {
    case Tok::Eof: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::KwProcedure: return "'procedure'";
    case Tok::KwFunction: return "'function'";
    case Tok::KwAxiom: return "'axiom'";
    case Tok::KwVar: return "'var'";
    case Tok::KwReturns: return "'returns'";
    case Tok::KwRequires: return "'requires'";
    case Tok::KwEnsures: return "'ensures'";
    case Tok::KwModifies: return "'modifies'";
    case Tok::KwInvariant: return "'invariant'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwAssume: return "'assume'";
    case Tok::KwHavoc: return "'havoc'";
    case Tok::KwCall: return "'call'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwForall: return "'forall'";
    case Tok::KwExists: return "'exists'";
    case Tok::KwInt: return "'int'";
    case Tok::KwBool: return "'bool'";
    case Tok::KwArray: return "'array'";
    case Tok::KwStore: return "'store'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::ColonColon: return "'::'";
    case Tok::Walrus: return "':='";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Implies: return "'==>'";
    case Tok::Bang: return "'!'";
  }
  return "?";
}

inline Tok keyword_kind(std::string_view word) {
  struct Entry { std::string_view word; Tok kind; };
  static constexpr Entry table[] = {
      {"procedure", Tok::KwProcedure}, {"function", Tok::KwFunction},
      {"axiom", Tok::KwAxiom},         {"var", Tok::KwVar},
      {"returns", Tok::KwReturns},     {"requires", Tok::KwRequires},
      {"ensures", Tok::KwEnsures},     {"modifies", Tok::KwModifies},
      {"invariant", Tok::KwInvariant}, {"assert", Tok::KwAssert},
      {"assume", Tok::KwAssume},       {"havoc", Tok::KwHavoc},
      {"call", Tok::KwCall},           {"if", Tok::KwIf},
      {"else", Tok::KwElse},           {"while", Tok::KwWhile},
      {"forall", Tok::KwForall},       {"exists", Tok::KwExists},
      {"int", Tok::KwInt},             {"bool", Tok::KwBool},
      {"array", Tok::KwArray},         {"store", Tok::KwStore},
      {"true", Tok::KwTrue},           {"false", Tok::KwFalse},
  };
  for (const Entry& e : table)
    if (e.word == word) return e.kind;
  return Tok::Ident;
}

inline std::vector<Token> tokenize(std::string_view src, const std::string& file = "") {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;

  auto here = [&]() { return Pos{line, col}; };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (i < src.size() && src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto peek = [&](size_t off = 0) -> char {
    return i + off < src.size() ? src[i + off] : '\0';
  };
  auto push = [&](Tok kind, Pos pos, std::string text = {}, long long value = 0) {
    out.push_back(Token{kind, std::move(text), value, pos});
  };

  while (i < src.size()) {
    const char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && peek() != '\n') advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      const Pos open = here();
      advance(2);
      while (i < src.size() && !(peek() == '*' && peek(1) == '/')) advance(1);
      if (i >= src.size()) throw ParseError(file, open, "unterminated block comment");
      advance(2);
      continue;
    }
    const Pos pos = here();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
      const std::string text(src.substr(start, i - start));
      long long value = 0;
      try {
        value = std::stoll(text);
      } catch (const std::out_of_range&) {
        throw ParseError(file, pos, "integer literal out of range: " + text);
      }
      push(Tok::Number, pos, text, value);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
        advance(1);
      const std::string word(src.substr(start, i - start));
      const Tok kind = keyword_kind(word);
      push(kind, pos, kind == Tok::Ident ? word : std::string());
      continue;
    }
    switch (c) {
      case '(': advance(1); push(Tok::LParen, pos); continue;
      case ')': advance(1); push(Tok::RParen, pos); continue;
      case '{': advance(1); push(Tok::LBrace, pos); continue;
      case '}': advance(1); push(Tok::RBrace, pos); continue;
      case '[': advance(1); push(Tok::LBracket, pos); continue;
      case ']': advance(1); push(Tok::RBracket, pos); continue;
      case ',': advance(1); push(Tok::Comma, pos); continue;
      case ';': advance(1); push(Tok::Semi, pos); continue;
      case ':':
        if (peek(1) == ':') { advance(2); push(Tok::ColonColon, pos); }
        else if (peek(1) == '=') { advance(2); push(Tok::Walrus, pos); }
        else { advance(1); push(Tok::Colon, pos); }
        continue;
      case '=':
        if (peek(1) == '=' && peek(2) == '>') { advance(3); push(Tok::Implies, pos); }
        else { advance(1); push(Tok::Eq, pos); }
        continue;
      case '!':
        if (peek(1) == '=') { advance(2); push(Tok::Ne, pos); }
        else { advance(1); push(Tok::Bang, pos); }
        continue;
      case '<':
        if (peek(1) == '=') { advance(2); push(Tok::Le, pos); }
        else { advance(1); push(Tok::Lt, pos); }
        continue;
      case '>':
        if (peek(1) == '=') { advance(2); push(Tok::Ge, pos); }
        else { advance(1); push(Tok::Gt, pos); }
        continue;
      case '+': advance(1); push(Tok::Plus, pos); continue;
      case '-': advance(1); push(Tok::Minus, pos); continue;
      case '*': advance(1); push(Tok::Star, pos); continue;
      case '/': advance(1); push(Tok::Slash, pos); continue;
      case '&':
        if (peek(1) == '&') { advance(2); push(Tok::AndAnd, pos); continue; }
        throw ParseError(file, pos, "stray '&' (did you mean '&&'?)");
      case '|':
        if (peek(1) == '|') { advance(2); push(Tok::OrOr, pos); continue; }
        throw ParseError(file, pos, "stray '|' (did you mean '||'?)");
      default:
        throw ParseError(file, pos, std::string("unexpected character '") + c + "'");
    }
  }
  push(Tok::Eof, here());
  return out;
}

}  // namespace invforge

#endif  // INVFORGE_LEXER_HPP
