#pragma once

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "flb/error.hpp"
#include "flb/formula.hpp"
#include "flb/rewrite.hpp"
#include "flb/signature.hpp"
#include "flb/theory.hpp"

namespace flb {

/// A named formula macro (`def NAME(x, y) := ...`), expanded at parse time.
struct Definition {
  std::string name;
  std::vector<std::string> params;
  FormulaPtr body;
};

using Definitions = std::map<std::string, Definition, std::less<>>;

namespace detail {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Bang, Amp, Bar, Arrow, Eq, Neq, End };

struct Token {
  Tok kind;
  std::string text;  // identifier text, including a trailing '*'
  size_t pos;
};

inline std::vector<Token> lex_formula(std::string_view s, int line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      if (i < s.size() && s[i] == '*') ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    auto two = s.substr(i, 2);
    if (two == "->") {
      out.push_back({Tok::Arrow, "->", start});
      i += 2;
      continue;
    }
    if (two == "!=") {
      out.push_back({Tok::Neq, "!=", start});
      i += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Dot; break;
      case '!': k = Tok::Bang; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case '=': k = Tok::Eq; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "' at column " + std::to_string(i + 1), line);
    }
    out.push_back({k, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Signature& sig, const Definitions* defs, int line)
      : toks_(lex_formula(text, line)), sig_(sig), defs_(defs), line_(line) {}

  FormulaPtr parse() {
    auto f = implication();
    expect(Tok::End, "end of formula");
    return f;
  }

 private:
  std::vector<Token> toks_;
  size_t at_ = 0;
  const Signature& sig_;
  const Definitions* defs_;
  int line_;

  const Token& peek(size_t ahead = 0) const { return toks_[std::min(at_ + ahead, toks_.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++at_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at column " + std::to_string(peek().pos + 1), line_);
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return toks_[at_++];
  }

  FormulaPtr implication() {
    auto lhs = disjunction();
    if (accept(Tok::Arrow)) return f_implies(lhs, implication());
    return lhs;
  }

  FormulaPtr disjunction() {
    auto lhs = conjunction();
    while (accept(Tok::Bar)) lhs = f_or(lhs, conjunction());
    return lhs;
  }

  FormulaPtr conjunction() {
    auto lhs = unary();
    while (accept(Tok::Amp)) lhs = f_and(lhs, unary());
    return lhs;
  }

  FormulaPtr unary() {
    if (accept(Tok::Bang)) return f_not(unary());
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      ++at_;
      auto f = implication();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::Ident && (t.text == "forall" || t.text == "exists")) {
      ++at_;
      const Token& v = expect(Tok::Ident, "variable after quantifier");
      check_variable_name(v.text);
      std::string var = v.text;
      expect(Tok::Dot, "'.' after quantified variable");
      auto body = implication();
      return t.text == "forall" ? f_forall(var, body) : f_exists(var, body);
    }
    if (t.kind == Tok::Ident && t.text == "minimize") {
      ++at_;
      expect(Tok::LParen, "'(' after minimize");
      auto f = implication();
      expect(Tok::RParen, "')'");
      return f_minimize(f);
    }
    return atom();
  }

  void check_variable_name(const std::string& v) const {
    if (v.back() == '*' || is_reserved_word(v) || is_function(v) || is_predicate(v))
      throw ParseError("'" + v + "' cannot be used as a variable", line_);
  }

  bool is_function(std::string_view s) const { return s == "parent" || sig_.child_index(s) >= 0; }

  bool is_predicate(std::string_view s) const {
    std::string_view base = s.back() == '*' ? s.substr(0, s.size() - 1) : s;
    return base == "P" || base == "Link" || sig_.label_index(base) >= 0 || sig_.name_index(base) >= 0;
  }

  std::vector<Term> arguments(const std::string& head) {
    expect(Tok::LParen, "'('");
    std::vector<Term> args{term()};
    while (accept(Tok::Comma)) args.push_back(term());
    expect(Tok::RParen, "')'");
    (void)head;
    return args;
  }

  FormulaPtr atom() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected a formula");
    if (t.text == "true") {
      ++at_;
      return f_true();
    }
    if (t.text == "false") {
      ++at_;
      return f_false();
    }
    if (t.text == "Tsupp") {  // the supported-FLB theory of the signature
      ++at_;
      return supported_theory(sig_);
    }
    std::string head = t.text;
    bool starred = head.back() == '*';
    std::string base = starred ? head.substr(0, head.size() - 1) : head;

    if (base == "Link") {
      ++at_;
      auto args = arguments(head);
      if (args.size() != 2) throw ParseError("'" + head + "' expects 2 arguments, got " + std::to_string(args.size()), line_);
      return f_link(starred, args[0], args[1]);
    }
    if (base == "P" || sig_.label_index(base) >= 0 || sig_.name_index(base) >= 0) {
      ++at_;
      UnarySymbol sym;
      if (base == "P") {
        sym = presence(starred);
      } else if (int li = sig_.label_index(base); li >= 0) {
        sym = UnarySymbol{SymKind::Label, li, starred, base};
      } else {
        if (starred) throw ParseError("static name '" + base + "' has no postcondition copy", line_);
        sym = UnarySymbol{SymKind::Name, sig_.name_index(base), false, base};
      }
      auto args = arguments(head);
      if (args.size() != 1)
        throw ParseError("'" + head + "' is unary but got " + std::to_string(args.size()) + " arguments", line_);
      return f_unary(sym, args[0]);
    }
    if (defs_ && !starred) {
      if (auto it = defs_->find(base); it != defs_->end()) {
        ++at_;
        const Definition& d = it->second;
        std::vector<Term> args;
        if (peek().kind == Tok::LParen) args = arguments(head);
        if (args.size() != d.params.size())
          throw ParseError("'" + base + "' expects " + std::to_string(d.params.size()) + " arguments, got " +
                               std::to_string(args.size()),
                           line_);
        std::map<std::string, Term> sub;
        for (size_t i = 0; i < args.size(); ++i) sub[d.params[i]] = args[i];
        return substitute(d.body, sub);
      }
    }
    if (starred) throw ParseError("unknown symbol '" + head + "'", line_);
    if (peek(1).kind == Tok::LParen && !is_function(base)) throw ParseError("unknown symbol '" + head + "'", line_);
    Term lhs = term();
    if (accept(Tok::Eq)) return f_eq(lhs, term());
    if (accept(Tok::Neq)) return f_not(f_eq(lhs, term()));
    fail("expected '=' after term");
  }

  Term term() {
    const Token& t = expect(Tok::Ident, "a term");
    if (is_function(t.text)) {
      Func f = t.text == "parent" ? parent_func() : Func{sig_.child_index(t.text), t.text};
      expect(Tok::LParen, "'(' after function");
      Term inner = term();
      expect(Tok::RParen, "')'");
      return apply(f, inner);
    }
    if (peek().kind == Tok::LParen) throw ParseError("unknown function '" + t.text + "'", line_);
    check_variable_name(t.text);
    return var_term(t.text);
  }
};

}  // namespace detail

/// Parses a formula in the ASCII grammar against `sig`, expanding definitions from `defs`.
/// Bound variables are renamed apart from each other and from the free variables.
inline FormulaPtr parse_formula(std::string_view text, const Signature& sig, const Definitions* defs = nullptr,
                                int line = 0) {
  detail::FormulaParser p(text, sig, defs, line);
  return rename_apart(p.parse());
}

/// Parses the shape of a derivation/definition header `NAME(x, y)`, used by the knowledge loader.
inline std::vector<std::string> parse_variable_list(std::string_view text, int line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur), cur.clear();
      continue;
    }
    cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  for (const auto& v : out)
    if (!is_identifier(v)) throw ParseError("malformed variable '" + v + "'", line);
  return out;
}

}  // namespace flb
