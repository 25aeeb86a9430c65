#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace flb {

/// A unary function symbol: one of the signature's child functions, or parent (index -1).
struct Func {
  int index = -1;
  std::string name = "parent";

  bool is_parent() const { return index < 0; }
  bool operator==(const Func& o) const { return index == o.index; }
};

inline Func parent_func() { return Func{}; }

/// A term is a variable wrapped in a chain of unary applications; path[0] is applied first.
/// Since all functions are unary, every term mentions exactly one variable.
struct Term {
  std::string var;
  std::vector<Func> path;

  bool is_var() const { return path.empty(); }
  bool operator==(const Term&) const = default;
};

inline Term var_term(std::string v) { return Term{std::move(v), {}}; }

inline Term apply(Func f, Term t) {
  t.path.push_back(std::move(f));
  return t;
}

enum class SymKind { Present, Label, Name };

/// Unary predicate: presence P, a dynamic label, or a static name. `post` selects the starred copy.
struct UnarySymbol {
  SymKind kind = SymKind::Present;
  int index = 0;
  bool post = false;
  std::string name = "P";

  bool is_dynamic() const { return kind != SymKind::Name; }
  bool operator==(const UnarySymbol& o) const { return kind == o.kind && index == o.index && post == o.post; }
};

inline UnarySymbol presence(bool post = false) { return UnarySymbol{SymKind::Present, 0, post, "P"}; }

enum class Kind { True, False, Unary, Link, Eq, Not, And, Or, Implies, Forall, Exists, Minimize };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable formula node. Interpretation of the fields depends on `kind`:
/// Unary uses sym+terms[0]; Link uses post+terms[0..1]; Eq uses terms[0..1];
/// quantifiers use var+kids[0]; connectives and Minimize use kids.
struct Formula {
  Kind kind = Kind::True;
  UnarySymbol sym;
  bool post = false;
  std::vector<Term> terms;
  std::string var;
  std::vector<FormulaPtr> kids;

  const Formula& kid(size_t i) const { return *kids.at(i); }
  bool is_quantifier() const { return kind == Kind::Forall || kind == Kind::Exists; }
  bool is_atom() const { return kind == Kind::Unary || kind == Kind::Link || kind == Kind::Eq; }
};

// Constructors ------------------------------------------------------------

inline FormulaPtr make_node(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

inline FormulaPtr f_true() { return make_node({Kind::True}); }
inline FormulaPtr f_false() { return make_node({Kind::False}); }

inline FormulaPtr f_unary(UnarySymbol s, Term t) {
  Formula f{Kind::Unary};
  f.sym = std::move(s);
  f.terms = {std::move(t)};
  return make_node(std::move(f));
}

inline FormulaPtr f_link(bool post, Term a, Term b) {
  Formula f{Kind::Link};
  f.post = post;
  f.terms = {std::move(a), std::move(b)};
  return make_node(std::move(f));
}

inline FormulaPtr f_eq(Term a, Term b) {
  Formula f{Kind::Eq};
  f.terms = {std::move(a), std::move(b)};
  return make_node(std::move(f));
}

inline FormulaPtr f_not(FormulaPtr a) {
  Formula f{Kind::Not};
  f.kids = {std::move(a)};
  return make_node(std::move(f));
}

inline FormulaPtr f_binary(Kind k, FormulaPtr a, FormulaPtr b) {
  Formula f{k};
  f.kids = {std::move(a), std::move(b)};
  return make_node(std::move(f));
}

inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return f_binary(Kind::And, std::move(a), std::move(b)); }
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return f_binary(Kind::Or, std::move(a), std::move(b)); }
inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return f_binary(Kind::Implies, std::move(a), std::move(b));
}
inline FormulaPtr f_iff(const FormulaPtr& a, const FormulaPtr& b) {
  return f_or(f_and(a, b), f_and(f_not(a), f_not(b)));
}

inline FormulaPtr f_quant(Kind k, std::string v, FormulaPtr body) {
  Formula f{k};
  f.var = std::move(v);
  f.kids = {std::move(body)};
  return make_node(std::move(f));
}

inline FormulaPtr f_forall(std::string v, FormulaPtr body) { return f_quant(Kind::Forall, std::move(v), std::move(body)); }
inline FormulaPtr f_exists(std::string v, FormulaPtr body) { return f_quant(Kind::Exists, std::move(v), std::move(body)); }

inline FormulaPtr f_minimize(FormulaPtr a) {
  Formula f{Kind::Minimize};
  f.kids = {std::move(a)};
  return make_node(std::move(f));
}

/// Left-nested conjunction; `true` when empty.
inline FormulaPtr f_and_all(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return f_true();
  FormulaPtr acc = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) acc = f_and(acc, parts[i]);
  return acc;
}

/// Left-nested disjunction; `false` when empty.
inline FormulaPtr f_or_all(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return f_false();
  FormulaPtr acc = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) acc = f_or(acc, parts[i]);
  return acc;
}

// Structural queries ------------------------------------------------------

inline bool same_formula(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::True:
    case Kind::False:
      return true;
    case Kind::Unary:
      return a.sym == b.sym && a.terms == b.terms;
    case Kind::Link:
      return a.post == b.post && a.terms == b.terms;
    case Kind::Eq:
      return a.terms == b.terms;
    case Kind::Forall:
    case Kind::Exists:
      if (a.var != b.var) return false;
      break;
    default:
      break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!same_formula(*a.kids[i], *b.kids[i])) return false;
  return true;
}

inline std::set<std::string> free_variables(const Term& t) { return {t.var}; }

namespace detail {
inline void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  for (const auto& t : f.terms)
    if (!bound.count(t.var)) out.insert(t.var);
  if (f.is_quantifier()) {
    bool fresh = bound.insert(f.var).second;
    collect_free(f.kid(0), bound, out);
    if (fresh) bound.erase(f.var);
    return;
  }
  for (const auto& k : f.kids) collect_free(*k, bound, out);
}

inline void collect_all_vars(const Formula& f, std::set<std::string>& out) {
  for (const auto& t : f.terms) out.insert(t.var);
  if (f.is_quantifier()) out.insert(f.var);
  for (const auto& k : f.kids) collect_all_vars(*k, out);
}
}  // namespace detail

inline std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  detail::collect_free(f, bound, out);
  return out;
}

/// Every variable name occurring in the formula, bound or free.
inline std::set<std::string> all_variables(const Formula& f) {
  std::set<std::string> out;
  detail::collect_all_vars(f, out);
  return out;
}

inline bool contains_kind(const Formula& f, Kind k) {
  if (f.kind == k) return true;
  for (const auto& c : f.kids)
    if (contains_kind(*c, k)) return true;
  return false;
}

inline bool has_quantifier(const Formula& f) { return contains_kind(f, Kind::Forall) || contains_kind(f, Kind::Exists); }

/// True when no postcondition (starred) symbol occurs.
inline bool is_pre(const Formula& f) {
  if (f.kind == Kind::Unary && f.sym.post) return false;
  if (f.kind == Kind::Link && f.post) return false;
  for (const auto& k : f.kids)
    if (!is_pre(*k)) return false;
  return true;
}

// Printing ----------------------------------------------------------------

inline std::string to_string(const Term& t) {
  std::string s = t.var;
  for (const auto& f : t.path) s = f.name + "(" + s + ")";
  return s;
}

inline std::string symbol_text(const UnarySymbol& s) { return s.name + (s.post ? "*" : ""); }

namespace detail {

inline int precedence(const Formula& f) {
  switch (f.kind) {
    case Kind::Implies:
      return 1;
    case Kind::Or:
      return 2;
    case Kind::And:
      return 3;
    case Kind::Forall:
    case Kind::Exists:
      return 0;
    default:
      return 5;
  }
}

inline void print(const Formula& f, bool tail, std::string& out);

// `tail` marks operands that end the enclosing expression, where a quantifier needs no parentheses.
inline void print_operand(const Formula& f, int min_prec, bool tail, std::string& out) {
  int p = precedence(f);
  bool paren = p < min_prec && !(p == 0 && tail);
  if (paren) out += '(';
  print(f, tail || paren, out);
  if (paren) out += ')';
}

inline void print(const Formula& f, bool tail, std::string& out) {
  switch (f.kind) {
    case Kind::True:
      out += "true";
      return;
    case Kind::False:
      out += "false";
      return;
    case Kind::Unary:
      out += symbol_text(f.sym) + "(" + to_string(f.terms[0]) + ")";
      return;
    case Kind::Link:
      out += std::string(f.post ? "Link*" : "Link") + "(" + to_string(f.terms[0]) + "," + to_string(f.terms[1]) + ")";
      return;
    case Kind::Eq:
      out += to_string(f.terms[0]) + " = " + to_string(f.terms[1]);
      return;
    case Kind::Not:
      out += '!';
      print_operand(f.kid(0), 5, false, out);
      return;
    case Kind::And:
      print_operand(f.kid(0), 3, false, out);
      out += " & ";
      print_operand(f.kid(1), 4, tail, out);
      return;
    case Kind::Or:
      print_operand(f.kid(0), 2, false, out);
      out += " | ";
      print_operand(f.kid(1), 3, tail, out);
      return;
    case Kind::Implies:
      print_operand(f.kid(0), 2, false, out);
      out += " -> ";
      print_operand(f.kid(1), 1, tail, out);
      return;
    case Kind::Forall:
    case Kind::Exists:
      out += f.kind == Kind::Forall ? "forall " : "exists ";
      out += f.var + ". ";
      print(f.kid(0), true, out);
      return;
    case Kind::Minimize:
      out += "minimize(";
      print(f.kid(0), true, out);
      out += ')';
      return;
  }
}

}  // namespace detail

/// Renders in the ASCII grammar accepted by the parser.
inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print(f, true, out);
  return out;
}

}  // namespace flb
