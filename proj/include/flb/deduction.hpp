#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flb/error.hpp"
#include "flb/formula.hpp"
#include "flb/parser.hpp"
#include "flb/rewrite.hpp"
#include "flb/signature.hpp"
#include "flb/theory.hpp"

namespace flb {

enum class Rule { Dynamic, Static, Weak, Bool, Invariant, ForallGuard, ExistsGuard, Circumscribe };

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::Dynamic: return "dynamic";
    case Rule::Static: return "static";
    case Rule::Weak: return "weak";
    case Rule::Bool: return "bool";
    case Rule::Invariant: return "invariant";
    case Rule::ForallGuard: return "forallguard";
    case Rule::ExistsGuard: return "existsguard";
    case Rule::Circumscribe: return "circumscribe";
  }
  return "?";
}

inline std::optional<Rule> rule_from_string(std::string_view s) {
  for (Rule r : {Rule::Dynamic, Rule::Static, Rule::Weak, Rule::Bool, Rule::Invariant, Rule::ForallGuard,
                 Rule::ExistsGuard, Rule::Circumscribe})
    if (s == to_string(r)) return r;
  return std::nullopt;
}

inline int arity(Rule r) {
  switch (r) {
    case Rule::Dynamic:
    case Rule::Static: return 0;
    case Rule::Bool:
    case Rule::ForallGuard:
    case Rule::ExistsGuard: return 2;
    default: return 1;
  }
}

/// V;d |- formula.
struct Judgment {
  std::set<std::string> vars;
  int d = 0;
  FormulaPtr formula;
};

inline std::string context_string(const std::set<std::string>& vars, int d) {
  std::string s = "{";
  for (const auto& v : vars) s += (s.size() > 1 ? "," : "") + v;
  return s + "};" + std::to_string(d);
}

inline std::string to_string(const Judgment& j) { return context_string(j.vars, j.d) + " |- " + to_string(*j.formula); }

/// A tree of rule applications. Parameters used per rule:
/// Dynamic/Static: literal; Weak: vars, d; Bool: op (And/Or); guards: var (the quantified x_t).
/// Guard rules take the body premise first and the guard atom premise second.
struct Derivation {
  Rule rule = Rule::Static;
  std::vector<Derivation> premises;
  FormulaPtr literal;
  std::set<std::string> vars;
  int d = 0;
  Kind op = Kind::And;
  std::string var;
};

/// A rule application violating a side condition; `proviso` names the failed condition.
class DerivationError : public std::runtime_error {
 public:
  DerivationError(Rule rule, std::string proviso, const std::string& detail)
      : std::runtime_error(std::string(to_string(rule)) + ": proviso '" + proviso + "' fails: " + detail),
        rule_(rule),
        proviso_(std::move(proviso)) {}
  Rule rule() const { return rule_; }
  const std::string& proviso() const { return proviso_; }

 private:
  Rule rule_;
  std::string proviso_;
};

namespace detail {

inline const Formula* literal_atom(const Formula& f) {
  const Formula* a = f.kind == Kind::Not ? &f.kid(0) : &f;
  return a->is_atom() ? a : nullptr;
}

inline bool is_starred_atom(const Formula& a) {
  return (a.kind == Kind::Unary && a.sym.post) || (a.kind == Kind::Link && a.post);
}

/// Contains an unstarred dynamic symbol (P, a label, Link).
inline bool mentions_pre_dynamic(const Formula& f) {
  if (f.kind == Kind::Unary && f.sym.is_dynamic() && !f.sym.post) return true;
  if (f.kind == Kind::Link && !f.post) return true;
  for (const auto& k : f.kids)
    if (mentions_pre_dynamic(*k)) return true;
  return false;
}

/// Inverse of the star translation on formulas with no unstarred dynamic symbol.
inline FormulaPtr unstar(const FormulaPtr& f) {
  if (f->kind == Kind::Unary && f->sym.post) {
    UnarySymbol s = f->sym;
    s.post = false;
    return f_unary(s, f->terms[0]);
  }
  if (f->kind == Kind::Link) return f_link(false, f->terms[0], f->terms[1]);
  if (f->kids.empty()) return f;
  Formula copy = *f;
  for (auto& k : copy.kids) k = unstar(k);
  return make_node(std::move(copy));
}

struct Guard {
  Term t, u;
};

/// Splits a binary guard atom into (t, u), t being the side whose variable is quantified.
inline Guard guard_terms(Rule rule, const Formula& alpha, const std::string& var) {
  if (alpha.kind != Kind::Link && alpha.kind != Kind::Eq)
    throw DerivationError(rule, "binary guard atom", "'" + to_string(alpha) + "' is not a Link, Link* or equality atom");
  const Term &a = alpha.terms[0], &b = alpha.terms[1];
  if (a.var == var) return {a, b};
  if (b.var == var) return {b, a};
  throw DerivationError(rule, "guard mentions x_t", "'" + to_string(alpha) + "' does not mention '" + var + "'");
}

}  // namespace detail

/// Validates every rule application bottom-up and returns the root judgment. The signature is
/// needed only for Circumscribe (the supported theory). Throws DerivationError.
inline Judgment check_derivation(const Derivation& dv, const Signature& sig) {
  const Rule r = dv.rule;
  if (static_cast<int>(dv.premises.size()) != arity(r))
    throw DerivationError(r, "arity", "expected " + std::to_string(arity(r)) + " premises, got " +
                                          std::to_string(dv.premises.size()));
  std::vector<Judgment> p;
  for (const auto& sub : dv.premises) p.push_back(check_derivation(sub, sig));
  switch (r) {
    case Rule::Dynamic:
    case Rule::Static: {
      if (!dv.literal) throw DerivationError(r, "literal", "missing literal");
      const Formula* a = detail::literal_atom(*dv.literal);
      if (!a) throw DerivationError(r, "literal", "'" + to_string(*dv.literal) + "' is not a literal");
      if (r == Rule::Dynamic) {
        if (!detail::is_starred_atom(*a))
          throw DerivationError(r, "starred literal", "'" + to_string(*dv.literal) + "' is not over P*, Link* or a starred label");
        return {free_variables(*dv.literal), 0, dv.literal};
      }
      if (detail::is_starred_atom(*a))
        throw DerivationError(r, "unstarred literal", "'" + to_string(*dv.literal) + "' mentions a postcondition symbol");
      return {{}, 0, dv.literal};
    }
    case Rule::Weak: {
      if (!std::includes(dv.vars.begin(), dv.vars.end(), p[0].vars.begin(), p[0].vars.end()))
        throw DerivationError(r, "V subset of V'", context_string(p[0].vars, p[0].d) + " to " + context_string(dv.vars, dv.d));
      if (p[0].d > dv.d)
        throw DerivationError(r, "d <= d'", context_string(p[0].vars, p[0].d) + " to " + context_string(dv.vars, dv.d));
      return {dv.vars, dv.d, p[0].formula};
    }
    case Rule::Bool: {
      if (dv.op != Kind::And && dv.op != Kind::Or) throw DerivationError(r, "op in {and, or}", "bad connective");
      if (p[0].vars != p[1].vars || p[0].d != p[1].d)
        throw DerivationError(r, "identical contexts", context_string(p[0].vars, p[0].d) + " vs " + context_string(p[1].vars, p[1].d));
      return {p[0].vars, p[0].d, f_binary(dv.op, p[0].formula, p[1].formula)};
    }
    case Rule::Invariant: {
      if (p[0].d != 0 || p[0].vars.size() != 1)
        throw DerivationError(r, "premise context {x};0", "got " + context_string(p[0].vars, p[0].d));
      if (detail::mentions_pre_dynamic(*p[0].formula))
        throw DerivationError(r, "phi pre", "premise '" + to_string(*p[0].formula) + "' is not a star translation");
      auto phi = detail::unstar(p[0].formula);
      return {{}, 0, f_and(phi, p[0].formula)};
    }
    case Rule::ForallGuard:
    case Rule::ExistsGuard: {
      const auto g = detail::guard_terms(r, *p[1].formula, dv.var);
      const std::string &xt = g.t.var, &xu = g.u.var;
      std::set<std::string> both = p[0].vars;
      both.insert(p[1].vars.begin(), p[1].vars.end());
      if (r == Rule::ExistsGuard && xt == xu)
        throw DerivationError(r, "<t> != <u>", "guard '" + to_string(*p[1].formula) + "' is not proper");
      if (r == Rule::ForallGuard && xt == xu && both.count(xt))
        throw DerivationError(r, "<t> != <u> or <t> not in V u V'",
                              "'" + xt + "' is protected in " + context_string(both, p[0].d));
      std::set<std::string> vars = p[0].vars;
      vars.insert(xu);
      vars.erase(xt);
      if (r == Rule::ForallGuard)
        return {vars, p[0].d + static_cast<int>(p[0].vars.count(xt)), f_forall(xt, f_implies(p[1].formula, p[0].formula))};
      return {vars, p[0].d + 1, f_exists(xt, f_and(p[1].formula, p[0].formula))};
    }
    case Rule::Circumscribe:
      return {free_variables(*p[0].formula), p[0].d, f_minimize(with_supported_theory(p[0].formula, sig))};
  }
  throw std::logic_error("unreachable rule");
}

// Inference -----------------------------------------------------------------

namespace detail {

struct Derived {
  Derivation dv;
  Judgment j;
};

inline Derived weaken(Derived x, const std::set<std::string>& vars, int d) {
  if (x.j.vars == vars && x.j.d == d) return x;
  Derivation w{Rule::Weak, {std::move(x.dv)}, nullptr, vars, d};
  return {w, Judgment{vars, d, x.j.formula}};
}

inline std::optional<Derived> infer(const FormulaPtr& f, const Signature& sig) {
  auto apply = [&](Derivation dv) -> std::optional<Derived> {
    try {
      Judgment j = check_derivation(dv, sig);
      return Derived{std::move(dv), std::move(j)};
    } catch (const DerivationError&) {
      return std::nullopt;
    }
  };
  if (const Formula* a = literal_atom(*f)) {
    Derivation dv{is_starred_atom(*a) ? Rule::Dynamic : Rule::Static};
    dv.literal = f;
    return apply(std::move(dv));
  }
  switch (f->kind) {
    case Kind::And:
    case Kind::Or: {
      const auto& l = f->kids[0];
      const auto& rgt = f->kids[1];
      if (f->kind == Kind::And && is_pre(*l) && !mentions_pre_dynamic(*rgt) && alpha_equal(*unstar(rgt), *l)) {
        if (auto prem = infer(rgt, sig); prem && prem->j.d == 0 && prem->j.vars.size() <= 1) {
          std::set<std::string> x = prem->j.vars;
          if (x.empty()) {
            auto fv = free_variables(*rgt);
            x.insert(fv.empty() ? std::string("x") : *fv.begin());
          }
          auto w = weaken(std::move(*prem), x, 0);
          if (auto res = apply(Derivation{Rule::Invariant, {std::move(w.dv)}})) {
            if (alpha_equal(*res->j.formula, *f)) return res;
          }
        }
      }
      auto a = infer(l, sig), b = infer(rgt, sig);
      if (!a || !b) return std::nullopt;
      std::set<std::string> vars = a->j.vars;
      vars.insert(b->j.vars.begin(), b->j.vars.end());
      const int d = std::max(a->j.d, b->j.d);
      Derivation dv{Rule::Bool, {weaken(std::move(*a), vars, d).dv, weaken(std::move(*b), vars, d).dv}};
      dv.op = f->kind;
      return apply(std::move(dv));
    }
    case Kind::Forall:
    case Kind::Exists: {
      const Formula& body = f->kid(0);
      const Kind want = f->kind == Kind::Forall ? Kind::Implies : Kind::And;
      if (body.kind != want) return std::nullopt;
      auto phi = infer(body.kids[1], sig), alpha = infer(body.kids[0], sig);
      if (!phi || !alpha || !body.kid(0).is_atom()) return std::nullopt;
      Derivation dv{f->kind == Kind::Forall ? Rule::ForallGuard : Rule::ExistsGuard, {phi->dv, alpha->dv}};
      dv.var = f->var;
      return apply(std::move(dv));
    }
    case Kind::Minimize: {
      const auto& g = f->kids[0];
      if (g->kind != Kind::And) return std::nullopt;
      if (!alpha_equal(*with_supported_theory(g->kids[0], sig), *g)) return std::nullopt;
      auto prem = infer(g->kids[0], sig);
      if (!prem) return std::nullopt;
      return apply(Derivation{Rule::Circumscribe, {std::move(prem->dv)}});
    }
    default:
      return std::nullopt;
  }
}

}  // namespace detail

/// Syntax-directed derivation search: literals by Dynamic/Static, connectives by Bool after
/// weakening both sides to the join, guarded quantifiers by the guard rules, phi & *phi by
/// Invariant, minimize(psi & Tsupp) by Circumscribe. Nothing means this strategy found no
/// derivation, not that none exists.
inline std::optional<Derivation> infer_derivation(const FormulaPtr& f, const Signature& sig) {
  auto r = detail::infer(f, sig);
  if (!r) return std::nullopt;
  return std::move(r->dv);
}

inline std::optional<Judgment> infer_judgment(const FormulaPtr& f, const Signature& sig) {
  auto r = detail::infer(f, sig);
  if (!r) return std::nullopt;
  return std::move(r->j);
}

// Text format ---------------------------------------------------------------

namespace detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

inline void print_derivation(const Derivation& dv, int indent, std::string& out) {
  out += '(';
  out += to_string(dv.rule);
  switch (dv.rule) {
    case Rule::Dynamic:
    case Rule::Static: out += ' ' + quote(to_string(*dv.literal)); break;
    case Rule::Weak: {
      std::string v;
      for (const auto& x : dv.vars) v += (v.empty() ? "" : ",") + x;
      out += " V=" + quote(v) + " d=" + std::to_string(dv.d);
      break;
    }
    case Rule::Bool: out += dv.op == Kind::And ? " op=and" : " op=or"; break;
    case Rule::ForallGuard:
    case Rule::ExistsGuard: out += " var=" + dv.var; break;
    default: break;
  }
  for (const auto& p : dv.premises) {
    out += '\n' + std::string(indent + 2, ' ');
    print_derivation(p, indent + 2, out);
  }
  out += ')';
}

class DerivationParser {
 public:
  DerivationParser(std::string_view text, const Signature& sig, const Definitions* defs, int line)
      : s_(text), sig_(sig), defs_(defs), line_(line > 0 ? line : 1) {}

  Derivation parse() {
    Derivation d = node();
    skip();
    if (i_ < s_.size()) fail("trailing text after derivation");
    return d;
  }

 private:
  std::string_view s_;
  const Signature& sig_;
  const Definitions* defs_;
  int line_;
  size_t i_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_); }

  void skip() {
    while (i_ < s_.size()) {
      if (s_[i_] == '\n') ++line_;
      if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
        continue;
      }
      if (!std::isspace(static_cast<unsigned char>(s_[i_]))) break;
      ++i_;
    }
  }

  bool at(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }

  std::string word() {
    skip();
    size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (start == i_) fail("expected a word");
    return std::string(s_.substr(start, i_ - start));
  }

  std::string quoted() {
    skip();
    if (i_ >= s_.size() || s_[i_] != '"') fail("expected a quoted string");
    ++i_;
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) ++i_;
      if (s_[i_] == '\n') ++line_;
      out += s_[i_++];
    }
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  /// key=value with value a word or a quoted string.
  std::pair<std::string, std::string> param() {
    std::string key = word();
    skip();
    if (i_ >= s_.size() || s_[i_] != '=') fail("expected '=' after '" + key + "'");
    ++i_;
    return {key, at('"') ? quoted() : word()};
  }

  Derivation node() {
    if (!at('(')) fail("expected '('");
    ++i_;
    const int start_line = line_;
    std::string tag = word();
    auto rule = rule_from_string(tag);
    if (!rule) fail("unknown rule '" + tag + "'");
    Derivation d{*rule};
    bool have_vars = false, have_d = false;
    while (true) {
      if (at(')')) {
        ++i_;
        break;
      }
      if (at('(')) {
        d.premises.push_back(node());
        continue;
      }
      if (at('"')) {
        if (d.literal) fail("more than one literal");
        d.literal = parse_formula(quoted(), sig_, defs_, line_);
        continue;
      }
      if (i_ >= s_.size()) fail("unterminated derivation");
      auto [k, v] = param();
      if (k == "V" && d.rule == Rule::Weak) {
        for (const auto& x : parse_variable_list(v, line_)) d.vars.insert(x);
        have_vars = true;
      } else if (k == "d" && d.rule == Rule::Weak) {
        if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) fail("d must be a non-negative integer");
        d.d = std::stoi(v);
        have_d = true;
      } else if (k == "op" && d.rule == Rule::Bool) {
        if (v != "and" && v != "or") fail("op must be 'and' or 'or'");
        d.op = v == "and" ? Kind::And : Kind::Or;
      } else if (k == "var" && (d.rule == Rule::ForallGuard || d.rule == Rule::ExistsGuard)) {
        if (!is_identifier(v)) fail("malformed variable '" + v + "'");
        d.var = v;
      } else {
        fail("unexpected parameter '" + k + "' for " + tag);
      }
    }
    const bool leaf = d.rule == Rule::Dynamic || d.rule == Rule::Static;
    if (leaf != static_cast<bool>(d.literal)) throw ParseError(tag + (leaf ? " needs a literal" : " takes no literal"), start_line);
    if (d.rule == Rule::Weak && !(have_vars && have_d)) throw ParseError("weak needs V= and d=", start_line);
    if ((d.rule == Rule::ForallGuard || d.rule == Rule::ExistsGuard) && d.var.empty())
      throw ParseError(tag + " needs var=", start_line);
    if (static_cast<int>(d.premises.size()) != arity(d.rule))
      throw ParseError(tag + " expects " + std::to_string(arity(d.rule)) + " premises", start_line);
    return d;
  }
};

}  // namespace detail

inline std::string to_string(const Derivation& dv) {
  std::string out;
  detail::print_derivation(dv, 0, out);
  return out;
}

/// Parses the parenthesized derivation format; literals are formulas in double quotes.
inline Derivation parse_derivation(std::string_view text, const Signature& sig, const Definitions* defs = nullptr,
                                   int line = 0) {
  return detail::DerivationParser(text, sig, defs, line).parse();
}

}  // namespace flb
