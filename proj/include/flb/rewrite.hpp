#pragma once

#include <map>
#include <set>
#include <string>

#include "flb/formula.hpp"

namespace flb {

/// Produces a variable name based on `base` that is not in `taken`, and reserves it.
inline std::string fresh_variable(const std::string& base, std::set<std::string>& taken) {
  std::string stem = base;
  if (auto pos = stem.rfind('_'); pos != std::string::npos && pos + 1 < stem.size() &&
                                  stem.find_first_not_of("0123456789", pos + 1) == std::string::npos)
    stem = stem.substr(0, pos);
  for (int k = 1;; ++k) {
    std::string candidate = stem + "_" + std::to_string(k);
    if (taken.insert(candidate).second) return candidate;
  }
}

namespace detail {

inline Term substitute_term(const Term& t, const std::map<std::string, Term>& sub) {
  auto it = sub.find(t.var);
  if (it == sub.end()) return t;
  Term out = it->second;
  out.path.insert(out.path.end(), t.path.begin(), t.path.end());
  return out;
}

inline FormulaPtr substitute_impl(const FormulaPtr& f, std::map<std::string, Term> sub, std::set<std::string>& taken,
                                  const std::set<std::string>& incoming) {
  if (f->is_quantifier()) {
    std::string v = f->var;
    sub.erase(v);
    if (incoming.count(v)) {
      std::string renamed = fresh_variable(v, taken);
      sub[v] = var_term(renamed);
      v = renamed;
    }
    return f_quant(f->kind, v, substitute_impl(f->kids[0], std::move(sub), taken, incoming));
  }
  if (sub.empty()) return f;
  Formula copy = *f;
  for (auto& t : copy.terms) t = substitute_term(t, sub);
  for (auto& k : copy.kids) k = substitute_impl(k, sub, taken, incoming);
  return make_node(std::move(copy));
}

}  // namespace detail

/// Capture-avoiding substitution of terms for free variables.
inline FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, Term>& sub) {
  std::set<std::string> incoming, taken = all_variables(*f);
  for (const auto& [v, t] : sub) {
    incoming.insert(t.var);
    taken.insert(t.var);
  }
  return detail::substitute_impl(f, sub, taken, incoming);
}

namespace detail {

inline FormulaPtr rename_apart_impl(const FormulaPtr& f, std::map<std::string, std::string> env,
                                    std::set<std::string>& used, std::set<std::string>& taken) {
  if (f->is_quantifier()) {
    std::string v = f->var;
    if (used.count(v)) v = fresh_variable(v, taken);
    used.insert(v);
    taken.insert(v);
    env[f->var] = v;
    return f_quant(f->kind, v, rename_apart_impl(f->kids[0], std::move(env), used, taken));
  }
  Formula copy = *f;
  for (auto& t : copy.terms)
    if (auto it = env.find(t.var); it != env.end()) t.var = it->second;
  for (auto& k : copy.kids) k = rename_apart_impl(k, env, used, taken);
  return make_node(std::move(copy));
}

}  // namespace detail

/// Renames bound variables so that every binder introduces a distinct name, different from
/// every free variable. Free variables keep their names.
inline FormulaPtr rename_apart(const FormulaPtr& f, std::set<std::string> reserved = {}) {
  std::set<std::string> used = free_variables(*f);
  used.insert(reserved.begin(), reserved.end());
  std::set<std::string> taken = all_variables(*f);
  taken.insert(used.begin(), used.end());
  return detail::rename_apart_impl(f, {}, used, taken);
}

namespace detail {

/// Binder depth of each bound name (innermost wins); free names map to nothing.
inline bool alpha_equal_impl(const Formula& a, const Formula& b, std::map<std::string, int> ea,
                             std::map<std::string, int> eb, int depth) {
  if (a.kind != b.kind) return false;
  auto same_term = [&](const Term& s, const Term& t) {
    if (s.path != t.path) return false;
    auto is = ea.find(s.var), it = eb.find(t.var);
    if ((is == ea.end()) != (it == eb.end())) return false;
    return is == ea.end() ? s.var == t.var : is->second == it->second;
  };
  switch (a.kind) {
    case Kind::Unary:
      return a.sym == b.sym && same_term(a.terms[0], b.terms[0]);
    case Kind::Link:
      return a.post == b.post && same_term(a.terms[0], b.terms[0]) && same_term(a.terms[1], b.terms[1]);
    case Kind::Eq:
      return same_term(a.terms[0], b.terms[0]) && same_term(a.terms[1], b.terms[1]);
    case Kind::Forall:
    case Kind::Exists:
      ea[a.var] = depth;
      eb[b.var] = depth;
      return alpha_equal_impl(a.kid(0), b.kid(0), std::move(ea), std::move(eb), depth + 1);
    default:
      break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!alpha_equal_impl(*a.kids[i], *b.kids[i], ea, eb, depth)) return false;
  return true;
}

}  // namespace detail

/// Syntactic equality up to renaming of bound variables.
inline bool alpha_equal(const Formula& a, const Formula& b) { return detail::alpha_equal_impl(a, b, {}, {}, 0); }

}  // namespace flb
