#pragma once

#include <vector>

#include "flb/error.hpp"
#include "flb/formula.hpp"
#include "flb/rewrite.hpp"
#include "flb/signature.hpp"

namespace flb {

namespace detail {
inline FormulaPtr star_impl(const FormulaPtr& f) {
  if (f->kind == Kind::Unary && f->sym.is_dynamic()) {
    UnarySymbol s = f->sym;
    s.post = true;
    return f_unary(s, f->terms[0]);
  }
  if (f->kind == Kind::Link) return f_link(true, f->terms[0], f->terms[1]);
  if (f->kids.empty()) return f;
  Formula copy = *f;
  for (auto& k : copy.kids) k = star_impl(k);
  return make_node(std::move(copy));
}
}  // namespace detail

/// Replaces every precondition dynamic symbol (P, Link, labels) by its starred counterpart.
inline FormulaPtr star_translate(const FormulaPtr& f) {
  if (!is_pre(*f)) throw UsageError("star translation needs a pre-formula: " + to_string(*f));
  return detail::star_impl(f);
}

inline FormulaPtr support_formula() {
  return f_forall("x", f_or(f_unary(presence(false), var_term("x")), f_unary(presence(true), var_term("x"))));
}

/// Functionality and symmetry of Link (or Link*).
inline FormulaPtr fun_sym_link(bool post) {
  Term x = var_term("x"), y = var_term("y"), z = var_term("z");
  auto functional =
      f_forall("x", f_forall("y", f_forall("z", f_implies(f_and(f_link(post, x, y), f_link(post, x, z)), f_eq(y, z)))));
  auto symmetric = f_forall("x", f_forall("y", f_implies(f_link(post, x, y), f_link(post, y, x))));
  return f_and(functional, symmetric);
}

/// parent(f(x)) = x for every proper child, and a non-root is some child of its parent.
inline FormulaPtr parent_spec(const Signature& sig, const Term& x) {
  std::vector<FormulaPtr> parts;
  for (int i = 0; i < static_cast<int>(sig.children.size()); ++i) {
    Term fx = apply(Func{i, sig.children[i]}, x);
    parts.push_back(f_or(f_eq(fx, x), f_eq(apply(parent_func(), fx), x)));
  }
  std::vector<FormulaPtr> up{f_eq(apply(parent_func(), x), x)};
  for (int i = 0; i < static_cast<int>(sig.children.size()); ++i)
    up.push_back(f_eq(apply(Func{i, sig.children[i]}, apply(parent_func(), x)), x));
  parts.push_back(f_or_all(up));
  return f_and_all(parts);
}

/// Every composition of height+1 child functions applied to x has a stationary step,
/// i.e. no proper downward path from x is longer than the height bound.
inline FormulaPtr height_bound(const Signature& sig, const Term& x) {
  const int k = static_cast<int>(sig.children.size());
  const int steps = sig.height + 1;
  std::vector<FormulaPtr> clauses;
  if (k == 0) return f_true();
  std::vector<int> seq(steps, 0);
  while (true) {
    std::vector<FormulaPtr> stationary;
    Term cur = x;
    for (int s = 0; s < steps; ++s) {
      Term next = apply(Func{seq[s], sig.children[seq[s]]}, cur);
      stationary.push_back(f_eq(next, cur));
      cur = next;
    }
    clauses.push_back(f_or_all(stationary));
    int pos = steps - 1;
    while (pos >= 0 && ++seq[pos] == k) seq[pos--] = 0;
    if (pos < 0) break;
  }
  return f_and_all(clauses);
}

/// The universal theory whose models are exactly the n-FLBs of `sig`.
inline FormulaPtr theory_formula(const Signature& sig) {
  Term x = var_term("x");
  auto tree_part = f_forall("x", f_and(parent_spec(sig, x), height_bound(sig, x)));
  return rename_apart(f_and(f_and(tree_part, fun_sym_link(false)), fun_sym_link(true)));
}

/// Theory of supported n-FLBs: theory_formula(sig) & Support.
inline FormulaPtr supported_theory(const Signature& sig) {
  return rename_apart(f_and(theory_formula(sig), support_formula()));
}

/// phi & supported_theory(sig), with the theory's bound variables renamed away from phi's.
inline FormulaPtr with_supported_theory(const FormulaPtr& phi, const Signature& sig) {
  return rename_apart(f_and(phi, supported_theory(sig)));
}

/// Change formula for a unary dynamic symbol: A(t) <-> !A*(t).
inline FormulaPtr delta_unary(UnarySymbol s, const Term& t) {
  UnarySymbol pre = s, post = s;
  pre.post = false;
  post.post = true;
  return f_iff(f_unary(pre, t), f_not(f_unary(post, t)));
}

/// Change formula for links: Link(a,b) <-> !Link*(a,b).
inline FormulaPtr delta_link(const Term& a, const Term& b) {
  return f_iff(f_link(false, a, b), f_not(f_link(true, a, b)));
}

}  // namespace flb
