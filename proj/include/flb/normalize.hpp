#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "flb/error.hpp"
#include "flb/formula.hpp"
#include "flb/rewrite.hpp"

namespace flb {

/// Prefix classes: ∃*∀*, ∀*∃*, both (at most one quantifier kind), other.
enum class Fragment { EA, AE, Both, Other };

inline const char* to_string(Fragment f) {
  switch (f) {
    case Fragment::EA: return "exists*forall*";
    case Fragment::AE: return "forall*exists*";
    case Fragment::Both: return "both";
    case Fragment::Other: return "other";
  }
  return "?";
}

/// Whether a prefix of class `have` lies in the target class (`Both` lies in every class).
inline bool fragment_within(Fragment have, Fragment target) {
  return have == target || have == Fragment::Both;
}

struct Quantifier {
  bool universal;
  std::string var;
  bool operator==(const Quantifier&) const = default;
};

/// A quantifier prefix over a quantifier-free matrix.
struct PrenexFormula {
  std::vector<Quantifier> prefix;
  FormulaPtr matrix;

  FormulaPtr to_formula() const {
    FormulaPtr f = matrix;
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) f = f_quant(it->universal ? Kind::Forall : Kind::Exists, it->var, f);
    return f;
  }
  std::vector<std::string> existentials() const {
    std::vector<std::string> out;
    for (const auto& q : prefix)
      if (!q.universal) out.push_back(q.var);
    return out;
  }
  std::vector<std::string> universals() const {
    std::vector<std::string> out;
    for (const auto& q : prefix)
      if (q.universal) out.push_back(q.var);
    return out;
  }
};

inline Fragment classify(const std::vector<Quantifier>& prefix) {
  int blocks = 0;
  for (size_t i = 0; i < prefix.size(); ++i)
    if (i == 0 || prefix[i].universal != prefix[i - 1].universal) ++blocks;
  if (blocks <= 1) return Fragment::Both;
  if (blocks == 2) return prefix[0].universal ? Fragment::AE : Fragment::EA;
  return Fragment::Other;
}

/// Negation normal form: implications eliminated, negations on atoms only.
inline FormulaPtr nnf(const FormulaPtr& f, bool negate = false) {
  switch (f->kind) {
    case Kind::True: return negate ? f_false() : f;
    case Kind::False: return negate ? f_true() : f;
    case Kind::Unary:
    case Kind::Link:
    case Kind::Eq: return negate ? f_not(f) : f;
    case Kind::Not: return nnf(f->kids[0], !negate);
    case Kind::And:
    case Kind::Or: {
      const bool conj = (f->kind == Kind::And) != negate;
      auto a = nnf(f->kids[0], negate), b = nnf(f->kids[1], negate);
      return conj ? f_and(a, b) : f_or(a, b);
    }
    case Kind::Implies: {
      auto a = nnf(f->kids[0], !negate), b = nnf(f->kids[1], negate);
      return negate ? f_and(a, b) : f_or(a, b);
    }
    case Kind::Forall:
    case Kind::Exists: {
      const bool universal = (f->kind == Kind::Forall) != negate;
      return f_quant(universal ? Kind::Forall : Kind::Exists, f->var, nnf(f->kids[0], negate));
    }
    case Kind::Minimize: throw UsageError("normalization is undefined on minimize");
  }
  return f;
}

namespace detail {

/// Interleaves two independent prefixes (each order kept), minimizing alternations, starting
/// with the quantifier kind `first_universal` when both sides allow it. When both sides offer a
/// quantifier of kind `shared` (∀ under ∧, ∃ under ∨), one variable serves both; the renaming of
/// b's variable is recorded in `sub`.
inline std::vector<Quantifier> merge_prefixes(const std::vector<Quantifier>& a, const std::vector<Quantifier>& b,
                                              bool first_universal, std::optional<bool> shared = std::nullopt,
                                              std::map<std::string, Term>* sub = nullptr) {
  std::vector<Quantifier> out;
  size_t i = 0, j = 0;
  bool want = first_universal;
  while (i < a.size() || j < b.size()) {
    const bool ai = i < a.size() && a[i].universal == want, bj = j < b.size() && b[j].universal == want;
    if (ai && bj && shared == want && sub) {
      (*sub)[b[j++].var] = var_term(a[i].var);
      out.push_back(a[i++]);
    } else if (ai) {
      out.push_back(a[i++]);
    } else if (bj) {
      out.push_back(b[j++]);
    } else {
      want = !want;
    }
  }
  return out;
}

/// Prenex form of an NNF formula whose bound variables are pairwise distinct and not free.
inline PrenexFormula prenex_nnf(const FormulaPtr& f, bool first_universal) {
  switch (f->kind) {
    case Kind::Forall:
    case Kind::Exists: {
      auto inner = prenex_nnf(f->kids[0], first_universal);
      inner.prefix.insert(inner.prefix.begin(), Quantifier{f->kind == Kind::Forall, f->var});
      return inner;
    }
    case Kind::And:
    case Kind::Or: {
      auto a = prenex_nnf(f->kids[0], first_universal), b = prenex_nnf(f->kids[1], first_universal);
      const bool conj = f->kind == Kind::And;
      std::map<std::string, Term> sub;
      auto prefix = merge_prefixes(a.prefix, b.prefix, first_universal, conj, &sub);
      // Bound variables are pairwise distinct, so the renaming cannot capture.
      auto bm = sub.empty() ? b.matrix : substitute(b.matrix, sub);
      return {prefix, conj ? f_and(a.matrix, bm) : f_or(a.matrix, bm)};
    }
    default: return {{}, f};
  }
}

}  // namespace detail

/// Prenex form with a bias: independent quantifiers are extracted universal-first or
/// existential-first. Bound variables are renamed apart first.
inline PrenexFormula prenex(const FormulaPtr& f, bool universal_first) {
  return detail::prenex_nnf(rename_apart(nnf(f)), universal_first);
}

struct NormalizedPrenex {
  PrenexFormula formula;
  Fragment tag;
};

/// Prenex form tagged by its fragment; the ∃*∀* extraction order is tried first.
inline NormalizedPrenex normalize_prenex(const FormulaPtr& f) {
  auto ea = prenex(f, false);
  Fragment tag = classify(ea.prefix);
  if (tag != Fragment::Other) return {ea, tag};
  auto ae = prenex(f, true);
  Fragment tag2 = classify(ae.prefix);
  if (tag2 != Fragment::Other) return {ae, tag2};
  return {ea, tag};
}

namespace detail {

/// If `lit` is ¬R(t,y) (negate) or R(t,y) with R a link symbol, y the bare variable `y`, and t not
/// mentioning y, returns t (orientation normalised by symmetry) and whether R is starred.
inline std::optional<std::pair<Term, bool>> link_guard(const FormulaPtr& lit, const std::string& y, bool negated) {
  const Formula* atom = lit.get();
  if (negated) {
    if (atom->kind != Kind::Not) return std::nullopt;
    atom = atom->kids[0].get();
  }
  if (atom->kind != Kind::Link) return std::nullopt;
  const Term &a = atom->terms[0], &b = atom->terms[1];
  if (b.var == y && b.path.empty() && a.var != y) return std::pair{a, atom->post};
  if (a.var == y && a.path.empty() && b.var != y) return std::pair{b, atom->post};
  return std::nullopt;
}

inline void flatten(const FormulaPtr& f, Kind k, std::vector<FormulaPtr>& out) {
  if (f->kind == k) {
    flatten(f->kids[0], k, out);
    flatten(f->kids[1], k, out);
  } else {
    out.push_back(f);
  }
}

inline FormulaPtr rebuild(Kind k, const std::vector<FormulaPtr>& parts) {
  return k == Kind::And ? f_and_all(parts) : f_or_all(parts);
}

/// One application of the functionality switch at the root of `f`, for every guard choice:
///   ∀y.(¬R(t,y) ∨ ψ)  ⇒  (∀y.¬R(t,y)) ∨ (∃y.R(t,y) ∧ ψ)
///   ∃y.(R(t,y) ∧ ψ)   ⇒  (∃y.R(t,y)) ∧ (∀y.¬R(t,y) ∨ ψ)
inline std::vector<FormulaPtr> switch_at_root(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  if (f->kind != Kind::Forall && f->kind != Kind::Exists) return out;
  const bool universal = f->kind == Kind::Forall;
  const Kind junction = universal ? Kind::Or : Kind::And;
  std::vector<FormulaPtr> parts;
  flatten(f->kids[0], junction, parts);
  for (size_t i = 0; i < parts.size(); ++i) {
    auto g = link_guard(parts[i], f->var, universal);
    if (!g) continue;
    std::vector<FormulaPtr> rest;
    for (size_t j = 0; j < parts.size(); ++j)
      if (j != i) rest.push_back(parts[j]);
    auto atom = f_link(g->second, g->first, var_term(f->var));
    auto psi = rebuild(junction, rest);
    if (universal) {
      out.push_back(f_or(f_forall(f->var, f_not(atom)), f_exists(f->var, f_and(atom, psi))));
    } else {
      out.push_back(f_and(f_exists(f->var, atom), f_forall(f->var, f_or(f_not(atom), psi))));
    }
  }
  return out;
}

/// Every formula obtained by one functionality switch anywhere inside `f`.
inline std::vector<FormulaPtr> switch_anywhere(const FormulaPtr& f) {
  auto out = switch_at_root(f);
  for (size_t k = 0; k < f->kids.size(); ++k)
    for (const auto& sub : switch_anywhere(f->kids[k])) {
      Formula copy = *f;
      copy.kids[k] = sub;
      out.push_back(make_node(std::move(copy)));
    }
  return out;
}

inline int count_quantifiers(const Formula& f) {
  int n = (f.kind == Kind::Forall || f.kind == Kind::Exists) ? 1 : 0;
  for (const auto& k : f.kids) n += count_quantifiers(*k);
  return n;
}

}  // namespace detail

/// Breadth-first search over functionality switches (both directions, any position) for a
/// prenex form in `target`, up to depth 2·(number of quantifiers). Each state is prenexed with
/// the extraction order matching the target. The result is equivalent to f modulo link
/// functionality and symmetry. Nothing when no form is found within the bound.
inline std::optional<PrenexFormula> fragment_normalize(const FormulaPtr& f, Fragment target) {
  if (target != Fragment::EA && target != Fragment::AE) throw UsageError("target must be exists*forall* or forall*exists*");
  const bool universal_first = target == Fragment::AE;
  FormulaPtr start = rename_apart(nnf(f));
  const int depth_bound = 2 * detail::count_quantifiers(*start);
  std::deque<std::pair<FormulaPtr, int>> queue{{start, 0}};
  std::set<std::string> seen{to_string(*start)};
  while (!queue.empty()) {
    auto [g, depth] = queue.front();
    queue.pop_front();
    auto p = detail::prenex_nnf(g, universal_first);
    if (fragment_within(classify(p.prefix), target)) return p;
    if (depth >= depth_bound) continue;
    for (const auto& next : detail::switch_anywhere(g)) {
      auto r = rename_apart(nnf(next));
      if (seen.insert(to_string(*r)).second) queue.push_back({r, depth + 1});
    }
  }
  return std::nullopt;
}

}  // namespace flb
