#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flb/change.hpp"
#include "flb/error.hpp"
#include "flb/formula.hpp"
#include "flb/random.hpp"
#include "flb/semantics.hpp"
#include "flb/theory.hpp"

namespace flb {

/// Υ = (P_fix, P_var, P_restr, f_restr, P_min). Predicate items are formulas over the
/// variables `x` (unary) or `x`,`y` (binary); function items are terms over `x`.
struct CircumscriptionPartition {
  std::vector<FormulaPtr> p_fix;
  std::vector<FormulaPtr> p_var;
  std::vector<FormulaPtr> p_restr;
  std::vector<Term> f_restr;
  std::vector<FormulaPtr> p_min;
};

/// The transition instantiation: the precondition is fixed, postconditions vary, names and
/// tree functions are restricted to the smaller domain, and the Δ formulas are minimized.
inline CircumscriptionPartition transition_partition(const Signature& sig) {
  CircumscriptionPartition part;
  Term x = var_term("x"), y = var_term("y");
  std::vector<UnarySymbol> dyn{presence(false)};
  for (int l = 0; l < static_cast<int>(sig.labels.size()); ++l) dyn.push_back({SymKind::Label, l, false, sig.labels[l]});
  for (auto s : dyn) {
    part.p_fix.push_back(f_unary(s, x));
    UnarySymbol post = s;
    post.post = true;
    part.p_var.push_back(f_unary(post, x));
    part.p_min.push_back(delta_unary(s, x));
  }
  part.p_fix.push_back(f_link(false, x, y));
  part.p_var.push_back(f_link(true, x, y));
  part.p_min.push_back(delta_link(x, y));
  for (int n = 0; n < static_cast<int>(sig.names.size()); ++n)
    part.p_restr.push_back(f_unary({SymKind::Name, n, false, sig.names[n]}, x));
  for (int f = 0; f < static_cast<int>(sig.children.size()); ++f) part.f_restr.push_back(apply(Func{f, sig.children[f]}, x));
  part.f_restr.push_back(apply(parent_func(), x));
  return part;
}

namespace detail {

using NameTuple = std::vector<std::string>;

/// Extent of a formula with free variables among {x, y}, as tuples of node names.
inline std::set<NameTuple> extent(const Transition& t, const FormulaPtr& f) {
  auto fv = free_variables(*f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  std::set<NameTuple> out;
  Evaluator ev(f);
  auto parents = t.parents();
  std::vector<int> idx(vars.size(), 0);
  if (t.size() == 0 && !vars.empty()) return out;
  while (true) {
    Assignment a;
    NameTuple tuple;
    for (size_t i = 0; i < vars.size(); ++i) a[vars[i]] = idx[i], tuple.push_back(t.node_names[idx[i]]);
    if (ev(t, parents, a)) out.insert(tuple);
    size_t pos = 0;
    while (pos < vars.size() && ++idx[pos] == t.size()) idx[pos++] = 0;
    if (pos == vars.size()) break;
  }
  return out;
}

inline bool tuple_within(const NameTuple& tuple, const std::set<std::string>& dom) {
  for (const auto& n : tuple)
    if (!dom.count(n)) return false;
  return true;
}

}  // namespace detail

/// The extents prec_leq compares, computed once per transition.
struct PrecProfile {
  std::shared_ptr<const Signature> sig;
  std::set<std::string> dom;
  std::vector<std::set<detail::NameTuple>> fix, restr, min;
  std::vector<std::map<std::string, std::string>> funcs;  // per f_restr term: node name -> value name
};

inline PrecProfile prec_profile(const Transition& t, const CircumscriptionPartition& part) {
  PrecProfile p;
  p.sig = t.sig;
  p.dom = {t.node_names.begin(), t.node_names.end()};
  for (const auto& f : part.p_fix) p.fix.push_back(detail::extent(t, f));
  for (const auto& f : part.p_restr) p.restr.push_back(detail::extent(t, f));
  for (const auto& f : part.p_min) p.min.push_back(detail::extent(t, f));
  for (const auto& term : part.f_restr) {
    std::map<std::string, std::string> m;
    for (int x = 0; x < t.size(); ++x) m[t.node_names[x]] = t.node_names[eval_term(t, {{term.var, x}}, term)];
    p.funcs.push_back(std::move(m));
  }
  return p;
}

/// b ≼ a under the partition: dom(b) ⊆ dom(a); P_fix extents equal; P_restr and f_restr of a
/// restricted to dom(b) equal b's; P_min extents of b included in a's. P_var is unconstrained.
inline bool prec_leq(const PrecProfile& b, const PrecProfile& a) {
  if (!(*a.sig == *b.sig)) throw UsageError("prec_leq: signature mismatch");
  if (!std::includes(a.dom.begin(), a.dom.end(), b.dom.begin(), b.dom.end())) return false;
  if (b.fix != a.fix) return false;
  for (size_t i = 0; i < a.restr.size(); ++i) {
    std::set<detail::NameTuple> restricted;
    for (const auto& tuple : a.restr[i])
      if (detail::tuple_within(tuple, b.dom)) restricted.insert(tuple);
    if (b.restr[i] != restricted) return false;
  }
  for (size_t i = 0; i < a.funcs.size(); ++i)
    for (const auto& [x, v] : b.funcs[i])
      if (a.funcs[i].at(x) != v) return false;
  for (size_t i = 0; i < a.min.size(); ++i)
    if (!std::includes(a.min[i].begin(), a.min[i].end(), b.min[i].begin(), b.min[i].end())) return false;
  return true;
}

inline bool prec_leq(const Transition& b, const Transition& a, const CircumscriptionPartition& part) {
  return prec_leq(prec_profile(b, part), prec_profile(a, part));
}

inline bool prec_less(const Transition& b, const Transition& a, const CircumscriptionPartition& part) {
  return prec_leq(b, a, part) && !prec_leq(a, b, part);
}

/// True iff no strictly change-smaller transition keeping the image of mu satisfies phi.
inline bool is_minimal(const Transition& a, const Assignment& mu, const FormulaPtr& phi, const Budget& budget = {}) {
  for (const auto& v : free_variables(*phi))
    if (!mu.count(v)) throw UsageError("is_minimal: free variable '" + v + "' not assigned");
  return !find_smaller_model(a, mu, phi, budget).has_value();
}

/// The image of V under mu.
inline NodeSet kernel_of(const Assignment& mu, const std::set<std::string>& vars) {
  NodeSet k;
  for (const auto& v : vars) {
    auto it = mu.find(v);
    if (it == mu.end()) throw UsageError("variable '" + v + "' not covered by the assignment");
    k.set(it->second);
  }
  return k;
}

/// Every modified node lies within link distance d of the trees holding mu(V).
inline bool locality_check(const Transition& a, const Assignment& mu, const std::set<std::string>& vars, int d) {
  auto trees = decompose(a);
  return modified_nodes(a, trees).subset_of(ball(a, trees, kernel_of(mu, vars), d));
}

/// Result of a randomized preservation run.
struct PreservationReport {
  bool pass = true;
  int trials = 0;
  long checks = 0;         // (a, mu, nu, b) tuples with a satisfying phi
  long subs = 0;
  std::optional<Transition> a, b;
  Assignment mu, nu;
};

namespace detail {

/// Calls f(assignment) for every map of `vars` into [0, n); stops early when f returns false.
template <class F>
bool for_each_assignment(const std::vector<std::string>& vars, int n, const Assignment& base, F&& f) {
  if (n == 0 && !vars.empty()) return true;
  std::vector<int> idx(vars.size(), 0);
  while (true) {
    Assignment a = base;
    for (size_t i = 0; i < vars.size(); ++i) a[vars[i]] = idx[i];
    if (!f(a)) return false;
    size_t pos = 0;
    while (pos < vars.size() && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == vars.size()) return true;
  }
}

}  // namespace detail

namespace detail {

/// Checks every sub of `a` for every assignment satisfying phi; records the first failure.
inline void preservation_trial(const Transition& a, const Evaluator& ev, const FormulaPtr& phi,
                               const std::set<std::string>& vars, int d, PreservationReport& rep) {
  std::vector<std::string> v_list(vars.begin(), vars.end());
  std::vector<std::string> rest;
  for (const auto& v : free_variables(*phi))
    if (!vars.count(v)) rest.push_back(v);
  ++rep.trials;
  detail::for_each_assignment(v_list, a.size(), {}, [&](const Assignment& mu) {
    NodeSet kernel;
    for (const auto& [v, x] : mu) kernel.set(x);
    auto subs = enumerate_subs(a, kernel, d);
    rep.subs += static_cast<long>(subs.size());
    return detail::for_each_assignment(rest, a.size(), mu, [&](const Assignment& full_a) {
      if (!ev(a, full_a)) return true;
      for (const auto& b : subs) {
        // Carry mu and nu over by node name; nu must land inside b's domain.
        Assignment full_b;
        bool inside = true;
        for (const auto& [v, x] : full_a) {
          int y = b.index_of(a.node_names[x]);
          if (y < 0) inside = false;
          full_b[v] = y;
        }
        if (!inside) continue;
        ++rep.checks;
        if (!ev(b, full_b)) {
          rep.pass = false;
          rep.a = a;
          rep.b = b;
          for (const auto& [v, x] : full_b) (vars.count(v) ? rep.mu : rep.nu)[v] = x;
          return false;
        }
      }
      return true;
    });
  });
}

}  // namespace detail

/// Samples FLBs a and checks, for every mu over V and nu over the other free variables, that
/// a,mu,nu |= phi implies b,mu,nu |= phi for every (mu(V),d)-sub b of a. Assignments are
/// enumerated exhaustively per sample; nu is re-chosen inside each sub's domain.
inline PreservationReport preservation_check(const FormulaPtr& phi, const std::set<std::string>& vars, int d,
                                             const std::shared_ptr<const Signature>& sig, int trials,
                                             std::uint64_t seed, const RandomOptions& opts = {},
                                             const Budget& budget = {}) {
  PreservationReport rep;
  Rng rng(seed);
  Evaluator ev(phi, budget);
  for (int trial = 0; trial < trials && rep.pass; ++trial) detail::preservation_trial(random_flb(sig, rng, opts), ev, phi, vars, d, rep);
  return rep;
}

/// Same check over given transitions instead of random ones (e.g. known models of phi).
inline PreservationReport preservation_check_on(const FormulaPtr& phi, const std::set<std::string>& vars, int d,
                                                const std::vector<Transition>& structures, const Budget& budget = {}) {
  PreservationReport rep;
  Evaluator ev(phi, budget);
  for (const auto& a : structures) {
    if (!rep.pass) break;
    detail::preservation_trial(a, ev, phi, vars, d, rep);
  }
  return rep;
}

}  // namespace flb
