#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flb/canonical.hpp"
#include "flb/enumerate.hpp"
#include "flb/error.hpp"
#include "flb/ground.hpp"
#include "flb/normalize.hpp"
#include "flb/semantics.hpp"
#include "flb/theory.hpp"

namespace flb {

/// Search bound: up to max_trees copies of subtrees of the full template tree.
struct ModelBound {
  int max_trees = 1;
  long template_nodes = 1;
  long max_nodes() const { return max_trees * template_nodes; }
};

inline bool in_ea(const PrenexFormula& pf) { return fragment_within(classify(pf.prefix), Fragment::EA); }

/// maxTrees = max(1, number of existential quantifiers).
inline ModelBound small_model_bound(const PrenexFormula& pf, const Signature& sig) {
  if (!in_ea(pf)) throw UsageError("small_model_bound needs an exists*forall* prefix");
  const int ex = static_cast<int>(pf.existentials().size());
  return ModelBound{std::max(1, ex), template_size(sig)};
}

struct SatResult {
  bool sat = false;
  std::optional<Transition> witness;
  Assignment assignment;  // existential witnesses
  long forests = 0;
  long decisions = 0;
};

struct SolverOptions {
  std::optional<int> max_trees;     // overrides the small-model bound
  long max_decisions = 1L << 26;
};

/// Satisfiability of an ∃*∀* prenex sentence modulo the supported-FLB theory, by search over
/// forests within the small-model bound. Free variables are read existentially. The witness is
/// a valid supported FLB checked by the evaluator.
inline SatResult sat(const PrenexFormula& input, const std::shared_ptr<const Signature>& sig,
                     const SolverOptions& opts = {}) {
  if (contains_kind(*input.matrix, Kind::Minimize)) throw UsageError("sat: minimize is not allowed in the matrix");
  PrenexFormula pf = input;
  {
    // Existential closure over free variables.
    std::set<std::string> fv = free_variables(*pf.to_formula());
    std::vector<Quantifier> pre;
    for (const auto& v : fv) pre.push_back({false, v});
    pf.prefix.insert(pf.prefix.begin(), pre.begin(), pre.end());
  }
  ModelBound bound = small_model_bound(pf, *sig);
  if (opts.max_trees) bound.max_trees = *opts.max_trees;

  std::vector<std::string> ex;
  size_t split = 0;
  while (split < pf.prefix.size() && !pf.prefix[split].universal) ex.push_back(pf.prefix[split++].var);
  PrenexFormula rest{std::vector<Quantifier>(pf.prefix.begin() + static_cast<long>(split), pf.prefix.end()), pf.matrix};
  const FormulaPtr body = rest.to_formula();
  const FormulaPtr theory = supported_theory(*sig);

  SatResult res;
  auto shapes = tree_shapes(*sig);
  auto forests = forest_shapes(shapes, static_cast<int>(std::min<long>(64, bound.max_nodes())), bound.max_trees);
  std::stable_sort(forests.begin(), forests.end(), [&](const auto& a, const auto& b) {
    auto nodes = [&](const std::vector<int>& f) {
      int n = 0;
      for (int s : f) n += shapes[s].size();
      return n;
    };
    return std::pair{a.size(), nodes(a)} < std::pair{b.size(), nodes(b)};
  });
  for (const auto& forest : forests) {
    ++res.forests;
    Transition shape = build_forest(sig, shapes, forest);
    const int n = shape.size();
    FactSpace facts(n, static_cast<int>(sig->labels.size()), static_cast<int>(sig->names.size()));
    std::vector<int> idx(ex.size(), 0);
    while (true) {
      Assignment env;
      for (size_t i = 0; i < ex.size(); ++i) env[ex[i]] = idx[i];
      GroundFormula g;
      Grounder gr(shape, facts, g);
      int root = g.junction(true, {gr.ground(body, env), gr.ground(theory, {})});
      if (root != 0) {
        PropSolver solver(g, root, facts.count());
        auto model = solver.solve(std::vector<int8_t>(facts.count(), -1), opts.max_decisions - res.decisions);
        res.decisions += solver.decisions();
        if (model) {
          Transition w = shape;
          facts.apply(*model, w);
          if (!is_valid_flb(w) || !is_supported(w) || !eval(w, env, body))
            throw std::logic_error("solver produced an invalid witness");
          res.sat = true;
          res.witness = w;
          res.assignment = env;
          return res;
        }
      }
      size_t pos = 0;
      while (pos < ex.size() && ++idx[pos] == n) idx[pos++] = 0;
      if (pos == ex.size()) break;
    }
  }
  return res;
}

/// Satisfiability of an arbitrary Minimize-free formula, normalized into ∃*∀* first.
inline SatResult sat(const FormulaPtr& f, const std::shared_ptr<const Signature>& sig, const SolverOptions& opts = {}) {
  auto pf = fragment_normalize(f, Fragment::EA);
  if (!pf) throw UsageError("formula could not be normalized into exists*forall*");
  return sat(*pf, sig, opts);
}

struct ValidResult {
  bool valid = false;
  std::optional<Transition> counter_model;
  Assignment assignment;
};

/// Validity modulo the supported-FLB theory: the negation (free variables read universally in f,
/// hence existentially in the negation) has no model within the bound.
inline ValidResult valid(const FormulaPtr& f, const std::shared_ptr<const Signature>& sig, const SolverOptions& opts = {}) {
  auto pf = fragment_normalize(f_not(f), Fragment::EA);
  if (!pf) throw UsageError("negation could not be normalized into exists*forall*");
  auto r = sat(*pf, sig, opts);
  ValidResult v;
  v.valid = !r.sat;
  v.counter_model = r.witness;
  v.assignment = r.assignment;
  return v;
}

struct Disagreement {
  Transition t;
  Assignment mu;
};

/// Bounded equivalence: searches every forest shape with min_nodes..max_nodes nodes for a valid
/// supported FLB and an assignment of the free variables on which f and g differ, by grounding
/// (f ∧ ¬g) ∨ (¬f ∧ g) per shape. Exhaustive within the bound; a found witness is re-checked
/// with the evaluator.
inline std::optional<Disagreement> find_disagreement(const FormulaPtr& f, const FormulaPtr& g,
                                                     const std::shared_ptr<const Signature>& sig, int min_nodes,
                                                     int max_nodes, long max_decisions = 1L << 26) {
  if (contains_kind(*f, Kind::Minimize) || contains_kind(*g, Kind::Minimize))
    throw UsageError("find_disagreement: minimize cannot be grounded");
  const FormulaPtr diff = f_or(f_and(f, f_not(g)), f_and(f_not(f), g));
  const FormulaPtr theory = supported_theory(*sig);
  auto fv = free_variables(*diff);
  std::vector<std::string> vars(fv.begin(), fv.end());
  auto shapes = tree_shapes(*sig);
  for (const auto& forest : forest_shapes(shapes, max_nodes, max_nodes)) {
    Transition shape = build_forest(sig, shapes, forest);
    const int n = shape.size();
    if (n < min_nodes) continue;
    FactSpace facts(n, static_cast<int>(sig->labels.size()), static_cast<int>(sig->names.size()));
    std::vector<int> idx(vars.size(), 0);
    while (true) {
      Assignment mu;
      for (size_t i = 0; i < vars.size(); ++i) mu[vars[i]] = idx[i];
      GroundFormula gf;
      Grounder gr(shape, facts, gf);
      int root = gf.junction(true, {gr.ground(theory, {}), gr.ground(diff, mu)});
      if (root != 0) {
        PropSolver solver(gf, root, facts.count());
        if (auto model = solver.solve(std::vector<int8_t>(facts.count(), -1), max_decisions)) {
          Transition w = shape;
          facts.apply(*model, w);
          if (!is_valid_flb(w) || !is_supported(w) || eval(w, mu, f) == eval(w, mu, g))
            throw std::logic_error("find_disagreement: ground witness fails evaluation");
          return Disagreement{w, mu};
        }
      }
      size_t pos = 0;
      while (pos < vars.size() && ++idx[pos] == n) idx[pos++] = 0;
      if (pos == vars.size()) break;
    }
  }
  return std::nullopt;
}

}  // namespace flb
