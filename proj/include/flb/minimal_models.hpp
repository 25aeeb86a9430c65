#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "flb/canonical.hpp"
#include "flb/circumscription.hpp"
#include "flb/enumerate.hpp"
#include "flb/ground.hpp"

namespace flb {

struct MinimalModel {
  Transition t;
  Assignment mu;
};

struct MinimalModelsResult {
  std::vector<MinimalModel> models;
  long pre_worlds = 0;  // (precondition, assignment) pairs searched, up to isomorphism
  long candidates = 0;  // delta-minimal candidates passed to the exact minimality check
  bool stopped = false;  // the visitor asked to stop early
};

using MinimalModelVisitor = std::function<bool(const MinimalModel&)>;

namespace detail {

/// All ⊆-minimal sets of post facts differing from the fixed precondition, for one ground formula.
/// `post_vars` are the free facts; `pre_of[v]` is the value v takes when unchanged.
inline std::vector<std::vector<int8_t>> minimal_post_assignments(const GroundFormula& g, int root, int nvars,
                                                                 const std::vector<int8_t>& init,
                                                                 const std::vector<int>& post_vars,
                                                                 const std::vector<int8_t>& pre_of, long max_decisions) {
  std::vector<std::vector<int8_t>> out;
  if (root == 0) return out;
  std::vector<int8_t> pref(nvars, 0);
  for (int v : post_vars) pref[v] = pre_of[v];
  std::vector<PropSolver::Clause> blocking;
  auto changed = [&](const std::vector<int8_t>& m) {
    std::vector<int> d;
    for (int v : post_vars)
      if (m[v] != pre_of[v]) d.push_back(v);
    return d;
  };
  auto run = [&](const std::vector<PropSolver::Clause>& extra, std::vector<int8_t> start) {
    PropSolver s(g, root, nvars);
    s.set_preference(pref);
    for (const auto& c : blocking) s.add_clause(c);
    for (const auto& c : extra) s.add_clause(c);
    return s.solve(std::move(start), max_decisions);
  };
  while (true) {
    auto m = run({}, init);
    if (!m) break;
    auto d = changed(*m);
    // Shrink: ask for a strict subset of the current change set until none exists.
    while (!d.empty()) {
      std::vector<int8_t> start = init;
      std::set<int> in_d(d.begin(), d.end());
      for (int v : post_vars)
        if (!in_d.count(v)) start[v] = pre_of[v];
      PropSolver::Clause smaller;
      for (int v : d) smaller.push_back({v, pre_of[v] == 1});
      auto m2 = run({smaller}, start);
      if (!m2) break;
      m = m2;
      d = changed(*m);
    }
    out.push_back(*m);
    PropSolver::Clause block;  // not a superset of d
    for (int v : d) block.push_back({v, pre_of[v] == 1});
    if (block.empty()) break;
    blocking.push_back(std::move(block));
  }
  return out;
}

}  // namespace detail

/// Every (t, mu) with at most max_nodes nodes, mu over `vars`, t |= phi under mu, and no strictly
/// change-smaller model keeping mu's image; one per isomorphism class. Fact families outside
/// `proj` are fixed (see Projection); presence is always enumerated as the theory mentions it.
inline MinimalModelsResult minimal_models(const FormulaPtr& phi, const std::shared_ptr<const Signature>& sig,
                                          const std::vector<std::string>& vars, int max_nodes, Projection proj,
                                          const Budget& budget = {}, const MinimalModelVisitor& visit = {}) {
  for (const auto& v : free_variables(*phi))
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw UsageError("minimal_models: free variable '" + v + "' missing from the template");
  proj.present = true;
  MinimalModelsResult res;
  auto shapes = tree_shapes(*sig);
  std::vector<int> label_ids, name_ids;
  for (size_t l = 0; l < proj.labels.size(); ++l)
    if (proj.labels[l]) label_ids.push_back(static_cast<int>(l));
  for (size_t k = 0; k < proj.names.size(); ++k)
    if (proj.names[k]) name_ids.push_back(static_cast<int>(k));
  const int bits_per_node = 1 + static_cast<int>(label_ids.size() + name_ids.size());

  // Decorated tree types: a shape plus precondition facts and names per node.
  struct Decorated {
    int shape;
    std::uint64_t bits;
  };
  std::vector<Decorated> types;
  for (int s = 0; s < static_cast<int>(shapes.size()); ++s) {
    const int b = bits_per_node * shapes[s].size();
    if (shapes[s].size() > max_nodes) continue;
    if (b > 20) throw BudgetExceeded("minimal_models: tree decoration space too large");
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << b); ++bits) types.push_back({s, bits});
  }

  std::set<std::string> seen_pre, seen_out;
  std::vector<int> multiset;
  Evaluator check(phi, budget);

  auto process_pre_world = [&](const Transition& pre_world) {
    if (res.stopped) return;
    const int n = pre_world.size();
    // Trees carrying a precondition fact can never be dropped by a smaller model.
    NodeSet pre_facts = pre_world.pre_present;
    for (auto l : pre_world.pre_labels) pre_facts |= l;
    for (auto p : pre_world.pre_links.pairs()) pre_facts.set(p.a), pre_facts.set(p.b);
    auto trees = decompose(pre_world);
    FactSpace facts(n, static_cast<int>(sig->labels.size()), static_cast<int>(sig->names.size()));
    std::vector<int8_t> fixed = facts.values_of(pre_world);  // post copies pre initially
    std::vector<int8_t> pre_of(facts.count(), 0);
    std::vector<int> post_vars;
    for (int x = 0; x < n; ++x) {
      int v = facts.present(true, x);
      pre_of[v] = pre_world.pre_present.has(x);
      fixed[v] = -1, post_vars.push_back(v);
      for (int l : label_ids) {
        int u = facts.label(true, l, x);
        pre_of[u] = pre_world.pre_labels[l].has(x);
        fixed[u] = -1, post_vars.push_back(u);
      }
      if (proj.links)
        for (int y = x; y < n; ++y) {
          int u = facts.link(true, x, y);
          pre_of[u] = pre_world.pre_links.has(x, y);
          fixed[u] = -1, post_vars.push_back(u);
        }
    }
    std::vector<int> idx(vars.size(), 0);
    while (true) {
      Assignment mu;
      for (size_t i = 0; i < vars.size(); ++i) mu[vars[i]] = idx[i];
      if (seen_pre.insert(canonical_key(pre_world, mu)).second) {
        ++res.pre_worlds;
        GroundFormula g;
        Grounder gr(pre_world, facts, g, fixed);
        int root = gr.ground(phi, mu);
        for (const auto& m : detail::minimal_post_assignments(g, root, facts.count(), fixed, post_vars, pre_of,
                                                              budget.max_candidates)) {
          Transition t = pre_world;
          facts.apply(m, t);
          if (!is_valid_flb(t)) continue;
          if (!check(t, mu)) throw std::logic_error("minimal_models: ground model fails evaluation");
          ++res.candidates;
          // Same-domain minimality holds by construction; only dropping whole trees is left to check.
          bool droppable = false;
          for (int i = 0; i < trees.count(); ++i)
            if (!trees.vertices(i).intersects(pre_facts | kernel_of(mu, {vars.begin(), vars.end()}))) droppable = true;
          if (droppable && !is_minimal(t, mu, phi, budget)) continue;
          Assignment cmu = mu;
          Transition ct = canonical_transition(t, &cmu);
          if (!seen_out.insert(canonical_key(ct, cmu)).second) continue;
          res.models.push_back({ct, cmu});
          if (visit && !visit(res.models.back())) {
            res.stopped = true;
            return;
          }
        }
      }
      size_t pos = 0;
      while (pos < vars.size() && ++idx[pos] == n) idx[pos++] = 0;
      if (pos == vars.size()) break;
    }
  };

  std::function<void(int, int)> rec = [&](int from, int nodes) {
    if (!multiset.empty()) {
      std::vector<int> forest;
      for (int ti : multiset) forest.push_back(types[ti].shape);
      Transition base = build_forest(sig, shapes, forest);
      int offset = 0;
      for (int ti : multiset) {
        const auto& d = types[ti];
        int at = 0;
        for (int i = 0; i < shapes[d.shape].size(); ++i) {
          int x = offset + i;
          auto bit = [&] { return (d.bits >> at++) & 1U; };
          bool p = bit();
          base.pre_present.set(x, p);
          for (int l : label_ids) base.pre_labels[l].set(x, bit());
          for (int k : name_ids) base.names[k].set(x, bit());
        }
        offset += shapes[d.shape].size();
      }
      // Unenumerated post facts stay equal to the precondition.
      base.post_present = base.pre_present;
      base.post_labels = base.pre_labels;
      if (proj.links) {
        detail::for_each_matching(base.size(), [&](const LinkRelation& rel) {
          Transition w = base;
          w.pre_links = rel;
          w.post_links = rel;
          process_pre_world(w);
        });
      } else {
        process_pre_world(base);
      }
    }
    for (int ti = from; ti < static_cast<int>(types.size()) && !res.stopped; ++ti) {
      int sz = shapes[types[ti].shape].size();
      if (nodes + sz > max_nodes) continue;
      multiset.push_back(ti);
      rec(ti, nodes + sz);
      multiset.pop_back();
    }
  };
  rec(0, 0);
  return res;
}

inline MinimalModelsResult minimal_models(const FormulaPtr& phi, const std::shared_ptr<const Signature>& sig,
                                          const std::vector<std::string>& vars, int max_nodes) {
  return minimal_models(phi, sig, vars, max_nodes, Projection::full(*sig));
}

}  // namespace flb
