#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "flb/canonical.hpp"
#include "flb/error.hpp"
#include "flb/semantics.hpp"
#include "flb/transition.hpp"

namespace flb {

/// A rooted tree shape in preorder: node i > 0 hangs below parent[i] via function fn[i].
struct TreeShape {
  std::vector<int> parent{-1};
  std::vector<int> fn{-1};
  int size() const { return static_cast<int>(parent.size()); }
};

/// All parent-closed subtrees of the full template tree (height n, branching |f|) containing the root.
inline std::vector<TreeShape> tree_shapes(const Signature& sig) {
  const int k = static_cast<int>(sig.children.size());
  // Subtrees below a node at depth d: list of (child slot choices) built recursively.
  std::function<std::vector<TreeShape>(int)> below = [&](int depth) {
    std::vector<TreeShape> out{TreeShape{}};
    if (depth >= sig.height) return out;
    auto sub = below(depth + 1);
    for (int f = 0; f < k; ++f) {
      std::vector<TreeShape> next;
      for (const auto& base : out) {
        next.push_back(base);  // no f-child
        for (const auto& s : sub) {
          TreeShape t = base;
          const int offset = t.size();
          for (int i = 0; i < s.size(); ++i) {
            t.parent.push_back(i == 0 ? 0 : s.parent[i] + offset);
            t.fn.push_back(i == 0 ? f : s.fn[i]);
          }
          next.push_back(std::move(t));
        }
      }
      out = std::move(next);
    }
    return out;
  };
  return below(0);
}

/// Node count of the full template tree: Σ_{i=0..n} |f|^i.
inline long template_size(const Signature& sig) {
  long total = 0, level = 1;
  for (int i = 0; i <= sig.height; ++i) total += level, level *= static_cast<long>(sig.children.size());
  return total;
}

/// Multisets of tree shapes (non-decreasing shape indices) with at most `max_trees` trees and
/// between 1 and `max_nodes` nodes in total.
inline std::vector<std::vector<int>> forest_shapes(const std::vector<TreeShape>& shapes, int max_nodes, int max_trees) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int from, int nodes) {
    if (!cur.empty()) out.push_back(cur);
    if (static_cast<int>(cur.size()) == max_trees) return;
    for (int s = from; s < static_cast<int>(shapes.size()); ++s)
      if (nodes + shapes[s].size() <= max_nodes) {
        cur.push_back(s);
        rec(s, nodes + shapes[s].size());
        cur.pop_back();
      }
  };
  rec(0, 0);
  return out;
}

/// A transition with the given forest shape and no facts; nodes are named n0, n1, ...
inline Transition build_forest(const std::shared_ptr<const Signature>& sig, const std::vector<TreeShape>& shapes,
                               const std::vector<int>& forest) {
  int total = 0;
  for (int s : forest) total += shapes[s].size();
  std::vector<std::string> names;
  for (int i = 0; i < total; ++i) names.push_back("n" + std::to_string(i));
  Transition t(sig, names);
  int base = 0;
  for (int s : forest) {
    const auto& sh = shapes[s];
    for (int i = 1; i < sh.size(); ++i) t.child[sh.fn[i]][base + sh.parent[i]] = base + i;
    base += sh.size();
  }
  return t;
}

/// Which fact families are enumerated; the others get fixed defaults (P and P* true,
/// labels and names false, links empty), which is exact for formulas not mentioning them.
struct Projection {
  bool present = true;
  std::vector<bool> labels;  // per label, pre and post together
  std::vector<bool> names;
  bool links = true;

  static Projection full(const Signature& sig) {
    return {true, std::vector<bool>(sig.labels.size(), true), std::vector<bool>(sig.names.size(), true), true};
  }
  /// Exactly the families a formula mentions (a dynamic symbol brings its starred twin).
  static Projection of(const Formula& f, const Signature& sig) {
    Projection p{false, std::vector<bool>(sig.labels.size(), false), std::vector<bool>(sig.names.size(), false), false};
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
      if (g.kind == Kind::Unary) {
        if (g.sym.kind == SymKind::Present) p.present = true;
        if (g.sym.kind == SymKind::Label) p.labels[g.sym.index] = true;
        if (g.sym.kind == SymKind::Name) p.names[g.sym.index] = true;
      }
      if (g.kind == Kind::Link) p.links = true;
      for (const auto& k : g.kids) walk(*k);
    };
    walk(f);
    return p;
  }
};

namespace detail {

/// Calls f(rel) for every partial matching (self pairs allowed) on n nodes.
template <class F>
void for_each_matching(int n, F&& f) {
  LinkRelation rel(n);
  std::function<void(int)> rec = [&](int x) {
    while (x < n && !rel.partners(x).empty()) ++x;
    if (x == n) {
      f(rel);
      return;
    }
    rec(x + 1);  // x unmatched
    for (int y = x; y < n; ++y)
      if (rel.partners(y).empty()) {
        rel.set(x, y);
        rec(x + 1);
        rel.set(x, y, false);
      }
  };
  rec(0);
}

}  // namespace detail

/// Calls `visit` on every valid supported FLB with 1..max_nodes nodes over the projected fact
/// families (labelled, i.e. not reduced up to isomorphism). `visit` returns false to stop.
/// Returns false when stopped early.
inline bool for_each_structure(const std::shared_ptr<const Signature>& sig, int max_nodes, const Projection& proj,
                               const std::function<bool(const Transition&)>& visit, int max_trees = 64) {
  if (max_nodes > NodeSet::kCapacity) throw UsageError("enumeration is limited to 64 nodes");
  auto shapes = tree_shapes(*sig);
  // Per-node unary bits: [P, P*] then [L, L*] per projected label, then projected names.
  std::vector<int> label_ids, name_ids;
  for (size_t l = 0; l < proj.labels.size(); ++l)
    if (proj.labels[l]) label_ids.push_back(static_cast<int>(l));
  for (size_t k = 0; k < proj.names.size(); ++k)
    if (proj.names[k]) name_ids.push_back(static_cast<int>(k));
  const int per_node = (proj.present ? 2 : 0) + 2 * static_cast<int>(label_ids.size()) + static_cast<int>(name_ids.size());
  auto forests = forest_shapes(shapes, max_nodes, max_trees);
  for (const auto& forest : forests) {
    int n = 0;
    for (int s : forest) n += shapes[s].size();
    if (static_cast<long>(per_node) * n > 62) throw BudgetExceeded("enumeration space too large");
  }
  for (const auto& forest : forests) {
    Transition base = build_forest(sig, shapes, forest);
    const int n = base.size();
    if (!proj.present) base.pre_present = base.post_present = base.all();
    const std::uint64_t combos = std::uint64_t{1} << (per_node * n);
    for (std::uint64_t bits = 0; bits < combos; ++bits) {
      Transition t = base;
      int at = 0;
      auto next = [&] { return (bits >> at++) & 1U; };
      for (int x = 0; x < n; ++x) {
        if (proj.present) {
          t.pre_present.set(x, next());
          t.post_present.set(x, next());
        }
        for (int l : label_ids) {
          t.pre_labels[l].set(x, next());
          t.post_labels[l].set(x, next());
        }
        for (int k : name_ids) t.names[k].set(x, next());
      }
      if (!is_supported(t)) continue;
      if (!proj.links) {
        if (!visit(t)) return false;
        continue;
      }
      bool go = true;
      detail::for_each_matching(n, [&](const LinkRelation& pre) {
        if (!go) return;
        detail::for_each_matching(n, [&](const LinkRelation& post) {
          if (!go) return;
          Transition u = t;
          u.pre_links = pre;
          u.post_links = post;
          go = visit(u);
        });
      });
      if (!go) return false;
    }
  }
  return true;
}

/// Every valid supported FLB with at most max_nodes nodes satisfying the closed formula phi,
/// one representative per isomorphism class, in canonical node order.
inline std::vector<Transition> enumerate_models(const std::shared_ptr<const Signature>& sig, int max_nodes,
                                                const FormulaPtr& phi, const Projection& proj, long max_results = 1L << 20) {
  if (!free_variables(*phi).empty()) throw UsageError("enumerate_models needs a closed formula");
  std::vector<Transition> out;
  std::set<std::string> seen;
  Evaluator ev(phi);
  if (max_nodes <= 0) return out;
  for_each_structure(sig, max_nodes, proj, [&](const Transition& t) {
    if (!ev(t, {})) return true;
    auto key = canonical_key(t);
    if (!seen.insert(key).second) return true;
    out.push_back(canonical_transition(t));
    if (static_cast<long>(out.size()) > max_results) throw BudgetExceeded("enumerate_models: result budget exhausted");
    return true;
  });
  return out;
}

inline std::vector<Transition> enumerate_models(const std::shared_ptr<const Signature>& sig, int max_nodes,
                                                const FormulaPtr& phi) {
  return enumerate_models(sig, max_nodes, phi, Projection::full(*sig));
}

/// Whether some valid supported FLB with at most max_nodes nodes (and max_trees trees) satisfies
/// the closed formula phi; the labelled brute-force oracle for the solver.
inline bool exists_model(const std::shared_ptr<const Signature>& sig, int max_nodes, const FormulaPtr& phi,
                         const Projection& proj, int max_trees = 64) {
  Evaluator ev(phi);
  return !for_each_structure(sig, max_nodes, proj, [&](const Transition& t) { return !ev(t, {}); }, max_trees);
}

}  // namespace flb
