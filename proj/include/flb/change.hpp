#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "flb/error.hpp"
#include "flb/transition.hpp"

namespace flb {

/// Exact change sets of a transition: symmetric differences of every unary dynamic symbol,
/// and link additions/deletions as unordered pairs.
struct ChangeSets {
  NodeSet delta_present;
  std::vector<NodeSet> delta_labels;
  std::vector<LinkPair> plus_links;   // post \ pre
  std::vector<LinkPair> minus_links;  // pre \ post

  bool empty() const {
    return delta_present.empty() && plus_links.empty() && minus_links.empty() &&
           std::all_of(delta_labels.begin(), delta_labels.end(), [](NodeSet s) { return s.empty(); });
  }
  /// Nodes occurring in some unary delta.
  NodeSet unary_changed() const {
    NodeSet out = delta_present;
    for (auto s : delta_labels) out |= s;
    return out;
  }
  bool operator==(const ChangeSets&) const = default;
};

inline ChangeSets change_sets(const Transition& t) {
  ChangeSets c;
  c.delta_present = t.pre_present ^ t.post_present;
  for (size_t l = 0; l < t.pre_labels.size(); ++l) c.delta_labels.push_back(t.pre_labels[l] ^ t.post_labels[l]);
  for (auto p : t.post_links.pairs())
    if (!t.pre_links.has(p.a, p.b)) c.plus_links.push_back(p);
  for (auto p : t.pre_links.pairs())
    if (!t.post_links.has(p.a, p.b)) c.minus_links.push_back(p);
  return c;
}

/// Modified nodes: unary change, incident link addition, or incident deletion inside its own tree.
inline NodeSet modified_nodes(const Transition& t, const TreeDecomposition& trees) {
  ChangeSets c = change_sets(t);
  NodeSet out = c.unary_changed();
  for (auto p : c.plus_links) out.set(p.a), out.set(p.b);
  for (auto p : c.minus_links)
    if (trees.tree_of[p.a] == trees.tree_of[p.b]) out.set(p.a), out.set(p.b);
  return out;
}

inline NodeSet modified_nodes(const Transition& t) { return modified_nodes(t, decompose(t)); }

/// Modified nodes outside the given tree.
inline NodeSet modified_outside(const Transition& t, int tree) {
  auto trees = decompose(t);
  return modified_nodes(t, trees).minus(trees.vertices(tree));
}

/// Tree-level link distances from the trees meeting `kernel`; unreachable trees get INT_MAX.
inline std::vector<int> tree_distances(const Transition& t, const TreeDecomposition& trees, NodeSet kernel) {
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> dist(trees.count(), inf);
  std::vector<std::vector<int>> adj(trees.count());
  for (bool post : {false, true})
    for (auto p : t.links(post).pairs()) {
      int ta = trees.tree_of[p.a], tb = trees.tree_of[p.b];
      if (ta != tb) adj[ta].push_back(tb), adj[tb].push_back(ta);
    }
  std::deque<int> queue;
  kernel.for_each([&](int a) {
    int ta = trees.tree_of[a];
    if (dist[ta] != 0) dist[ta] = 0, queue.push_back(ta);
  });
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    for (int nb : adj[cur])
      if (dist[nb] == inf) dist[nb] = dist[cur] + 1, queue.push_back(nb);
  }
  return dist;
}

/// All nodes of all trees within link distance `radius` of a tree meeting `kernel`.
inline NodeSet ball(const Transition& t, const TreeDecomposition& trees, NodeSet kernel, int radius) {
  auto dist = tree_distances(t, trees, kernel);
  NodeSet out;
  for (int i = 0; i < trees.count(); ++i)
    if (dist[i] <= radius) out |= trees.vertices(i);
  return out;
}

inline NodeSet ball(const Transition& t, NodeSet kernel, int radius) { return ball(t, decompose(t), kernel, radius); }

namespace detail {

/// For each node of `small`, its index in `big` by name; nothing when some name is missing.
inline std::optional<std::vector<int>> embed_by_name(const Transition& small, const Transition& big) {
  std::vector<int> out(small.size());
  for (int i = 0; i < small.size(); ++i) {
    out[i] = big.index_of(small.node_names[i]);
    if (out[i] < 0) return std::nullopt;
  }
  return out;
}

inline NodeSet map_set(NodeSet s, const std::vector<int>& to) {
  NodeSet out;
  s.for_each([&](int i) { out.set(to[i]); });
  return out;
}

}  // namespace detail

/// b ⊴ a: b's domain inside a's, equal preconditions, statics of a restricted to b's domain,
/// and every change of b also a change of a. Nodes are identified by name.
inline bool change_leq(const Transition& b, const Transition& a) {
  if (!(*a.sig == *b.sig)) throw UsageError("change_leq: signature mismatch");
  auto emb = detail::embed_by_name(b, a);
  if (!emb) return false;
  const auto& to_a = *emb;
  const NodeSet dom_b = detail::map_set(b.all(), to_a);

  if (detail::map_set(b.pre_present, to_a) != a.pre_present) return false;
  for (size_t l = 0; l < a.pre_labels.size(); ++l)
    if (detail::map_set(b.pre_labels[l], to_a) != a.pre_labels[l]) return false;
  auto mapped_pairs = [&](const LinkRelation& r) {
    std::vector<LinkPair> out;
    for (auto p : r.pairs()) out.push_back(LinkPair::of(to_a[p.a], to_a[p.b]));
    std::sort(out.begin(), out.end());
    return out;
  };
  if (mapped_pairs(b.pre_links) != a.pre_links.pairs()) return false;

  for (size_t n = 0; n < a.names.size(); ++n)
    if (detail::map_set(b.names[n], to_a) != (a.names[n] & dom_b)) return false;
  auto par_a = a.parents();
  auto par_b = b.parents();
  for (int x = 0; x < b.size(); ++x) {
    for (size_t f = 0; f < a.child.size(); ++f)
      if (a.child[f][to_a[x]] != to_a[b.child[f][x]]) return false;
    if (par_a[to_a[x]] != to_a[par_b[x]]) return false;
  }

  if (!detail::map_set(b.pre_present ^ b.post_present, to_a).subset_of(a.pre_present ^ a.post_present)) return false;
  for (size_t l = 0; l < a.pre_labels.size(); ++l)
    if (!detail::map_set(b.pre_labels[l] ^ b.post_labels[l], to_a).subset_of(a.pre_labels[l] ^ a.post_labels[l]))
      return false;
  for (int x = 0; x < b.size(); ++x)
    for (int y = x; y < b.size(); ++y)
      if (b.pre_links.has(x, y) != b.post_links.has(x, y) &&
          a.pre_links.has(to_a[x], to_a[y]) == a.post_links.has(to_a[x], to_a[y]))
        return false;
  return true;
}

/// b ⊲ a: change_leq(b, a) and not change_leq(a, b).
inline bool change_less(const Transition& b, const Transition& a) { return change_leq(b, a) && !change_leq(a, b); }

/// Parameters of one (K,d)-sub.
struct SubSpec {
  NodeSet kernel;
  int radius = 0;
  int cleared_tree = 0;
  bool prune = false;
};

/// Rebuilds the postcondition of `a` from its precondition and the given changes.
inline Transition with_changes(const Transition& a, NodeSet delta_present, const std::vector<NodeSet>& delta_labels,
                               const std::vector<LinkPair>& plus, const std::vector<LinkPair>& minus) {
  Transition b = a;
  b.post_present = a.pre_present ^ delta_present;
  for (size_t l = 0; l < a.pre_labels.size(); ++l) b.post_labels[l] = a.pre_labels[l] ^ delta_labels[l];
  b.post_links = a.pre_links;
  for (auto p : minus) b.post_links.set(p, false);
  for (auto p : plus) b.post_links.set(p, true);
  return b;
}

/// The (K,d)-sub of `a` clearing `spec.cleared_tree`, optionally dropping nodes of that tree
/// that no longer carry any fact.
inline Transition make_sub(const Transition& a, const SubSpec& spec) {
  auto trees = decompose(a);
  if (spec.cleared_tree < 0 || spec.cleared_tree >= trees.count()) throw UsageError("make_sub: no such tree");
  const NodeSet vt = trees.vertices(spec.cleared_tree);
  const NodeSet protected_ball = ball(a, trees, spec.kernel, spec.radius);
  if (vt.intersects(protected_ball)) throw UsageError("make_sub: cleared tree intersects the protected ball");
  const NodeSet outside = modified_nodes(a, trees).minus(vt);
  const NodeSet keep_deletions = outside | protected_ball;

  ChangeSets c = change_sets(a);
  NodeSet dp = c.delta_present.minus(vt);
  std::vector<NodeSet> dl;
  for (auto s : c.delta_labels) dl.push_back(s.minus(vt));
  std::vector<LinkPair> plus, minus;
  for (auto p : c.plus_links)
    if (!p.touches(vt)) plus.push_back(p);
  for (auto p : c.minus_links)
    if (!p.touches(vt) || p.touches(keep_deletions)) minus.push_back(p);
  Transition b = with_changes(a, dp, dl, plus, minus);
  if (!spec.prune) return b;

  NodeSet removable;
  NodeSet pre_labelled;
  for (auto s : b.pre_labels) pre_labelled |= s;
  vt.for_each([&](int x) {
    if (b.pre_present.has(x) || b.post_present.has(x) || pre_labelled.has(x)) return;
    if (!b.pre_links.partners(x).empty() || !b.post_links.partners(x).empty()) return;
    removable.set(x);
  });
  // Keep closure under child edges: a removed node may not be adjacent to a kept one.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& f : b.child)
      for (int x = 0; x < b.size(); ++x) {
        int y = f[x];
        if (y == x) continue;
        if (removable.has(x) != removable.has(y)) {
          removable.set(x, false);
          removable.set(y, false);
          changed = true;
        }
      }
  }
  if (removable.empty()) return b;
  return restrict_to(b, b.all().minus(removable));
}

/// All (K,d)-subs over every eligible cleared tree and both prune variants, without duplicates.
inline std::vector<Transition> enumerate_subs(const Transition& a, NodeSet kernel, int radius) {
  auto trees = decompose(a);
  const NodeSet protected_ball = ball(a, trees, kernel, radius);
  std::vector<Transition> out;
  for (int t = 0; t < trees.count(); ++t) {
    if (trees.vertices(t).intersects(protected_ball)) continue;
    for (bool prune : {false, true}) {
      Transition b = make_sub(a, SubSpec{kernel, radius, t, prune});
      if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(std::move(b));
    }
  }
  return out;
}

}  // namespace flb
