#pragma once

#include <optional>
#include <vector>

#include "flb/error.hpp"
#include "flb/semantics.hpp"
#include "flb/transition.hpp"

namespace flb {

namespace detail {

/// Connected components of the undirected child-edge graph (whole trees on FLBs).
inline std::vector<NodeSet> child_components(const Transition& t) {
  std::vector<int> comp(t.size(), -1);
  std::vector<NodeSet> out;
  for (int s = 0; s < t.size(); ++s) {
    if (comp[s] >= 0) continue;
    NodeSet c;
    std::vector<int> stack{s};
    comp[s] = static_cast<int>(out.size());
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      c.set(x);
      auto visit = [&](int y) {
        if (comp[y] < 0) comp[y] = comp[s], stack.push_back(y);
      };
      for (const auto& f : t.child) {
        if (f[x] != x) visit(f[x]);
        for (int y = 0; y < t.size(); ++y)
          if (y != x && f[y] == x) visit(y);
      }
    }
    out.push_back(c);
  }
  return out;
}

/// One removable change: a tree to drop, a unary delta bit, or a link delta pair.
struct ChangeItem {
  enum Type { Tree, Present, Label, Link } type;
  int a = 0, b = 0;   // nodes (Tree: component index)
  int label = 0;
  NodeSet touches;    // nodes that must be kept for this delta
};

}  // namespace detail

/// Searches all strictly change-smaller transitions b of t (fewer fact-free trees and/or a subset
/// of the deltas, post rebuilt as pre xor delta) keeping the image of mu, in ascending size, and
/// returns the first one satisfying phi. Throws BudgetExceeded past budget.max_candidates.
inline std::optional<Transition> find_smaller_model(const Transition& t, const Assignment& mu, const FormulaPtr& phi,
                                             const Budget& budget) {
  using detail::ChangeItem;
  NodeSet pinned;
  for (const auto& [v, x] : mu) pinned.set(x);
  NodeSet pre_facts = t.pre_present;
  for (auto s : t.pre_labels) pre_facts |= s;
  for (auto p : t.pre_links.pairs()) pre_facts.set(p.a), pre_facts.set(p.b);

  auto comps = detail::child_components(t);
  std::vector<ChangeItem> items;
  std::vector<int> tree_item(comps.size(), -1);
  for (size_t c = 0; c < comps.size(); ++c)
    if (!comps[c].intersects(pre_facts) && !comps[c].intersects(pinned)) {
      tree_item[c] = static_cast<int>(items.size());
      items.push_back({ChangeItem::Tree, static_cast<int>(c), 0, 0, {}});
    }
  (t.pre_present ^ t.post_present).for_each([&](int x) {
    items.push_back({ChangeItem::Present, x, x, 0, NodeSet::single(x)});
  });
  for (size_t l = 0; l < t.pre_labels.size(); ++l)
    (t.pre_labels[l] ^ t.post_labels[l]).for_each([&](int x) {
      items.push_back({ChangeItem::Label, x, x, static_cast<int>(l), NodeSet::single(x)});
    });
  for (auto p : t.post_links.pairs())
    if (!t.pre_links.has(p.a, p.b)) items.push_back({ChangeItem::Link, p.a, p.b, 0, NodeSet::single(p.a) | NodeSet::single(p.b)});
  for (auto p : t.pre_links.pairs())
    if (!t.post_links.has(p.a, p.b)) items.push_back({ChangeItem::Link, p.a, p.b, 0, NodeSet::single(p.a) | NodeSet::single(p.b)});

  const int m = static_cast<int>(items.size());
  if (m == 0) return std::nullopt;
  if (m > 62) throw BudgetExceeded("minimize: too many changes to search (" + std::to_string(m) + ")");

  // Nodes of removable trees; everything else is always kept.
  NodeSet optional_nodes;
  for (size_t c = 0; c < comps.size(); ++c)
    if (tree_item[c] >= 0) optional_nodes |= comps[c];

  Evaluator check(phi, budget);
  long seen = 0;
  auto try_mask = [&](uint64_t mask) -> std::optional<Transition> {
    NodeSet keep = t.all().minus(optional_nodes);
    for (size_t c = 0; c < comps.size(); ++c)
      if (tree_item[c] >= 0 && (mask >> tree_item[c] & 1)) keep |= comps[c];
    Transition b = t;
    b.post_present = t.pre_present;
    b.post_labels = t.pre_labels;
    b.post_links = t.pre_links;
    for (int i = 0; i < m; ++i) {
      const auto& it = items[i];
      if (it.type == ChangeItem::Tree || !(mask >> i & 1)) continue;
      if (!it.touches.subset_of(keep)) return std::nullopt;  // delta on a dropped tree
      switch (it.type) {
        case ChangeItem::Present: b.post_present.set(it.a, !b.post_present.has(it.a)); break;
        case ChangeItem::Label: b.post_labels[it.label].set(it.a, !b.post_labels[it.label].has(it.a)); break;
        case ChangeItem::Link: b.post_links.set(it.a, it.b, !b.post_links.has(it.a, it.b)); break;
        default: break;
      }
    }
    if (++seen > budget.max_candidates) throw BudgetExceeded("minimize: candidate budget exhausted");
    Assignment mu_b;
    if (keep != t.all()) {
      std::vector<int> new_index(t.size(), -1);
      int k = 0;
      keep.for_each([&](int x) { new_index[x] = k++; });
      for (const auto& [v, x] : mu) mu_b[v] = new_index[x];
      b = restrict_to(b, keep);
    } else {
      mu_b = mu;
    }
    if (check(b, mu_b)) return b;
    return std::nullopt;
  };

  // Ascending number of kept items, so the first witness is change-minimal among witnesses.
  for (int k = 0; k < m; ++k) {
    if (k == 0) {
      if (auto r = try_mask(0)) return r;
      continue;
    }
    uint64_t mask = (uint64_t{1} << k) - 1;
    const uint64_t limit = uint64_t{1} << m;
    while (mask < limit) {
      if (auto r = try_mask(mask)) return r;
      uint64_t c = mask & -mask, r = mask + c;  // Gosper's hack
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  return std::nullopt;
}

}  // namespace flb
