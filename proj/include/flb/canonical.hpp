#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "flb/semantics.hpp"
#include "flb/transition.hpp"

namespace flb {

/// Canonical node order of a transition (with an optional assignment) and the resulting key:
/// two (transition, assignment) pairs are isomorphic iff their keys are equal.
struct CanonicalForm {
  std::vector<int> order;  // canonical position -> original node
  std::string key;
};

namespace detail {

/// Facts of one node, independent of the numbering.
inline std::string node_token(const Transition& t, int x, const std::map<int, std::string>& marks) {
  std::string s;
  s += t.pre_present.has(x) ? '1' : '0';
  s += t.post_present.has(x) ? '1' : '0';
  for (size_t l = 0; l < t.pre_labels.size(); ++l) {
    s += t.pre_labels[l].has(x) ? '1' : '0';
    s += t.post_labels[l].has(x) ? '1' : '0';
  }
  for (const auto& n : t.names) s += n.has(x) ? '1' : '0';
  if (auto it = marks.find(x); it != marks.end()) s += "[" + it->second + "]";
  return s;
}

/// Preorder of one tree, children visited by function slot.
inline void preorder(const Transition& t, int x, std::vector<int>& out) {
  out.push_back(x);
  for (const auto& f : t.child)
    if (f[x] != x) preorder(t, f[x], out);
}

inline std::string tree_encoding(const Transition& t, int x, const std::map<int, std::string>& marks) {
  std::string s = "(" + node_token(t, x, marks);
  for (const auto& f : t.child) s += f[x] != x ? tree_encoding(t, f[x], marks) : std::string(".");
  return s + ")";
}

}  // namespace detail

inline CanonicalForm canonical_form(const Transition& t, const Assignment& mu = {}) {
  auto trees = decompose(t);
  const int k = trees.count();
  std::map<int, std::string> marks;
  for (const auto& [v, x] : mu) marks[x] += v + ";";

  std::vector<std::vector<int>> nodes(k);
  std::vector<int> local(t.size());
  for (int i = 0; i < k; ++i) {
    detail::preorder(t, trees.trees[i].root, nodes[i]);
    for (size_t j = 0; j < nodes[i].size(); ++j) local[nodes[i][j]] = static_cast<int>(j);
  }

  // Colour refinement of trees by their own encoding and their link partners' colours.
  std::vector<std::string> base(k);
  for (int i = 0; i < k; ++i) base[i] = detail::tree_encoding(t, trees.trees[i].root, marks);
  std::vector<int> color(k);
  auto recolor = [&](const std::vector<std::string>& sig) {
    std::vector<std::string> sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin());
    return c;
  };
  color = recolor(base);
  for (int round = 0; round < k; ++round) {
    std::vector<std::string> sig(k);
    for (int i = 0; i < k; ++i) {
      std::vector<std::string> parts;
      for (int x : nodes[i])
        for (bool post : {false, true})
          t.links(post).partners(x).for_each([&](int y) {
            parts.push_back(std::to_string(post) + ":" + std::to_string(local[x]) + ">" +
                            std::to_string(color[trees.tree_of[y]]) + "." + std::to_string(local[y]) +
                            (trees.tree_of[y] == i ? "s" : ""));
          });
      std::sort(parts.begin(), parts.end());
      sig[i] = std::to_string(color[i]) + "|";
      for (const auto& p : parts) sig[i] += p + ",";
    }
    auto next = recolor(sig);
    bool same = next == color;
    color = next;
    if (same) break;
  }

  // Trees sorted by colour; equal colours are tied and resolved by trying every order.
  std::vector<int> tree_order(k);
  for (int i = 0; i < k; ++i) tree_order[i] = i;
  std::sort(tree_order.begin(), tree_order.end(), [&](int a, int b) { return color[a] < color[b]; });

  std::string prefix;
  for (int i : tree_order) prefix += base[i] + "#";

  auto links_key = [&](const std::vector<int>& order) {
    std::vector<int> pos(t.size());
    std::vector<int> flat;
    for (int i : order)
      for (int x : nodes[i]) pos[x] = static_cast<int>(flat.size()), flat.push_back(x);
    std::string s;
    for (bool post : {false, true}) {
      std::vector<std::pair<int, int>> pairs;
      for (auto p : t.links(post).pairs()) pairs.push_back(std::minmax(pos[p.a], pos[p.b]));
      std::sort(pairs.begin(), pairs.end());
      s += post ? "|post:" : "|pre:";
      for (auto [a, b] : pairs) s += std::to_string(a) + "-" + std::to_string(b) + ",";
    }
    s += "|mu:";
    for (const auto& [v, x] : mu) s += v + "=" + std::to_string(pos[x]) + ",";
    return std::pair{s, flat};
  };

  std::vector<std::pair<int, int>> groups;  // [begin, end) of equal colours
  for (int i = 0; i < k;) {
    int j = i;
    while (j < k && color[tree_order[j]] == color[tree_order[i]]) ++j;
    if (j - i > 1) groups.push_back({i, j});
    i = j;
  }

  std::string best;
  std::vector<int> best_flat;
  bool have = false;
  auto search = [&](auto&& self, size_t g) -> void {
    if (g == groups.size()) {
      auto [s, flat] = links_key(tree_order);
      if (!have || s < best) best = s, best_flat = flat, have = true;
      return;
    }
    auto [b, e] = groups[g];
    std::sort(tree_order.begin() + b, tree_order.begin() + e);
    do {
      self(self, g + 1);
    } while (std::next_permutation(tree_order.begin() + b, tree_order.begin() + e));
  };
  search(search, 0);
  return CanonicalForm{best_flat, prefix + best};
}

inline std::string canonical_key(const Transition& t, const Assignment& mu = {}) { return canonical_form(t, mu).key; }

inline bool isomorphic(const Transition& a, const Assignment& mua, const Transition& b, const Assignment& mub) {
  return a.size() == b.size() && canonical_key(a, mua) == canonical_key(b, mub);
}

/// Reorders the nodes of t canonically (names kept); remaps mu alongside when given.
inline Transition canonical_transition(const Transition& t, Assignment* mu = nullptr) {
  auto cf = canonical_form(t, mu ? *mu : Assignment{});
  Transition r(t.sig, [&] {
    std::vector<std::string> names;
    for (int x : cf.order) names.push_back(t.node_names[x]);
    return names;
  }());
  std::vector<int> pos(t.size());
  for (size_t i = 0; i < cf.order.size(); ++i) pos[cf.order[i]] = static_cast<int>(i);
  auto map_set = [&](NodeSet s) {
    NodeSet o;
    s.for_each([&](int x) { o.set(pos[x]); });
    return o;
  };
  for (size_t f = 0; f < t.child.size(); ++f)
    for (int x = 0; x < t.size(); ++x) r.child[f][pos[x]] = pos[t.child[f][x]];
  r.pre_present = map_set(t.pre_present);
  r.post_present = map_set(t.post_present);
  for (size_t l = 0; l < t.pre_labels.size(); ++l) {
    r.pre_labels[l] = map_set(t.pre_labels[l]);
    r.post_labels[l] = map_set(t.post_labels[l]);
  }
  for (size_t n = 0; n < t.names.size(); ++n) r.names[n] = map_set(t.names[n]);
  for (bool post : {false, true})
    for (auto p : t.links(post).pairs()) (post ? r.post_links : r.pre_links).set(pos[p.a], pos[p.b]);
  if (mu)
    for (auto& [v, x] : *mu) x = pos[x];
  return r;
}

}  // namespace flb
