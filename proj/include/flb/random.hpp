#pragma once

#include <algorithm>
#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "flb/transition.hpp"

namespace flb {

using Rng = std::mt19937_64;

/// Sampling knobs for random transitions.
struct RandomOptions {
  int min_trees = 1;
  int max_trees = 4;
  double child_probability = 0.5;  // per (node, function) below the height bound
  double presence_probability = 0.7;
  double label_density = 0.5;      // labels and names alike
  double link_density = 0.5;       // chance an unmatched node starts a link
  double keep_link = 0.5;          // chance a pre link survives into the post
  double intra_tree_link = 0.15;   // chance a link partner is drawn from the own tree (self included)
  int max_nodes = 64;
};

namespace detail {

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Adds a random partial matching on the currently unmatched nodes of `rel`.
inline void add_matching(LinkRelation& rel, const std::vector<int>& tree_of, Rng& rng, const RandomOptions& o) {
  const int n = rel.size();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int u : order) {
    if (!rel.partners(u).empty() || !coin(rng, o.link_density)) continue;
    const bool intra = coin(rng, o.intra_tree_link);
    std::vector<int> cand;
    for (int v = 0; v < n; ++v)
      if (rel.partners(v).empty() && (tree_of[v] == tree_of[u]) == intra) cand.push_back(v);
    if (cand.empty()) continue;
    int v = cand[std::uniform_int_distribution<size_t>(0, cand.size() - 1)(rng)];
    rel.set(u, v);
  }
}

}  // namespace detail

/// A random valid FLB over `sig` (not necessarily supported).
inline Transition random_flb(const std::shared_ptr<const Signature>& sig, Rng& rng, const RandomOptions& o = {}) {
  const int trees = std::uniform_int_distribution<int>(o.min_trees, o.max_trees)(rng);
  std::vector<int> tree_of;
  struct Pending {
    int node, depth;
  };
  std::vector<std::tuple<int, int, int>> child_edges;  // f, parent, child
  int count = 0;
  for (int t = 0; t < trees && count < o.max_nodes; ++t) {
    std::vector<Pending> stack{{count, 0}};
    tree_of.push_back(t);
    ++count;
    while (!stack.empty()) {
      auto [x, d] = stack.back();
      stack.pop_back();
      if (d >= sig->height) continue;
      for (int f = 0; f < static_cast<int>(sig->children.size()); ++f)
        if (count < o.max_nodes && detail::coin(rng, o.child_probability)) {
          child_edges.emplace_back(f, x, count);
          tree_of.push_back(t);
          stack.push_back({count++, d + 1});
        }
    }
  }
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) names.push_back("n" + std::to_string(i));
  Transition r(sig, names);
  for (auto [f, p, c] : child_edges) r.child[f][p] = c;
  for (int x = 0; x < count; ++x) {
    r.pre_present.set(x, detail::coin(rng, o.presence_probability));
    r.post_present.set(x, detail::coin(rng, o.presence_probability));
    for (size_t l = 0; l < sig->labels.size(); ++l) {
      r.pre_labels[l].set(x, detail::coin(rng, o.label_density));
      r.post_labels[l].set(x, detail::coin(rng, o.label_density));
    }
    for (size_t n = 0; n < sig->names.size(); ++n) r.names[n].set(x, detail::coin(rng, o.label_density));
  }
  detail::add_matching(r.pre_links, tree_of, rng, o);
  for (auto p : r.pre_links.pairs())
    if (detail::coin(rng, o.keep_link)) r.post_links.set(p);
  detail::add_matching(r.post_links, tree_of, rng, o);
  return r;
}

/// A random valid FLB with every node present in the pre- or postcondition.
inline Transition random_supported_flb(const std::shared_ptr<const Signature>& sig, Rng& rng,
                                       const RandomOptions& o = {}) {
  Transition t = random_flb(sig, rng, o);
  t.all().minus(t.pre_present | t.post_present).for_each([&](int x) {
    (detail::coin(rng, 0.5) ? t.pre_present : t.post_present).set(x);
  });
  return t;
}

/// A random FLB followed by a few random structural corruptions (extra child edges, extra links),
/// so that a good share of the results violate forest-ness, height, or link functionality.
inline Transition random_structure(const std::shared_ptr<const Signature>& sig, Rng& rng, const RandomOptions& o = {}) {
  Transition t = random_flb(sig, rng, o);
  const int n = t.size();
  const int mutations = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int m = 0; m < mutations; ++m) {
    std::uniform_int_distribution<int> node(0, n - 1);
    const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    if (kind == 0 && !t.child.empty()) {
      int f = std::uniform_int_distribution<int>(0, static_cast<int>(t.child.size()) - 1)(rng);
      t.child[f][node(rng)] = node(rng);
    } else {
      (kind == 1 ? t.pre_links : t.post_links).set(node(rng), node(rng));
    }
  }
  return t;
}

}  // namespace flb
