#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "flb/error.hpp"
#include "flb/signature.hpp"

namespace flb {

/// Set of node indices of one transition (at most 64 nodes).
class NodeSet {
 public:
  static constexpr int kCapacity = 64;

  constexpr NodeSet() = default;
  constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}
  static NodeSet single(int i) { return NodeSet(std::uint64_t{1} << i); }
  static NodeSet first(int n) { return NodeSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1); }

  bool has(int i) const { return (bits_ >> i) & 1U; }
  void set(int i, bool on = true) {
    if (on)
      bits_ |= std::uint64_t{1} << i;
    else
      bits_ &= ~(std::uint64_t{1} << i);
  }
  bool empty() const { return bits_ == 0; }
  int count() const { return std::popcount(bits_); }
  std::uint64_t bits() const { return bits_; }
  bool subset_of(NodeSet o) const { return (bits_ & ~o.bits_) == 0; }
  bool intersects(NodeSet o) const { return (bits_ & o.bits_) != 0; }
  int lowest() const { return bits_ ? std::countr_zero(bits_) : -1; }

  NodeSet operator|(NodeSet o) const { return NodeSet(bits_ | o.bits_); }
  NodeSet operator&(NodeSet o) const { return NodeSet(bits_ & o.bits_); }
  NodeSet operator^(NodeSet o) const { return NodeSet(bits_ ^ o.bits_); }
  NodeSet minus(NodeSet o) const { return NodeSet(bits_ & ~o.bits_); }
  NodeSet& operator|=(NodeSet o) { return bits_ |= o.bits_, *this; }
  NodeSet& operator&=(NodeSet o) { return bits_ &= o.bits_, *this; }
  bool operator==(const NodeSet&) const = default;
  auto operator<=>(const NodeSet&) const = default;

  template <class F>
  void for_each(F&& f) const {
    for (std::uint64_t b = bits_; b; b &= b - 1) f(std::countr_zero(b));
  }
  std::vector<int> to_vector() const {
    std::vector<int> v;
    for_each([&](int i) { v.push_back(i); });
    return v;
  }

 private:
  std::uint64_t bits_ = 0;
};

/// Unordered node pair {a, b} with a <= b.
struct LinkPair {
  int a = 0, b = 0;
  static LinkPair of(int x, int y) { return x <= y ? LinkPair{x, y} : LinkPair{y, x}; }
  bool touches(NodeSet s) const { return s.has(a) || s.has(b); }
  bool operator==(const LinkPair&) const = default;
  auto operator<=>(const LinkPair&) const = default;
};

/// A symmetric link relation stored as adjacency sets; {a,a} is a self-link.
class LinkRelation {
 public:
  LinkRelation() = default;
  explicit LinkRelation(int n) : adj_(n) {}

  bool has(int a, int b) const { return adj_[a].has(b); }
  void set(int a, int b, bool on = true) {
    adj_[a].set(b, on);
    adj_[b].set(a, on);
  }
  void set(LinkPair p, bool on = true) { set(p.a, p.b, on); }
  NodeSet partners(int a) const { return adj_[a]; }
  int size() const { return static_cast<int>(adj_.size()); }

  std::vector<LinkPair> pairs() const {
    std::vector<LinkPair> out;
    for (int a = 0; a < size(); ++a)
      adj_[a].for_each([&](int b) {
        if (b >= a) out.push_back({a, b});
      });
    return out;
  }
  bool empty() const {
    for (auto s : adj_)
      if (!s.empty()) return false;
    return true;
  }
  /// Nodes occurring in more than one pair.
  NodeSet non_functional() const {
    NodeSet out;
    for (int a = 0; a < size(); ++a)
      if (adj_[a].count() > 1) out.set(a);
    return out;
  }
  bool operator==(const LinkRelation&) const = default;

 private:
  std::vector<NodeSet> adj_;
};

/// An explicit finite transition over an FLB signature. Child functions are stored as
/// total maps where child[f][x] == x means "x has no f-child". parent is always derived.
struct Transition {
  std::shared_ptr<const Signature> sig;
  std::vector<std::string> node_names;
  std::vector<std::vector<int>> child;  // [function][node]
  NodeSet pre_present, post_present;
  std::vector<NodeSet> pre_labels, post_labels;  // [label]
  std::vector<NodeSet> names;                    // [name]
  LinkRelation pre_links, post_links;

  Transition() = default;
  Transition(std::shared_ptr<const Signature> s, std::vector<std::string> nodes) : sig(std::move(s)) {
    if (nodes.size() > static_cast<size_t>(NodeSet::kCapacity))
      throw UsageError("transitions are limited to 64 nodes");
    node_names = std::move(nodes);
    int n = size();
    child.assign(sig->children.size(), {});
    for (auto& c : child) {
      c.resize(n);
      for (int i = 0; i < n; ++i) c[i] = i;
    }
    pre_labels.assign(sig->labels.size(), {});
    post_labels.assign(sig->labels.size(), {});
    names.assign(sig->names.size(), {});
    pre_links = LinkRelation(n);
    post_links = LinkRelation(n);
  }

  int size() const { return static_cast<int>(node_names.size()); }
  NodeSet all() const { return NodeSet::first(size()); }
  int height() const { return sig->height; }

  int index_of(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
      if (node_names[i] == name) return i;
    return -1;
  }

  /// parent(y): the lowest-index x with a proper child edge x -> y, else y itself.
  std::vector<int> parents() const {
    std::vector<int> p(size());
    for (int i = 0; i < size(); ++i) p[i] = i;
    for (int x = size() - 1; x >= 0; --x)
      for (const auto& f : child)
        if (f[x] != x) p[f[x]] = x;
    return p;
  }

  const LinkRelation& links(bool post) const { return post ? post_links : pre_links; }
  NodeSet present(bool post) const { return post ? post_present : pre_present; }
  const std::vector<NodeSet>& labels(bool post) const { return post ? post_labels : pre_labels; }

  /// Same nodes (by name and order) and same interpretation of every symbol.
  bool operator==(const Transition& o) const {
    return *sig == *o.sig && node_names == o.node_names && child == o.child && pre_present == o.pre_present &&
           post_present == o.post_present && pre_labels == o.pre_labels && post_labels == o.post_labels &&
           names == o.names && pre_links == o.pre_links && post_links == o.post_links;
  }
};

/// The transition with pre- and postcondition dynamic interpretations swapped.
inline Transition mirror(const Transition& t) {
  Transition m = t;
  std::swap(m.pre_present, m.post_present);
  std::swap(m.pre_labels, m.post_labels);
  std::swap(m.pre_links, m.post_links);
  return m;
}

/// Restriction of `t` to the nodes in `keep`, preserving relative order.
inline Transition restrict_to(const Transition& t, NodeSet keep) {
  std::vector<int> old_of, new_of(t.size(), -1);
  std::vector<std::string> names;
  keep.for_each([&](int i) {
    new_of[i] = static_cast<int>(old_of.size());
    old_of.push_back(i);
    names.push_back(t.node_names[i]);
  });
  Transition r(t.sig, names);
  auto map_set = [&](NodeSet s) {
    NodeSet out;
    (s & keep).for_each([&](int i) { out.set(new_of[i]); });
    return out;
  };
  for (size_t f = 0; f < t.child.size(); ++f)
    for (size_t i = 0; i < old_of.size(); ++i) {
      int c = t.child[f][old_of[i]];
      if (new_of[c] >= 0) r.child[f][i] = new_of[c];
    }
  r.pre_present = map_set(t.pre_present);
  r.post_present = map_set(t.post_present);
  for (size_t l = 0; l < t.pre_labels.size(); ++l) {
    r.pre_labels[l] = map_set(t.pre_labels[l]);
    r.post_labels[l] = map_set(t.post_labels[l]);
  }
  for (size_t n = 0; n < t.names.size(); ++n) r.names[n] = map_set(t.names[n]);
  for (auto p : t.pre_links.pairs())
    if (keep.has(p.a) && keep.has(p.b)) r.pre_links.set(new_of[p.a], new_of[p.b]);
  for (auto p : t.post_links.pairs())
    if (keep.has(p.a) && keep.has(p.b)) r.post_links.set(new_of[p.a], new_of[p.b]);
  return r;
}

// Structural validation ---------------------------------------------------

enum class ViolationKind { InDegree, Cycle, Height, PreLinkFunctionality, PostLinkFunctionality };

struct Violation {
  ViolationKind kind;
  std::vector<int> nodes;
  std::string message;
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::InDegree: return "forest: in-degree above 1";
    case ViolationKind::Cycle: return "forest: cycle";
    case ViolationKind::Height: return "height bound exceeded";
    case ViolationKind::PreLinkFunctionality: return "Link not functional";
    case ViolationKind::PostLinkFunctionality: return "Link* not functional";
  }
  return "?";
}

/// Checks the n-FLB conditions directly: forest shape, height bound, link functionality.
inline std::vector<Violation> validate_flb(const Transition& t) {
  std::vector<Violation> out;
  const int n = t.size();
  std::vector<NodeSet> parents_of(n);
  for (const auto& f : t.child)
    for (int x = 0; x < n; ++x)
      if (f[x] != x) parents_of[f[x]].set(x);
  for (int y = 0; y < n; ++y)
    if (parents_of[y].count() > 1) {
      auto nodes = parents_of[y].to_vector();
      nodes.insert(nodes.begin(), y);
      out.push_back({ViolationKind::InDegree, nodes, "node " + t.node_names[y] + " has several parents"});
    }

  // Longest proper downward path from each node; a node on a cycle never settles.
  std::vector<int> depth(n, -1);  // -1 unknown, -2 in progress
  bool cyclic = false;
  NodeSet on_cycle;
  auto longest = [&](auto&& self, int x) -> int {
    if (depth[x] >= 0) return depth[x];
    if (depth[x] == -2) {
      cyclic = true;
      on_cycle.set(x);
      return 0;
    }
    depth[x] = -2;
    int best = 0;
    for (const auto& f : t.child)
      if (f[x] != x) best = std::max(best, 1 + self(self, f[x]));
    depth[x] = best;
    return best;
  };
  for (int x = 0; x < n; ++x) longest(longest, x);
  if (cyclic) out.push_back({ViolationKind::Cycle, on_cycle.to_vector(), "child edges form a cycle"});
  else
    for (int x = 0; x < n; ++x)
      if (depth[x] > t.height())
        out.push_back({ViolationKind::Height, {x},
                       "path of length " + std::to_string(depth[x]) + " below " + t.node_names[x]});

  for (bool post : {false, true}) {
    NodeSet bad = t.links(post).non_functional();
    bad.for_each([&](int a) {
      std::vector<int> nodes{a};
      t.links(post).partners(a).for_each([&](int b) { nodes.push_back(b); });
      out.push_back({post ? ViolationKind::PostLinkFunctionality : ViolationKind::PreLinkFunctionality, nodes,
                     "node " + t.node_names[a] + " occurs in several " + (post ? "Link*" : "Link") + " pairs"});
    });
  }
  return out;
}

inline bool is_valid_flb(const Transition& t) { return validate_flb(t).empty(); }

/// Support: every node is present in the pre- or postcondition.
inline bool is_supported(const Transition& t) { return (t.pre_present | t.post_present) == t.all(); }

struct TreeDecomposition {
  struct Tree {
    int root;
    NodeSet nodes;
  };
  std::vector<Tree> trees;
  std::vector<int> tree_of;  // node -> tree index

  NodeSet vertices(int tree) const { return trees.at(tree).nodes; }
  int count() const { return static_cast<int>(trees.size()); }
};

/// Partition of a valid FLB into its trees, ordered by root index.
inline TreeDecomposition decompose(const Transition& t) {
  if (!is_valid_flb(t)) throw UsageError("decompose requires a valid FLB");
  auto par = t.parents();
  TreeDecomposition d;
  d.tree_of.assign(t.size(), -1);
  auto root_of = [&](int x) {
    while (par[x] != x) x = par[x];
    return x;
  };
  for (int x = 0; x < t.size(); ++x)
    if (par[x] == x) {
      d.tree_of[x] = d.count();
      d.trees.push_back({x, NodeSet::single(x)});
    }
  for (int x = 0; x < t.size(); ++x) {
    int tree = d.tree_of[root_of(x)];
    d.tree_of[x] = tree;
    d.trees[tree].nodes.set(x);
  }
  return d;
}

}  // namespace flb
