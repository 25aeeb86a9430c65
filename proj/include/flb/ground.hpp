#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "flb/error.hpp"
#include "flb/formula.hpp"
#include "flb/semantics.hpp"
#include "flb/transition.hpp"

namespace flb {

/// Propositional variables for every fact over a fixed node set: P/P* per node, each label
/// pre/post per node, each name per node, and Link/Link* per unordered pair (self pairs included).
class FactSpace {
 public:
  FactSpace(int nodes, int labels, int names) : n_(nodes), labels_(labels), names_(names) {
    pairs_ = n_ * (n_ + 1) / 2;
  }
  int nodes() const { return n_; }
  int count() const { return 2 * n_ + 2 * labels_ * n_ + names_ * n_ + 2 * pairs_; }

  int present(bool post, int x) const { return (post ? n_ : 0) + x; }
  int label(bool post, int l, int x) const { return 2 * n_ + (2 * l + (post ? 1 : 0)) * n_ + x; }
  int name(int k, int x) const { return 2 * n_ + 2 * labels_ * n_ + k * n_ + x; }
  int link(bool post, int a, int b) const {
    if (a > b) std::swap(a, b);
    int idx = a * n_ - a * (a - 1) / 2 + (b - a);  // row-major upper triangle
    return 2 * n_ + 2 * labels_ * n_ + names_ * n_ + (post ? pairs_ : 0) + idx;
  }

  /// Fact values read off a transition with the same node count.
  std::vector<int8_t> values_of(const Transition& t) const {
    std::vector<int8_t> v(count(), 0);
    for (int x = 0; x < n_; ++x) {
      for (bool post : {false, true}) {
        v[present(post, x)] = t.present(post).has(x);
        for (int l = 0; l < labels_; ++l) v[label(post, l, x)] = t.labels(post)[l].has(x);
      }
      for (int k = 0; k < names_; ++k) v[name(k, x)] = t.names[k].has(x);
      for (int y = x; y < n_; ++y)
        for (bool post : {false, true}) v[link(post, x, y)] = t.links(post).has(x, y);
    }
    return v;
  }

  /// Writes fact values (unknowns read as false) into `t`'s dynamic and static interpretations.
  void apply(const std::vector<int8_t>& v, Transition& t) const {
    for (int x = 0; x < n_; ++x) {
      for (bool post : {false, true}) {
        (post ? t.post_present : t.pre_present).set(x, v[present(post, x)] == 1);
        for (int l = 0; l < labels_; ++l) (post ? t.post_labels : t.pre_labels)[l].set(x, v[label(post, l, x)] == 1);
      }
      for (int k = 0; k < names_; ++k) t.names[k].set(x, v[name(k, x)] == 1);
      for (int y = x; y < n_; ++y)
        for (bool post : {false, true}) (post ? t.post_links : t.pre_links).set(x, y, v[link(post, x, y)] == 1);
    }
  }

 private:
  int n_, labels_, names_, pairs_;
};

/// A ground propositional formula as a DAG of nodes; node 0 is false, node 1 is true.
class GroundFormula {
 public:
  enum class Op : uint8_t { False, True, Var, Not, And, Or };
  struct Node {
    Op op;
    int var = -1;
    std::vector<int> kids;
  };

  GroundFormula() { nodes_ = {{Op::False}, {Op::True}}; }

  int constant(bool b) const { return b ? 1 : 0; }
  int var(int v, const std::vector<int8_t>& fixed) {
    if (!fixed.empty() && fixed[v] >= 0) return constant(fixed[v] == 1);
    nodes_.push_back({Op::Var, v, {}});
    return size() - 1;
  }
  int negate(int a) {
    if (a <= 1) return 1 - a;
    if (nodes_[a].op == Op::Not) return nodes_[a].kids[0];
    nodes_.push_back({Op::Not, -1, {a}});
    return size() - 1;
  }
  /// n-ary And/Or with constant folding and flattening.
  int junction(bool conj, const std::vector<int>& kids) {
    const int unit = conj ? 1 : 0, absorb = conj ? 0 : 1;
    std::vector<int> keep;
    const Op op = conj ? Op::And : Op::Or;
    for (int k : kids) {
      if (k == absorb) return absorb;
      if (k == unit) continue;
      if (nodes_[k].op == op)
        keep.insert(keep.end(), nodes_[k].kids.begin(), nodes_[k].kids.end());
      else
        keep.push_back(k);
    }
    if (keep.empty()) return unit;
    if (keep.size() == 1) return keep[0];
    nodes_.push_back({op, -1, std::move(keep)});
    return size() - 1;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int i) const { return nodes_[i]; }

  /// Three-valued value: 0 false, 1 true, 2 unknown.
  int value(int id, const std::vector<int8_t>& vals) const {
    const Node& n = nodes_[id];
    switch (n.op) {
      case Op::False: return 0;
      case Op::True: return 1;
      case Op::Var: return vals[n.var] < 0 ? 2 : vals[n.var];
      case Op::Not: {
        int v = value(n.kids[0], vals);
        return v == 2 ? 2 : 1 - v;
      }
      case Op::And:
      case Op::Or: {
        const int absorb = n.op == Op::And ? 0 : 1;
        bool unknown = false;
        for (int k : n.kids) {
          int v = value(k, vals);
          if (v == absorb) return absorb;
          if (v == 2) unknown = true;
        }
        return unknown ? 2 : 1 - absorb;
      }
    }
    return 2;
  }

  /// An unassigned variable inside an undetermined part of `id`, or -1.
  int pick(int id, const std::vector<int8_t>& vals) const {
    const Node& n = nodes_[id];
    if (n.op == Op::Var) return vals[n.var] < 0 ? n.var : -1;
    for (int k : n.kids)
      if (value(k, vals) == 2) return pick(k, vals);
    return -1;
  }

  /// If `id` is a literal, its (var, polarity).
  std::optional<std::pair<int, bool>> literal(int id) const {
    const Node& n = nodes_[id];
    if (n.op == Op::Var) return std::pair{n.var, true};
    if (n.op == Op::Not && nodes_[n.kids[0]].op == Op::Var) return std::pair{nodes_[n.kids[0]].var, false};
    return std::nullopt;
  }

 private:
  std::vector<Node> nodes_;
};

/// Grounds a first-order formula over a fixed tree shape (child functions of `shape`), with
/// facts as propositional variables; facts with fixed[v] >= 0 are folded to constants.
class Grounder {
 public:
  Grounder(const Transition& shape, const FactSpace& facts, GroundFormula& out, std::vector<int8_t> fixed = {})
      : shape_(shape), facts_(facts), out_(out), fixed_(std::move(fixed)), parents_(shape.parents()) {}

  int ground(const FormulaPtr& f, Assignment env) { return go(f, env); }

 private:
  const Transition& shape_;
  const FactSpace& facts_;
  GroundFormula& out_;
  std::vector<int8_t> fixed_;
  std::vector<int> parents_;

  int term(const Term& t, const Assignment& env) const {
    auto it = env.find(t.var);
    if (it == env.end()) throw UsageError("unbound variable '" + t.var + "'");
    int v = it->second;
    for (const auto& f : t.path) v = f.is_parent() ? parents_[v] : shape_.child[f.index][v];
    return v;
  }

  std::unordered_map<const Formula*, long> cost_;

  /// Grounding size estimate: quantifiers multiply by the domain size.
  long cost(const Formula& f) {
    if (auto it = cost_.find(&f); it != cost_.end()) return it->second;
    long c = 1;
    for (const auto& k : f.kids) c += cost(*k);
    if (f.kind == Kind::Forall || f.kind == Kind::Exists) c *= std::max(1, shape_.size());
    cost_[&f] = c;
    return c;
  }

  int go(const FormulaPtr& f, Assignment& env) {
    switch (f->kind) {
      case Kind::True: return 1;
      case Kind::False: return 0;
      case Kind::Unary: {
        int x = term(f->terms[0], env);
        switch (f->sym.kind) {
          case SymKind::Present: return out_.var(facts_.present(f->sym.post, x), fixed_);
          case SymKind::Label: return out_.var(facts_.label(f->sym.post, f->sym.index, x), fixed_);
          case SymKind::Name: return out_.var(facts_.name(f->sym.index, x), fixed_);
        }
        return 0;
      }
      case Kind::Link: return out_.var(facts_.link(f->post, term(f->terms[0], env), term(f->terms[1], env)), fixed_);
      case Kind::Eq: return out_.constant(term(f->terms[0], env) == term(f->terms[1], env));
      case Kind::Not: return out_.negate(go(f->kids[0], env));
      case Kind::And:
      case Kind::Or:
      case Kind::Implies: {
        // Ground the cheaper side first and skip the other when it already decides the result.
        const bool conj = f->kind == Kind::And;
        const bool neg_first = f->kind == Kind::Implies;
        const bool swap = cost(*f->kids[1]) < cost(*f->kids[0]);
        auto side = [&](int i) {
          int g = go(f->kids[i], env);
          return i == 0 && neg_first ? out_.negate(g) : g;
        };
        int a = side(swap ? 1 : 0);
        if (a == (conj ? 0 : 1)) return a;
        return out_.junction(conj, {a, side(swap ? 0 : 1)});
      }
      case Kind::Forall:
      case Kind::Exists: {
        const bool conj = f->kind == Kind::Forall;
        auto saved = env.find(f->var) != env.end() ? std::optional<int>(env[f->var]) : std::nullopt;
        std::vector<int> parts;
        for (int v = 0; v < shape_.size(); ++v) {
          env[f->var] = v;
          int g = go(f->kids[0], env);
          parts.push_back(g);
          if (g == (conj ? 0 : 1)) break;
        }
        if (saved)
          env[f->var] = *saved;
        else
          env.erase(f->var);
        return out_.junction(conj, parts);
      }
      case Kind::Minimize: throw UsageError("minimize cannot be grounded");
    }
    return 0;
  }
};

/// Satisfiability of a ground formula plus extra clauses over fact variables: Tseitin encoding
/// into CNF, then conflict-driven search (two watched literals, first-UIP learning, activity-based
/// branching, Luby restarts). Clauses are lists of literals (var, value).
class PropSolver {
 public:
  using Clause = std::vector<std::pair<int, bool>>;

  PropSolver(const GroundFormula& g, int root, int vars) : g_(g), root_(root), vars_(vars) {}

  void add_clause(Clause c) { extra_.push_back(std::move(c)); }

  /// Preferred value per fact variable when branching (default false).
  void set_preference(std::vector<int8_t> pref) { pref_ = std::move(pref); }

  /// Finds a satisfying completion of `init` (unknowns -1); facts the search never touches get
  /// their preferred value. Throws BudgetExceeded past `max_decisions`.
  std::optional<std::vector<int8_t>> solve(std::vector<int8_t> init, long max_decisions = 1L << 26) {
    decisions_ = 0;
    max_decisions_ = max_decisions;
    init_ = std::move(init);
    if (!encode() || !search()) return std::nullopt;
    std::vector<int8_t> out(vars_);
    for (int v = 0; v < vars_; ++v) {
      if (init_[v] >= 0)
        out[v] = init_[v];
      else if (val_[v] >= 0)
        out[v] = val_[v];
      else
        out[v] = pref_.empty() ? 0 : pref_[v];
    }
    return out;
  }

  long decisions() const { return decisions_; }

 private:
  // Literal = 2 * var + (1 if negated).
  const GroundFormula& g_;
  int root_, vars_;
  std::vector<Clause> extra_;
  std::vector<int8_t> pref_, init_;
  long decisions_ = 0, max_decisions_ = 0;

  int nv_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal: clauses watching it
  std::vector<int8_t> val_, phase_;
  std::vector<int> level_, reason_, trail_, trail_lim_;
  std::vector<double> activity_;
  double bump_ = 1.0;
  size_t qhead_ = 0;
  bool conflict_at_root_ = false;

  static int neg(int lit) { return lit ^ 1; }
  int lit_value(int lit) const {
    int v = val_[lit >> 1];
    return v < 0 ? -1 : (v ^ (lit & 1));
  }
  int new_var() {
    val_.push_back(-1), phase_.push_back(0), level_.push_back(0), reason_.push_back(-1), activity_.push_back(0);
    watches_.emplace_back(), watches_.emplace_back();
    return nv_++;
  }

  void add(std::vector<int> c) {
    // Drop duplicate literals; tautologies are kept out.
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (size_t k = 1; k < c.size(); ++k)
      if (c[k] == neg(c[k - 1]) && (c[k] >> 1) == (c[k - 1] >> 1)) return;
    if (c.empty()) {
      conflict_at_root_ = true;
      return;
    }
    if (c.size() == 1) {
      if (lit_value(c[0]) == 0) conflict_at_root_ = true;
      if (lit_value(c[0]) < 0) enqueue(c[0], -1);
      return;
    }
    const int id = static_cast<int>(clauses_.size());
    clauses_.push_back(std::move(c));
    watches_[clauses_[id][0]].push_back(id);
    watches_[clauses_[id][1]].push_back(id);
  }

  bool encode() {
    for (int v = 0; v < vars_; ++v) {
      new_var();
      if (!pref_.empty()) phase_[v] = pref_[v] == 1;
    }
    for (int v = 0; v < vars_; ++v)
      if (init_[v] >= 0) enqueue(2 * v + (init_[v] == 1 ? 0 : 1), -1);
    if (root_ == 0) return false;
    if (root_ != 1) {
      std::vector<int> memo(g_.size(), -1);
      add({tseitin(root_, memo)});
    }
    for (const auto& c : extra_) {
      std::vector<int> lits;
      for (auto [v, b] : c) lits.push_back(2 * v + (b ? 0 : 1));
      add(std::move(lits));
    }
    return !conflict_at_root_;
  }

  int tseitin(int id, std::vector<int>& memo) {
    if (memo[id] >= 0) return memo[id];
    const auto& n = g_.node(id);
    int lit = 0;
    switch (n.op) {
      case GroundFormula::Op::False:
      case GroundFormula::Op::True: {
        lit = 2 * new_var();
        add({n.op == GroundFormula::Op::True ? lit : neg(lit)});
        break;
      }
      case GroundFormula::Op::Var: lit = 2 * n.var; break;
      case GroundFormula::Op::Not: lit = neg(tseitin(n.kids[0], memo)); break;
      case GroundFormula::Op::And:
      case GroundFormula::Op::Or: {
        std::vector<int> kids;
        for (int k : n.kids) kids.push_back(tseitin(k, memo));
        lit = 2 * new_var();
        // And: a -> k for each k, and (all k) -> a. Or is the dual.
        const bool conj = n.op == GroundFormula::Op::And;
        std::vector<int> big{conj ? lit : neg(lit)};
        for (int k : kids) {
          add(conj ? std::vector<int>{neg(lit), k} : std::vector<int>{lit, neg(k)});
          big.push_back(conj ? neg(k) : k);
        }
        add(std::move(big));
        break;
      }
    }
    return memo[id] = lit;
  }

  void enqueue(int lit, int reason) {
    const int v = lit >> 1;
    val_[v] = (lit & 1) ? 0 : 1;
    level_[v] = static_cast<int>(trail_lim_.size());
    reason_[v] = reason;
    trail_.push_back(lit);
  }

  /// Returns a conflicting clause index or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      const int falsified = neg(trail_[qhead_++]);
      auto& ws = watches_[falsified];
      size_t keep = 0;
      for (size_t w = 0; w < ws.size(); ++w) {
        const int ci = ws[w];
        auto& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == 1) {
          ws[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < c.size(); ++k)
          if (lit_value(c[k]) != 0) {
            std::swap(c[1], c[k]);
            watches_[c[1]].push_back(ci);
            moved = true;
            break;
          }
        if (moved) continue;
        ws[keep++] = ci;
        if (lit_value(c[0]) == 0) {
          for (size_t r = w + 1; r < ws.size(); ++r) ws[keep++] = ws[r];
          ws.resize(keep);
          return ci;
        }
        enqueue(c[0], ci);
      }
      ws.resize(keep);
    }
    return -1;
  }

  void bump(int v) {
    if ((activity_[v] += bump_) > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      bump_ *= 1e-100;
    }
  }

  /// First-UIP conflict analysis; returns the learnt clause (asserting literal first) and the
  /// backjump level.
  std::pair<std::vector<int>, int> analyze(int confl) {
    std::vector<int> learnt{0};
    std::vector<char> seen(nv_, 0);
    int pending = 0, lit = -1;
    size_t idx = trail_.size();
    const int cur = static_cast<int>(trail_lim_.size());
    do {
      const auto& c = clauses_[confl];
      for (size_t k = (lit < 0 ? 0 : 1); k < c.size(); ++k) {
        const int q = c[k], v = q >> 1;
        if (seen[v] || level_[v] == 0) continue;
        seen[v] = 1;
        bump(v);
        if (level_[v] >= cur)
          ++pending;
        else
          learnt.push_back(q);
      }
      while (!seen[trail_[--idx] >> 1]) {
      }
      lit = trail_[idx];
      confl = reason_[lit >> 1];
      seen[lit >> 1] = 0;
      --pending;
    } while (pending > 0);
    learnt[0] = neg(lit);
    int back = 0;
    size_t at = 1;
    for (size_t k = 1; k < learnt.size(); ++k)
      if (level_[learnt[k] >> 1] > back) back = level_[learnt[k] >> 1], at = k;
    if (learnt.size() > 1) std::swap(learnt[1], learnt[at]);
    bump_ *= 1.05;
    return {learnt, back};
  }

  void backtrack(int lvl) {
    if (static_cast<int>(trail_lim_.size()) <= lvl) return;
    for (size_t k = trail_.size(); k-- > static_cast<size_t>(trail_lim_[lvl]);) {
      const int v = trail_[k] >> 1;
      phase_[v] = val_[v];
      val_[v] = -1;
      reason_[v] = -1;
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
  }

  int pick_branch() const {
    int best = -1;
    for (int v = 0; v < nv_; ++v)
      if (val_[v] < 0 && (best < 0 || activity_[v] > activity_[best])) best = v;
    return best;
  }

  static long luby(long i) {
    long size = 1, seq = 0;
    while (size < i + 1) ++seq, size = 2 * size + 1;
    while (size - 1 != i) {
      size = (size - 1) >> 1;
      --seq;
      i %= size;
    }
    return 1L << seq;
  }

  bool search() {
    long restarts = 0, conflicts = 0, limit = 64 * luby(0);
    while (true) {
      const int confl = propagate();
      if (confl >= 0) {
        if (trail_lim_.empty()) return false;
        auto [learnt, back] = analyze(confl);
        backtrack(back);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          const int id = static_cast<int>(clauses_.size());
          clauses_.push_back(learnt);
          watches_[learnt[0]].push_back(id);
          watches_[learnt[1]].push_back(id);
          enqueue(learnt[0], id);
        }
        if (++conflicts >= limit) {
          backtrack(0);
          conflicts = 0;
          limit = 64 * luby(++restarts);
        }
        continue;
      }
      const int v = pick_branch();
      if (v < 0) return true;
      if (++decisions_ > max_decisions_) throw BudgetExceeded("search budget exhausted");
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(2 * v + (phase_[v] == 1 ? 0 : 1), -1);
    }
  }
};

}  // namespace flb
