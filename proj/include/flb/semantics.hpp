#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flb/error.hpp"
#include "flb/formula.hpp"
#include "flb/transition.hpp"

namespace flb {

/// Variable -> node index of the transition being evaluated.
using Assignment = std::map<std::string, int>;

/// Caps for the exhaustive search behind `minimize`.
struct Budget {
  long max_candidates = 1L << 22;
};

/// Searches for a strictly change-smaller transition satisfying `phi` under `mu` (defined with the
/// circumscription module). Returns a change-minimal such witness, or nothing when `t` is minimal.
inline std::optional<Transition> find_smaller_model(const Transition& t, const Assignment& mu, const FormulaPtr& phi,
                                             const Budget& budget);

/// A formula lowered to slot-indexed nodes so repeated evaluation avoids name lookups.
class CompiledFormula {
 public:
  explicit CompiledFormula(FormulaPtr f) : source_(std::move(f)) { root_ = lower(source_); }

  const FormulaPtr& source() const { return source_; }
  int slot_count() const { return static_cast<int>(slot_names_.size()); }
  const std::vector<std::string>& slot_names() const { return slot_names_; }
  int slot_of(const std::string& v) const {
    for (int i = 0; i < slot_count(); ++i)
      if (slot_names_[i] == v) return i;
    return -1;
  }

  /// Evaluates with env[slot] = node (entries for free variables must be set).
  bool run(const Transition& t, const std::vector<int>& parents, std::vector<int>& env, const Budget& budget) const {
    Ctx c{t, parents, env, budget};
    return eval_node(c, root_);
  }

  int term_value(const Transition& t, const std::vector<int>& parents, const std::vector<int>& env, int slot,
                 const std::vector<int>& path) const {
    int v = env[slot];
    for (int f : path) v = f < 0 ? parents[v] : t.child[f][v];
    return v;
  }

 private:
  struct CTerm {
    int slot = -1;
    std::vector<int> path;
  };
  struct Node {
    Kind kind;
    SymKind sym_kind = SymKind::Present;
    int index = 0;
    bool post = false;
    CTerm a, b;
    int slot = -1;
    int k0 = -1, k1 = -1;
    FormulaPtr src;
  };
  struct Ctx {
    const Transition& t;
    const std::vector<int>& parents;
    std::vector<int>& env;
    const Budget& budget;
  };

  FormulaPtr source_;
  std::vector<Node> nodes_;
  std::vector<std::string> slot_names_;
  int root_ = -1;

  int slot_for(const std::string& v) {
    int s = slot_of(v);
    if (s >= 0) return s;
    slot_names_.push_back(v);
    return slot_count() - 1;
  }

  CTerm lower_term(const Term& t) {
    CTerm c;
    c.slot = slot_for(t.var);
    for (const auto& f : t.path) c.path.push_back(f.index);
    return c;
  }

  int lower(const FormulaPtr& f) {
    Node n{f->kind};
    n.src = f;
    switch (f->kind) {
      case Kind::Unary:
        n.sym_kind = f->sym.kind;
        n.index = f->sym.index;
        n.post = f->sym.post;
        n.a = lower_term(f->terms[0]);
        break;
      case Kind::Link:
        n.post = f->post;
        n.a = lower_term(f->terms[0]);
        n.b = lower_term(f->terms[1]);
        break;
      case Kind::Eq:
        n.a = lower_term(f->terms[0]);
        n.b = lower_term(f->terms[1]);
        break;
      case Kind::Forall:
      case Kind::Exists:
        // Bound variables share a slot per name; scoping is restored on exit by eval_node.
        n.slot = slot_for(f->var);
        n.k0 = lower(f->kids[0]);
        break;
      case Kind::Not:
      case Kind::Minimize:
        n.k0 = lower(f->kids[0]);
        break;
      case Kind::And:
      case Kind::Or:
      case Kind::Implies:
        n.k0 = lower(f->kids[0]);
        n.k1 = lower(f->kids[1]);
        break;
      default:
        break;
    }
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  static int value(const Ctx& c, const CTerm& t) {
    int v = c.env[t.slot];
    for (int f : t.path) v = f < 0 ? c.parents[v] : c.t.child[f][v];
    return v;
  }

  bool eval_node(Ctx& c, int id) const {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Unary: {
        int v = value(c, n.a);
        switch (n.sym_kind) {
          case SymKind::Present: return c.t.present(n.post).has(v);
          case SymKind::Label: return c.t.labels(n.post)[n.index].has(v);
          case SymKind::Name: return c.t.names[n.index].has(v);
        }
        return false;
      }
      case Kind::Link: return c.t.links(n.post).has(value(c, n.a), value(c, n.b));
      case Kind::Eq: return value(c, n.a) == value(c, n.b);
      case Kind::Not: return !eval_node(c, n.k0);
      case Kind::And: return eval_node(c, n.k0) && eval_node(c, n.k1);
      case Kind::Or: return eval_node(c, n.k0) || eval_node(c, n.k1);
      case Kind::Implies: return !eval_node(c, n.k0) || eval_node(c, n.k1);
      case Kind::Forall:
      case Kind::Exists: {
        const bool universal = n.kind == Kind::Forall;
        int saved = c.env[n.slot];
        bool result = universal;
        for (int v = 0; v < c.t.size(); ++v) {
          c.env[n.slot] = v;
          if (eval_node(c, n.k0) != universal) {
            result = !universal;
            break;
          }
        }
        c.env[n.slot] = saved;
        return result;
      }
      case Kind::Minimize: {
        if (!eval_node(c, n.k0)) return false;
        const FormulaPtr& body = n.src->kids[0];
        Assignment mu;
        for (const auto& v : free_variables(*body)) mu[v] = c.env[slot_of(v)];
        return !find_smaller_model(c.t, mu, body, c.budget).has_value();
      }
    }
    return false;
  }
};

/// Value of a term: variable lookup, then each function (parent derived, children identity by default).
inline int eval_term(const Transition& t, const Assignment& a, const Term& term) {
  auto it = a.find(term.var);
  if (it == a.end()) throw UsageError("unbound variable '" + term.var + "'");
  auto parents = t.parents();
  int v = it->second;
  for (const auto& f : term.path) v = f.is_parent() ? parents[v] : t.child[f.index][v];
  return v;
}

/// Tarskian truth of `f` on `t` under `a`; quantifiers range over all nodes of `t`.
inline bool eval(const Transition& t, const Assignment& a, const FormulaPtr& f, const Budget& budget = {}) {
  CompiledFormula cf(f);
  std::vector<int> env(cf.slot_count(), -1);
  for (const auto& v : free_variables(*f)) {
    auto it = a.find(v);
    if (it == a.end()) throw UsageError("unbound variable '" + v + "'");
    if (it->second < 0 || it->second >= t.size()) throw UsageError("variable '" + v + "' assigned outside the domain");
    env[cf.slot_of(v)] = it->second;
  }
  return cf.run(t, t.parents(), env, budget);
}

/// Reusable evaluator for one formula over many transitions/assignments.
class Evaluator {
 public:
  explicit Evaluator(FormulaPtr f, Budget budget = {}) : cf_(std::move(f)), budget_(budget) {
    for (const auto& v : free_variables(*cf_.source())) free_slots_.push_back({v, cf_.slot_of(v)});
  }

  bool operator()(const Transition& t, const Assignment& a) const {
    auto parents = t.parents();
    return (*this)(t, parents, a);
  }

  bool operator()(const Transition& t, const std::vector<int>& parents, const Assignment& a) const {
    std::vector<int> env(cf_.slot_count(), -1);
    for (const auto& [v, s] : free_slots_) {
      auto it = a.find(v);
      if (it == a.end()) throw UsageError("unbound variable '" + v + "'");
      env[s] = it->second;
    }
    return cf_.run(t, parents, env, budget_);
  }

  const CompiledFormula& compiled() const { return cf_; }
  std::vector<std::string> free_names() const {
    std::vector<std::string> out;
    for (const auto& fs : free_slots_) out.push_back(fs.first);
    return out;
  }

 private:
  CompiledFormula cf_;
  Budget budget_;
  std::vector<std::pair<std::string, int>> free_slots_;
};

}  // namespace flb

#include "flb/minimality.hpp"
