#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flb/deduction.hpp"
#include "flb/random.hpp"

namespace flb::test {

/// Random well-formed derivations over a signature with child f, label A and name S.
class DerivationGen {
 public:
  DerivationGen(const Signature& sig, std::uint64_t seed) : sig_(sig), rng_(seed) {}

  /// A derivation accepted by check_derivation, built by rejection sampling.
  Derivation next(int depth = 3, bool allow_circumscribe = false) {
    while (true) {
      Derivation dv = build(depth, allow_circumscribe);
      try {
        check_derivation(dv, sig_);
        return dv;
      } catch (const DerivationError&) {
      }
    }
  }

 private:
  const Signature& sig_;
  Rng rng_;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string var() { return std::vector<std::string>{"x", "y", "z"}[pick(3)]; }

  Derivation leaf(bool dynamic) {
    static const std::vector<std::string> dyn = {"P*(%)", "!P*(%)", "A*(%)", "!A*(%)", "Link*(%,#)", "!Link*(%,#)",
                                                 "A*(f(%))", "!P*(parent(%))"};
    static const std::vector<std::string> stat = {"P(%)", "!P(%)", "A(%)", "!A(%)", "S(%)", "!S(%)", "Link(%,#)",
                                                  "% = #", "% != #", "% = f(#)", "!Link(%,#)"};
    std::string s = dynamic ? dyn[pick(static_cast<int>(dyn.size()))] : stat[pick(static_cast<int>(stat.size()))];
    for (auto pos = s.find('%'); pos != std::string::npos; pos = s.find('%')) s.replace(pos, 1, var());
    for (auto pos = s.find('#'); pos != std::string::npos; pos = s.find('#')) s.replace(pos, 1, var());
    Derivation d;
    d.rule = dynamic ? Rule::Dynamic : Rule::Static;
    d.literal = parse_formula(s, sig_);
    return d;
  }

  Derivation guard_leaf(const std::string& v) {
    static const std::vector<std::string> forms = {"Link*(%,#)", "Link(%,#)", "% = #", "Link*(#,%)"};
    std::string s = forms[pick(static_cast<int>(forms.size()))];
    std::string other = var();
    s.replace(s.find('%'), 1, v);
    s.replace(s.find('#'), 1, other);
    Derivation d;
    d.rule = s.find('*') != std::string::npos ? Rule::Dynamic : Rule::Static;
    d.literal = parse_formula(s, sig_);
    return d;
  }

  Derivation build(int depth, bool allow_circumscribe) {
    if (depth == 0) return leaf(pick(2) == 0);
    const int r = pick(allow_circumscribe ? 7 : 6);
    Derivation d;
    switch (r) {
      case 0:
        return leaf(pick(2) == 0);
      case 1: {
        d.rule = Rule::Weak;
        d.premises.push_back(build(depth - 1, false));
        Judgment j = check_or_empty(d.premises[0]);
        d.vars = j.vars;
        if (pick(2)) d.vars.insert(var());
        d.d = j.d + pick(2);
        return d;
      }
      case 2: {
        d.rule = Rule::Bool;
        d.op = pick(2) ? Kind::And : Kind::Or;
        Derivation a = build(depth - 1, false), b = build(depth - 1, false);
        // Lift both sides to their common context.
        Judgment ja = check_or_empty(a), jb = check_or_empty(b);
        std::set<std::string> vars = ja.vars;
        vars.insert(jb.vars.begin(), jb.vars.end());
        int dd = std::max(ja.d, jb.d);
        d.premises = {lift(a, vars, dd), lift(b, vars, dd)};
        return d;
      }
      case 3: {
        d.rule = Rule::Invariant;
        Derivation p = leaf(true);
        d.premises.push_back(p);
        return d;
      }
      case 4:
      case 5: {
        d.rule = r == 4 ? Rule::ForallGuard : Rule::ExistsGuard;
        d.var = var();
        d.premises = {build(depth - 1, false), guard_leaf(d.var)};
        return d;
      }
      default:
        d.rule = Rule::Circumscribe;
        d.premises.push_back(build(depth - 1, false));
        return d;
    }
  }

  Judgment check_or_empty(const Derivation& d) {
    try {
      return check_derivation(d, sig_);
    } catch (const DerivationError&) {
      return {};
    }
  }

  static Derivation lift(Derivation d, const std::set<std::string>& vars, int dd) {
    Derivation w;
    w.rule = Rule::Weak;
    w.vars = vars;
    w.d = dd;
    w.premises.push_back(std::move(d));
    return w;
  }
};

}  // namespace flb::test
