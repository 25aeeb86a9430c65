#include <gtest/gtest.h>

#include "derivation_gen.hpp"
#include "fixtures.hpp"
#include "flb/circumscription.hpp"

using namespace flb;
using namespace flb::test;

namespace {
const Signature& sig() { return *fig1().sig; }
Derivation parse(const std::string& s) { return parse_derivation(s, sig(), &fig1().defs); }
std::string proviso_of(const std::string& s) {
  try {
    check_derivation(parse(s), sig());
  } catch (const DerivationError& e) {
    return e.proviso();
  }
  return "";
}
}  // namespace

TEST(Deduction, FigureOneJudgments) {
  const auto& kf = fig1();
  auto j1 = check_derivation(*kf.derivation("Obs1"), sig());
  EXPECT_EQ(context_string(j1.vars, j1.d), "{x};0");
  EXPECT_TRUE(alpha_equal(*j1.formula, *kf.formula("Observation1(x)")));
  auto j2 = check_derivation(*kf.derivation("Obs2"), sig());
  EXPECT_EQ(context_string(j2.vars, j2.d), "{x};1");
  EXPECT_TRUE(alpha_equal(*j2.formula, *kf.formula("Observation2(x)")));
  auto j = check_derivation(*kf.derivation("ObsBoth"), sig());
  EXPECT_EQ(context_string(j.vars, j.d), "{x};1");
  EXPECT_TRUE(alpha_equal(*j.formula, *kf.formula("Obs(x)")));
  auto jm = check_derivation(*kf.derivation("ObsMin"), sig());
  EXPECT_EQ(context_string(jm.vars, jm.d), "{x};1");
  EXPECT_TRUE(alpha_equal(*jm.formula, *kf.formula("minimize(Obs(x) & Tsupp)")));
}

TEST(Deduction, ImproperGuardRejected) {
  try {
    check_derivation(*fig1().derivation("Trivial"), sig());
    FAIL() << "accepted";
  } catch (const DerivationError& e) {
    EXPECT_EQ(e.rule(), Rule::ExistsGuard);
    EXPECT_EQ(e.proviso(), "<t> != <u>");
  }
}

TEST(Deduction, Provisos) {
  EXPECT_EQ(proviso_of("(dynamic \"P(x)\")"), "starred literal");
  EXPECT_EQ(proviso_of("(static \"Active*(x)\")"), "unstarred literal");
  EXPECT_EQ(proviso_of("(static \"P(x) & P(y)\")"), "literal");
  EXPECT_EQ(proviso_of("(weak V=\"\" d=0 (dynamic \"P*(x)\"))"), "V subset of V'");
  EXPECT_EQ(proviso_of("(weak V=\"x\" d=0 (existsguard var=z (static \"Src(z)\") (dynamic \"Link*(x,z)\")))"),
            "d <= d'");
  EXPECT_EQ(proviso_of("(bool op=and (dynamic \"P*(x)\") (static \"P(x)\"))"), "identical contexts");
  EXPECT_EQ(proviso_of("(invariant (static \"P(x)\"))"), "premise context {x};0");
  EXPECT_EQ(proviso_of("(invariant (weak V=\"x\" d=0 (static \"P(x)\")))"), "phi pre");
  EXPECT_EQ(proviso_of("(forallguard var=y (dynamic \"P*(y)\") (static \"y=y\"))"),
            "<t> != <u> or <t> not in V u V'");
  EXPECT_EQ(proviso_of("(forallguard var=y (dynamic \"P*(x)\") (static \"P(y)\"))"), "binary guard atom");
  EXPECT_EQ(proviso_of("(existsguard var=y (dynamic \"P*(x)\") (static \"Link(x,z)\"))"), "guard mentions x_t");
  EXPECT_THROW(parse("(bool op=and (dynamic \"P*(x)\"))"), ParseError);
}

TEST(Deduction, ForallGuardOnUnprotectedVariable) {
  auto j = check_derivation(parse("(forallguard var=y (dynamic \"P*(x)\") (static \"y=y\"))"), sig());
  EXPECT_EQ(context_string(j.vars, j.d), "{x};0");
}

TEST(Deduction, InvariantConclusion) {
  auto j = check_derivation(parse("(invariant (dynamic \"Active*(x)\"))"), sig());
  EXPECT_TRUE(j.vars.empty());
  EXPECT_EQ(j.d, 0);
  EXPECT_TRUE(alpha_equal(*j.formula, *fig1().formula("Active(x) & Active*(x)")));
}

TEST(Deduction, PrintParseRoundTrip) {
  for (const auto& nd : fig1().derivations) {
    auto again = parse(to_string(nd.dv));
    EXPECT_EQ(to_string(again), to_string(nd.dv));
  }
}

TEST(Deduction, ParseErrorsCarryLines) {
  try {
    parse_derivation("(bool op=and\n  (dynamic \"P*(x)\")\n  (nosuchrule))", sig(), nullptr, 10);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 12);
  }
}

TEST(Deduction, InferenceReproducesFigureOne) {
  const auto& kf = fig1();
  for (const char* s : {"Observation1(x)", "Observation2(x)", "Obs(x)", "minimize(Obs(x) & Tsupp)"}) {
    auto dv = infer_derivation(kf.formula(s), sig());
    ASSERT_TRUE(dv.has_value()) << s;
    auto j = check_derivation(*dv, sig());
    EXPECT_TRUE(alpha_equal(*j.formula, *kf.formula(s))) << s;
  }
  EXPECT_EQ(context_string(infer_judgment(kf.formula("Obs(x)"), sig())->vars, 1), "{x};1");
  EXPECT_FALSE(infer_derivation(kf.formula("exists z. z = z & Src(z)"), sig()).has_value());
  EXPECT_FALSE(infer_derivation(kf.formula("P*(x) -> P(x)"), sig()).has_value());
}

TEST(Deduction, RandomDerivationsArePreserved) {
  auto s = make_sig("height 1\nchildren f\nlabels A\nnames S\n");
  DerivationGen gen(*s, 7);
  RandomOptions opts;
  opts.max_trees = 3;
  for (int i = 0; i < 15; ++i) {
    Derivation dv = gen.next(3);
    Judgment j = check_derivation(dv, *s);
    auto rep = preservation_check(j.formula, j.vars, j.d, s, 40, 100 + i, opts);
    EXPECT_TRUE(rep.pass) << to_string(j) << "\n" << to_string(dv);
  }
}
