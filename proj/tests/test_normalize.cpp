#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flb/enumerate.hpp"
#include "flb/normalize.hpp"
#include "flb/theory.hpp"

using namespace flb;
using namespace flb::test;

namespace {
std::shared_ptr<const Signature> small_sig() { return make_sig("height 1\nchildren f\nlabels Active\nnames Src\n"); }

/// Oracle: agreement of two formulas on every valid supported structure up to max_nodes, for
/// every assignment of x.
void expect_equivalent(const FormulaPtr& a, const FormulaPtr& b, const std::shared_ptr<const Signature>& sig,
                       int max_nodes) {
  Projection proj = Projection::of(*f_and(a, b), *sig);
  Evaluator ea(a), eb(b);
  long n = 0;
  for_each_structure(sig, max_nodes, proj, [&](const Transition& t) {
    for (int x = 0; x < t.size(); ++x) {
      ++n;
      if (ea(t, {{"x", x}}) != eb(t, {{"x", x}})) {
        ADD_FAILURE() << to_string(*a) << "\nvs\n" << to_string(*b) << "\n" << save_model(t);
        return false;
      }
    }
    return true;
  });
  EXPECT_GT(n, 0);
}
}  // namespace

TEST(Normalize, ClassifyPrefixes) {
  using Q = Quantifier;
  EXPECT_EQ(classify({}), Fragment::Both);
  EXPECT_EQ(classify({Q{true, "y"}}), Fragment::Both);
  EXPECT_EQ(classify({Q{false, "z"}, Q{true, "y"}}), Fragment::EA);
  EXPECT_EQ(classify({Q{true, "y"}, Q{false, "z"}}), Fragment::AE);
  EXPECT_EQ(classify({Q{true, "a"}, Q{false, "b"}, Q{true, "c"}}), Fragment::Other);
}

TEST(Normalize, ObservationOneIsUniversal) {
  auto r = normalize_prenex(fig1().formula("Observation1(x)"));
  ASSERT_EQ(r.formula.prefix.size(), 1u);
  EXPECT_TRUE(r.formula.prefix[0].universal);
  EXPECT_EQ(r.tag, Fragment::Both);
}

TEST(Normalize, LiteralHasEmptyPrefix) {
  auto r = normalize_prenex(fig1().formula("!Phos*(x)"));
  EXPECT_TRUE(r.formula.prefix.empty());
  EXPECT_EQ(r.tag, Fragment::Both);
}

TEST(Normalize, ObsPrenexIsExistsForallAndEquivalent) {
  auto sig = small_sig();
  Definitions defs;
  auto f = parse_formula("(forall y. Link*(x,y) -> !Active*(parent(x))) & exists z. Link*(x,z) & Src(z)", *sig);
  auto r = normalize_prenex(f);
  EXPECT_EQ(r.tag, Fragment::EA);
  EXPECT_FALSE(r.formula.prefix[0].universal);
  expect_equivalent(f, r.formula.to_formula(), sig, 3);
}

TEST(Normalize, NnfPushesNegations) {
  auto f = fig1().formula("!(forall y. Link(x,y) -> P(y))");
  auto n = nnf(f);
  EXPECT_EQ(n->kind, Kind::Exists);
  EXPECT_EQ(n->kid(0).kind, Kind::And);
  EXPECT_THROW(nnf(fig1().formula("minimize(P(x))")), UsageError);
}

TEST(Normalize, FunctionalitySwitchReachesExistsForall) {
  auto sig = small_sig();
  auto f = parse_formula("exists w. forall y. Link*(x,y) & Link(w,y) -> Src(y) & exists v. Active(v) & Link(y,v)", *sig);
  // The inner exists sits under a universal: plain prenexing gives an AE-shaped prefix.
  EXPECT_EQ(classify(prenex(f, false).prefix), Fragment::Other);
  auto g = parse_formula("forall y. Link*(x,y) -> Src(y)", *sig);
  auto r = fragment_normalize(g, Fragment::EA);
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(fragment_within(classify(r->prefix), Fragment::EA));
  expect_equivalent(g, r->to_formula(), sig, 3);
}

TEST(Normalize, GuardedUniversalOverExistentialSwitches) {
  auto sig = small_sig();
  auto f = parse_formula("forall y. Link*(x,y) -> exists z. Link(y,z) & Src(z)", *sig);
  auto ea = fragment_normalize(f, Fragment::EA);
  ASSERT_TRUE(ea.has_value());
  EXPECT_TRUE(fragment_within(classify(ea->prefix), Fragment::EA));
  expect_equivalent(f, ea->to_formula(), sig, 3);
  auto ae = fragment_normalize(f, Fragment::AE);
  ASSERT_TRUE(ae.has_value());
  EXPECT_TRUE(fragment_within(classify(ae->prefix), Fragment::AE));
}

TEST(Normalize, ObsWithTheoryReachesExistsForall) {
  const auto& kf = fig1();
  auto f = with_supported_theory(kf.formula("Obs(x)"), *kf.sig);
  auto r = fragment_normalize(f, Fragment::EA);
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(fragment_within(classify(r->prefix), Fragment::EA));
}

TEST(Normalize, AlreadyInTargetIsJustNnf) {
  auto f = fig1().formula("exists z. forall y. Link(z,y) -> P(y)");
  auto r = fragment_normalize(f, Fragment::EA);
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(alpha_equal(*r->to_formula(), *nnf(f)));
}

TEST(Normalize, BadTargetRejected) {
  EXPECT_THROW(fragment_normalize(f_true(), Fragment::Both), UsageError);
}
