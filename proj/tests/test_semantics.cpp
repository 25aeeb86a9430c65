#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flb/semantics.hpp"
#include "flb/theory.hpp"

using namespace flb;
using namespace flb::test;

TEST(Semantics, ParentOfRegionIsItsProtein) {
  const auto& t = fig1_T();
  const auto& sig = *t.sig;
  Assignment a{{"m1", t.index_of("m1")}, {"r1", t.index_of("r1")}};
  auto term = [&](const char* s) { return parse_formula(std::string(s) + " = " + s, sig)->terms[0]; };
  EXPECT_EQ(eval_term(t, a, term("parent(m1)")), t.index_of("r1"));
  EXPECT_EQ(eval_term(t, a, term("parent(r1)")), t.index_of("r1"));
  EXPECT_EQ(eval_term(t, a, term("f2(r1)")), t.index_of("r1"));
  EXPECT_EQ(eval_term(t, a, term("f1(r1)")), t.index_of("m1"));
  EXPECT_THROW(eval_term(t, {}, term("x")), UsageError);
}

TEST(Semantics, ObsHoldsOnBothFigureOneModels) {
  const auto& kf = fig1();
  auto obs = kf.formula("Obs(x)");
  for (const auto* name : {"T", "Tprime"}) {
    const auto& t = *kf.model(name);
    EXPECT_TRUE(eval(t, {{"x", t.index_of("m1")}}, obs)) << name;
  }
  const auto& t = fig1_T();
  EXPECT_FALSE(eval(t, {{"x", t.index_of("r1")}}, obs));
}

TEST(Semantics, MinimizeRejectsTprime) {
  const auto& kf = fig1();
  auto m = kf.formula("minimize(Obs(x))");
  const auto& tp = fig1_Tprime();
  const auto& t = fig1_T();
  EXPECT_FALSE(eval(tp, {{"x", tp.index_of("m1")}}, m));
  EXPECT_TRUE(eval(t, {{"x", t.index_of("m1")}}, m));
  auto ms = kf.formula("minimize(Obs(x) & Tsupp)");
  EXPECT_FALSE(eval(tp, {{"x", tp.index_of("m1")}}, ms));
  EXPECT_TRUE(eval(t, {{"x", t.index_of("m1")}}, ms));
}

TEST(Semantics, TautologiesAndQuantifiers) {
  const auto& kf = fig1();
  const auto& t = fig1_T();
  EXPECT_TRUE(eval(t, {}, kf.formula("forall x. x = x")));
  EXPECT_TRUE(eval(t, {}, kf.formula("exists x. exists y. Link*(x,y) & !Link(x,y)")));
  EXPECT_FALSE(eval(t, {}, kf.formula("exists x. Active*(x)")));
  EXPECT_TRUE(eval(t, {}, kf.formula("forall x. Tyr(x) -> Phos(x) & Phos*(x)")));
  Transition empty(t.sig, {});
  EXPECT_TRUE(eval(empty, {}, kf.formula("forall x. false")));
  EXPECT_FALSE(eval(empty, {}, kf.formula("exists x. true")));
}

TEST(Semantics, ShadowingUsesInnermostBinder) {
  const auto& t = fig1_T();
  auto f = std::make_shared<const Formula>(*f_exists("x", f_forall("x", f_eq(var_term("x"), var_term("x")))));
  EXPECT_TRUE(eval(t, {}, f));
  auto g = f_exists("x", f_and(f_unary(UnarySymbol{SymKind::Name, 0, false, "Raf1"}, var_term("x")),
                               f_exists("x", f_unary(UnarySymbol{SymKind::Name, 1, false, "Src"}, var_term("x")))));
  EXPECT_TRUE(eval(t, {}, g));
}

TEST(Semantics, EvaluatorMatchesEval) {
  const auto& kf = fig1();
  auto f = kf.formula("Obs(x) | exists y. Link(x,y)");
  Evaluator ev(f);
  const auto& t = fig1_Tprime();
  for (int x = 0; x < t.size(); ++x) EXPECT_EQ(ev(t, {{"x", x}}), eval(t, {{"x", x}}, f));
}
