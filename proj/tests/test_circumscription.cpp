#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flb/circumscription.hpp"
#include "flb/random.hpp"

using namespace flb;
using namespace flb::test;

namespace {
Transition no_change(Transition t) {
  t.post_present = t.pre_present;
  t.post_labels = t.pre_labels;
  t.post_links = t.pre_links;
  return t;
}

/// b from a: keep a random subset of each change set.
Transition random_delta_subset(const Transition& a, Rng& rng) {
  auto c = change_sets(a);
  auto thin = [&](NodeSet s) {
    NodeSet o;
    s.for_each([&](int x) {
      if (detail::coin(rng, 0.5)) o.set(x);
    });
    return o;
  };
  std::vector<NodeSet> dl;
  for (auto s : c.delta_labels) dl.push_back(thin(s));
  std::vector<LinkPair> plus, minus;
  for (auto p : c.plus_links)
    if (detail::coin(rng, 0.5)) plus.push_back(p);
  for (auto p : c.minus_links)
    if (detail::coin(rng, 0.5)) minus.push_back(p);
  return with_changes(a, thin(c.delta_present), dl, plus, minus);
}
}  // namespace

TEST(Circumscription, PartitionShape) {
  auto part = transition_partition(*fig1().sig);
  EXPECT_EQ(part.p_fix.size(), 4u);  // P, Phos, Active, Link
  EXPECT_EQ(part.p_var.size(), 4u);
  EXPECT_EQ(part.p_min.size(), 4u);
  EXPECT_EQ(part.p_restr.size(), 3u);
  EXPECT_EQ(part.f_restr.size(), 3u);  // f1, f2, parent
}

TEST(Circumscription, PrecOrderOnFigureOne) {
  auto part = transition_partition(*fig1().sig);
  EXPECT_TRUE(prec_leq(fig1_T(), fig1_Tprime(), part));
  EXPECT_FALSE(prec_leq(fig1_Tprime(), fig1_T(), part));
  EXPECT_TRUE(prec_leq(fig1_T(), fig1_T(), part));
  EXPECT_TRUE(prec_less(fig1_T(), fig1_Tprime(), part));
}

TEST(Circumscription, PrecOrderAgreesWithChangeOrderOnRandomPairs) {
  auto sig = fig1().sig;
  auto part = transition_partition(*sig);
  Rng rng(11);
  RandomOptions o;
  o.max_nodes = 6;
  for (int i = 0; i < 300; ++i) {
    Transition a = random_flb(sig, rng, o);
    Transition b = detail::coin(rng, 0.7) ? random_delta_subset(a, rng) : random_flb(sig, rng, o);
    EXPECT_EQ(prec_leq(b, a, part), change_leq(b, a)) << save_model(a, "a") << save_model(b, "b");
    EXPECT_EQ(prec_leq(a, b, part), change_leq(a, b)) << save_model(a, "a") << save_model(b, "b");
  }
}

TEST(Circumscription, FigureOneMinimality) {
  const auto& kf = fig1();
  auto phi = kf.formula("Obs(x) & Tsupp");
  const auto& t = fig1_T();
  const auto& tp = fig1_Tprime();
  EXPECT_TRUE(is_minimal(t, {{"x", t.index_of("m1")}}, phi));
  EXPECT_FALSE(is_minimal(tp, {{"x", tp.index_of("m1")}}, phi));
  auto w = find_smaller_model(tp, {{"x", tp.index_of("m1")}}, phi, {});
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(change_less(*w, tp));
  EXPECT_TRUE(eval(*w, {{"x", w->index_of("m1")}}, phi));
  EXPECT_THROW(is_minimal(t, {}, phi), UsageError);
}

TEST(Circumscription, NoChangeIsMinimalForTrue) {
  Transition t = no_change(fig1_T());
  EXPECT_TRUE(is_minimal(t, {}, f_true()));
  EXPECT_FALSE(is_minimal(fig1_T(), {}, f_true()));
}

TEST(Circumscription, Locality) {
  const auto& t = fig1_T();
  const auto& tp = fig1_Tprime();
  EXPECT_TRUE(locality_check(t, {{"x", t.index_of("m1")}}, {"x"}, 1));
  EXPECT_FALSE(locality_check(t, {{"x", t.index_of("m1")}}, {"x"}, 0));
  EXPECT_FALSE(locality_check(tp, {{"x", tp.index_of("m1")}}, {"x"}, 1));
  EXPECT_TRUE(locality_check(no_change(t), {}, {}, 0));
}

TEST(Circumscription, PreservationOfObservationOne) {
  const auto& kf = fig1();
  auto rep = preservation_check(kf.formula("Observation1(x)"), {"x"}, 0, kf.sig, 150, 1);
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.checks, 0);
}

TEST(Circumscription, PreservationNeedsDistanceForExistentialLink) {
  const auto& kf = fig1();
  auto f = kf.formula("exists y. Link*(x,y)");
  auto bad = preservation_check(f, {"x"}, 0, kf.sig, 500, 1);
  ASSERT_FALSE(bad.pass);
  ASSERT_TRUE(bad.a && bad.b);
  // Independent confirmation of the counterexample.
  Assignment mu_a{{"x", bad.a->index_of(bad.b->node_names[bad.mu.at("x")])}};
  EXPECT_TRUE(eval(*bad.a, mu_a, f));
  EXPECT_FALSE(eval(*bad.b, bad.mu, f));
  EXPECT_TRUE(preservation_check(f, {"x"}, 1, kf.sig, 150, 1).pass);
}

TEST(Circumscription, PreFormulasArePreservedWithEmptyContext) {
  const auto& kf = fig1();
  auto f = kf.formula("exists y. Link(x,y) & Phos(y) | !P(parent(x))");
  EXPECT_TRUE(preservation_check(f, {}, 0, kf.sig, 150, 2).pass);
}
