#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flb/change.hpp"
#include "flb/semantics.hpp"

using namespace flb;
using namespace flb::test;

namespace {
int label(const Transition& t, const char* name) { return t.sig->label_index(name); }

/// Two one-node trees with a pre link and no post link.
Transition external_deletion() {
  auto sig = make_sig("height 1\nchildren f\nlabels\nnames\n");
  Transition t(sig, {"a", "b"});
  t.pre_present = t.post_present = t.all();
  t.pre_links.set(0, 1);
  return t;
}

Transition no_change() {
  Transition t = fig1_T();
  t.post_present = t.pre_present;
  t.post_labels = t.pre_labels;
  t.post_links = t.pre_links;
  return t;
}
}  // namespace

TEST(Change, FigureOneChangeSets) {
  const auto& t = fig1_T();
  auto c = change_sets(t);
  EXPECT_EQ(c.delta_labels[label(t, "Active")], nodes_of(t, {"r1"}));
  EXPECT_TRUE(c.delta_labels[label(t, "Phos")].empty());
  EXPECT_TRUE(c.delta_present.empty());
  ASSERT_EQ(c.plus_links.size(), 1u);
  EXPECT_EQ(c.plus_links[0], LinkPair::of(t.index_of("m1"), t.index_of("m2")));
  EXPECT_TRUE(c.minus_links.empty());

  const auto& tp = fig1_Tprime();
  auto cp = change_sets(tp);
  EXPECT_EQ(cp.delta_labels[label(tp, "Phos")], nodes_of(tp, {"m1"}));
  EXPECT_EQ(cp.delta_present, nodes_of(tp, {"m3"}));
  EXPECT_TRUE(change_sets(no_change()).empty());
}

TEST(Change, ChangeSetsAgreeWithDeltaFormulas) {
  // Oracle: the evaluator on the delta formulas.
  const auto& kf = fig1();
  const auto& tp = fig1_Tprime();
  auto c = change_sets(tp);
  auto dphos = kf.formula("Phos(x) & !Phos*(x) | !Phos(x) & Phos*(x)");
  auto dlink = kf.formula("Link*(x,y) & !Link(x,y)");
  for (int x = 0; x < tp.size(); ++x) {
    EXPECT_EQ(c.delta_labels[label(tp, "Phos")].has(x), eval(tp, {{"x", x}}, dphos));
    for (int y = 0; y < tp.size(); ++y) {
      bool plus = std::find(c.plus_links.begin(), c.plus_links.end(), LinkPair::of(x, y)) != c.plus_links.end();
      EXPECT_EQ(plus, eval(tp, {{"x", x}, {"y", y}}, dlink));
    }
  }
}

TEST(Change, ModifiedNodes) {
  const auto& t = fig1_T();
  EXPECT_EQ(modified_nodes(t), nodes_of(t, {"r1", "m1", "m2"}));
  EXPECT_TRUE(modified_nodes(external_deletion()).empty());
  EXPECT_TRUE(modified_nodes(no_change()).empty());
  auto internal = external_deletion();
  internal.pre_links = LinkRelation(2);
  internal.pre_links.set(0, 0);
  EXPECT_EQ(modified_nodes(internal), NodeSet::single(0));
}

TEST(Change, Balls) {
  const auto& t = fig1_T();
  EXPECT_EQ(ball(t, nodes_of(t, {"m1"}), 0), nodes_of(t, {"r1", "m1"}));
  EXPECT_EQ(ball(t, nodes_of(t, {"m1"}), 1), t.all());
  EXPECT_TRUE(ball(t, NodeSet{}, 5).empty());
  const auto& tp = fig1_Tprime();
  EXPECT_FALSE(ball(tp, nodes_of(tp, {"m1"}), 7).has(tp.index_of("m3")));
}

TEST(Change, FigureOneOrder) {
  const auto& t = fig1_T();
  const auto& tp = fig1_Tprime();
  EXPECT_TRUE(change_leq(t, tp));
  EXPECT_FALSE(change_leq(tp, t));
  EXPECT_TRUE(change_less(t, tp));
  EXPECT_TRUE(change_leq(t, t));
  EXPECT_FALSE(change_less(t, t));
}

TEST(Change, DifferentPreconditionsAreIncomparable) {
  const auto& t = fig1_T();
  Transition b = t;
  b.pre_labels[label(t, "Phos")].set(t.index_of("r2"));
  b.post_labels[label(t, "Phos")].set(t.index_of("r2"));
  EXPECT_FALSE(change_leq(b, t));
  EXPECT_FALSE(change_leq(t, b));
}

TEST(Change, SubChainReachesFigureOneA) {
  const auto& tp = fig1_Tprime();
  auto trees = decompose(tp);
  const int m3_tree = trees.tree_of[tp.index_of("m3")];
  Transition s = make_sub(tp, SubSpec{nodes_of(tp, {"m1"}), 0, m3_tree, true});
  EXPECT_EQ(s.size(), 4);
  EXPECT_EQ(s.index_of("m3"), -1);
  EXPECT_EQ(change_sets(s).delta_labels[label(s, "Phos")], nodes_of(s, {"m1"}));
  EXPECT_TRUE(change_less(s, tp));
  EXPECT_TRUE(change_less(fig1_T(), s));
  Transition kept = make_sub(tp, SubSpec{nodes_of(tp, {"m1"}), 0, m3_tree, false});
  EXPECT_EQ(kept.size(), 5);
  EXPECT_FALSE(is_supported(kept));
  EXPECT_THROW(make_sub(tp, SubSpec{nodes_of(tp, {"m1"}), 0, trees.tree_of[tp.index_of("r1")], false}), UsageError);
}

TEST(Change, EnumerateSubsOfTprime) {
  const auto& tp = fig1_Tprime();
  auto subs = enumerate_subs(tp, nodes_of(tp, {"m1"}), 0);
  EXPECT_EQ(subs.size(), 3u);
  for (const auto& s : subs) EXPECT_TRUE(change_leq(s, tp));
  EXPECT_TRUE(enumerate_subs(tp, tp.all(), 0).empty());
}

TEST(Change, SubsOfNoChangeTransition) {
  Transition t = no_change();
  for (const auto& s : enumerate_subs(t, NodeSet{}, 0)) EXPECT_EQ(s, t);
}

TEST(Change, ExternalDeletionKeptNextToChangingTree) {
  // a-b deleted link; b's tree changes internally, so clearing a's tree keeps the deletion.
  auto t = external_deletion();
  t.post_present.set(1, false);
  auto trees = decompose(t);
  Transition s = make_sub(t, SubSpec{NodeSet{}, 0, trees.tree_of[0], false});
  EXPECT_FALSE(s.post_links.has(0, 1));
  Transition u = make_sub(t, SubSpec{NodeSet{}, 0, trees.tree_of[1], false});
  EXPECT_TRUE(u.post_links.has(0, 1));
}
