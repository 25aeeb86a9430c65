#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flb/enumerate.hpp"

using namespace flb;
using namespace flb::test;

TEST(Enumerate, SingleNodeWithoutChildrenGolden) {
  // One node: presence in {pre, post, both} x pre self-link x post self-link = 12 classes.
  auto sig = make_sig("height 0\nchildren\nlabels\nnames\n");
  auto ms = enumerate_models(sig, 1, f_true());
  EXPECT_EQ(ms.size(), 12u);
  for (const auto& m : ms) {
    EXPECT_TRUE(is_valid_flb(m));
    EXPECT_TRUE(is_supported(m));
  }
}

TEST(Enumerate, LabelledCountMatchesFormula) {
  // Labelled structures on 2 nodes, no children: 3^2 presence x 5 partial matchings with self
  // pairs ({}, {00}, {11}, {00,11}, {01}) for pre and post.
  auto sig = make_sig("height 0\nchildren\nlabels\nnames\n");
  long n1 = 0, n2 = 0;
  for_each_structure(sig, 2, Projection::full(*sig), [&](const Transition& t) {
    (t.size() == 1 ? n1 : n2)++;
    return true;
  });
  EXPECT_EQ(n1, 12);
  EXPECT_EQ(n2, 9 * 5 * 5);
}

TEST(Enumerate, ContradictionHasNoModels) {
  auto sig = make_sig("height 1\nchildren f\nlabels\nnames\n");
  EXPECT_TRUE(enumerate_models(sig, 3, parse_formula("exists x. !P(x) & !P*(x)", *sig)).empty());
}

TEST(Enumerate, ZeroNodesGivesNothing) {
  auto sig = make_sig("height 0\nchildren\nlabels\nnames\n");
  EXPECT_TRUE(enumerate_models(sig, 0, f_true()).empty());
}

TEST(Enumerate, ResultsAreCanonicalAndDistinct) {
  auto sig = make_sig("height 1\nchildren f\nlabels A\nnames\n");
  auto f = parse_formula("exists x. A*(x) & !A(x)", *sig);
  auto ms = enumerate_models(sig, 2, f, Projection::of(*f, *sig));
  std::set<std::string> keys;
  for (const auto& m : ms) {
    EXPECT_TRUE(eval(m, {}, f));
    EXPECT_TRUE(keys.insert(canonical_key(m)).second);
  }
  EXPECT_FALSE(ms.empty());
}

TEST(Enumerate, OversizedSpaceThrows) {
  const auto& kf = fig1();
  EXPECT_THROW(enumerate_models(kf.sig, 7, f_true()), BudgetExceeded);
}

TEST(Enumerate, TreeShapes) {
  // Height 1 with two child functions: root alone, root+f1, root+f2, root+both.
  EXPECT_EQ(tree_shapes(*fig1().sig).size(), 4u);
  EXPECT_EQ(template_size(*fig1().sig), 3);
  auto deep = make_sig("height 2\nchildren f\nlabels\nnames\n");
  EXPECT_EQ(tree_shapes(*deep).size(), 3u);
}
