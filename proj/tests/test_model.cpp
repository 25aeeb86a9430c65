#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flb/random.hpp"
#include "flb/semantics.hpp"
#include "flb/theory.hpp"

using namespace flb;
using namespace flb::test;

namespace {
std::shared_ptr<const Signature> sig2() { return make_sig("height 1\nchildren f1 f2\nlabels\nnames\n"); }

bool has_kind(const std::vector<Violation>& v, ViolationKind k) {
  for (const auto& x : v)
    if (x.kind == k) return true;
  return false;
}
}  // namespace

TEST(Model, FigureOneFixturesAreValid) {
  EXPECT_TRUE(validate_flb(fig1_T()).empty());
  EXPECT_TRUE(validate_flb(fig1_Tprime()).empty());
}

TEST(Model, InDegreeTwoIsAForestViolation) {
  Transition t(sig2(), {"a", "b", "c"});
  t.pre_present = t.post_present = t.all();
  t.child[0][0] = 1;
  t.child[1][2] = 1;
  auto v = validate_flb(t);
  ASSERT_TRUE(has_kind(v, ViolationKind::InDegree));
  for (const auto& x : v)
    if (x.kind == ViolationKind::InDegree) {
      EXPECT_EQ(x.nodes, (std::vector<int>{1, 0, 2}));  // node, then its parents
    }
}

TEST(Model, CycleAndHeightViolations) {
  Transition t(sig2(), {"a", "b"});
  t.child[0][0] = 1;
  t.child[0][1] = 0;
  EXPECT_TRUE(has_kind(validate_flb(t), ViolationKind::Cycle));
  Transition h(sig2(), {"a", "b", "c"});
  h.child[0][0] = 1;
  h.child[0][1] = 2;
  EXPECT_TRUE(has_kind(validate_flb(h), ViolationKind::Height));
}

TEST(Model, PostLinkFunctionality) {
  Transition t(sig2(), {"a", "b", "c"});
  t.post_links.set(0, 1);
  t.post_links.set(0, 2);
  auto v = validate_flb(t);
  ASSERT_TRUE(has_kind(v, ViolationKind::PostLinkFunctionality));
  EXPECT_FALSE(has_kind(v, ViolationKind::PreLinkFunctionality));
  for (const auto& x : v)
    if (x.kind == ViolationKind::PostLinkFunctionality) {
      EXPECT_EQ(x.nodes, (std::vector<int>{0, 1, 2}));  // node, then partners
    }
}

TEST(Model, Support) {
  EXPECT_TRUE(is_supported(fig1_Tprime()));
  Transition t(sig2(), {"a"});
  EXPECT_FALSE(is_supported(t));
  Transition empty(sig2(), {});
  EXPECT_TRUE(is_supported(empty));
}

TEST(Model, Decompose) {
  const auto& t = fig1_T();
  auto d = decompose(t);
  ASSERT_EQ(d.count(), 2);
  EXPECT_EQ(d.vertices(0), nodes_of(t, {"r1", "m1"}));
  EXPECT_EQ(d.vertices(1), nodes_of(t, {"r2", "m2"}));
  EXPECT_EQ(decompose(fig1_Tprime()).count(), 3);
  Transition one(sig2(), {"a"});
  auto d1 = decompose(one);
  ASSERT_EQ(d1.count(), 1);
  EXPECT_EQ(d1.trees[0].root, 0);
  Transition bad(sig2(), {"a", "b"});
  bad.child[0][0] = 1;
  bad.child[0][1] = 0;
  EXPECT_THROW(decompose(bad), UsageError);
}

TEST(Model, ParentIsDerived) {
  const auto& t = fig1_T();
  auto p = t.parents();
  EXPECT_EQ(p[t.index_of("m1")], t.index_of("r1"));
  EXPECT_EQ(p[t.index_of("r1")], t.index_of("r1"));
}

TEST(Model, RestrictToKeepsNamesAndFacts) {
  const auto& t = fig1_Tprime();
  auto r = restrict_to(t, t.all().minus(nodes_of(t, {"m3"})));
  EXPECT_EQ(r.size(), 4);
  EXPECT_EQ(r.index_of("m3"), -1);
  EXPECT_TRUE(r.post_links.has(r.index_of("m1"), r.index_of("m2")));
  EXPECT_TRUE(r.pre_labels[0].has(r.index_of("m1")));
}

TEST(Model, LemmaThreeOneOnRandomStructures) {
  // Oracle: the direct structural check; the theory is evaluated independently.
  auto sig = fig1().sig;
  auto th = theory_formula(*sig);
  Rng rng(7);
  RandomOptions o;
  o.max_nodes = 8;
  for (int i = 0; i < 200; ++i) {
    Transition t = random_structure(sig, rng, o);
    EXPECT_EQ(validate_flb(t).empty(), eval(t, {}, th)) << save_model(t);
  }
}
