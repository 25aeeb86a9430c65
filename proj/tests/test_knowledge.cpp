#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flb/random.hpp"

using namespace flb;
using namespace flb::test;

namespace {
const char* kSig = "signature\nheight 1\nchildren f\nlabels A\nnames S\nend\n";
int error_line(const std::string& text) {
  try {
    load_knowledge(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST(Knowledge, FigureOneFileContents) {
  const auto& kf = fig1();
  EXPECT_EQ(kf.models.size(), 2u);
  EXPECT_EQ(kf.def_order, (std::vector<std::string>{"Observation1", "Observation2", "Obs"}));
  EXPECT_EQ(kf.derivations.size(), 5u);
  EXPECT_EQ(fig1_T().size(), 4);
  EXPECT_EQ(fig1_Tprime().size(), 5);
  EXPECT_TRUE(is_valid_flb(fig1_T()));
  EXPECT_TRUE(is_valid_flb(fig1_Tprime()));
}

TEST(Knowledge, ModelRoundTrip) {
  auto sig = make_sig("height 2\nchildren f g\nlabels A B\nnames S\n");
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Transition t = random_flb(sig, rng);
    auto kf = load_knowledge(save_signature(*sig) + save_model(t, "M"));
    ASSERT_EQ(kf.models.size(), 1u);
    EXPECT_EQ(kf.models[0].t, t) << save_model(t);
  }
}

TEST(Knowledge, SignatureRoundTrip) {
  const auto& kf = fig1();
  auto again = load_knowledge(save_signature(*kf.sig));
  EXPECT_EQ(to_text(*again.sig), to_text(*kf.sig));
}

TEST(Knowledge, Errors) {
  std::string m = "model M\nnodes a b\nend\n";
  EXPECT_EQ(error_line(std::string(kSig) + m + m), 10);
  EXPECT_EQ(error_line(m), 1);
  EXPECT_EQ(error_line(std::string(kSig) + "model M\nnodes a a\nend\n"), 8);
  EXPECT_EQ(error_line(std::string(kSig) + "model M\nnodes a\nedge g a a\nend\n"), 9);
  EXPECT_EQ(error_line(std::string(kSig) + "model M\nnodes a b c\nedge f a b\nedge f a c\nend\n"), 10);
  EXPECT_EQ(error_line(std::string(kSig) + "model M\nnodes a\npre B a\nend\n"), 9);
  EXPECT_EQ(error_line(std::string(kSig) + "model M\nnodes a\npre P a\nnodes b\nend\n"), 10);
  EXPECT_EQ(error_line(std::string(kSig) + "model M\nnodes a\n"), 7);
  EXPECT_EQ(error_line(std::string(kSig) + "def D(x) := A(y)\n"), 7);
  EXPECT_EQ(error_line(std::string(kSig) + "def A(x) := P(x)\n"), 7);
  EXPECT_EQ(error_line(std::string(kSig) + "def D(x) := P(x)\ndef D(x) := P(x)\n"), 8);
  EXPECT_EQ(error_line(std::string(kSig) + "\n\ndef D(x) := P(x) &\n"), 9);
  EXPECT_EQ(error_line(std::string(kSig) + "bogus\n"), 7);
  EXPECT_EQ(error_line(std::string(kSig) + "derivation D\n(dynamic \"P(x\")\nend\n"), 8);
}

TEST(Knowledge, DefinitionsExpand) {
  auto kf = load_knowledge(std::string(kSig) + "def D(x) := A(x) & S(x)\ndef E(y) := exists z. D(z) & Link(y,z)\n");
  auto f = kf.formula("E(x)");
  EXPECT_TRUE(alpha_equal(*f, *kf.formula("exists w. (A(w) & S(w)) & Link(x,w)")));
}

TEST(Knowledge, NonFunctionalLinksLoadButFailValidation) {
  auto kf = load_knowledge(std::string(kSig) + "model M\nnodes a b c\npre P a b c\npre link a b\npre link a c\nend\n");
  EXPECT_FALSE(is_valid_flb(kf.models[0].t));
}
