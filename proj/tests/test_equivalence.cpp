#include <gtest/gtest.h>

#include "abc/equivalence.hpp"
#include "abc/parser.hpp"
#include "abc/printer.hpp"

using namespace abc;

namespace {

Verdict compare(const std::string& a, const std::string& b, bool weak, bool inputs = true) {
  BisimOptions o;
  o.weak = weak;
  o.inputs = inputs;
  return bisim_programs(parse_program(a), parse_program(b), o);
}

Lts explore(const std::string& text) {
  Program p = parse_program(text);
  return build_lts(p.main, p.definitions, make_universe(p));
}

}  // namespace

TEST(Barbs, StrongAndWeak) {
  Lts lts = explore("{}:()@(ff).('m')@(tt).0");
  EXPECT_TRUE(barbs(lts, lts.initial, false).empty());
  EXPECT_EQ(barbs(lts, lts.initial, true).size(), 1u);
}

TEST(Barbs, EquivalentPredicatesGiveOneBarb) {
  Lts lts = explore("attrs: a\n{}:('m')@(a = 1).0 + ('n')@(1 = a and a = a).0");
  EXPECT_EQ(barbs(lts, lts.initial, false).size(), 1u);
}

TEST(Bisim, SilentSendIsWeaklyInvisible) {
  EXPECT_TRUE(compare("{}:()@(ff).0", "{}:0", true).equivalent);
  Verdict strong = compare("{}:()@(ff).0", "{}:0", false);
  EXPECT_FALSE(strong.equivalent);
  ASSERT_FALSE(strong.witness.empty());
  EXPECT_EQ(strong.witness[0].side, 0);
  EXPECT_EQ(strong.witness[0].label, "tau");
}

TEST(Bisim, PredicatesComparedByMeaning) {
  EXPECT_TRUE(compare("attrs: a\n{}:('m')@(a = 1 or a = 1).0", "attrs: a\n{}:('m')@(1 = a).0", false).equivalent);
  EXPECT_FALSE(compare("attrs: a\n{}:('m')@(a = 1).0", "attrs: a\n{}:('m')@(a = 2).0", false).equivalent);
}

TEST(Bisim, ValuesMatter) {
  Verdict v = compare("{}:('m')@(tt).0", "{}:('n')@(tt).0", true);
  EXPECT_FALSE(v.equivalent);
  ASSERT_FALSE(v.witness.empty());
}

TEST(Bisim, ChoiceDistributionDistinguishes) {
  // a.(b + c) versus a.b + a.c
  const std::string l = "{}:('a')@(tt).(('b')@(tt).0 + ('c')@(tt).0)";
  const std::string r = "{}:('a')@(tt).('b')@(tt).0 + ('a')@(tt).('c')@(tt).0";
  Verdict v = compare(l, r, false);
  EXPECT_FALSE(v.equivalent);
  EXPECT_GE(v.witness.size(), 2u);
}

TEST(Bisim, InputsDistinguishReceivers) {
  EXPECT_FALSE(compare("{}:(x = 'm')(x).('r')@(tt).0", "{}:0", true).equivalent);
  EXPECT_TRUE(compare("{}:(x = 'm')(x).('r')@(tt).0", "{}:0", true, false).equivalent);
}

TEST(Bisim, PrivateExchangeIsSilent) {
  EXPECT_TRUE(compare("nu k ({}:('k', 'm')@('k' = 'k').0 || {}:(y = 'k')(y, z).0)", "{}:0", true).equivalent);
}

TEST(Bisim, WeakRelatesTauPrefixedChoice) {
  // τ.a + a ≈ τ.a, but τ.a + b is not weakly equivalent to a + b
  EXPECT_TRUE(compare("{}:()@(ff).('a')@(tt).0 + ('a')@(tt).0", "{}:()@(ff).('a')@(tt).0", true).equivalent);
  EXPECT_FALSE(compare("{}:()@(ff).('a')@(tt).0 + ('b')@(tt).0", "{}:('a')@(tt).0 + ('b')@(tt).0", true).equivalent);
}

TEST(Bisim, TruncationMarksTheVerdictBounded) {
  BisimOptions o;
  o.bounds.max_states = 3;
  const Program p = parse_program("def K(n) = ()@(ff).K(n + 1)\n{}:K(0)");
  EXPECT_TRUE(bisim_programs(p, p, o).bounded);
}

TEST(Congruence, SilentSendInContexts) {
  std::vector<EquivalentPair> pairs{{parse_program("{}:()@(ff).0"), parse_program("{}:0")},
                                    {parse_program("nu k {}:('k')@('k' = 'k').0"), parse_program("{}:0")}};
  std::vector<System> ctx{parse_program("{}:('m')@(tt).0").main, parse_program("{}:(x = 'm')(x).0").main};
  CongruenceReport r = congruence_sample(pairs, ctx, 20, 3);
  EXPECT_EQ(r.trials, 20u);
  EXPECT_EQ(r.violations, 0u) << (r.details.empty() ? "" : r.details[0]);
}

TEST(Congruence, ReplicationBoundIsInconclusiveNotAViolation) {
  // τ-steps let the left side spawn extra listeners below the bound
  const Program l = parse_program("system: !({}:(x = 'a')(x).('b')@(tt).0 || {}:()@(ff).0)");
  const Program r = parse_program("system: !({}:(x = 'a')(x).('b')@(tt).0 || {}:0)");
  Verdict v = bisim_programs(l, r, BisimOptions{});
  EXPECT_TRUE(v.bounded);
  std::vector<EquivalentPair> pairs{{parse_program("{}:()@(ff).0"), parse_program("{}:0")}};
  std::vector<System> ctx{parse_program("{}:(x = 'a')(x).('b')@(tt).0").main};
  CongruenceReport rep = congruence_sample(pairs, ctx, 40, 1);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_EQ(rep.trials, 40u);
}
