#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abc/parser.hpp"
#include "abc/printer.hpp"
#include "abc/system.hpp"

using namespace abc;

namespace {

Program load(const std::string& file) {
  std::ifstream in(std::filesystem::path(ABC_CORPUS_DIR) / file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

std::vector<SystemStep> steps_of(const Program& p, const StepOptions& opts = {}) {
  return system_steps(p.main, p.definitions, make_universe(p), opts).steps;
}

std::vector<std::string> printed(const std::vector<SystemStep>& steps) {
  std::vector<std::string> out;
  for (const auto& s : steps) out.push_back(pretty(s.label) + " => " + pretty(s.next));
  return out;
}

// Collects the components of a parallel composition left to right.
void components(const System& s, std::vector<System>& out) {
  if (auto* p = std::get_if<sys::Par>(&s.node().v)) {
    components(p->lhs, out);
    components(p->rhs, out);
  } else {
    out.push_back(s);
  }
}

}  // namespace

TEST(Steps, FalsePredicateIsSilent) {
  auto steps = steps_of(parse_program("{}:()@(ff).0"));
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_TRUE(steps[0].label.is_tau());
  // a predicate that is ff by meaning only, too
  auto s2 = steps_of(parse_program("attrs: a\n{}:()@(a = 1 and a = 2).0"));
  ASSERT_EQ(s2.size(), 1u);
  EXPECT_TRUE(s2[0].label.is_tau());
}

TEST(Steps, BroadcastReachesAllMatchingReceivers) {
  Program p = parse_program(
      "{}:('m')@(tt).0 || {}:(x = 'm')(x).('r1')@(tt).0 || {}:(x = 'n')(x).0 || {}:(x = 'm')(x).('r3')@(tt).0");
  auto steps = steps_of(p);
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(pretty(steps[0].next), "{}:0 || {}:('r1')@(tt).0 || {}:(x='n')(x).0 || {}:('r3')@(tt).0");
}

TEST(Steps, NonDeterministicReceiversMultiplyOutcomes) {
  Program p = parse_program("{}:('m')@(tt).0 || {}:(x = 'm')(x).('a')@(tt).0 + (x = 'm')(x).('b')@(tt).0");
  EXPECT_EQ(steps_of(p).size(), 2u);
}

TEST(Restriction, PrivateChannelHidesCompletely) {
  // predicate mentions k only: restricted to ff, the output becomes silent
  Program p = parse_program("nu k ({}:('k', 'm')@('k' = 'k').0 || {}:(y = 'k')(y, z).0)");
  auto steps = steps_of(p);
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_TRUE(steps[0].label.is_tau());
}

TEST(Restriction, PartialHidingKeepsTheRest) {
  Program p = parse_program("attrs: a\nnu k {}:('m')@(a = 'k' or a = 1).0");
  auto steps = steps_of(p);
  ASSERT_EQ(steps.size(), 1u);
  ASSERT_TRUE(steps[0].label.is_out());
  EXPECT_EQ(pretty(steps[0].label.pred), "ff or a=1");
  EXPECT_TRUE(steps[0].label.bound.empty());
}

TEST(Restriction, ScopeOpensWhenTheNameIsSent) {
  Program p = parse_program("nu k {}:('k')@(tt).('k')@(tt).0 || {}:(x = 'c')(x).0");
  auto steps = steps_of(p);
  ASSERT_EQ(steps.size(), 1u);
  ASSERT_TRUE(steps[0].label.is_out());
  EXPECT_EQ(steps[0].label.bound, std::vector<std::string>{"k"});
  EXPECT_EQ(pretty(steps[0].next), "{}:('k')@(tt).0 || {}:(x='c')(x).0");
}

TEST(Restriction, OpenedNameIsRenamedAwayFromFreeNames) {
  Program p = parse_program("nu k {}:('k')@(tt).0 || {}:('k')@(tt).0");
  auto steps = steps_of(p);
  ASSERT_EQ(steps.size(), 2u);
  const auto& opened = steps[0].label.bound;
  ASSERT_EQ(opened.size(), 1u);
  EXPECT_NE(opened[0], "k");
}

TEST(Restriction, ReceiverBinderIsRenamedToAvoidCapture) {
  Program p = parse_program("{}:('k')@(tt).0 || nu k {}:(x = x)(x).(x)@(tt).('k')@(tt).0");
  auto steps = steps_of(p);
  ASSERT_EQ(steps.size(), 1u);
  // the received free k and the private k are different names afterwards
  std::vector<System> comps;
  components(steps[0].next, comps);
  const auto& nu = std::get<sys::Nu>(comps[1].node().v);
  EXPECT_NE(nu.name, "k");
  EXPECT_TRUE(free_names(steps[0].next).count("k"));
}

TEST(Replication, SpawnsUpToTheBound) {
  Program p = parse_program("!{}:('m')@(tt).0");
  auto steps = steps_of(p, StepOptions{1});
  ASSERT_EQ(steps.size(), 1u);
  auto next = system_steps(steps[0].next, {}, make_universe(p), StepOptions{1});
  EXPECT_TRUE(next.truncated);
  EXPECT_TRUE(next.steps.empty());
}

TEST(Inputs, ExternalMessageToWholeSystem) {
  Program p = parse_program("{role := 'a'}:(x = 'm')(x).('ok')@(tt).0 || {role := 'b'}:(x = 'm')(x).0");
  auto outs = external_input_steps(p.main, p.definitions, make_universe(p),
                                   parse_predicate("role = 'a'", {"role"}), {Value::name("m")});
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(pretty(outs[0]), "{role := 'a'}:('ok')@(tt).0 || {role := 'b'}:(x='m')(x).0");
}

TEST(Canonical, AlphaEquivalentSystemsShareAKey) {
  System a = parse_program("nu k {}:(x = 'k')(x).0").main;
  System b = parse_program("nu j {}:(y = 'j')(y).0").main;
  EXPECT_EQ(canonical_key(a), canonical_key(b));
  System c = parse_program("nu j {}:(y = 'k')(y).0").main;
  EXPECT_NE(canonical_key(a), canonical_key(c));
}

// Robot 2 queries, robot 1 (rescuer) answers the query, robots 3 and 4 discard.
TEST(Robot, QueryIsReceivedByTheRescuerOnly) {
  const Program p = load("robot_steps.abc");
  std::vector<System> before;
  components(p.main, before);
  bool found = false;
  for (const auto& s : steps_of(p)) {
    if (!s.label.is_out() || s.label.values.empty() || s.label.values[0] != Value::integer(2)) continue;
    found = true;
    EXPECT_EQ(pretty(s.label), "out (role='rescuer' or role='helping')(2, 'qry', 'explorer')");
    std::vector<System> after;
    components(s.next, after);
    ASSERT_EQ(after.size(), 4u);
    const auto& r1 = std::get<sys::Comp>(after[0].node().v);
    EXPECT_EQ(pretty(r1.proc), "(this.id, 'ack')@(id=2).0 | P3");
    EXPECT_EQ(after[2], before[2]);
    EXPECT_EQ(after[3], before[3]);
  }
  EXPECT_TRUE(found);
}

TEST(Robot, ChargerMessageIsDiscardedByEveryone) {
  const Program p = load("robot_steps.abc");
  auto outs = external_input_steps(p.main, p.definitions, make_universe(p),
                                   parse_predicate("role = 'explorer'", {"role"}), {Value::name("info")});
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0], p.main);
}

TEST(PubSub, OnlyMatchingSubscribersAdvance) {
  const Program p = load("pubsub.abc");
  auto steps = steps_of(p);
  ASSERT_EQ(steps.size(), 1u);
  std::vector<System> after;
  components(steps[0].next, after);
  ASSERT_EQ(after.size(), 5u);
  std::vector<System> before;
  components(p.main, before);
  for (std::size_t i = 1; i < after.size(); ++i) {
    const auto& c = std::get<sys::Comp>(before[i].node().v);
    const bool subscribed = c.env.lookup("subscription") == Value::name("news");
    EXPECT_EQ(after[i] != before[i], subscribed) << i;
  }
}

TEST(Channels, ValueSelectsTheBranch) {
  auto out = printed(steps_of(load("channels.abc")));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], "out (tt)('a', 'c') => {}:0 || {}:OnA('c')");
  EXPECT_EQ(out[1], "out (tt)('b', 'd') => {}:0 || {}:OnB('d')");
}
