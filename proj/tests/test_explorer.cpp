#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "abc/explorer.hpp"
#include "abc/parser.hpp"
#include "abc/printer.hpp"

using namespace abc;

namespace {

Program load(const std::string& file) {
  std::ifstream in(std::filesystem::path(ABC_CORPUS_DIR) / file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

Lts explore(const Program& p, const Bounds& b = {}, std::uint64_t seed = 0) {
  return build_lts(p.main, p.definitions, make_universe(p), b, seed);
}

std::set<std::string> labels_from(const Lts& lts, std::size_t s) {
  std::set<std::string> out;
  for (const auto& t : lts.transitions)
    if (t.src == s) out.insert(pretty(lts.labels[t.label]));
  return out;
}

}  // namespace

TEST(Lts, InertComponent) {
  Lts lts = explore(parse_program("{a := 1}:0"));
  EXPECT_EQ(lts.states.size(), 1u);
  EXPECT_TRUE(lts.transitions.empty());
  EXPECT_FALSE(lts.truncated);
}

TEST(Lts, SingleSilentMove) {
  Lts lts = explore(parse_program("{a := 1}:()@(ff).0"));
  ASSERT_EQ(lts.states.size(), 2u);
  ASSERT_EQ(lts.transitions.size(), 1u);
  EXPECT_TRUE(lts.labels[lts.transitions[0].label].is_tau());
}

TEST(Lts, LoopsCloseOnKnownStates) {
  Lts lts = explore(parse_program("def K = ()@(ff).K\n{}:K"));
  ASSERT_EQ(lts.states.size(), 1u);
  ASSERT_EQ(lts.transitions.size(), 1u);
  EXPECT_EQ(lts.transitions[0].dst, lts.initial);
}

TEST(Lts, StateBoundTruncates) {
  Lts lts = explore(parse_program("def K(n) = ()@(ff).K(n + 1)\n{}:K(0)"), Bounds{5});
  EXPECT_TRUE(lts.truncated);
  EXPECT_LE(lts.states.size(), 5u);
}

TEST(Lts, DepthBoundTruncates) {
  Bounds b;
  b.max_depth = 3;
  Lts lts = explore(parse_program("def K(n) = ()@(ff).K(n + 1)\n{}:K(0)"), b);
  EXPECT_TRUE(lts.truncated);
  EXPECT_EQ(*std::max_element(lts.depth.begin(), lts.depth.end()), 3);
}

TEST(Lts, ChannelExampleSelectsBranch) {
  Lts lts = explore(load("channels.abc"));
  bool c_seen = false, d_seen = false;
  for (const auto& t : lts.transitions) {
    const auto& l = lts.labels[t.label];
    if (!l.is_out()) continue;
    const std::string next = pretty(lts.states[t.dst]);
    if (l.values[1] == Value::name("c")) {
      c_seen = true;
      EXPECT_EQ(next, "{}:0 || {}:OnA('c')");
    }
    if (l.values[1] == Value::name("d")) {
      d_seen = true;
      EXPECT_EQ(next, "{}:0 || {}:OnB('d')");
    }
  }
  EXPECT_TRUE(c_seen && d_seen);
}

TEST(Lts, AdaptationNeedsTheUpdateFirst) {
  Lts lts = explore(load("adaptation.abc"));
  // sending first: the receiver (threshold 2) discards 3
  // updating first: the threshold is 5 and the receiver takes the message
  bool received = false;
  for (const auto& s : lts.states) {
    const std::string text = pretty(s);
    if (text.find("(y<=this.a)") == std::string::npos && text.find("{b := 3}:0") != std::string::npos) received = true;
  }
  EXPECT_TRUE(received);
  EXPECT_EQ(labels_from(lts, lts.initial), (std::set<std::string>{"tau", "out (tt)('msg', 3)"}));
}

TEST(Lts, DeterministicForASeed) {
  const Program p = load("robotics.abc");
  Bounds b;
  b.max_states = 2000;
  EXPECT_EQ(to_text(explore(p, b, 7)), to_text(explore(p, b, 7)));
  EXPECT_EQ(to_json(explore(p, b, 7)).dump(), to_json(explore(p, b, 7)).dump());
}

TEST(Lts, EveryTransitionReplays) {
  const Program p = load("robot_steps.abc");
  Lts lts = explore(p);
  ASSERT_FALSE(lts.truncated);
  std::vector<std::size_t> all(lts.transitions.size());
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t t : all) EXPECT_TRUE(replay(lts, {t}, p.definitions)) << t;
}

TEST(Lts, CompleteUpToBounds) {
  const Program p = load("groups.abc");
  Lts lts = explore(p);
  ASSERT_FALSE(lts.truncated);
  const auto edges = lts.out_edges();
  for (std::size_t s = 0; s < lts.states.size(); ++s) {
    Rng rng(lts.seed ^ detail::fnv1a(lts.keys[s]));
    auto r = system_steps(lts.states[s], p.definitions, lts.universe, {}, &rng);
    std::set<std::pair<CanonicalLabel, std::string>> fresh, recorded;
    for (const auto& st : r.steps) fresh.emplace(canonical_label(st.label, lts.universe), canonical_key(st.next));
    for (std::size_t t : edges[s])
      recorded.emplace(lts.canonical[lts.transitions[t].label], lts.keys[lts.transitions[t].dst]);
    EXPECT_EQ(fresh, recorded) << s;
  }
}

TEST(Lts, InputEdgesFromMessageUniverse) {
  const Program p = parse_program("{}:(x = 'm')(x).('ok')@(tt).0");
  const Universe u = make_universe(p);
  MessageUniverse mu = message_universe(p, u);
  Lts lts = build_lts(p.main, p.definitions, u, {}, 0, &mu);
  bool input_to_ok = false;
  for (const auto& t : lts.transitions)
    if (lts.labels[t.label].is_in() && pretty(lts.states[t.dst]) == "{}:('ok')@(tt).0") input_to_ok = true;
  EXPECT_TRUE(input_to_ok);
}

TEST(Trace, ZeroStepsIsEmpty) {
  const Program p = load("robotics.abc");
  EXPECT_TRUE(trace(p.main, p.definitions, make_universe(p), 0, 1).empty());
}

TEST(Trace, SeededRunsAgree) {
  const Program p = load("robotics.abc");
  const Universe u = make_universe(p);
  auto a = trace(p.main, p.definitions, u, 20, 11);
  auto b = trace(p.main, p.definitions, u, 20, 11);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(pretty(a[i].next), pretty(b[i].next));
}

TEST(Trace, InteractiveChoicesReplay) {
  const Program p = load("channels.abc");
  const Universe u = make_universe(p);
  std::istringstream in("7\n1\n0\n");
  std::ostringstream out;
  auto t = trace(p.main, p.definitions, u, 5, 0, TracePolicy::Interactive, &in, &out);
  ASSERT_EQ(t.size(), 1u);  // 'b' branch, after which OnB(d) is inert
  EXPECT_EQ(pretty(t[0].next), "{}:0 || {}:OnB('d')");
  EXPECT_NE(out.str().find("invalid choice"), std::string::npos);
  std::istringstream none("");
  EXPECT_TRUE(trace(p.main, p.definitions, u, 5, 0, TracePolicy::Interactive, &none, nullptr).empty());
}

TEST(Reach, TrivialAndUnreachable) {
  const Program p = parse_program("{role := 'x'}:0");
  Lts lts = explore(p);
  auto w = reachable(lts, some_component_has("role", Value::name("x")));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->state, lts.initial);
  EXPECT_TRUE(w->path.empty());
  EXPECT_FALSE(reachable(lts, some_component_has("role", Value::name("y"))));
}

TEST(Reach, GroupJoinBeforeSend) {
  const Program p = load("groups.abc");
  Lts lts = explore(p);
  // component 3 joins group a and then receives the message
  auto w = reachable(lts, [](const System& s) { return pretty(s).find("{group := 'a'}:0 | 0") != std::string::npos; });
  EXPECT_TRUE(w);
}
