#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abc/component.hpp"
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

const std::set<std::string> kAttrs = {"a", "b", "role", "id", "group"};
Process P(const std::string& s) { return parse_process(s, kAttrs); }
Predicate Pr(const std::string& s) { return parse_predicate(s, kAttrs); }
AttributeEnv env(std::map<std::string, Value> m) { return AttributeEnv(std::move(m)); }

}  // namespace

TEST(Outputs, BroadcastEvaluatesValuesAndClosesPredicate) {
  auto steps = output_steps(env({{"a", Value::integer(2)}}), P("(this.a + 1, 'm')@(a = this.a).0"), {});
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(pretty(steps[0].pred), "a=2");
  EXPECT_EQ(steps[0].values, (std::vector<Value>{Value::integer(3), Value::name("m")}));
  EXPECT_EQ(steps[0].proc, Process::nil());
}

TEST(Outputs, UndefinedValueBlocksTheOutput) {
  EXPECT_TRUE(output_steps(AttributeEnv{}, P("(this.a)@(tt).0"), {}).empty());
}

TEST(Outputs, UpdateAppliesAtomicallyWithTheAction) {
  auto steps = output_steps(env({{"a", Value::integer(1)}}), P("[this.a := 5](this.a)@(tt).0"), {});
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(steps[0].values, std::vector<Value>{Value::integer(5)});
  EXPECT_EQ(steps[0].env.lookup("a"), Value::integer(5));
}

TEST(Outputs, AwarenessGuards) {
  const Process p = P("<this.a = 1>()@(ff).0");
  EXPECT_EQ(output_steps(env({{"a", Value::integer(1)}}), p, {}).size(), 1u);
  EXPECT_TRUE(output_steps(env({{"a", Value::integer(2)}}), p, {}).empty());
}

TEST(Outputs, SumAndInterleaving) {
  auto steps = output_steps(AttributeEnv{}, P("('x')@(tt).0 + ('y')@(tt).0 | ('z')@(tt).0"), {});
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(pretty(steps[0].proc), "0 | ('z')@(tt).0");
  EXPECT_EQ(pretty(steps[2].proc), "('x')@(tt).0 + ('y')@(tt).0 | 0");
}

TEST(Outputs, RecursionUnfoldsWithArguments) {
  Program p = parse_program("def K(n) = (n)@(tt).K(n + 1)\n{}:K(0)");
  const auto& comp = std::get<sys::Comp>(p.main.node().v);
  auto steps = output_steps(comp.env, comp.proc, p.definitions);
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(steps[0].values, std::vector<Value>{Value::integer(0)});
  EXPECT_EQ(pretty(steps[0].proc), "K(0 + 1)");
}

TEST(Outputs, UnguardedRecursionIsAnError) {
  Program p = parse_program("def K = K\n{}:K");
  const auto& comp = std::get<sys::Comp>(p.main.node().v);
  EXPECT_THROW(output_steps(comp.env, comp.proc, p.definitions), SemanticsError);
}

TEST(Delivery, ReceiverChecksBothPredicates) {
  const Process p = P("(x = 'q')(x, y).(y)@(tt).0");
  const auto g = env({{"role", Value::name("r")}});
  const std::vector<Value> msg{Value::name("q"), Value::integer(9)};
  auto ok = deliver(g, p, {}, Pr("role = 'r'"), msg);
  ASSERT_EQ(ok.receives.size(), 1u);
  EXPECT_EQ(pretty(ok.receives[0].second), "(9)@(tt).0");
  EXPECT_TRUE(deliver(g, p, {}, Pr("role = 's'"), msg).discards());                        // sender predicate
  EXPECT_TRUE(deliver(g, p, {}, Predicate::tt(), {Value::name("z"), Value::integer(9)}).discards());  // own predicate
  EXPECT_TRUE(deliver(g, p, {}, Predicate::tt(), {Value::name("q")}).discards());              // arity
}

TEST(Delivery, ReceivingPredicateSeesTheEnvironment) {
  const Process p = P("(y <= this.a)(x, y).0");
  const std::vector<Value> msg{Value::name("m"), Value::integer(3)};
  EXPECT_TRUE(deliver(env({{"a", Value::integer(2)}}), p, {}, Predicate::tt(), msg).discards());
  EXPECT_FALSE(deliver(env({{"a", Value::integer(5)}}), p, {}, Predicate::tt(), msg).discards());
}

TEST(Delivery, DiscardLeavesChoiceAndAwarenessIntact) {
  const Process p = P("<this.a = 1>(x = 'm')(x).0 + ('o')@(tt).0");
  auto d = deliver(env({{"a", Value::integer(2)}}), p, {}, Predicate::tt(), {Value::name("m")});
  EXPECT_TRUE(d.discards());
  auto r = deliver(env({{"a", Value::integer(1)}}), p, {}, Predicate::tt(), {Value::name("m")});
  ASSERT_EQ(r.receives.size(), 1u);
  EXPECT_EQ(r.receives[0].second, Process::nil());
}

TEST(Delivery, ExactlyOneParallelThreadReceives) {
  const Process p = P("(x = 'm')(x).('l')@(tt).0 | (x = 'm')(x).('r')@(tt).0");
  auto d = deliver(AttributeEnv{}, p, {}, Predicate::tt(), {Value::name("m")});
  ASSERT_EQ(d.receives.size(), 2u);
  EXPECT_EQ(pretty(d.receives[0].second), "('l')@(tt).0 | (x='m')(x).('r')@(tt).0");
  EXPECT_EQ(pretty(d.receives[1].second), "(x='m')(x).('l')@(tt).0 | ('r')@(tt).0");
}

TEST(Delivery, UpdatePrefixAppliesBeforeReceiving) {
  const Process p = P("[this.group := 'a'](x = this.group)(x).0");
  auto d = deliver(env({{"group", Value::name("b")}}), p, {}, Predicate::tt(), {Value::name("a")});
  ASSERT_EQ(d.receives.size(), 1u);
  EXPECT_EQ(d.receives[0].first.lookup("group"), Value::name("a"));
}

// Robot running the simplified robot process with id 1 and a perceived victim.
TEST(Robot, PerceivingRobotHasTheUpdateAndTheQuery) {
  const Program prog = load("robot_steps.abc");
  const auto g = env({{"id", Value::integer(1)},
                      {"role", Value::name("explorer")},
                      {"state", Value::name("move")},
                      {"victimPerceived", Value::boolean(true)}});
  auto steps = output_steps(g, Process::call("PR", {}), prog.definitions);
  // two moves of the left thread, one silent move of P3
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(pretty(steps[0].pred), "ff");
  EXPECT_TRUE(steps[0].values.empty());
  EXPECT_EQ(steps[0].env.lookup("state"), Value::name("stop"));
  EXPECT_EQ(steps[0].env.lookup("role"), Value::name("rescuer"));
  EXPECT_EQ(pretty(steps[0].proc), "(y='qry' and z='explorer')(x, y, z).P1(x) | P3");
  EXPECT_EQ(pretty(steps[1].pred), "role='rescuer' or role='helping'");
  EXPECT_EQ(steps[1].values, (std::vector<Value>{Value::integer(1), Value::name("qry"), Value::name("explorer")}));
  EXPECT_EQ(steps[1].env, g);
  EXPECT_EQ(pretty(steps[1].proc), "P2 | P3");
}

TEST(Robot, ExplorerDiscardsChargerInformation) {
  const Program prog = load("robot_steps.abc");
  const auto g = env({{"id", Value::integer(1)},
                      {"role", Value::name("explorer")},
                      {"state", Value::name("move")},
                      {"victimPerceived", Value::boolean(false)}});
  const Process pr = Process::call("PR", {});
  auto d = deliver(g, pr, prog.definitions, Pr("role = 'explorer'"), {Value::name("info")});
  EXPECT_TRUE(d.discards());
}
