#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "abc/attributes.hpp"
#include "abc/parser.hpp"
#include "abc/printer.hpp"
#include "random_ast.hpp"

using namespace abc;
using abc::testing::Gen;
using abc::testing::closed_pred;

namespace {

// Oracle for the restriction property: replaces every occurrence of the name
// `from` in the range of the environment with `to`.
AttributeEnv remap(const AttributeEnv& g, const std::string& from, const Value& to) {
  std::map<std::string, Value> m;
  for (const auto& [a, v] : g.bindings()) m[a] = v == Value::name(from) ? to : v;
  return AttributeEnv(std::move(m));
}

bool negation_free(const Predicate& p) {
  return std::visit(overloaded{[](const pred::Not&) { return false; },
                               [](const pred::And& a) { return negation_free(a.lhs) && negation_free(a.rhs); },
                               [](const pred::Or& o) { return negation_free(o.lhs) && negation_free(o.rhs); },
                               [](const auto&) { return true; }},
                    p.node().v);
}


}  // namespace

TEST(RoundTrip, RandomPrograms) {
  Gen g(2024);
  for (int i = 0; i < 1000; ++i) {
    const Program p = g.program();
    const std::string text = pretty(p);
    Program q;
    ASSERT_NO_THROW(q = parse_program(text)) << text;
    ASSERT_EQ(pretty(q), text);
    ASSERT_TRUE(q == p) << text;
  }
}

TEST(RoundTrip, Corpus) {
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(ABC_CORPUS_DIR)) {
    if (e.path().extension() != ".abc") continue;
    ++files;
    std::ifstream in(e.path());
    std::stringstream ss;
    ss << in.rdbuf();
    const Program p = parse_program(ss.str());
    const std::string text = pretty(p);
    EXPECT_EQ(pretty(parse_program(text)), text) << e.path();
    EXPECT_TRUE(parse_program(text) == p) << e.path();
  }
  EXPECT_GE(files, 6u);
}

// Satisfaction of Π▶x does not depend on which fresh name x stands for.
TEST(RestrictionProperty, InvariantUnderRenamingToAFreshName) {
  Gen g(7);
  const std::vector<std::string> xs{"m", "n", "k"};
  int trials = 0, failures = 0;
  for (; trials < 20000; ++trials) {
    const Predicate p = closed_pred(g, 3);
    const std::string x = xs[static_cast<std::size_t>(g.pick(3))];
    const AttributeEnv gamma = g.env();
    const Value v = Value::name("fresh" + std::to_string(g.pick(5)));
    const Predicate r = restrict_predicate(p, x);
    if (satisfies(gamma, r) != satisfies(remap(gamma, x, v), r)) ++failures;
  }
  EXPECT_GE(trials, 10000);
  EXPECT_EQ(failures, 0);
}

TEST(RestrictionProperty, IdempotentPerName) {
  Gen g(8);
  for (int i = 0; i < 2000; ++i) {
    const Predicate p = closed_pred(g, 3);
    const Predicate once = restrict_predicate(p, "m");
    EXPECT_EQ(restrict_predicate(once, "m"), once);
  }
}

TEST(RestrictionProperty, NegationFreeRestrictionOnlyWeakens) {
  Gen g(9);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const Predicate p = closed_pred(g, 3);
    if (!negation_free(p)) continue;
    ++checked;
    const AttributeEnv gamma = g.env();
    if (satisfies(gamma, restrict_predicate(p, "k"))) EXPECT_TRUE(satisfies(gamma, p)) << pretty(p);
  }
  EXPECT_GT(checked, 500);
}

TEST(RestrictionProperty, NegationCanStrengthen) {
  const Predicate p = parse_predicate("not (a = 'm')", {"a"});
  const AttributeEnv gamma(std::map<std::string, Value>{{"a", Value::name("m")}});
  EXPECT_FALSE(satisfies(gamma, p));
  EXPECT_TRUE(satisfies(gamma, restrict_predicate(p, "m")));
}

TEST(RestrictionProperty, NonFreshTargetCanBreakIt) {
  // renaming onto a value already present merges two attributes
  const Predicate p = parse_predicate("a = b", {"a", "b"});
  const AttributeEnv gamma(std::map<std::string, Value>{{"a", Value::name("m")}, {"b", Value::name("n")}});
  const Predicate r = restrict_predicate(p, "m");
  EXPECT_NE(satisfies(gamma, r), satisfies(remap(gamma, "m", Value::name("n")), r));
}
