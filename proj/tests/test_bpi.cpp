#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "abc/bpi.hpp"
#include "abc/printer.hpp"

using namespace abc;
using namespace abc::bpi;

namespace {

std::vector<std::string> step_strings(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& s : bpi_steps(parse_bpi(text))) out.push_back(pretty(s.label) + " => " + pretty(s.next));
  return out;
}

std::string read(const std::filesystem::path& f) {
  std::ifstream in(f);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(BpiSyntax, PrintParseRoundTrip) {
  for (const char* text : {"nil", "a<v>.nil", "a(x, y).x<y>.nil", "tau.a<b>.nil + b(x).nil", "nu x (a<x>.nil | x(y).nil)",
                           "rec A(x).(x<x>.A(x) + tau.nil) @ (a)", "a<v>.nil | b<w>.nil | c<u>.nil"}) {
    Term t = parse_bpi(text);
    EXPECT_EQ(pretty(t), text);
    EXPECT_EQ(pretty(parse_bpi(pretty(t))), pretty(t));
  }
  EXPECT_EQ(pretty(parse_bpi("a<v>")), "a<v>.nil");
}

TEST(BpiSyntax, ValidationRejectsIllFormedTerms) {
  EXPECT_THROW(parse_bpi("a<v>.nil + (b<v>.nil | c<v>.nil)"), BpiError);  // parallel under choice
  EXPECT_THROW(parse_bpi("rec A(x).a<x>.A(x) @ (b)"), BpiError);         // a free in the body
  EXPECT_THROW(parse_bpi("rec A(x).x<x>.A(x, x) @ (b)"), BpiError);      // arity
  EXPECT_THROW(parse_bpi("a(a).nil"), BpiError);
  EXPECT_EQ(pretty(parse_bpi("A(x)")), "A(x).nil");  // an input on channel A, not a call
  EXPECT_THROW(parse_bpi("a<v>.nil |"), ParseError);
}

TEST(BpiSteps, BroadcastReachesEveryListener) {
  auto s = step_strings("a<v>.nil | a(x).x<x>.nil | a(y).b<y>.nil");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], "a<v> => nil | v<v>.nil | b<v>.nil");
}

TEST(BpiSteps, ArityMismatchDiscards) {
  auto s = step_strings("a<v, w>.nil | a(x).x<x>.nil | a(x, y).y<x>.nil");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], "a<v, w> => nil | a(x).x<x>.nil | w<v>.nil");
}

TEST(BpiSteps, RestrictedChannelIsSilent) {
  auto s = step_strings("nu a (a<v>.nil | a(x).x<x>.nil)");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].substr(0, 3), "tau");
}

TEST(BpiSteps, ScopeOpening) {
  auto steps = bpi_steps(parse_bpi("nu x a<x>.x<x>.nil"));
  ASSERT_EQ(steps.size(), 1u);
  ASSERT_EQ(steps[0].label.bound.size(), 1u);
  EXPECT_EQ(steps[0].label.values, steps[0].label.bound);
  EXPECT_EQ(pretty(steps[0].next), steps[0].label.bound[0] + "<" + steps[0].label.bound[0] + ">.nil");
}

TEST(BpiSteps, ChoiceAndRecursion) {
  EXPECT_EQ(step_strings("a<v>.nil + tau.nil").size(), 2u);
  auto s = step_strings("rec A(x).x<x>.A(x) @ (a)");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], "a<a> => rec A(x).x<x>.A(x) @ (a)");
}

TEST(BpiCanonical, AlphaEquivalence) {
  EXPECT_EQ(canonical_key(parse_bpi("nu x a<x>.nil")), canonical_key(parse_bpi("nu y a<y>.nil")));
  EXPECT_EQ(canonical_key(parse_bpi("a(x).x<x>.nil")), canonical_key(parse_bpi("a(z).z<z>.nil")));
  EXPECT_NE(canonical_key(parse_bpi("a(x).x<x>.nil")), canonical_key(parse_bpi("a(x).b<x>.nil")));
}

TEST(Encoding, OutputBecomesChannelTaggedBroadcast) {
  EXPECT_EQ(pretty(encode(parse_bpi("a<v>.nil"))), "system: {}:('a', 'v')@('a'='a').0\n");
  EXPECT_EQ(pretty(encode(parse_bpi("tau.nil"))), "system: {}:()@(ff).0\n");
}

TEST(Encoding, ParallelBecomesComponents) {
  Program p = encode(parse_bpi("a<v>.nil | b<w>.nil"));
  EXPECT_NE(pretty(p).find("||"), std::string::npos);
}

TEST(Correspondence, SmallTerms) {
  for (const char* text : {"a<v>.nil | a(x).x<x>.nil", "nu x (a<x>.nil | a(y).y<y>.nil)", "tau.a<v>.nil + b<w>.nil",
                           "rec A(x).(x<x>.A(x) + tau.nil) @ (a)"}) {
    auto r = correspondence_check(parse_bpi(text), 4);
    EXPECT_TRUE(r.ok()) << text << ": " << (r.details.empty() ? "" : r.details[0]);
    EXPECT_GT(r.pairs, 0u);
  }
}

TEST(Correspondence, WholeCorpusDepthFive) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(ABC_CORPUS_DIR) / "bpi")) {
    if (e.path().extension() != ".bpi") continue;
    ++files;
    auto r = correspondence_check(parse_bpi(read(e.path())), 5, 1);
    EXPECT_TRUE(r.ok()) << e.path() << ": " << (r.details.empty() ? "" : r.details[0]);
  }
  EXPECT_GE(files, 20u);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(60));
}
