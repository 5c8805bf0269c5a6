#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <string>

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(ABC_CLI_PATH) + " " + args + " 2>&1";
  Outcome r;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  const int status = pclose(f);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string corpus(const std::string& f) { return std::string(ABC_CORPUS_DIR) + "/" + f; }

}  // namespace

TEST(Cli, ParsePrintsTheProgram) {
  Outcome r = run("parse " + corpus("channels.abc"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("system:"), std::string::npos);
}

TEST(Cli, ParseErrorsAndUsage) {
  EXPECT_EQ(run("parse /nonexistent/file.abc").code, 3);
  EXPECT_EQ(run("explore").code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
}

TEST(Cli, ExploreIsDeterministic) {
  const std::string args = "explore --seed 5 --max-states 500 " + corpus("robotics.abc");
  Outcome a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("# seed 5", 0), 0u);
  const std::string js = "explore --format structured --seed 5 --max-states 500 " + corpus("robotics.abc");
  EXPECT_EQ(run(js).out, run(js).out);
}

TEST(Cli, TruncatedExploreIsInconclusive) {
  EXPECT_EQ(run("explore --max-states 10 " + corpus("robotics.abc")).code, 2);
  EXPECT_EQ(run("explore " + corpus("channels.abc")).code, 0);
}

TEST(Cli, SeededStepIsDeterministic) {
  const std::string args = "step --seed 3 --steps 25 " + corpus("robotics.abc");
  Outcome a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, BisimExitCodes) {
  EXPECT_EQ(run("bisim " + corpus("channels.abc") + " " + corpus("channels.abc")).code, 0);
  EXPECT_EQ(run("bisim --strong " + corpus("channels.abc") + " " + corpus("pubsub.abc")).code, 1);
}

TEST(Cli, EncodeAndCheck) {
  Outcome e = run("encode " + corpus("bpi/output.bpi"));
  EXPECT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("{}:('a', 'v')@('a'='a').0"), std::string::npos);
  EXPECT_EQ(run("check-encoding --depth 5 " + corpus("bpi/broadcast.bpi")).code, 0);
}

TEST(Cli, ReachFindsTheHelper) {
  Outcome r = run("reach --attr role --value helper " + corpus("robotics.abc"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("reachable"), std::string::npos);
  EXPECT_EQ(run("reach --attr role --value nobody " + corpus("channels.abc")).code, 1);
}
