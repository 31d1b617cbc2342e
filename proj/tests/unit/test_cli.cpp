#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = ctlcalc::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, EvalSeparationWitness) {
  Result r = run({"eval", "--calculus", "ref", "corpus:M_ref"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(pair (inj A ()) (inj B ()))\n");
}

TEST(Cli, NaiveTranslationPipesIntoEval) {
  Result t = run({"translate", "--from", "del", "--to", "ac", "--variant", "naive", "corpus:M_del"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(t.out.rfind(";; calculus: ac\n", 0), 0u);
  Result e = run({"eval", "--calculus", "ac"}, t.out);
  EXPECT_EQ(e.code, 0) << e.err;
  Result c = run({"translate", "--from", "del", "--to", "ac", "--variant", "counter", "corpus:M_del"});
  ASSERT_EQ(c.code, 0);
  // header selects the calculus when no flag is given
  EXPECT_EQ(run({"eval", "-"}, c.out).code, 2);
}

TEST(Cli, DifftestCounterSuiteIsClean) {
  Result r = run({"difftest", "--translation", "del_to_ac_counter", "--seed", "7", "--count", "100"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0 disagree"), std::string::npos);
}

TEST(Cli, DifftestNaiveWithCorpusDisagrees) {
  Result r = run({"difftest", "--translation", "del_to_ac_naive", "--count", "10", "--corpus", "--json"});
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.out.find("\"origin\":\"corpus:M_del\""), std::string::npos);
}

TEST(Cli, ExitCodesFollowOutcomes) {
  EXPECT_EQ(run({"eval", "corpus:M_del"}).code, 2);
  EXPECT_EQ(run({"eval", "--calculus", "mam"}, "(force ())").code, 3);
  EXPECT_EQ(run({"eval", "--fuel", "50", "corpus:omega"}).code, 4);
  EXPECT_EQ(run({"eval", "--calculus", "mam"}, "(return (").code, 1);
  EXPECT_EQ(run({"eval", "corpus:missing"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
}

TEST(Cli, JsonResult) {
  Result r = run({"eval", "--json", "corpus:M_ref"});
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["outcome"], "Value");
  EXPECT_EQ(j["value_observation"], "(pair (inj A ()) (inj B ()))");
  EXPECT_TRUE(j["steps"].is_number());
}

TEST(Cli, FuelFromEnvironment) {
  ::setenv("CTLCALC_FUEL", "25", 1);
  Result r = run({"eval", "--json", "corpus:omega"});
  ::unsetenv("CTLCALC_FUEL");
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(nlohmann::json::parse(r.out)["steps"], 25);
}

TEST(Cli, TraceSubcommand) {
  Result r = run({"trace", "corpus:M_del"});
  EXPECT_EQ(r.code, 2);
  std::istringstream in(r.out);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(nlohmann::json::parse(first)["rule"], "shift");
}

TEST(Cli, CorpusListing) {
  Result r = run({"corpus", "--list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("M_del\tdel\tBottom"), std::string::npos);
  Result p = run({"corpus", "double_throw_eff"});
  EXPECT_EQ(p.out.rfind(";; calculus: eff\n", 0), 0u);
  EXPECT_EQ(run({"eval"}, p.out).code, 2);
}

TEST(Cli, TranslateToFile) {
  const std::string path = ::testing::TempDir() + "ctlcalc_cli_out.ctl";
  Result r = run({"translate", "--from", "ref", "--to", "ac", "--out", path, "corpus:M_ref"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  Result e = run({"eval", "--json", path});
  EXPECT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(nlohmann::json::parse(e.out)["value_observation"], "(pair (inj A ()) (inj B ()))");
  std::remove(path.c_str());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"translate", "--from", "del", "--to", "ref", "corpus:M_del"}).code, 1);
  EXPECT_EQ(run({"translate", "--from", "eff", "--to", "del", "--variant", "naive", "corpus:double_throw_eff"}).code, 1);
  EXPECT_EQ(run({"difftest", "--translation", "nope"}).code, 1);
  EXPECT_EQ(run({"difftest", "--from", "ref", "--translation", "eff_to_del"}).code, 1);
  EXPECT_EQ(run({"eval", "--calculus", "xyz", "corpus:M_del"}).code, 1);
  EXPECT_EQ(run({"eval", "--calculus", "mam", "corpus:M_del"}).code, 1);
}
