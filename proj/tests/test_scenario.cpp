#include "diffeo/scenario.hpp"

#include <gtest/gtest.h>

using namespace diffeo;
using namespace diffeo::scenario;

namespace {

std::string path(const std::string& name) { return std::string(DIFFEO_SCENARIO_DIR) + "/" + name + ".toml"; }

ErrorKind parse_error_kind(const std::string& text) {
  try {
    Scenario::parse(text, "inline.toml").run();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

}  // namespace

class Bundled : public ::testing::TestWithParam<std::string> {};

TEST_P(Bundled, EveryAssertionMatches) {
  const Report r = Scenario::load(path(GetParam())).run();
  EXPECT_GT(r.outcomes.size(), 0u);
  for (const auto& o : r.outcomes) EXPECT_TRUE(o.matched) << "[" << o.index << "] " << o.op << ": " << o.mismatch;
  EXPECT_EQ(r.exit_code(), 0);
}

TEST_P(Bundled, ReportsAreDeterministic) {
  const std::string a = report_json(Scenario::load(path(GetParam())).run()).dump();
  const std::string b = report_json(Scenario::load(path(GetParam())).run()).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("wall_clock"), std::string::npos);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Bundled,
                         ::testing::Values("reflection", "bz2_circle", "so2_plane", "omega_collapse",
                                           "adjunction_random", "trivial_action"));

TEST(Parse, UnknownKeyReportsLine) {
  try {
    Scenario::parse("schema = 1\n\n[[domain]]\nname = \"I\"\ninterval = [0.0, 1.0]\ncolour = 3\n", "x.toml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("x.toml:6"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(Parse, SchemaIsRequired) { EXPECT_EQ(parse_error_kind("name = \"x\"\n"), ErrorKind::ParseError); }

TEST(Parse, WrongSchemaVersion) { EXPECT_EQ(parse_error_kind("schema = 2\n"), ErrorKind::ParseError); }

TEST(Parse, MalformedToml) { EXPECT_EQ(parse_error_kind("schema = \n"), ErrorKind::ParseError); }

TEST(Parse, UnresolvedReference) {
  EXPECT_EQ(parse_error_kind("schema = 1\n[[map]]\nname = \"f\"\nexpr = \"sin\"\ndomain = \"nope\"\n"),
            ErrorKind::UnresolvedName);
}

TEST(Parse, UnknownOp) {
  EXPECT_EQ(parse_error_kind("schema = 1\n[[assert]]\nop = \"frobnicate\"\n"), ErrorKind::ParseError);
}

TEST(Parse, ToleranceOutOfRange) {
  EXPECT_EQ(parse_error_kind("schema = 1\n[tolerances]\neq_tol = 2.0\n"), ErrorKind::ToleranceOutOfRange);
  Overrides ov;
  ov.tolerances = {{"form_tol", -1.0}};
  try {
    Scenario::parse("schema = 1\n", "x.toml", ov);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ToleranceOutOfRange);
  }
}

TEST(Run, OverridesWin) {
  Overrides ov;
  ov.seed = 9;
  ov.samples = 16;
  ov.tolerances = {{"eq_tol", 1e-8}};
  const Scenario s = Scenario::parse("schema = 1\nseed = 1\nsamples = 8\n", "x.toml", ov);
  EXPECT_EQ(s.seed(), 9u);
  EXPECT_EQ(s.samples(), 16);
  EXPECT_DOUBLE_EQ(s.tolerances().eq_tol, 1e-8);
}

TEST(Run, ExpectedErrorsMatch) {
  const Report r = Scenario::parse(
                       "schema = 1\n[[domain]]\nname = \"R\"\ninterval = [-2.0, 2.0]\n"
                       "[[action]]\nname = \"a\"\nkind = \"reflection\"\nspace = \"R\"\n"
                       "[[form]]\nname = \"dx\"\nexpr = \"dx\"\ndomain = \"R\"\n"
                       "[[assert]]\nop = \"orbit_form_roundtrip\"\nform = \"dx\"\naction = \"a\"\n"
                       "expect = \"error:NotBasic\"\n",
                       "x.toml")
                       .run();
  ASSERT_EQ(r.outcomes.size(), 1u);
  EXPECT_TRUE(r.outcomes[0].matched) << r.outcomes[0].mismatch;
}

TEST(Run, MismatchAndFailFast) {
  const std::string text =
      "schema = 1\n"
      "[[assert]]\nop = \"cocycle_classes\"\ngroup = \"Z2\"\ncover = \"circle2\"\ncount = 3\n"
      "[[assert]]\nop = \"cocycle_classes\"\ngroup = \"Z3\"\ncover = \"circle2\"\ncount = 3\n";
  const Scenario s = Scenario::parse(text, "x.toml");
  const Report all = s.run();
  ASSERT_EQ(all.outcomes.size(), 2u);
  EXPECT_FALSE(all.outcomes[0].matched);
  EXPECT_TRUE(all.outcomes[1].matched);
  EXPECT_EQ(all.exit_code(), 1);
  RunOptions opt;
  opt.fail_fast = true;
  const Report stopped = s.run(opt);
  EXPECT_EQ(stopped.outcomes.size(), 1u);
  EXPECT_TRUE(stopped.stopped_early);
}

TEST(Run, TimingOnlyWhenAsked) {
  const Scenario s = Scenario::load(path("bz2_circle"));
  EXPECT_FALSE(s.run().wall_clock_seconds.has_value());
  RunOptions opt;
  opt.timing = true;
  EXPECT_TRUE(s.run(opt).wall_clock_seconds.has_value());
}

TEST(Commands, ClassifyReportsThreePartitions) {
  const Report r = Scenario::load(path("reflection")).classify("pair");
  EXPECT_EQ(r.extra["isomorphism"].size(), 2u);
  EXPECT_EQ(r.extra["discretization"].size(), 2u);
  EXPECT_EQ(r.extra["coarse"].size(), 1u);
  EXPECT_TRUE(r.all_matched());
}

TEST(Commands, SheafKappaSizes) {
  const Report r = Scenario::load(path("omega_collapse")).sheaf_command("kappa");
  EXPECT_EQ(r.extra["Omega1"]["after"]["Q"], 1);
  EXPECT_EQ(r.extra["Omega0"]["after"]["I"], 4);
  EXPECT_TRUE(r.all_matched());
}

TEST(Commands, UnknownSheafMode) {
  EXPECT_THROW(Scenario::load(path("omega_collapse")).sheaf_command("nope"), Error);
}

TEST(Render, TextNamesEveryAssertion) {
  const Report r = Scenario::load(path("reflection")).run();
  const std::string text = render_text(r);
  for (const auto& o : r.outcomes) EXPECT_NE(text.find("[" + std::to_string(o.index) + "] " + o.op), std::string::npos);
  EXPECT_NE(text.find("summary: "), std::string::npos);
}
