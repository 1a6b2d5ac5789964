#include <gtest/gtest.h>

#include <string>

#include "cutin/scenario_io.hpp"

namespace cutin {
namespace {

const std::string kDir = CUTIN_SCENARIO_DIR;

std::string world_yaml(const std::string& region = "{x_min: -5, x_max: 5, y_min: -2.5, y_max: 2.5}",
                       const std::string& dt = "0.02") {
  return "world:\n"
         "  region: " + region + "\n"
         "  n: 2\n"
         "  n_t: 2\n"
         "  dt: " + dt + "\n"
         "  v_max: 1.5\n"
         "  footprint: {width: 1, height: 1}\n"
         "  d_c: 5\n"
         "  d_k: 1\n"
         "  K_d: 50\n"
         "  K_s: 0.35\n"
         "  collision_distance: 0.3\n"
         "  t_L: 10\n";
}

const std::string kBody =
    "agents: [[-1, 0], [1, 0]]\n"
    "phases:\n"
    "  - [[-2, 1], [2, 1]]\n";

ScenarioError error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return {"", 0, ""};
}

TEST(ParseScenario, HundredAgentFile) {
  const auto s = parse_scenario_file(kDir + "/table1.scenario");
  const auto& c = s.config;
  EXPECT_EQ(c.n_agents, 100u);
  EXPECT_EQ(c.n_targets, 100u);
  EXPECT_EQ(c.dt, 0.02);
  EXPECT_EQ(c.v_max, 5.0);
  EXPECT_EQ(c.d_c, 10.0);
  EXPECT_EQ(c.d_k, 0.55);
  EXPECT_EQ(c.K_d, 800.0);
  EXPECT_EQ(c.K_s, 0.35);
  EXPECT_EQ(c.footprint.width, 1.0);
  EXPECT_EQ(c.footprint.height, 1.0);
  EXPECT_EQ(c.collision_distance, 0.3);
  EXPECT_EQ(c.region.width(), 20.0);
  EXPECT_EQ(c.region.height(), 20.0);
  ASSERT_TRUE(s.generator.has_value());
  EXPECT_EQ(s.generator->cols, 20u);
}

TEST(ParseScenario, EightAgentFile) {
  const auto s = parse_scenario_file(kDir + "/table2.scenario");
  const auto& c = s.config;
  EXPECT_EQ(c.n_agents, 8u);
  EXPECT_EQ(c.n_targets, 8u);
  EXPECT_EQ(c.region.width(), 10.0);
  EXPECT_EQ(c.region.height(), 5.0);
  EXPECT_EQ(c.v_max, 1.5);
  EXPECT_EQ(c.d_c, 5.0);
  EXPECT_EQ(c.d_k, 1.0);
  EXPECT_EQ(c.K_d, 50.0);
  EXPECT_EQ(c.K_s, 0.35);
  EXPECT_EQ(s.target_phases.size(), 1u);
}

TEST(ParseScenario, SwitchingFileHasTwelvePhases) {
  const auto s = parse_scenario_file(kDir + "/table2_switching.scenario");
  EXPECT_EQ(s.target_phases.size(), 12u);
  EXPECT_EQ(s.trigger, PhaseTrigger::on_full_coverage(2.0));
  EXPECT_EQ(s.target_phases[0], s.target_phases[4]);
  EXPECT_EQ(s.target_phases[3], s.target_phases[11]);
}

TEST(ParseScenario, KGainDefaultsToSpeedLimit) {
  const auto s = parse_scenario(world_yaml() + kBody);
  EXPECT_EQ(s.config.k_gain, 1.5);
  EXPECT_EQ(s.trigger, PhaseTrigger::fixed_duration());
}

TEST(ParseScenario, PhasesMayBeNamed) {
  const auto s = parse_scenario(world_yaml() + "agents: [[-1, 0], [1, 0]]\n"
                                               "phases:\n"
                                               "  - name: a\n"
                                               "    targets: [[-2, 1], [2, 1]]\n");
  EXPECT_EQ(s.target_phases[0].positions[1], (Vec2{2, 1}));
}

TEST(ParseScenario, InvertedRegionNamesRegion) {
  const auto e = error_of(world_yaml("{x_min: 5, x_max: -5, y_min: -2.5, y_max: 2.5}") + kBody);
  EXPECT_NE(e.field().find("region"), std::string::npos);
  EXPECT_EQ(e.line(), 2);
}

TEST(ParseScenario, NonPositiveDtNamesField) {
  const auto e = error_of(world_yaml("{x_min: -5, x_max: 5, y_min: -2.5, y_max: 2.5}", "0") + kBody);
  EXPECT_EQ(e.field(), "world.dt");
  EXPECT_EQ(e.line(), 5);
}

TEST(ParseScenario, TargetOutsideRegion) {
  const auto e = error_of(world_yaml() + "agents: [[-1, 0], [1, 0]]\nphases:\n  - [[-2, 1], [9, 1]]\n");
  EXPECT_NE(e.field().find("phases"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("target 2"), std::string::npos);
}

TEST(ParseScenario, SyntaxErrorCarriesLine) {
  const auto e = error_of(world_yaml() + "agents: [[-1, 0], [1, 0]\nphases: x\n");
  EXPECT_GT(e.line(), 0);
}

TEST(ParseScenario, NonNumericValueNamesField) {
  std::string text = world_yaml() + kBody;
  text.replace(text.find("v_max: 1.5"), 10, "v_max: fast");
  const auto e = error_of(text);
  EXPECT_EQ(e.field(), "world.v_max");
  EXPECT_EQ(e.line(), 6);
}

TEST(ParseScenario, UnknownKeyRejected) {
  const auto e = error_of(world_yaml() + kBody + "extra: 1\n");
  EXPECT_EQ(e.field(), "extra");
}

TEST(ParseScenario, MissingKeyReported) {
  std::string text = world_yaml() + kBody;
  text.erase(text.find("  d_c: 5\n"), 9);
  EXPECT_EQ(error_of(text).field(), "world.d_c");
}

TEST(ParseScenario, WrongAgentCount) {
  const auto e = error_of(world_yaml() + "agents: [[-1, 0]]\nphases:\n  - [[-2, 1], [2, 1]]\n");
  EXPECT_EQ(e.field(), "agents");
}

TEST(ParseScenario, MissingFileIsAnError) {
  EXPECT_THROW(parse_scenario_file(kDir + "/does_not_exist.scenario"), ScenarioError);
}

TEST(ParseScenario, FileErrorsNameTheFile) {
  try {
    parse_scenario_file(kDir + "/does_not_exist.scenario");
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("does_not_exist.scenario"), std::string::npos);
  }
}

TEST(SerializeScenario, ShippedFilesRoundTrip) {
  for (const char* name : {"table1", "table2", "table2_switching"}) {
    const auto s = parse_scenario_file(kDir + "/" + name + ".scenario");
    const auto text = serialize_scenario(s);
    EXPECT_EQ(parse_scenario(text), s) << name;
    EXPECT_EQ(serialize_scenario(parse_scenario(text)), text) << name;
  }
}

TEST(SerializeScenario, GeneratedScenariosRoundTrip) {
  const auto base = parse_scenario_file(kDir + "/table1.scenario");
  for (std::uint64_t seed : {0u, 42u, 99u}) {
    const auto s = materialize(base, seed);
    EXPECT_FALSE(s.generator.has_value());
    EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.02), "0.02");
  EXPECT_EQ(format_double(800), "800");
  const double awkward = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(awkward)), awkward);
}

}  // namespace
}  // namespace cutin
