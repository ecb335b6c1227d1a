#include <gtest/gtest.h>

#include <functional>

#include "tws/config.hpp"
#include "tws/error.hpp"
#include "tws/scenario.hpp"
#include "tws/simulation.hpp"

using namespace tws;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Scenario, DefaultRoute) {
  const Scenario sc = build_default_scenario(Level::L1, PlaySpace({2, 2}));
  ASSERT_EQ(sc.leg_count(), 6u);
  EXPECT_EQ(sc.checkpoints.size(), 7u);
  EXPECT_DOUBLE_EQ(sc.total_length(), 360.0);
  const double expected[] = {60, 75, 45, 75, 45, 60};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(sc.paths[i].length(), expected[i]);
    EXPECT_DOUBLE_EQ(sc.paths[i].start().y, sc.paths[i].end().y);
  }
  const auto turns = turning_angles(sc);
  ASSERT_EQ(turns.size(), 5u);
  for (std::size_t i = 0; i < turns.size(); ++i) EXPECT_NEAR(std::abs(turns[i]), 90.0, 1e-9);
}

TEST(Scenario, LevelsShareGeometry) {
  const Scenario a = build_default_scenario(Level::L1, PlaySpace({2, 2}));
  const Scenario b = build_default_scenario(Level::L2, PlaySpace({2, 2}));
  EXPECT_EQ(canonical_geometry(a), canonical_geometry(b));
  EXPECT_EQ(scenario_hash(a), scenario_hash(b));
  EXPECT_NE(a.task_name, b.task_name);
  EXPECT_NE(a.level_id, b.level_id);
}

TEST(Scenario, HashTracksGeometry) {
  ScenarioLayout layout;
  const std::string base = scenario_hash(build_scenario(layout));
  layout.lengths[2] = 46.0;
  EXPECT_NE(scenario_hash(build_scenario(layout)), base);
}

TEST(Scenario, AnchorsAreReachable) {
  const Scenario sc = build_default_scenario(Level::L1, PlaySpace({2, 2}));
  ASSERT_EQ(sc.anchors.size(), sc.leg_count());
  for (const InvocationAnchor& a : sc.anchors) {
    EXPECT_NO_THROW(validate_anchor(a, sc.layout.button_reach));
    EXPECT_TRUE(sc.playspace.contains(floor_of(a.platform_center)));
  }
  for (const Segment& p : sc.paths) {
    EXPECT_TRUE(sc.navigable.contains_segment(floor_of(p.start()), floor_of(p.end())));
  }
}

TEST(Scenario, TunnelsFitAtDefaultGain) {
  RunConfig cfg;
  EXPECT_NO_THROW(describe_setup(cfg));
}

TEST(Scenario, Errors) {
  EXPECT_EQ(code_of([] { build_default_scenario(Level::L1, PlaySpace({1.5, 2})); }), ErrorCode::PlayspaceTooSmall);
  ScenarioLayout bad;
  bad.turns_deg.pop_back();
  EXPECT_EQ(code_of([&] { build_scenario(bad); }), ErrorCode::Config);
  ScenarioLayout zero;
  zero.lengths[0] = 0.0;
  EXPECT_EQ(code_of([&] { build_scenario(zero); }), ErrorCode::Config);
  ScenarioLayout tilted;
  tilted.checkpoints = {{0, 0, 0}, {10, 1, 0}};
  EXPECT_EQ(code_of([&] { build_scenario(tilted); }), ErrorCode::NonHorizontalPath);
}

TEST(Scenario, HeadingVectorsAreExactOnRightAngles) {
  EXPECT_EQ(heading_vector(0), (Vec3{1, 0, 0}));
  EXPECT_EQ(heading_vector(90), (Vec3{0, 0, -1}));
  EXPECT_EQ(heading_vector(-90), (Vec3{0, 0, 1}));
  EXPECT_EQ(heading_vector(180), (Vec3{-1, 0, 0}));
  EXPECT_NEAR(norm(heading_vector(33)), 1.0, 1e-15);
}

TEST(Scenario, ParseNames) {
  EXPECT_EQ(parse_level("L2"), Level::L2);
  EXPECT_EQ(parse_technique("teleport"), Technique::Teleport);
  EXPECT_THROW(parse_level("L3"), Error);
  EXPECT_THROW(parse_technique("walk"), Error);
}

TEST(Agent, ProfileValidation) {
  AgentProfile p;
  EXPECT_NO_THROW(p.validate());
  p.walk_speed = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.hop_fraction = 1.5;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Agent, AimDirectionHitsTarget) {
  const NavRegion nav{{{{-50, -50}, {50, 50}}}};
  for (AimModel model : {AimModel::StraightRay, AimModel::Parabolic}) {
    TeleportConfig cfg;
    cfg.aim_model = model;
    const Vec3 origin{0, 1.2, 0};
    const Vec3 target{6, 0, -3};
    const auto dir = aim_direction(origin, target, cfg);
    ASSERT_TRUE(dir);
    const auto hit = teleport_aim({origin, Quat::identity()}, *dir, cfg, nav);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->x, 6.0, 1e-9);
    EXPECT_NEAR(hit->z, -3.0, 1e-9);
    EXPECT_GE(teleport_reach(cfg, 1.2), 6.0);
  }
}

TEST(Config, JsonRoundTrip) {
  RunConfig cfg;
  cfg.seed = 99;
  cfg.technique = Technique::Teleport;
  cfg.gain = FixedCabinLength{2.2};
  cfg.phases.speed_schedule = {1.0, 0.5};
  cfg.teleport.aim_model = AimModel::Parabolic;
  cfg.tunnel.driver = ScalingDriver::CenterOfMass;
  const auto j = config_to_json(cfg);
  const RunConfig back = config_from_json(j);
  EXPECT_EQ(config_to_json(back).dump(), j.dump());
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::ordered_json::parse(R"({"agnet":{}})")); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::ordered_json::parse(R"({"agent":{"speed":1}})")); }),
            ErrorCode::Config);
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::ordered_json::parse(R"({"seed":"x"})")); }), ErrorCode::Config);
}

TEST(Config, ValidationMessages) {
  RunConfig cfg;
  cfg.gain = FixedGain{0.5};
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
    EXPECT_NE(std::string(e.what()).find("gain must be"), std::string::npos);
  }
  cfg = {};
  cfg.ticks_per_second = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Config, YamlOverlay) {
  const RunConfig cfg = parse_config_yaml(
      "technique: teleport\n"
      "seed: 5\n"
      "gain: {strategy: fixed-cabin-length, value: 2.0}\n"
      "layout:\n"
      "  lengths: [10, 20]\n"
      "  turns_deg: [90]\n");
  EXPECT_EQ(cfg.technique, Technique::Teleport);
  EXPECT_EQ(cfg.seed, 5u);
  ASSERT_TRUE(std::holds_alternative<FixedCabinLength>(cfg.gain));
  EXPECT_DOUBLE_EQ(std::get<FixedCabinLength>(cfg.gain).length, 2.0);
  EXPECT_EQ(cfg.layout.lengths.size(), 2u);
  EXPECT_EQ(build_scenario(cfg.layout).leg_count(), 2u);
}

TEST(Config, YamlErrorsCarryLine) {
  try {
    parse_config_yaml("seed: 1\nagent: [unclosed\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
    EXPECT_GT(e.line(), 0u);
  }
}

TEST(Config, ScenarioSources) {
  EXPECT_EQ(resolve_scenario_source("default:L2").layout.level, Level::L2);
  EXPECT_EQ(code_of([] { resolve_scenario_source("default:L9"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { resolve_scenario_source("/nonexistent/scenario.yaml"); }), ErrorCode::Io);
}

TEST(Config, GainStrategies) {
  EXPECT_TRUE(std::holds_alternative<FixedGain>(make_gain_strategy("fixed-gain", 30)));
  EXPECT_TRUE(std::holds_alternative<AdaptiveToPlayspace>(make_gain_strategy("adaptive", 0)));
  EXPECT_EQ(gain_strategy_name(FixedCabinLength{2}), "fixed-cabin-length");
  EXPECT_THROW(make_gain_strategy("warp", 1), Error);
}
