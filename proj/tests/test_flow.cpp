#include <gtest/gtest.h>

#include "flow_cases.hpp"
#include "tws/error.hpp"
#include "tws/flow.hpp"

using namespace tws;

TEST(Bundle, DirectionsLieInCone) {
  const FlowConfig cfg;
  const DirectionBundle b = make_bundle(cfg);
  ASSERT_EQ(b.dirs.size(), 256u);
  const double cos_max = std::cos(55.0 * M_PI / 180.0);
  for (const Vec3& d : b.dirs) {
    EXPECT_NEAR(norm(d), 1.0, 1e-12);
    EXPECT_GE(-d.z, cos_max - 1e-12);
  }
  EXPECT_THROW(make_bundle({110.0, 0, {10.0}}), Error);
}

TEST(FlowProxy, StationaryHeadHasNoFlow) {
  FlowInput in;
  in.head_before = {{1, 1.7, 2}, Quat::yaw(0.4)};
  in.head_after = in.head_before.position;
  in.dt = 1.0 / 90;
  const FlowSample s = flow_proxy(in, make_bundle({}), {10.0, 50.0});
  EXPECT_DOUBLE_EQ(s.mean_angular_speed, 0.0);
  EXPECT_DOUBLE_EQ(s.visible_fraction_fast, 0.0);
  in.dt = 0.0;
  EXPECT_THROW(flow_proxy(in, make_bundle({}), {10.0}), Error);
}

TEST(FlowProxy, NakedGainScalesFlow) {
  const flowcase::Pose pose = flowcase::forward_gaze();
  const double ratio = flowcase::open_world(30.0, pose) / flowcase::open_world(1.0, pose);
  EXPECT_GT(ratio, 29.0);
  EXPECT_LT(ratio, 31.0);
}

TEST(FlowProxy, OpenWorldMatchesClosedForm) {
  // A world point at distance D and angle theta from the motion, seen from a
  // head displaced by s, turns by atan2(s sin theta, D - s cos theta).
  const FlowConfig cfg;
  const DirectionBundle b = make_bundle(cfg);
  const Vec3 motion{0.3, 0, 0};
  FlowInput in;
  in.head_before = {{2, 1.7, -4}, Quat::yaw(-M_PI / 2)};
  in.head_after = in.head_before.position + motion;
  in.physical_step = motion / 30.0;
  in.dt = 1.0 / 90;
  double sum = 0.0;
  for (const Vec3& local : b.dirs) {
    const Vec3 dir = in.head_before.orientation.rotate(local);
    const double c = dot(dir, normalized(motion));
    const double th = std::acos(std::clamp(c, -1.0, 1.0));
    for (double dist : cfg.distances) sum += std::atan2(0.3 * std::sin(th), dist - 0.3 * std::cos(th)) / in.dt;
  }
  const double expected = sum / (b.dirs.size() * cfg.distances.size());
  EXPECT_NEAR(flow_proxy(in, b, cfg.distances).mean_angular_speed, expected, 1e-9);
}

TEST(FlowProxy, PointOracleForSingleDirection) {
  // One direction, one distance: angle subtended by the head displacement.
  FlowInput in;
  in.head_before = {{0, 0, 0}, Quat::identity()};
  in.head_after = {0.3, 0, 0};
  in.physical_step = {0.01, 0, 0};
  in.dt = 0.1;
  const DirectionBundle b{{normalized({0, 0, -1})}};
  const FlowSample s = flow_proxy(in, b, {10.0});
  EXPECT_NEAR(s.mean_angular_speed, std::atan2(0.3, 10.0) / 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(s.visible_fraction_fast, 1.0);
}

TEST(FlowProxy, CabinWithoutWindowsMatchesPhysical) {
  for (const auto& pose : {flowcase::window_facing(), flowcase::forward_gaze()}) {
    WindowLayout none;
    none.stripe_count = 0;
    const double cabin = flowcase::in_cabin(none, pose);
    const double phys = flowcase::open_world(1.0, pose);
    EXPECT_NEAR(cabin / phys, 1.0, 1e-9);
  }
}

TEST(FlowProxy, ShieldingOrderAtWindowFacingPose) {
  const auto s = flowcase::sweep(flowcase::window_facing());
  EXPECT_GT(s.naked, s.default_stripes);
  EXPECT_GT(s.default_stripes, s.coverage.front());
  EXPECT_NEAR(s.coverage.front() / s.physical, 1.0, 0.02);
  EXPECT_NEAR(s.coverage.back() / s.naked, 1.0, 0.02);
  for (std::size_t i = 1; i < s.coverage.size(); ++i) EXPECT_GT(s.coverage[i], s.coverage[i - 1]);
}

TEST(FlowProxy, ShieldingOrderLookingForward) {
  const auto s = flowcase::sweep(flowcase::forward_gaze());
  EXPECT_GT(s.naked, s.default_stripes);
  EXPECT_GT(s.default_stripes, s.coverage.front());
  EXPECT_NEAR(s.coverage.front() / s.physical, 1.0, 0.02);
  for (std::size_t i = 1; i < s.coverage.size(); ++i) EXPECT_GE(s.coverage[i], s.coverage[i - 1]);
}

TEST(FlowProxy, FastFractionBoundedByWindowShare) {
  // Only world content seen through glass can move faster than walking.
  const TunnelSpec spec = flowcase::tunnel({});
  TraversalState s0 = enter_cabin(spec, spec.path.start());
  s0.x = 1.0;
  s0.cabin_offset = 29.0;
  s0.lateral = {1.7, 0.2};
  const Vec3 step = spec.axis * (1.0 / 90);
  const auto s1 = advance_traversal(s0, spec, step);
  const DirectionBundle b = make_bundle({360.0, 2000, {10.0}});
  FlowInput in;
  in.head_before = {traversal_world_position(spec, s0), Quat::identity()};
  in.head_after = s1.world_position;
  in.physical_step = step;
  in.dt = 1.0 / 90;
  in.spec = &spec;
  in.cabin_before = s0;
  in.cabin_after = s1.state;
  const FlowSample f = flow_proxy(in, b, {10.0});
  std::size_t glass = 0;
  const Vec3 head_local = to_cabin_local(spec, s0, in.head_before.position);
  for (const Vec3& d : b.dirs) glass += window_mask(spec, head_local, cabin_local_direction(spec, d)) == SurfaceHit::Window;
  EXPECT_LE(f.visible_fraction_fast, static_cast<double>(glass) / b.dirs.size() + 1e-12);
  EXPECT_GT(f.visible_fraction_fast, 0.0);
}
