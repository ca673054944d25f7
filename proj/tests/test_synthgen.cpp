#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ktrack/error.hpp"
#include "ktrack/synthgen.hpp"

using namespace ktrack;

TEST(Synthgen, ConstantVelocityDefinition) {
  TrajectorySpec spec;
  spec.num_points = 1;
  spec.frames = 5;
  spec.origins = {{0, 0}};
  spec.velocity = Point2{1, 0};
  const Dataset ds = generate(spec);
  for (std::int64_t t = 0; t < 5; ++t) {
    EXPECT_EQ(ds.at(0, t).position, (Point2{static_cast<double>(t), 0}));
    EXPECT_TRUE(ds.at(0, t).visible);
  }
}

TEST(Synthgen, CircularQuarterTurn) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Circular;
  spec.num_points = 1;
  spec.frames = 2;
  spec.origins = {{50, 50}};
  spec.radius = 10;
  spec.angular_rate = std::numbers::pi / 2;
  const Dataset ds = generate(spec);
  EXPECT_NEAR(ds.at(0, 1).position.x, 50.0, 1e-12);
  EXPECT_NEAR(ds.at(0, 1).position.y, 60.0, 1e-12);
}

TEST(Synthgen, Deterministic) {
  for (auto kind : {TrajectoryKind::ConstantVelocity, TrajectoryKind::Circular,
                    TrajectoryKind::Sinusoidal, TrajectoryKind::PiecewiseAcceleration}) {
    TrajectorySpec spec;
    spec.kind = kind;
    spec.seed = 99;
    EXPECT_EQ(generate(spec), generate(spec));
    TrajectorySpec other = spec;
    other.seed = 100;
    if (kind != TrajectoryKind::Circular) EXPECT_FALSE(generate(spec) == generate(other));
  }
}

TEST(Synthgen, StaysInsideBounds) {
  for (auto kind : {TrajectoryKind::ConstantVelocity, TrajectoryKind::Circular,
                    TrajectoryKind::Sinusoidal, TrajectoryKind::PiecewiseAcceleration}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TrajectorySpec spec;
      spec.kind = kind;
      spec.seed = seed;
      spec.frames = 400;
      spec.bounds = {64, 48};
      spec.speed_max = 5.0;
      spec.radius = 30;
      spec.amplitude = 40;
      const Dataset ds = generate(spec);
      for (const auto& s : ds.tracks().data()) {
        ASSERT_GE(s.position.x, 0.0);
        ASSERT_LE(s.position.x, 64.0);
        ASSERT_GE(s.position.y, 0.0);
        ASSERT_LE(s.position.y, 48.0);
      }
    }
  }
}

TEST(Synthgen, SpeedsWithinRange) {
  TrajectorySpec spec;
  spec.num_points = 50;
  spec.frames = 2;
  spec.bounds = {1e6, 1e6};
  spec.speed_min = 0.5;
  spec.speed_max = 2.0;
  const Dataset ds = generate(spec);
  for (std::size_t p = 0; p < ds.num_points(); ++p) {
    const double s = distance(ds.at(p, 1).position, ds.at(p, 0).position);
    EXPECT_GE(s, 0.5 - 1e-9);
    EXPECT_LE(s, 2.0 + 1e-9);
  }
}

TEST(Synthgen, PiecewiseAccelerationIsBounded) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::PiecewiseAcceleration;
  spec.num_points = 20;
  spec.frames = 200;
  spec.bounds = {1e6, 1e6};
  spec.accel_bound = 0.2;
  spec.max_speed = 100;
  const Dataset ds = generate(spec);
  for (std::size_t p = 0; p < ds.num_points(); ++p) {
    for (std::int64_t t = 2; t < 200; ++t) {
      const Point2 a = ds.at(p, t).position - 2.0 * ds.at(p, t - 1).position + ds.at(p, t - 2).position;
      EXPECT_LE(std::hypot(a.x, a.y), 0.2 + 1e-9);
    }
  }
}

TEST(Synthgen, SinusoidalOscillatesAroundCarrier) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Sinusoidal;
  spec.num_points = 1;
  spec.frames = 41;
  spec.origins = {{500, 500}};
  spec.bounds = {1000, 1000};
  spec.velocity = Point2{1, 0};
  spec.amplitude = 5;
  spec.period = 20;
  spec.random_phase = false;
  const Dataset ds = generate(spec);
  EXPECT_NEAR(ds.at(0, 5).position.y, 505.0, 1e-9);
  EXPECT_NEAR(ds.at(0, 15).position.y, 495.0, 1e-9);
  EXPECT_NEAR(ds.at(0, 40).position.x, 540.0, 1e-9);
}

TEST(Synthgen, OcclusionsClearVisibility) {
  TrajectorySpec spec;
  spec.num_points = 2;
  spec.frames = 10;
  spec.occlusions = {{1, 2, 4}};
  const Dataset ds = generate(spec);
  for (std::int64_t t = 0; t < 10; ++t) {
    EXPECT_TRUE(ds.at(0, t).visible);
    EXPECT_EQ(ds.at(1, t).visible, t < 2 || t >= 4);
  }
}

TEST(Synthgen, Lattice) {
  const auto pts = lattice_origins(20, {256, 256}, 0.25);
  ASSERT_EQ(pts.size(), 20u);
  for (const auto& p : pts) {
    EXPECT_GT(p.x, 64.0);
    EXPECT_LT(p.x, 192.0);
    EXPECT_GT(p.y, 64.0);
    EXPECT_LT(p.y, 192.0);
  }
}

TEST(Synthgen, ReflectInto) {
  EXPECT_EQ(reflect_into(5, 10), 5);
  EXPECT_EQ(reflect_into(12, 10), 8);
  EXPECT_EQ(reflect_into(-3, 10), 3);
  EXPECT_EQ(reflect_into(25, 10), 5);
}

TEST(Synthgen, RejectsDegenerateSpecs) {
  auto bad = [](auto mutate) {
    TrajectorySpec spec;
    mutate(spec);
    try {
      generate(spec);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InvalidSpec;
    }
    return false;
  };
  EXPECT_TRUE(bad([](TrajectorySpec& s) { s.radius = -1; }));
  EXPECT_TRUE(bad([](TrajectorySpec& s) { s.period = 0; }));
  EXPECT_TRUE(bad([](TrajectorySpec& s) { s.frames = 0; }));
  EXPECT_TRUE(bad([](TrajectorySpec& s) { s.speed_min = 3; }));
  EXPECT_TRUE(bad([](TrajectorySpec& s) { s.origins = {{1, 1}}; }));
  EXPECT_TRUE(bad([](TrajectorySpec& s) { s.occlusions = {{0, 5, 200}}; }));
}

TEST(Synthgen, ProvenanceRecordsSpec) {
  TrajectorySpec spec;
  spec.seed = 7;
  const Dataset ds = generate(spec);
  EXPECT_EQ(ds.provenance()["origin"], "synthetic");
  EXPECT_EQ(ds.provenance()["spec"]["seed"], 7);
  EXPECT_EQ(ds.provenance()["spec"]["kind"], "constant-velocity");
}
