#include "ktrack/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "ktrack/error.hpp"
#include "ktrack/rng.hpp"

namespace ktrack {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidSpec, "trajectory spec: " + what);
}

rng::Counter draw(std::uint64_t seed, rng::Stream stream, std::uint64_t a, std::uint64_t b) {
  return rng::philox4x32(rng::make_counter(a, b), rng::make_key(seed, stream));
}

Point2 point_velocity(const TrajectorySpec& spec, std::size_t point) {
  if (spec.velocity) return *spec.velocity;
  const double heading =
      2.0 * std::numbers::pi * rng::uniform_open(draw(spec.seed, rng::kTrajectoryHeading, point, 0));
  const double u = rng::uniform_open(draw(spec.seed, rng::kTrajectorySpeed, point, 0));
  const double speed = spec.speed_min + (spec.speed_max - spec.speed_min) * u;
  return {speed * std::cos(heading), speed * std::sin(heading)};
}

double point_phase(const TrajectorySpec& spec, std::size_t point) {
  if (!spec.random_phase) return 0.0;
  return 2.0 * std::numbers::pi * rng::uniform_open(draw(spec.seed, rng::kTrajectoryPhase, point, 0));
}

Point2 segment_acceleration(const TrajectorySpec& spec, std::size_t point, std::int64_t segment) {
  const auto bits = draw(spec.seed, rng::kTrajectoryAcceleration, point,
                         static_cast<std::uint64_t>(segment));
  // Uniform over the disk of radius accel_bound.
  const double r = spec.accel_bound * std::sqrt(rng::uniform_open({bits[0], bits[1], 0, 0}));
  const double theta = 2.0 * std::numbers::pi * rng::uniform_open({bits[2], bits[3], 0, 0});
  return {r * std::cos(theta), r * std::sin(theta)};
}

Point2 reflect(Point2 p, FrameBounds b) {
  return {reflect_into(p.x, b.width), reflect_into(p.y, b.height)};
}

void fill_piecewise(const TrajectorySpec& spec, std::size_t point, Point2 origin,
                    PointFrameArray<GroundTruthSample>& out) {
  Point2 p = origin;
  Point2 v = point_velocity(spec, point);
  const double vmax = spec.max_speed;
  auto clamp_speed = [vmax](Point2 u) {
    const double s = std::hypot(u.x, u.y);
    return s > vmax ? (vmax / s) * u : u;
  };
  v = clamp_speed(v);
  out(point, 0).position = p;
  for (std::int64_t t = 1; t < spec.frames; ++t) {
    const Point2 a = segment_acceleration(spec, point, (t - 1) / spec.segment_length);
    v = clamp_speed(v + a);
    p = p + v;
    // Bounce: fold position back inside and flip the offending component.
    if (p.x < 0.0 || p.x > spec.bounds.width) {
      p.x = reflect_into(p.x, spec.bounds.width);
      v.x = -v.x;
    }
    if (p.y < 0.0 || p.y > spec.bounds.height) {
      p.y = reflect_into(p.y, spec.bounds.height);
      v.y = -v.y;
    }
    out(point, static_cast<std::size_t>(t)).position = p;
  }
}

}  // namespace

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::ConstantVelocity: return "constant-velocity";
    case TrajectoryKind::Circular: return "circular";
    case TrajectoryKind::Sinusoidal: return "sinusoidal";
    case TrajectoryKind::PiecewiseAcceleration: return "piecewise-acceleration";
  }
  return "unknown";
}

TrajectoryKind parse_trajectory_kind(std::string_view name) {
  for (auto k : {TrajectoryKind::ConstantVelocity, TrajectoryKind::Circular,
                 TrajectoryKind::Sinusoidal, TrajectoryKind::PiecewiseAcceleration}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorKind::InvalidParameter, "unknown trajectory kind '" + std::string(name) + "'");
}

void TrajectorySpec::validate() const {
  require(frames >= 1, "frames must be >= 1");
  require(num_points >= 1, "num_points must be >= 1");
  require(bounds.width > 0.0 && bounds.height > 0.0, "frame bounds must be positive");
  require(origins.empty() || origins.size() == static_cast<std::size_t>(num_points),
          "origins must be empty or one per point");
  require(lattice_margin >= 0.0 && lattice_margin < 0.5, "lattice_margin must be in [0, 0.5)");
  require(speed_min >= 0.0 && speed_max >= speed_min, "need 0 <= speed_min <= speed_max");
  require(radius >= 0.0, "radius must be >= 0");
  require(std::isfinite(angular_rate), "angular_rate must be finite");
  require(period > 0.0, "period must be > 0");
  require(amplitude >= 0.0, "amplitude must be >= 0");
  require(accel_bound >= 0.0, "accel_bound must be >= 0");
  require(segment_length >= 1, "segment_length must be >= 1");
  require(max_speed > 0.0, "max_speed must be > 0");
  for (const auto& gap : occlusions) {
    require(gap.point_id >= 0 && gap.point_id < num_points, "occlusion names an unknown point");
    require(gap.frame_start >= 0 && gap.frame_start <= gap.frame_end && gap.frame_end <= frames,
            "occlusion window outside [0, frames)");
  }
}

double reflect_into(double u, double extent) {
  if (u >= 0.0 && u <= extent) return u;
  double m = std::fmod(u, 2.0 * extent);
  if (m < 0.0) m += 2.0 * extent;
  return m <= extent ? m : 2.0 * extent - m;
}

std::vector<Point2> lattice_origins(int num_points, FrameBounds bounds, double margin) {
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_points))));
  const int rows = (num_points + cols - 1) / cols;
  const double x0 = margin * bounds.width;
  const double y0 = margin * bounds.height;
  const double w = (1.0 - 2.0 * margin) * bounds.width;
  const double h = (1.0 - 2.0 * margin) * bounds.height;
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(num_points));
  for (int i = 0; i < num_points; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    out.push_back({x0 + (c + 0.5) / cols * w, y0 + (r + 0.5) / rows * h});
  }
  return out;
}

Dataset generate(const TrajectorySpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.num_points);
  const auto frames = static_cast<std::size_t>(spec.frames);
  const std::vector<Point2> origins =
      spec.origins.empty() ? lattice_origins(spec.num_points, spec.bounds, spec.lattice_margin)
                           : spec.origins;

  PointFrameArray<GroundTruthSample> tracks(n, frames);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 o = origins[i];
    switch (spec.kind) {
      case TrajectoryKind::ConstantVelocity: {
        const Point2 v = point_velocity(spec, i);
        for (std::size_t t = 0; t < frames; ++t) {
          const double td = static_cast<double>(t);
          tracks(i, t).position = reflect({o.x + v.x * td, o.y + v.y * td}, spec.bounds);
        }
        break;
      }
      case TrajectoryKind::Circular: {
        for (std::size_t t = 0; t < frames; ++t) {
          const double angle = spec.angular_rate * static_cast<double>(t);
          const Point2 p{o.x + spec.radius * std::cos(angle), o.y + spec.radius * std::sin(angle)};
          tracks(i, t).position = reflect(p, spec.bounds);
        }
        break;
      }
      case TrajectoryKind::Sinusoidal: {
        const Point2 v = point_velocity(spec, i);
        const double speed = std::hypot(v.x, v.y);
        const Point2 normal = speed > 0.0 ? Point2{-v.y / speed, v.x / speed} : Point2{0.0, 1.0};
        const double phase = point_phase(spec, i);
        for (std::size_t t = 0; t < frames; ++t) {
          const double td = static_cast<double>(t);
          const double offset =
              spec.amplitude * std::sin(2.0 * std::numbers::pi * td / spec.period + phase);
          const Point2 p{o.x + v.x * td + offset * normal.x, o.y + v.y * td + offset * normal.y};
          tracks(i, t).position = reflect(p, spec.bounds);
        }
        break;
      }
      case TrajectoryKind::PiecewiseAcceleration:
        fill_piecewise(spec, i, o, tracks);
        break;
    }
  }
  for (const auto& gap : spec.occlusions) {
    for (auto t = gap.frame_start; t < gap.frame_end; ++t) {
      tracks(static_cast<std::size_t>(gap.point_id), static_cast<std::size_t>(t)).visible = false;
    }
  }

  std::vector<PointId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<PointId>(i);
  nlohmann::json provenance = {{"origin", "synthetic"}, {"spec", to_json(spec)}};
  return Dataset(spec.bounds, std::move(ids), std::move(tracks), std::move(provenance));
}

nlohmann::json to_json(const TrajectorySpec& spec) {
  nlohmann::json j = {
      {"kind", to_string(spec.kind)},
      {"frames", spec.frames},
      {"numPoints", spec.num_points},
      {"frameBounds", {{"width", spec.bounds.width}, {"height", spec.bounds.height}}},
      {"seed", spec.seed},
      {"latticeMargin", spec.lattice_margin},
      {"speedMin", spec.speed_min},
      {"speedMax", spec.speed_max},
      {"radius", spec.radius},
      {"angularRate", spec.angular_rate},
      {"amplitude", spec.amplitude},
      {"period", spec.period},
      {"randomPhase", spec.random_phase},
      {"accelBound", spec.accel_bound},
      {"segmentLength", spec.segment_length},
      {"maxSpeed", spec.max_speed},
  };
  if (spec.velocity) j["velocity"] = {spec.velocity->x, spec.velocity->y};
  if (!spec.origins.empty()) {
    auto& arr = j["origins"] = nlohmann::json::array();
    for (const auto& o : spec.origins) arr.push_back({o.x, o.y});
  }
  auto& gaps = j["occlusions"] = nlohmann::json::array();
  for (const auto& g : spec.occlusions) gaps.push_back({g.point_id, g.frame_start, g.frame_end});
  return j;
}

}  // namespace ktrack
