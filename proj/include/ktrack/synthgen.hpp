#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ktrack/dataset.hpp"

namespace ktrack {

enum class TrajectoryKind { ConstantVelocity, Circular, Sinusoidal, PiecewiseAcceleration };

std::string_view to_string(TrajectoryKind kind);
TrajectoryKind parse_trajectory_kind(std::string_view name);

/// Ground-truth occlusion: the point is invisible for frames [frame_start, frame_end).
struct VisibilityGap {
  PointId point_id = 0;
  std::int64_t frame_start = 0;
  std::int64_t frame_end = 0;
};

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::ConstantVelocity;
  std::int64_t frames = 100;
  int num_points = 20;
  FrameBounds bounds{};
  std::uint64_t seed = 0;

  // Start positions (circle centres for Circular). Empty: a uniform lattice
  // over the central (1 - 2 * lattice_margin) fraction of the frame.
  std::vector<Point2> origins;
  double lattice_margin = 0.25;

  // Per-point velocity. When unset, each point draws a heading uniformly and
  // a speed uniformly in [speed_min, speed_max].
  std::optional<Point2> velocity;
  double speed_min = 0.5;
  double speed_max = 2.0;

  double radius = 10.0;          // Circular, px
  double angular_rate = 0.1;     // Circular, rad/frame
  double amplitude = 5.0;        // Sinusoidal, px orthogonal to the carrier
  double period = 20.0;          // Sinusoidal, frames
  bool random_phase = true;      // Sinusoidal, per-point phase offset
  double accel_bound = 0.2;      // PiecewiseAcceleration, px/frame^2 (Euclidean)
  std::int64_t segment_length = 30;  // PiecewiseAcceleration, frames
  double max_speed = 6.0;        // PiecewiseAcceleration speed clamp, px/frame

  std::vector<VisibilityGap> occlusions;

  /// Throws InvalidSpec for degenerate parameters (radius < 0, period <= 0, ...).
  void validate() const;
};

/// Deterministic given the TrajectorySpec; positions stay inside the frame by
/// reflecting at the borders.
Dataset generate(const TrajectorySpec& spec);

/// Lattice placement used when TrajectorySpec::origins is empty.
std::vector<Point2> lattice_origins(int num_points, FrameBounds bounds, double margin);

/// Triangle-wave fold of a coordinate into [0, extent].
double reflect_into(double u, double extent);

nlohmann::json to_json(const TrajectorySpec& spec);

}  // namespace ktrack
