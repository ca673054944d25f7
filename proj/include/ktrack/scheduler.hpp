#pragma once

// Hybrid tracking pipeline: a short warmup of per-frame tracker calls, then a
// tracker call every N frames with per-point prediction in between.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ktrack/dataset.hpp"
#include "ktrack/error.hpp"
#include "ktrack/kalman.hpp"
#include "ktrack/predictors.hpp"
#include "ktrack/trackers.hpp"
#include "ktrack/types.hpp"

namespace ktrack {

struct ScheduleConfig {
  std::int64_t total_frames = 0;
  std::int64_t keyframe_interval = 5;  // N; 0 = tracker on every frame (baseline)
  std::int64_t warmup_frames = 3;      // W

  bool is_baseline() const { return keyframe_interval == 0; }
  /// Throws InvalidParameter unless T >= 1, N >= 0 and 0 <= W <= T.
  void validate() const;
};

enum class FrameRole : std::uint8_t { Warmup, Keyframe, Intermediate };

std::string_view to_string(FrameRole role);

/// Frames [0, W) are Warmup; afterwards a frame is a Keyframe iff t mod N == 0.
/// N = 0 makes every post-warmup frame a Keyframe.
std::vector<FrameRole> plan_schedule(const ScheduleConfig& config);

/// Exact tracker-call count: W + |{t : W <= t < T, t mod N == 0}| (T for N = 0).
std::int64_t inference_count(const ScheduleConfig& config);

/// ceil(T / N), the idealized count that ignores warmup (T for N = 0).
std::int64_t nominal_inference_count(const ScheduleConfig& config);

enum class Provenance : std::uint8_t { Measured, Predicted, HeldAfterFailure };

std::string_view to_string(Provenance p);

struct TrackedSample {
  Point2 position;
  Provenance provenance = Provenance::Predicted;
  bool predicted_visible = false;

  friend bool operator==(const TrackedSample&, const TrackedSample&) = default;
};

struct TrackResult {
  ScheduleConfig config;
  PredictorKind kind = PredictorKind::FullKalman;
  std::string tracker_name;
  std::vector<PointId> point_ids;
  PointFrameArray<TrackedSample> samples;

  std::int64_t tracker_calls = 0;
  std::int64_t failed_calls = 0;         // frame-level transport/protocol failures
  std::int64_t failed_measurements = 0;  // per-point invalid or rejected measurements
  double simulated_cost_ms = 0.0;
  double wall_clock_ms = 0.0;

  bool complete = true;
  std::int64_t frames_processed = 0;
  std::string abort_reason;
  std::optional<ErrorKind> abort_kind;
};

enum class ExecutionPolicy { Serial, Parallel };

struct SessionOptions {
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
};

/// Runs the hybrid pipeline over every point of `dataset`.
///
/// Points whose measurement is invalid (or whose update is degenerate) skip
/// the update and keep predicting; other points are unaffected. A frame-level
/// tracker failure stops the session and returns the frames processed so far
/// with complete = false. With N = 0 the output is the raw tracker stream
/// (last valid measurement held through failures), whatever `kind` is.
TrackResult run_session(TrackerSource& tracker, const Dataset& dataset,
                        const ScheduleConfig& config, PredictorKind kind,
                        const KalmanParams& params, SessionOptions options = {});

}  // namespace ktrack
