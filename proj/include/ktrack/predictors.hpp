#pragma once

// Intermediate-frame position predictors: the full constant-velocity Kalman
// filter and the ablation baselines it is compared against. All variants
// share one value-type interface so the scheduler can swap them freely.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "ktrack/kalman.hpp"
#include "ktrack/types.hpp"

namespace ktrack {

enum class PredictorKind {
  FullKalman,
  NoVelocityKalman,
  FixedCovarianceKalman,
  ConstantPosition,
  ZeroOrderHold,
  LinearInterpolation,
};

inline constexpr std::array<PredictorKind, 6> kAllPredictorKinds = {
    PredictorKind::FullKalman,       PredictorKind::NoVelocityKalman,
    PredictorKind::FixedCovarianceKalman, PredictorKind::ConstantPosition,
    PredictorKind::ZeroOrderHold,    PredictorKind::LinearInterpolation,
};

std::string_view to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view name);

bool is_kalman(PredictorKind kind);

struct TimedPosition {
  std::int64_t frame = 0;
  Point2 position;
};

class Predictor {
 public:
  Predictor(PredictorKind kind, const KalmanParams& params);

  PredictorKind kind() const { return kind_; }
  bool initialized() const { return initialized_; }

  /// First valid measurement for this point.
  void initialize(Point2 z, std::int64_t frame);

  /// Moves the estimate forward to `frame` (one model step per frame) and
  /// returns the predicted position. Throws LookaheadUnavailable for
  /// LinearInterpolation when no next keyframe is buffered and the stream has
  /// not been marked finished.
  Point2 advance(std::int64_t frame);

  /// Folds a valid measurement into the estimate. Kalman variants propagate
  /// DegenerateUpdate from the core; the estimate is unchanged in that case.
  void ingest(Point2 z, std::int64_t frame);

  /// Current position estimate (after the last advance/ingest).
  Point2 position() const;

  /// Called once the warmup phase is over. FixedCovarianceKalman freezes its
  /// covariance here; the other variants ignore it.
  void end_warmup();

  // LinearInterpolation lookahead. A buffered scheduler fetches the next
  // valid keyframe measurement before producing intermediate frames.
  bool needs_lookahead() const;
  void set_next_keyframe(TimedPosition next);
  /// No further measurement will arrive; hold the last one from now on.
  void mark_stream_end();

  const FilterState& filter() const { return filter_; }
  std::optional<TimedPosition> last_measurement() const;

 private:
  void push_measurement(TimedPosition m);

  PredictorKind kind_;
  KalmanParams params_;
  MotionModel motion_;
  MeasurementModel measurement_;
  FilterState filter_;
  bool initialized_ = false;
  bool warmup_done_ = false;
  bool covariance_frozen_ = false;
  std::int64_t frame_ = 0;

  // Non-filter variants: up to two most recent measurements, newest last.
  std::array<TimedPosition, 2> recent_{};
  int recent_count_ = 0;
  std::optional<TimedPosition> pending_next_;
  bool stream_ended_ = false;
  Point2 held_;
};

}  // namespace ktrack
