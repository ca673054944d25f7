#pragma once

// Point-tracking evaluation metrics. Positions are gated on ground-truth
// visibility; AJ additionally scores the predicted visibility flags.
//
// Reductions are computed per point and combined in point order, so the
// serial and OpenMP paths return bit-identical values.

#include <array>
#include <cstdint>
#include <optional>

#include "ktrack/dataset.hpp"
#include "ktrack/scheduler.hpp"
#include "ktrack/types.hpp"

namespace ktrack {

using Visibility = PointFrameArray<std::uint8_t>;
using Positions = PointFrameArray<Point2>;

/// Mean Euclidean error over visible pairs. Throws UndefinedMetric when no
/// pair is visible.
double epe(const Positions& pred, const Positions& gt, const Visibility& visible,
           ExecutionPolicy policy = ExecutionPolicy::Parallel);

/// Fraction of visible pairs with error <= threshold.
double pck(const Positions& pred, const Positions& gt, double threshold,
           const Visibility& visible, ExecutionPolicy policy = ExecutionPolicy::Parallel);

inline constexpr std::array<double, 5> kJaccardThresholds = {1.0, 2.0, 4.0, 8.0, 16.0};

/// Jaccard index TP / (TP + FP + FN) at one threshold.
double jaccard_at(const Positions& pred, const Visibility& pred_visible, const Positions& gt,
                  const Visibility& gt_visible, double threshold);

/// TAP-Vid Average Jaccard: mean of jaccard_at over {1, 2, 4, 8, 16} px.
double average_jaccard(const Positions& pred, const Visibility& pred_visible,
                       const Positions& gt, const Visibility& gt_visible);

inline constexpr std::array<double, 6> kPckThresholds = {1.0, 2.0, 4.0, 5.0, 8.0, 16.0};

struct MetricReport {
  double epe = 0.0;
  std::array<double, kPckThresholds.size()> pck{};  // indexed like kPckThresholds
  double average_jaccard = 0.0;
  double fps_simulated = 0.0;
  double fps_wall = 0.0;
  double simulated_cost_ms = 0.0;
  std::int64_t frames = 0;
  std::optional<double> speedup;    // vs the per-frame baseline
  std::optional<double> retention;  // PCK@5px / baseline PCK@5px

  double pck_at(double threshold) const;
  double pck5() const { return pck_at(5.0); }

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct RetentionSpeedup {
  double retention = 0.0;
  double speedup = 0.0;
};

/// retention = PCK@5 / baseline PCK@5, speedup = baseline cost / method cost.
RetentionSpeedup retention_and_speedup(const MetricReport& report, const MetricReport& baseline);

/// Scores a session against ground truth over the frames it processed.
MetricReport evaluate(const TrackResult& result, const Dataset& dataset,
                      ExecutionPolicy policy = ExecutionPolicy::Parallel);

/// Fills speedup/retention of `report` from `baseline`.
void attach_baseline(MetricReport& report, const MetricReport& baseline);

}  // namespace ktrack
