#include "ktrack/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ktrack/error.hpp"

namespace ktrack {
namespace {

void check_shapes(const Positions& pred, const Positions& gt, const Visibility& vis) {
  if (pred.points() != gt.points() || pred.frames() != gt.frames() ||
      vis.points() != gt.points() || vis.frames() != gt.frames()) {
    fail(ErrorKind::InvalidParameter, "metrics: prediction and ground truth shapes differ");
  }
}

struct Partial {
  double sum = 0.0;
  std::int64_t hits = 0;
  std::int64_t count = 0;
};

// Per-point partial reductions, combined serially in point order.
template <class RowFn>
Partial reduce_points(std::size_t points, ExecutionPolicy policy, RowFn row) {
  std::vector<Partial> partials(points);
  if (policy == ExecutionPolicy::Parallel) {
    const auto n = static_cast<std::ptrdiff_t>(points);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) partials[static_cast<std::size_t>(p)] = row(static_cast<std::size_t>(p));
  } else {
    for (std::size_t p = 0; p < points; ++p) partials[p] = row(p);
  }
  Partial total;
  for (const auto& part : partials) {
    total.sum += part.sum;
    total.hits += part.hits;
    total.count += part.count;
  }
  return total;
}

}  // namespace

double epe(const Positions& pred, const Positions& gt, const Visibility& visible,
           ExecutionPolicy policy) {
  check_shapes(pred, gt, visible);
  const Partial total = reduce_points(pred.points(), policy, [&](std::size_t p) {
    Partial part;
    for (std::size_t f = 0; f < pred.frames(); ++f) {
      if (!visible(p, f)) continue;
      part.sum += distance(pred(p, f), gt(p, f));
      ++part.count;
    }
    return part;
  });
  if (total.count == 0) fail(ErrorKind::UndefinedMetric, "EPE: no visible point-frame pairs");
  return total.sum / static_cast<double>(total.count);
}

double pck(const Positions& pred, const Positions& gt, double threshold, const Visibility& visible,
           ExecutionPolicy policy) {
  check_shapes(pred, gt, visible);
  if (!(threshold > 0.0)) fail(ErrorKind::InvalidParameter, "PCK: threshold must be positive");
  const Partial total = reduce_points(pred.points(), policy, [&](std::size_t p) {
    Partial part;
    for (std::size_t f = 0; f < pred.frames(); ++f) {
      if (!visible(p, f)) continue;
      ++part.count;
      if (distance(pred(p, f), gt(p, f)) <= threshold) ++part.hits;
    }
    return part;
  });
  if (total.count == 0) fail(ErrorKind::UndefinedMetric, "PCK: no visible point-frame pairs");
  return static_cast<double>(total.hits) / static_cast<double>(total.count);
}

double jaccard_at(const Positions& pred, const Visibility& pred_visible, const Positions& gt,
                  const Visibility& gt_visible, double threshold) {
  check_shapes(pred, gt, gt_visible);
  check_shapes(pred, gt, pred_visible);
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t p = 0; p < pred.points(); ++p) {
    for (std::size_t f = 0; f < pred.frames(); ++f) {
      const bool close = distance(pred(p, f), gt(p, f)) <= threshold;
      const bool pv = pred_visible(p, f) != 0;
      const bool gv = gt_visible(p, f) != 0;
      if (pv && gv && close) {
        ++tp;
      } else {
        if (pv) ++fp;  // occluded in truth, or visible but too far
        if (gv) ++fn;  // predicted occluded, or too far
      }
    }
  }
  const std::int64_t denom = tp + fp + fn;
  if (denom == 0) {
    fail(ErrorKind::UndefinedMetric, "Jaccard: nothing visible in prediction or ground truth");
  }
  return static_cast<double>(tp) / static_cast<double>(denom);
}

double average_jaccard(const Positions& pred, const Visibility& pred_visible, const Positions& gt,
                       const Visibility& gt_visible) {
  double sum = 0.0;
  for (double t : kJaccardThresholds) sum += jaccard_at(pred, pred_visible, gt, gt_visible, t);
  return sum / static_cast<double>(kJaccardThresholds.size());
}

double MetricReport::pck_at(double threshold) const {
  for (std::size_t i = 0; i < kPckThresholds.size(); ++i) {
    if (kPckThresholds[i] == threshold) return pck[i];
  }
  fail(ErrorKind::InvalidParameter, "PCK threshold not tracked in reports");
}

RetentionSpeedup retention_and_speedup(const MetricReport& report, const MetricReport& baseline) {
  if (!(baseline.pck5() > 0.0)) {
    fail(ErrorKind::UndefinedMetric, "retention: baseline PCK@5px is zero");
  }
  if (!(report.simulated_cost_ms > 0.0)) {
    fail(ErrorKind::UndefinedMetric, "speedup: method cost is zero");
  }
  return {report.pck5() / baseline.pck5(), baseline.simulated_cost_ms / report.simulated_cost_ms};
}

void attach_baseline(MetricReport& report, const MetricReport& baseline) {
  const auto rs = retention_and_speedup(report, baseline);
  report.retention = rs.retention;
  report.speedup = rs.speedup;
}

MetricReport evaluate(const TrackResult& result, const Dataset& dataset, ExecutionPolicy policy) {
  const auto frames = static_cast<std::size_t>(result.frames_processed);
  const std::size_t points = result.samples.points();
  if (frames == 0) fail(ErrorKind::UndefinedMetric, "evaluate: session processed no frames");
  if (points != dataset.num_points() ||
      static_cast<std::int64_t>(frames) > dataset.frames()) {
    fail(ErrorKind::InvalidParameter, "evaluate: result does not match dataset");
  }

  Positions pred(points, frames), gt(points, frames);
  Visibility pred_vis(points, frames), gt_vis(points, frames);
  for (std::size_t p = 0; p < points; ++p) {
    const auto index = dataset.index_of(result.point_ids[p]);
    if (!index) fail(ErrorKind::InvalidParameter, "evaluate: point id missing from dataset");
    for (std::size_t f = 0; f < frames; ++f) {
      const TrackedSample& s = result.samples(p, f);
      const GroundTruthSample& g = dataset.at(*index, static_cast<std::int64_t>(f));
      pred(p, f) = s.position;
      pred_vis(p, f) = s.predicted_visible ? 1 : 0;
      gt(p, f) = g.position;
      gt_vis(p, f) = g.visible ? 1 : 0;
    }
  }

  MetricReport r;
  r.frames = static_cast<std::int64_t>(frames);
  r.epe = epe(pred, gt, gt_vis, policy);
  for (std::size_t i = 0; i < kPckThresholds.size(); ++i) {
    r.pck[i] = pck(pred, gt, kPckThresholds[i], gt_vis, policy);
  }
  r.average_jaccard = average_jaccard(pred, pred_vis, gt, gt_vis);
  r.simulated_cost_ms = result.simulated_cost_ms;
  r.fps_simulated = result.simulated_cost_ms > 0.0
                        ? static_cast<double>(frames) / (result.simulated_cost_ms / 1000.0)
                        : std::numeric_limits<double>::infinity();
  r.fps_wall = result.wall_clock_ms > 0.0
                   ? static_cast<double>(frames) / (result.wall_clock_ms / 1000.0)
                   : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace ktrack
