#pragma once

// Cartesian sweeps over keyframe interval, predictor, grid size, warmup and
// seed. Every cell is scored against the per-frame baseline of its dataset.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ktrack/dataset.hpp"
#include "ktrack/error.hpp"
#include "ktrack/kalman.hpp"
#include "ktrack/metrics.hpp"
#include "ktrack/predictors.hpp"
#include "ktrack/scheduler.hpp"
#include "ktrack/trackers.hpp"

namespace ktrack {

struct SweepCell {
  std::string dataset;
  std::string tracker;
  PredictorKind kind = PredictorKind::FullKalman;
  std::int64_t n = 0;
  std::int64_t warmup = 3;
  int grid = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepRow {
  SweepCell cell;
  std::int64_t frames = 0;
  std::int64_t points = 0;
  bool complete = false;
  std::int64_t tracker_calls = 0;
  std::int64_t nominal_calls = 0;  // ceil(T / N)
  std::int64_t failed_measurements = 0;
  double simulated_cost_ms = 0.0;
  std::optional<double> wall_clock_ms;
  std::optional<MetricReport> report;
  std::string error;
  std::optional<ErrorKind> error_kind;  // not serialized

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepPlan {
  std::vector<std::int64_t> ns;  // 0 = per-frame baseline
  std::vector<PredictorKind> kinds;
  std::vector<int> grid_sizes;
  std::vector<std::int64_t> warmups{3};
  std::vector<std::uint64_t> seeds{0};
  KalmanParams params;

  void validate() const;
};

struct SweepInput {
  std::string label;
  Dataset dataset;
};

using DatasetFactory = std::function<SweepInput(int grid, std::uint64_t seed)>;
using TrackerFactory =
    std::function<std::unique_ptr<TrackerSource>(const Dataset& dataset, std::uint64_t seed)>;
using RowSink = std::function<void(const SweepRow&)>;

/// Runs every cell and hands rows to `sink` in a fixed order (grid, seed,
/// warmup, N, predictor) regardless of `policy`. A failing cell yields a row
/// with `error` set and the sweep continues. N = 0 cells report the baseline
/// itself (retention and speedup 1).
///
/// With ExecutionPolicy::Parallel, cells run on OpenMP threads; the factories
/// must then be safe to call concurrently.
std::vector<SweepRow> run_sweep(const SweepPlan& plan, const DatasetFactory& datasets,
                                const TrackerFactory& trackers, const RowSink& sink = {},
                                ExecutionPolicy policy = ExecutionPolicy::Serial);

/// One method run plus its baseline on the same dataset and tracker settings.
SweepRow run_single(const SweepInput& input, const TrackerFactory& trackers,
                    const ScheduleConfig& config, PredictorKind kind, const KalmanParams& params,
                    int grid, std::uint64_t seed);

}  // namespace ktrack
