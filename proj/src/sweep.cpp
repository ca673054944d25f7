#include "ktrack/sweep.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "ktrack/error.hpp"

namespace ktrack {
namespace {

struct Baseline {
  std::optional<MetricReport> report;
  TrackResult result;
  std::string error;
  std::optional<ErrorKind> error_kind;
};

ScheduleConfig baseline_config(std::int64_t frames, std::int64_t warmup) {
  return {frames, 0, std::min(warmup, frames)};
}

Baseline run_baseline(const Dataset& dataset, const TrackerFactory& trackers, std::uint64_t seed,
                      std::int64_t warmup, const KalmanParams& params) {
  Baseline b;
  try {
    auto tracker = trackers(dataset, seed);
    b.result = run_session(*tracker, dataset, baseline_config(dataset.frames(), warmup),
                           PredictorKind::ZeroOrderHold, params, {ExecutionPolicy::Serial});
    if (!b.result.complete) {
      b.error = "baseline incomplete: " + b.result.abort_reason;
      b.error_kind = b.result.abort_kind;
      return b;
    }
    MetricReport r = evaluate(b.result, dataset, ExecutionPolicy::Serial);
    r.retention = 1.0;
    r.speedup = 1.0;
    b.report = r;
  } catch (const Error& e) {
    b.error = std::string("baseline: ") + e.what();
    b.error_kind = e.kind();
  }
  return b;
}

SweepRow row_from(const SweepCell& cell, const TrackResult& result) {
  SweepRow row;
  row.cell = cell;
  row.cell.tracker = result.tracker_name;
  row.frames = result.config.total_frames;
  row.points = static_cast<std::int64_t>(result.point_ids.size());
  row.complete = result.complete;
  row.tracker_calls = result.tracker_calls;
  row.nominal_calls = nominal_inference_count(result.config);
  row.failed_measurements = result.failed_measurements;
  row.simulated_cost_ms = result.simulated_cost_ms;
  row.wall_clock_ms = result.wall_clock_ms;
  if (!result.complete) {
    row.error = result.abort_reason;
    row.error_kind = result.abort_kind;
  }
  return row;
}

SweepRow run_cell(const SweepCell& cell, const Dataset& dataset, const TrackerFactory& trackers,
                  const KalmanParams& params, const Baseline& baseline) {
  if (cell.n == 0) {
    SweepRow row = row_from(cell, baseline.result);
    row.report = baseline.report;
    if (!baseline.report) {
      row.error = baseline.error;
      row.error_kind = baseline.error_kind;
    }
    return row;
  }
  SweepRow row;
  row.cell = cell;
  try {
    auto tracker = trackers(dataset, cell.seed);
    const ScheduleConfig config{dataset.frames(), cell.n, cell.warmup};
    const TrackResult result =
        run_session(*tracker, dataset, config, cell.kind, params, {ExecutionPolicy::Serial});
    row = row_from(cell, result);
    if (result.frames_processed > 0) {
      MetricReport report = evaluate(result, dataset, ExecutionPolicy::Serial);
      if (baseline.report) {
        attach_baseline(report, *baseline.report);
      } else if (row.error.empty()) {
        row.error = baseline.error;
        row.error_kind = baseline.error_kind;
      }
      row.report = report;
    }
  } catch (const Error& e) {
    row.error = e.what();
    row.error_kind = e.kind();
  }
  return row;
}

}  // namespace

void SweepPlan::validate() const {
  if (ns.empty() || kinds.empty() || grid_sizes.empty() || warmups.empty() || seeds.empty()) {
    fail(ErrorKind::InvalidParameter, "sweep: every axis needs at least one value");
  }
  for (auto n : ns) {
    if (n < 0) fail(ErrorKind::InvalidParameter, "sweep: N must be >= 0");
  }
  for (auto w : warmups) {
    if (w < 0) fail(ErrorKind::InvalidParameter, "sweep: warmup must be >= 0");
  }
  for (auto g : grid_sizes) {
    if (g < 1) fail(ErrorKind::InvalidParameter, "sweep: grid size must be >= 1");
  }
  params.validate();
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan, const DatasetFactory& datasets,
                                const TrackerFactory& trackers, const RowSink& sink,
                                ExecutionPolicy policy) {
  plan.validate();

  struct Job {
    std::size_t input;
    std::size_t baseline;
    SweepCell cell;
  };
  std::vector<SweepInput> inputs;
  std::vector<Baseline> baselines;
  std::vector<Job> jobs;
  for (int grid : plan.grid_sizes) {
    for (std::uint64_t seed : plan.seeds) {
      inputs.push_back(datasets(grid, seed));
      const std::size_t input = inputs.size() - 1;
      const Dataset& ds = inputs.back().dataset;
      for (std::int64_t warmup : plan.warmups) {
        baselines.push_back(run_baseline(ds, trackers, seed, warmup, plan.params));
        const std::size_t base = baselines.size() - 1;
        for (std::int64_t n : plan.ns) {
          for (PredictorKind kind : plan.kinds) {
            jobs.push_back({input, base, {inputs[input].label, "", kind, n, warmup, grid, seed}});
          }
        }
      }
    }
  }

  std::vector<SweepRow> rows(jobs.size());
  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
  if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel for ordered schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const Job& job = jobs[static_cast<std::size_t>(i)];
      rows[static_cast<std::size_t>(i)] = run_cell(job.cell, inputs[job.input].dataset, trackers,
                                                   plan.params, baselines[job.baseline]);
#pragma omp ordered
      {
        if (sink) sink(rows[static_cast<std::size_t>(i)]);
      }
    }
  } else {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      rows[i] = run_cell(jobs[i].cell, inputs[jobs[i].input].dataset, trackers, plan.params,
                         baselines[jobs[i].baseline]);
      if (sink) sink(rows[i]);
    }
  }
  return rows;
}

SweepRow run_single(const SweepInput& input, const TrackerFactory& trackers,
                    const ScheduleConfig& config, PredictorKind kind, const KalmanParams& params,
                    int grid, std::uint64_t seed) {
  config.validate();
  if (config.total_frames != input.dataset.frames()) {
    fail(ErrorKind::InvalidParameter, "run: schedule length must match the dataset");
  }
  const Baseline baseline =
      run_baseline(input.dataset, trackers, seed, config.warmup_frames, params);
  const SweepCell cell{input.label, "", kind, config.keyframe_interval, config.warmup_frames, grid,
                       seed};
  return run_cell(cell, input.dataset, trackers, params, baseline);
}

}  // namespace ktrack
