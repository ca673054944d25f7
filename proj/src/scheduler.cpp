#include "ktrack/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <optional>
#include <string>

#include "ktrack/error.hpp"

namespace ktrack {
namespace {

// Below this many points the per-frame fork/join costs more than it saves.
constexpr std::size_t kMinParallelPoints = 64;

bool is_query(FrameRole role) { return role != FrameRole::Intermediate; }

bool aborts_session(ErrorKind kind) {
  return kind == ErrorKind::Transport || kind == ErrorKind::Protocol ||
         kind == ErrorKind::TrackerReported;
}

struct PointTrack {
  std::int64_t last_valid_frame = -1;
  bool failing = false;
  std::int64_t failures = 0;
};

class Session {
 public:
  Session(TrackerSource& tracker, const Dataset& dataset, const ScheduleConfig& config,
          PredictorKind kind, const KalmanParams& params)
      : tracker_(tracker),
        ids_(dataset.point_ids().begin(), dataset.point_ids().end()),
        config_(config),
        roles_(plan_schedule(config)),
        interval_(config.is_baseline() ? 1 : config.keyframe_interval),
        measured_(static_cast<std::size_t>(config.total_frames)),
        predictors_(ids_.size(),
                    Predictor(config.is_baseline() ? PredictorKind::ZeroOrderHold : kind, params)),
        points_(ids_.size()) {}

  const std::vector<Measurement>& fetch(std::int64_t t) {
    auto& slot = measured_[static_cast<std::size_t>(t)];
    if (!slot) {
      std::vector<Measurement> ms = tracker_.query(t, ids_);
      if (ms.size() != ids_.size()) {
        fail(ErrorKind::Protocol, "tracker returned " + std::to_string(ms.size()) +
                                      " measurements for " + std::to_string(ids_.size()) +
                                      " points");
      }
      for (std::size_t i = 0; i < ms.size(); ++i) {
        if (ms[i].point_id != ids_[i]) {
          fail(ErrorKind::Protocol, "tracker answered for point " +
                                        std::to_string(ms[i].point_id) + " instead of " +
                                        std::to_string(ids_[i]));
        }
      }
      slot = std::move(ms);
      ++calls_;
    }
    return *slot;
  }

  // Buffered lookahead for linear interpolation: the next valid keyframe
  // measurement of each point that has none pending.
  void resolve_lookahead(std::int64_t t) {
    const auto frames = config_.total_frames;
    for (std::size_t p = 0; p < predictors_.size(); ++p) {
      Predictor& pr = predictors_[p];
      if (!pr.needs_lookahead()) continue;
      bool found = false;
      for (std::int64_t u = t; u < frames && !found; ++u) {
        if (!is_query(roles_[static_cast<std::size_t>(u)])) continue;
        const Measurement& m = fetch(u)[p];
        if (m.valid) {
          pr.set_next_keyframe({u, m.position()});
          found = true;
        }
      }
      if (!found) pr.mark_stream_end();
    }
  }

  void process_point(std::size_t p, std::int64_t t, const Measurement* m, TrackedSample& out) {
    Predictor& pr = predictors_[p];
    PointTrack& track = points_[p];
    const bool valid = m != nullptr && m->valid;

    if (!pr.initialized()) {
      if (valid) {
        pr.initialize(m->position(), t);
        track.last_valid_frame = t;
        out = {pr.position(), Provenance::Measured, true};
      } else {
        if (m != nullptr) ++track.failures;
        out = {Point2{}, Provenance::HeldAfterFailure, false};
      }
      return;
    }

    const Point2 predicted = pr.advance(t);
    if (m != nullptr) {
      if (valid) {
        try {
          pr.ingest(m->position(), t);
          track.last_valid_frame = t;
          track.failing = false;
          out = {pr.position(), Provenance::Measured, true};
          return;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateUpdate) throw;
        }
      }
      track.failing = true;
      ++track.failures;
    }
    const bool visible = !(track.failing && t - track.last_valid_frame > interval_);
    out = {predicted, track.failing ? Provenance::HeldAfterFailure : Provenance::Predicted, visible};
  }

  void run_frame(std::int64_t t, PointFrameArray<TrackedSample>& samples, ExecutionPolicy policy) {
    const FrameRole role = roles_[static_cast<std::size_t>(t)];
    const std::vector<Measurement>* ms = is_query(role) ? &fetch(t) : nullptr;
    if (predictors_.front().kind() == PredictorKind::LinearInterpolation) resolve_lookahead(t);

    const auto n = static_cast<std::ptrdiff_t>(predictors_.size());
    const auto tf = static_cast<std::size_t>(t);
    std::vector<std::exception_ptr> errors;
    if (policy == ExecutionPolicy::Parallel) {
      errors.resize(predictors_.size());
#pragma omp parallel for schedule(static) if (predictors_.size() >= kMinParallelPoints)
      for (std::ptrdiff_t p = 0; p < n; ++p) {
        const auto i = static_cast<std::size_t>(p);
        try {
          process_point(i, t, ms ? &(*ms)[i] : nullptr, samples(i, tf));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    } else {
      for (std::size_t i = 0; i < predictors_.size(); ++i) {
        process_point(i, t, ms ? &(*ms)[i] : nullptr, samples(i, tf));
      }
    }

    const std::int64_t last_warmup = std::max<std::int64_t>(config_.warmup_frames, 1) - 1;
    if (t == last_warmup) {
      for (auto& pr : predictors_) pr.end_warmup();
    }
  }

  std::int64_t calls() const { return calls_; }
  std::int64_t failures() const {
    std::int64_t total = 0;
    for (const auto& p : points_) total += p.failures;
    return total;
  }

 private:
  TrackerSource& tracker_;
  std::vector<PointId> ids_;
  ScheduleConfig config_;
  std::vector<FrameRole> roles_;
  std::int64_t interval_;
  std::vector<std::optional<std::vector<Measurement>>> measured_;
  std::vector<Predictor> predictors_;
  std::vector<PointTrack> points_;
  std::int64_t calls_ = 0;
};

}  // namespace

void ScheduleConfig::validate() const {
  if (total_frames < 1) fail(ErrorKind::InvalidParameter, "schedule: T must be >= 1");
  if (keyframe_interval < 0) fail(ErrorKind::InvalidParameter, "schedule: N must be >= 0");
  if (warmup_frames < 0 || warmup_frames > total_frames) {
    fail(ErrorKind::InvalidParameter, "schedule: W must satisfy 0 <= W <= T");
  }
}

std::string_view to_string(FrameRole role) {
  switch (role) {
    case FrameRole::Warmup: return "warmup";
    case FrameRole::Keyframe: return "keyframe";
    case FrameRole::Intermediate: return "intermediate";
  }
  return "unknown";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Measured: return "measured";
    case Provenance::Predicted: return "predicted";
    case Provenance::HeldAfterFailure: return "held-after-failure";
  }
  return "unknown";
}

std::vector<FrameRole> plan_schedule(const ScheduleConfig& config) {
  config.validate();
  std::vector<FrameRole> roles(static_cast<std::size_t>(config.total_frames));
  for (std::int64_t t = 0; t < config.total_frames; ++t) {
    FrameRole role;
    if (t < config.warmup_frames) {
      role = FrameRole::Warmup;
    } else if (config.is_baseline() || t % config.keyframe_interval == 0) {
      role = FrameRole::Keyframe;
    } else {
      role = FrameRole::Intermediate;
    }
    roles[static_cast<std::size_t>(t)] = role;
  }
  return roles;
}

std::int64_t inference_count(const ScheduleConfig& config) {
  config.validate();
  if (config.is_baseline()) return config.total_frames;
  const std::int64_t n = config.keyframe_interval;
  const std::int64_t w = config.warmup_frames;
  // Multiples of N in [W, T).
  const std::int64_t first = (w + n - 1) / n;
  const std::int64_t last = (config.total_frames - 1) / n;
  return w + std::max<std::int64_t>(0, last - first + 1);
}

std::int64_t nominal_inference_count(const ScheduleConfig& config) {
  config.validate();
  if (config.is_baseline()) return config.total_frames;
  return (config.total_frames + config.keyframe_interval - 1) / config.keyframe_interval;
}

TrackResult run_session(TrackerSource& tracker, const Dataset& dataset,
                        const ScheduleConfig& config, PredictorKind kind,
                        const KalmanParams& params, SessionOptions options) {
  config.validate();
  params.validate();
  if (dataset.num_points() == 0) fail(ErrorKind::InvalidParameter, "session: dataset has no points");
  if (dataset.frames() < config.total_frames) {
    fail(ErrorKind::InvalidParameter, "session: schedule covers more frames than the dataset");
  }

  TrackResult result;
  result.config = config;
  result.kind = kind;
  const TrackerDescriptor desc = tracker.descriptor();
  result.tracker_name = desc.name;
  result.point_ids.assign(dataset.point_ids().begin(), dataset.point_ids().end());
  result.samples = PointFrameArray<TrackedSample>(dataset.num_points(),
                                                  static_cast<std::size_t>(config.total_frames));

  Session session(tracker, dataset, config, kind, params);
  const auto start = std::chrono::steady_clock::now();
  std::int64_t t = 0;
  for (; t < config.total_frames; ++t) {
    try {
      session.run_frame(t, result.samples, options.policy);
    } catch (const Error& e) {
      if (!aborts_session(e.kind())) throw;
      result.complete = false;
      result.failed_calls = 1;
      result.abort_reason = e.what();
      result.abort_kind = e.kind();
      break;
    }
  }
  result.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  result.frames_processed = t;
  result.tracker_calls = session.calls();
  result.failed_measurements = session.failures();
  result.simulated_cost_ms = static_cast<double>(result.tracker_calls) * desc.cost_per_call_ms;
  return result;
}

}  // namespace ktrack
