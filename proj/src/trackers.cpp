#include "ktrack/trackers.hpp"

#include <cmath>
#include <string>

#include "ktrack/bridge.hpp"
#include "ktrack/error.hpp"
#include "ktrack/rng.hpp"

namespace ktrack {

void OracleConfig::validate(std::int64_t frames) const {
  if (!std::isfinite(noise_std) || noise_std < 0.0) {
    fail(ErrorKind::InvalidParameter, "oracle: noise std must be >= 0");
  }
  if (!(failure_prob >= 0.0 && failure_prob <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "oracle: failure probability must be in [0, 1]");
  }
  if (!std::isfinite(simulated_cost_ms) || simulated_cost_ms < 0.0) {
    fail(ErrorKind::InvalidParameter, "oracle: simulated cost must be >= 0");
  }
  for (const auto& w : occlusions) {
    if (w.frame_start < 0 || w.frame_end < w.frame_start || w.frame_end > frames) {
      fail(ErrorKind::InvalidParameter, "oracle: occlusion window outside [0, T)");
    }
  }
}

std::vector<Measurement> oracle_query(const Dataset& dataset, const OracleConfig& cfg,
                                      std::int64_t frame, std::span<const PointId> ids) {
  if (frame < 0 || frame >= dataset.frames()) {
    fail(ErrorKind::Protocol, "oracle: frame " + std::to_string(frame) + " out of range");
  }
  const auto noise_key = rng::make_key(cfg.seed, rng::kMeasurementNoise);
  const auto failure_key = rng::make_key(cfg.seed, rng::kMeasurementFailure);

  std::vector<Measurement> out;
  out.reserve(ids.size());
  for (PointId id : ids) {
    const auto index = dataset.index_of(id);
    if (!index) fail(ErrorKind::Protocol, "oracle: unknown point id " + std::to_string(id));
    const GroundTruthSample& gt = dataset.at(*index, frame);
    const auto counter = rng::make_counter(static_cast<std::uint64_t>(frame),
                                           static_cast<std::uint64_t>(id));

    Measurement m{id, gt.position.x, gt.position.y, gt.visible};
    if (cfg.noise_std > 0.0) {
      const auto [nx, ny] = rng::normal_pair(rng::philox4x32(counter, noise_key));
      m.x += cfg.noise_std * nx;
      m.y += cfg.noise_std * ny;
    }
    if (cfg.failure_prob > 0.0 &&
        rng::uniform_open(rng::philox4x32(counter, failure_key)) < cfg.failure_prob) {
      m.valid = false;
    }
    for (const auto& w : cfg.occlusions) {
      if (w.point_id == id && frame >= w.frame_start && frame < w.frame_end) m.valid = false;
    }
    out.push_back(m);
  }
  return out;
}

OracleTracker::OracleTracker(const Dataset& dataset, OracleConfig cfg)
    : dataset_(&dataset), cfg_(std::move(cfg)) {
  cfg_.validate(dataset.frames());
}

std::vector<Measurement> OracleTracker::query(std::int64_t frame, std::span<const PointId> ids) {
  ++calls_;
  return oracle_query(*dataset_, cfg_, frame, ids);
}

TrackerDescriptor OracleTracker::descriptor() const { return {"oracle", cfg_.simulated_cost_ms}; }

ExternalTracker::ExternalTracker(std::unique_ptr<BridgeSession> session)
    : session_(std::move(session)) {}

ExternalTracker::~ExternalTracker() = default;

std::vector<Measurement> ExternalTracker::query(std::int64_t frame, std::span<const PointId> ids) {
  return session_->track(frame, ids);
}

TrackerDescriptor ExternalTracker::descriptor() const {
  return {session_->tracker_name(), session_->cost_hint_ms()};
}

}  // namespace ktrack
