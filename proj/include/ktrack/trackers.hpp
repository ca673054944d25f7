#pragma once

// Measurement sources. The scheduler sees every tracker, synthetic or
// external, only through TrackerSource: positions in, nothing else.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ktrack/dataset.hpp"
#include "ktrack/types.hpp"

namespace ktrack {

struct Measurement {
  PointId point_id = 0;
  double x = 0.0;
  double y = 0.0;
  bool valid = false;  // when false, x and y carry no information

  Point2 position() const { return {x, y}; }
  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct TrackerDescriptor {
  std::string name;
  double cost_per_call_ms = 0.0;
};

class TrackerSource {
 public:
  virtual ~TrackerSource() = default;

  /// One Measurement per requested id, in request order. Frame-level
  /// failures (transport, protocol) are thrown; per-point failures come back
  /// as valid = false.
  virtual std::vector<Measurement> query(std::int64_t frame, std::span<const PointId> ids) = 0;
  virtual TrackerDescriptor descriptor() const = 0;
};

/// Tracker-side failure window: the oracle reports the point invalid for
/// frames [frame_start, frame_end).
struct OcclusionWindow {
  PointId point_id = 0;
  std::int64_t frame_start = 0;
  std::int64_t frame_end = 0;
};

struct OracleConfig {
  double noise_std = 0.0;         // px, per axis
  double failure_prob = 0.0;      // per point per call
  std::vector<OcclusionWindow> occlusions;
  double simulated_cost_ms = 556.0;  // ~1.8 FPS per-frame baseline
  std::uint64_t seed = 0;

  /// Throws InvalidParameter when a field is out of range; windows must lie
  /// within [0, frames).
  void validate(std::int64_t frames) const;
};

/// Ground truth plus counter-based Gaussian noise keyed by
/// (seed, frame, point id). Pure: identical inputs give identical output
/// regardless of batching or call order. Throws Protocol for unknown ids.
std::vector<Measurement> oracle_query(const Dataset& dataset, const OracleConfig& cfg,
                                      std::int64_t frame, std::span<const PointId> ids);

class OracleTracker final : public TrackerSource {
 public:
  OracleTracker(const Dataset& dataset, OracleConfig cfg);

  std::vector<Measurement> query(std::int64_t frame, std::span<const PointId> ids) override;
  TrackerDescriptor descriptor() const override;

  std::int64_t calls() const { return calls_; }

 private:
  const Dataset* dataset_;
  OracleConfig cfg_;
  std::int64_t calls_ = 0;
};

class BridgeSession;

/// Black-box tracker in a child process, reached over the bridge protocol.
class ExternalTracker final : public TrackerSource {
 public:
  explicit ExternalTracker(std::unique_ptr<BridgeSession> session);
  ~ExternalTracker() override;

  std::vector<Measurement> query(std::int64_t frame, std::span<const PointId> ids) override;
  TrackerDescriptor descriptor() const override;

  BridgeSession& session() { return *session_; }

 private:
  std::unique_ptr<BridgeSession> session_;
};

}  // namespace ktrack
