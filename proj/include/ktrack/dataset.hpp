#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktrack/types.hpp"

namespace ktrack {

struct GroundTruthSample {
  Point2 position;
  bool visible = true;

  friend bool operator==(const GroundTruthSample&, const GroundTruthSample&) = default;
};

/// Ground-truth trajectories: one row per point, one column per frame.
class Dataset {
 public:
  Dataset() = default;
  /// Throws InvalidSpec on duplicate ids, a row-count mismatch, or
  /// non-finite coordinates.
  Dataset(FrameBounds bounds, std::vector<PointId> point_ids,
          PointFrameArray<GroundTruthSample> tracks, nlohmann::json provenance = {});

  FrameBounds bounds() const { return bounds_; }
  std::int64_t frames() const { return static_cast<std::int64_t>(tracks_.frames()); }
  std::size_t num_points() const { return point_ids_.size(); }
  std::span<const PointId> point_ids() const { return point_ids_; }
  const PointFrameArray<GroundTruthSample>& tracks() const { return tracks_; }
  const GroundTruthSample& at(std::size_t point, std::int64_t frame) const {
    return tracks_(point, static_cast<std::size_t>(frame));
  }
  const nlohmann::json& provenance() const { return provenance_; }

  std::optional<std::size_t> index_of(PointId id) const;

  /// Same trajectories with the rows reordered; used by isolation tests.
  Dataset permuted(std::span<const std::size_t> order) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.bounds_ == b.bounds_ && a.point_ids_ == b.point_ids_ && a.tracks_ == b.tracks_ &&
           a.provenance_ == b.provenance_;
  }

 private:
  FrameBounds bounds_;
  std::vector<PointId> point_ids_;
  PointFrameArray<GroundTruthSample> tracks_;
  nlohmann::json provenance_;
  std::unordered_map<PointId, std::size_t> index_;
};

}  // namespace ktrack
