#include "ktrack/dataset.hpp"

#include <cmath>
#include <string>

#include "ktrack/error.hpp"

namespace ktrack {

Dataset::Dataset(FrameBounds bounds, std::vector<PointId> point_ids,
                 PointFrameArray<GroundTruthSample> tracks, nlohmann::json provenance)
    : bounds_(bounds),
      point_ids_(std::move(point_ids)),
      tracks_(std::move(tracks)),
      provenance_(std::move(provenance)) {
  if (tracks_.points() != point_ids_.size()) {
    fail(ErrorKind::InvalidSpec, "dataset: track rows do not match the point id list");
  }
  index_.reserve(point_ids_.size());
  for (std::size_t i = 0; i < point_ids_.size(); ++i) {
    if (!index_.emplace(point_ids_[i], i).second) {
      fail(ErrorKind::InvalidSpec,
           "dataset: duplicate point id " + std::to_string(point_ids_[i]));
    }
  }
  for (const auto& s : tracks_.data()) {
    if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y)) {
      fail(ErrorKind::InvalidSpec, "dataset: non-finite ground-truth position");
    }
  }
}

std::optional<std::size_t> Dataset::index_of(PointId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::permuted(std::span<const std::size_t> order) const {
  if (order.size() != num_points()) {
    fail(ErrorKind::InvalidParameter, "dataset: permutation size mismatch");
  }
  std::vector<PointId> ids;
  ids.reserve(order.size());
  PointFrameArray<GroundTruthSample> rows(order.size(), tracks_.frames());
  for (std::size_t i = 0; i < order.size(); ++i) {
    ids.push_back(point_ids_.at(order[i]));
    for (std::size_t f = 0; f < tracks_.frames(); ++f) rows(i, f) = tracks_(order[i], f);
  }
  return Dataset(bounds_, std::move(ids), std::move(rows), provenance_);
}

}  // namespace ktrack
