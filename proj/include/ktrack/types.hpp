#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ktrack {

using PointId = std::int64_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

double distance(Point2 a, Point2 b);

struct FrameBounds {
  double width = 256.0;
  double height = 256.0;

  friend bool operator==(const FrameBounds&, const FrameBounds&) = default;
};

/// Dense point-major table: row = point, column = frame.
template <class T>
class PointFrameArray {
 public:
  PointFrameArray() = default;
  PointFrameArray(std::size_t points, std::size_t frames, T fill = T{})
      : points_(points), frames_(frames), data_(points * frames, fill) {}

  std::size_t points() const { return points_; }
  std::size_t frames() const { return frames_; }

  T& operator()(std::size_t point, std::size_t frame) {
    assert(point < points_ && frame < frames_);
    return data_[point * frames_ + frame];
  }
  const T& operator()(std::size_t point, std::size_t frame) const {
    assert(point < points_ && frame < frames_);
    return data_[point * frames_ + frame];
  }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const PointFrameArray&, const PointFrameArray&) = default;

 private:
  std::size_t points_ = 0;
  std::size_t frames_ = 0;
  std::vector<T> data_;
};

}  // namespace ktrack
