#pragma once

// Linear-Gaussian constant-velocity model for a single tracked point and the
// Kalman predict/update recursions over it.
//
// State layout is [x, y, vx, vy] in pixels and pixels/frame. Each tracked
// point owns an independent filter; nothing here is shared between points.

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "ktrack/types.hpp"

namespace ktrack {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat24 = Eigen::Matrix<double, 2, 4>;
using Mat42 = Eigen::Matrix<double, 4, 2>;

struct KalmanParams {
  double sigma_p = 0.1;   // process-noise intensity, pixels/frame
  double sigma_m = 0.3;   // measurement noise std, pixels
  double sigma_v = 10.0;  // initial velocity std, pixels/frame
  double dt = 1.0;        // frames

  /// Throws InvalidParameter unless sigma_p >= 0, sigma_m > 0, sigma_v > 0
  /// and dt > 0 (all finite).
  void validate() const;
};

/// Constant-velocity transition matrix; dt = 0 yields identity.
Mat4 transition_matrix(double dt);

/// Discrete white-noise-acceleration covariance, sigma_p^2 times the
/// polynomial-in-dt template.
Mat4 process_noise(double dt, double sigma_p);

struct MotionModel {
  Mat4 F = Mat4::Identity();
  Mat4 Q = Mat4::Zero();

  static MotionModel constant_velocity(const KalmanParams& params);
};

struct MeasurementModel {
  Mat24 H = Mat24::Zero();
  Mat2 R = Mat2::Identity();

  static MeasurementModel position(double sigma_m);
};

struct FilterState {
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Identity();
  std::optional<std::int64_t> last_measured_frame;

  Point2 position() const { return {mean(0), mean(1)}; }
};

/// Filter state from a first measurement: zero velocity and
/// diag(sigma_m^2, sigma_m^2, sigma_v^2, sigma_v^2) covariance.
FilterState init_filter(Point2 z0, std::int64_t frame,
                        const KalmanParams& params);

/// Time update: mean' = F mean, cov' = F cov F^T + Q (re-symmetrized).
FilterState predict(const FilterState& state, const MotionModel& model);

/// Measurement update with the simple-form covariance (I - K H) P followed by
/// explicit symmetrization.
///
/// Throws DegenerateUpdate when the 2x2 innovation covariance is singular or
/// its condition number exceeds kMaxInnovationCondition; callers treat that
/// as a failed measurement.
FilterState update(const FilterState& state, Point2 z,
                   const MeasurementModel& model, std::int64_t frame);

inline constexpr double kMaxInnovationCondition = 1e12;

/// (P + P^T) / 2
Mat4 symmetrized(const Mat4& p);

/// Symmetry and PSD check with the tolerances used throughout the tests:
/// max|P - P^T| <= 1e-9 (1 + max|P|), min eigenvalue >= -1e-9 trace.
bool is_valid_covariance(const Mat4& p);

}  // namespace ktrack
