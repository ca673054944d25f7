#include "ktrack/kalman.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ktrack/error.hpp"

namespace ktrack {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void KalmanParams::validate() const {
  auto bad = [](const char* name, double value, const char* rule) {
    std::ostringstream os;
    os << name << " = " << value << " violates " << rule;
    fail(ErrorKind::InvalidParameter, os.str());
  };
  if (!std::isfinite(sigma_p) || sigma_p < 0.0) bad("sigma_p", sigma_p, "sigma_p >= 0");
  if (!std::isfinite(sigma_m) || sigma_m <= 0.0) bad("sigma_m", sigma_m, "sigma_m > 0");
  if (!std::isfinite(sigma_v) || sigma_v <= 0.0) bad("sigma_v", sigma_v, "sigma_v > 0");
  if (!std::isfinite(dt) || dt <= 0.0) bad("dt", dt, "dt > 0");
}

Mat4 transition_matrix(double dt) {
  if (!(dt >= 0.0)) {
    fail(ErrorKind::InvalidParameter, "transition_matrix: dt must be non-negative");
  }
  Mat4 f = Mat4::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

Mat4 process_noise(double dt, double sigma_p) {
  if (!(sigma_p >= 0.0)) {
    fail(ErrorKind::InvalidParameter, "process_noise: sigma_p must be non-negative");
  }
  if (!(dt >= 0.0)) {
    fail(ErrorKind::InvalidParameter, "process_noise: dt must be non-negative");
  }
  const double dt2 = dt * dt;
  const double pos = dt2 * dt2 / 4.0;
  const double cross = dt2 * dt / 2.0;
  Mat4 q = Mat4::Zero();
  q(0, 0) = q(1, 1) = pos;
  q(0, 2) = q(2, 0) = cross;
  q(1, 3) = q(3, 1) = cross;
  q(2, 2) = q(3, 3) = dt2;
  return sigma_p * sigma_p * q;
}

MotionModel MotionModel::constant_velocity(const KalmanParams& params) {
  return {transition_matrix(params.dt), process_noise(params.dt, params.sigma_p)};
}

MeasurementModel MeasurementModel::position(double sigma_m) {
  if (!(sigma_m > 0.0)) {
    fail(ErrorKind::InvalidParameter, "measurement model: sigma_m must be positive");
  }
  MeasurementModel m;
  m.H(0, 0) = 1.0;
  m.H(1, 1) = 1.0;
  m.R = sigma_m * sigma_m * Mat2::Identity();
  return m;
}

FilterState init_filter(Point2 z0, std::int64_t frame, const KalmanParams& params) {
  if (!std::isfinite(z0.x) || !std::isfinite(z0.y)) {
    fail(ErrorKind::InvalidParameter, "init_filter: measurement must be finite");
  }
  FilterState s;
  s.mean << z0.x, z0.y, 0.0, 0.0;
  const double m2 = params.sigma_m * params.sigma_m;
  const double v2 = params.sigma_v * params.sigma_v;
  s.cov = Vec4(m2, m2, v2, v2).asDiagonal();
  s.last_measured_frame = frame;
  return s;
}

Mat4 symmetrized(const Mat4& p) { return 0.5 * (p + p.transpose()); }

FilterState predict(const FilterState& state, const MotionModel& model) {
  FilterState out;
  out.mean = model.F * state.mean;
  out.cov = symmetrized(model.F * state.cov * model.F.transpose() + model.Q);
  out.last_measured_frame = state.last_measured_frame;
  return out;
}

FilterState update(const FilterState& state, Point2 z, const MeasurementModel& model,
                   std::int64_t frame) {
  if (!std::isfinite(z.x) || !std::isfinite(z.y)) {
    fail(ErrorKind::InvalidParameter, "update: measurement must be finite");
  }
  const Mat42 pht = state.cov * model.H.transpose();
  const Mat2 s = model.H * pht + model.R;

  // Closed-form 2x2 inverse; S is symmetric so its eigenvalues give the
  // spectral condition number directly.
  const double a = s(0, 0);
  const double b = 0.5 * (s(0, 1) + s(1, 0));
  const double c = s(1, 1);
  const double half_trace = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double lambda_max = half_trace + radius;
  const double lambda_min = half_trace - radius;
  const double det = a * c - b * b;
  if (!std::isfinite(det) || !(lambda_min > 0.0) ||
      lambda_max > kMaxInnovationCondition * lambda_min) {
    fail(ErrorKind::DegenerateUpdate, "update: innovation covariance is numerically singular");
  }
  Mat2 s_inv;
  s_inv << c, -b, -b, a;
  s_inv /= det;

  const Mat42 gain = pht * s_inv;
  const Vec2 innovation = Vec2(z.x, z.y) - model.H * state.mean;

  FilterState out;
  out.mean = state.mean + gain * innovation;
  out.cov = symmetrized((Mat4::Identity() - gain * model.H) * state.cov);
  out.last_measured_frame = frame;
  return out;
}

bool is_valid_covariance(const Mat4& p) {
  if (!p.allFinite()) return false;
  const double scale = 1.0 + p.cwiseAbs().maxCoeff();
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Mat4> eig(symmetrized(p), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -1e-9 * std::abs(p.trace());
}

}  // namespace ktrack
