#include "ktrack/predictors.hpp"

#include <string>

#include "ktrack/error.hpp"

namespace ktrack {
namespace {

MotionModel motion_for(PredictorKind kind, const KalmanParams& p) {
  switch (kind) {
    case PredictorKind::FullKalman:
    case PredictorKind::FixedCovarianceKalman:
      return MotionModel::constant_velocity(p);
    case PredictorKind::NoVelocityKalman: {
      // Identity dynamics, velocity rows and columns of Q structurally zero.
      MotionModel m{Mat4::Identity(), process_noise(p.dt, p.sigma_p)};
      m.Q.row(2).setZero();
      m.Q.row(3).setZero();
      m.Q.col(2).setZero();
      m.Q.col(3).setZero();
      return m;
    }
    case PredictorKind::ConstantPosition: {
      MotionModel m{Mat4::Identity(), Mat4::Zero()};
      const double q = p.sigma_p * p.sigma_p * p.dt * p.dt;
      m.Q(0, 0) = q;
      m.Q(1, 1) = q;
      return m;
    }
    case PredictorKind::ZeroOrderHold:
    case PredictorKind::LinearInterpolation:
      break;
  }
  return {};
}

}  // namespace

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::FullKalman: return "full-kalman";
    case PredictorKind::NoVelocityKalman: return "no-velocity";
    case PredictorKind::FixedCovarianceKalman: return "fixed-covariance";
    case PredictorKind::ConstantPosition: return "constant-position";
    case PredictorKind::ZeroOrderHold: return "zero-order-hold";
    case PredictorKind::LinearInterpolation: return "linear-interpolation";
  }
  return "unknown";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  for (auto k : kAllPredictorKinds) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorKind::InvalidParameter, "unknown predictor '" + std::string(name) + "'");
}

bool is_kalman(PredictorKind kind) {
  return kind != PredictorKind::ZeroOrderHold && kind != PredictorKind::LinearInterpolation;
}

Predictor::Predictor(PredictorKind kind, const KalmanParams& params)
    : kind_(kind), params_(params) {
  params_.validate();
  if (is_kalman(kind_)) {
    motion_ = motion_for(kind_, params_);
    measurement_ = MeasurementModel::position(params_.sigma_m);
  }
}

void Predictor::initialize(Point2 z, std::int64_t frame) {
  frame_ = frame;
  initialized_ = true;
  if (is_kalman(kind_)) {
    filter_ = init_filter(z, frame, params_);
    if (kind_ == PredictorKind::NoVelocityKalman) {
      filter_.cov.block<2, 2>(2, 2).setZero();
    }
    if (kind_ == PredictorKind::FixedCovarianceKalman && warmup_done_) covariance_frozen_ = true;
    return;
  }
  recent_count_ = 0;
  push_measurement({frame, z});
  held_ = z;
}

Point2 Predictor::advance(std::int64_t frame) {
  if (!initialized_) fail(ErrorKind::InvalidParameter, "predictor advanced before initialization");
  if (frame < frame_) fail(ErrorKind::InvalidParameter, "predictor cannot move backwards in time");

  if (is_kalman(kind_)) {
    for (; frame_ < frame; ++frame_) {
      if (covariance_frozen_) {
        filter_.mean = motion_.F * filter_.mean;
      } else {
        filter_ = predict(filter_, motion_);
      }
    }
    return filter_.position();
  }

  frame_ = frame;
  if (kind_ == PredictorKind::LinearInterpolation) {
    const TimedPosition& last = recent_[recent_count_ - 1];
    if (pending_next_ && pending_next_->frame >= frame) {
      const double alpha = static_cast<double>(frame - last.frame) /
                           static_cast<double>(pending_next_->frame - last.frame);
      held_ = last.position + alpha * (pending_next_->position - last.position);
    } else if (stream_ended_) {
      held_ = last.position;
    } else {
      fail(ErrorKind::LookaheadUnavailable,
           "linear interpolation needs the next keyframe for frame " + std::to_string(frame));
    }
  }
  return held_;
}

void Predictor::ingest(Point2 z, std::int64_t frame) {
  if (!initialized_) fail(ErrorKind::InvalidParameter, "predictor ingest before initialization");
  if (frame > frame_) advance(frame);

  if (is_kalman(kind_)) {
    FilterState next = update(filter_, z, measurement_, frame);
    if (covariance_frozen_) next.cov = filter_.cov;
    filter_ = next;
    return;
  }
  push_measurement({frame, z});
  held_ = z;
  if (pending_next_ && pending_next_->frame <= frame) pending_next_.reset();
}

Point2 Predictor::position() const { return is_kalman(kind_) ? filter_.position() : held_; }

void Predictor::end_warmup() {
  warmup_done_ = true;
  if (kind_ == PredictorKind::FixedCovarianceKalman && initialized_) covariance_frozen_ = true;
}

bool Predictor::needs_lookahead() const {
  return kind_ == PredictorKind::LinearInterpolation && initialized_ && !pending_next_ &&
         !stream_ended_;
}

void Predictor::set_next_keyframe(TimedPosition next) {
  if (kind_ != PredictorKind::LinearInterpolation) return;
  if (recent_count_ > 0 && next.frame <= recent_[recent_count_ - 1].frame) {
    fail(ErrorKind::InvalidParameter, "lookahead keyframe must be later than the last measurement");
  }
  pending_next_ = next;
}

void Predictor::mark_stream_end() { stream_ended_ = true; }

std::optional<TimedPosition> Predictor::last_measurement() const {
  if (is_kalman(kind_) || recent_count_ == 0) return std::nullopt;
  return recent_[recent_count_ - 1];
}

void Predictor::push_measurement(TimedPosition m) {
  if (recent_count_ == 2) {
    recent_[0] = recent_[1];
    recent_count_ = 1;
  }
  recent_[recent_count_++] = m;
}

}  // namespace ktrack
