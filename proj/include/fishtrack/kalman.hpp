#pragma once

#include <algorithm>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fishtrack/errors.hpp"
#include "fishtrack/geometry.hpp"

namespace fishtrack {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;

/// Constant-velocity box state: (cx, cy, w, h, v_cx, v_cy, v_w, v_h),
/// positions in pixels and velocities in pixels/frame.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();

  BoundingBox box() const {
    return BoundingBox::from_center(mean(0), mean(1), std::max(mean(2), 0.0), std::max(mean(3), 0.0));
  }
};

/// Standard deviations are expressed as fractions of the box height.
struct NoiseModel {
  double position_weight = 1.0 / 20.0;
  double velocity_weight = 1.0 / 160.0;
  double measurement_weight = 1.0 / 20.0;
  // Initial velocity uncertainty. One box height per frame lets the filter
  // lock onto a new track's velocity within a few frames.
  double initial_velocity_weight = 1.0;
  double std_floor = 1e-2;

  double scaled(double weight, double height) const { return std::max(weight * std::max(height, 0.0), std_floor); }
};

namespace detail {

inline MeasurementVector to_measurement(const BoundingBox& box) {
  return {box.center_x(), box.center_y(), box.width, box.height};
}

inline StateCovariance symmetrized(const StateCovariance& p) { return 0.5 * (p + p.transpose()); }

}  // namespace detail

inline KalmanState init_state(const BoundingBox& box, const NoiseModel& noise = {}) {
  validate(box);
  KalmanState state;
  state.mean.head<4>() = detail::to_measurement(box);
  state.mean.tail<4>().setZero();
  const double pos = noise.scaled(2.0 * noise.position_weight, box.height);
  const double vel = noise.scaled(noise.initial_velocity_weight, box.height);
  StateVector diag;
  diag << pos, pos, pos, pos, vel, vel, vel, vel;
  state.covariance = diag.cwiseAbs2().asDiagonal();
  return state;
}

inline KalmanState predict(const KalmanState& state, const NoiseModel& noise = {}) {
  StateCovariance transition = StateCovariance::Identity();
  transition.topRightCorner<4, 4>().setIdentity();

  const double h = state.mean(3);
  const double pos = noise.scaled(noise.position_weight, h);
  const double vel = noise.scaled(noise.velocity_weight, h);
  StateVector q;
  q << pos, pos, pos, pos, vel, vel, vel, vel;

  KalmanState out;
  out.mean = transition * state.mean;
  out.covariance = detail::symmetrized(transition * state.covariance * transition.transpose() +
                                       StateCovariance(q.cwiseAbs2().asDiagonal()));
  return out;
}

inline KalmanState update(const KalmanState& state, const BoundingBox& measurement, const NoiseModel& noise = {}) {
  validate(measurement);
  Eigen::Matrix<double, 4, 8> projection = Eigen::Matrix<double, 4, 8>::Zero();
  projection.leftCols<4>().setIdentity();

  const double r = noise.scaled(noise.measurement_weight, state.mean(3));
  const Eigen::Matrix4d meas_cov = Eigen::Vector4d::Constant(r * r).asDiagonal();
  const Eigen::Matrix4d innovation_cov = projection * state.covariance * projection.transpose() + meas_cov;

  const Eigen::LLT<Eigen::Matrix4d> llt(innovation_cov);
  if (llt.info() != Eigen::Success) throw NumericError("innovation covariance is not positive definite");

  // K = P H^T S^-1, solved as S K^T = H P.
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(projection * state.covariance).transpose();
  const MeasurementVector innovation = detail::to_measurement(measurement) - projection * state.mean;

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  // Joseph form keeps the covariance positive semidefinite.
  const StateCovariance ikh = StateCovariance::Identity() - gain * projection;
  out.covariance =
      detail::symmetrized(ikh * state.covariance * ikh.transpose() + gain * meas_cov * gain.transpose());
  return out;
}

}  // namespace fishtrack
