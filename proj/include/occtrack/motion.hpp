#pragma once

#include <Eigen/Dense>

#include <deque>
#include <utility>

#include "occtrack/geometry.hpp"

namespace occtrack {

using Vector8d = Eigen::Matrix<double, 8, 1>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Matrix4x8d = Eigen::Matrix<double, 4, 8>;

/// Constant-velocity model on the state [cx, cy, w, h, vcx, vcy, vw, vh].
/// Process and observation noise are diagonal with standard deviations
/// proportional to the current box height, so one set of weights works
/// across image resolutions.
class KalmanModel {
 public:
  explicit KalmanModel(double std_weight_position = 1.0 / 20.0,
                       double std_weight_velocity = 1.0 / 160.0);

  const Matrix8d& transition() const { return transition_; }
  const Matrix4x8d& observation() const { return observation_; }
  Matrix8d process_noise(double box_height) const;
  Eigen::Matrix4d observation_noise(double box_height) const;
  double std_weight_position() const { return std_pos_; }
  double std_weight_velocity() const { return std_vel_; }

 private:
  Matrix8d transition_;
  Matrix4x8d observation_;
  double std_pos_;
  double std_vel_;
};

/// Gaussian belief over one tracklet's motion state.
struct KalmanTrackState {
  Vector8d mean = Vector8d::Zero();
  Matrix8d covariance = Matrix8d::Zero();

  CenterBox center_box() const { return {mean(0), mean(1), mean(2), mean(3)}; }
  BoundingBox tlwh() const { return center_to_tlwh(center_box()); }
};

/// Belief for a freshly detected box: zero velocity, diagonal covariance
/// scaled by box height.
KalmanTrackState kf_init(const BoundingBox& b, const KalmanModel& model);

KalmanTrackState kf_predict(const KalmanTrackState& st, const KalmanModel& model);

/// Measurement update with the mean correction scaled by alpha in [0, 1].
/// alpha = 1 is the standard Kalman update; the covariance contraction is
/// never scaled. Throws std::runtime_error on a singular innovation
/// covariance.
KalmanTrackState kf_update(const KalmanTrackState& st, const BoundingBox& z,
                           double alpha, const KalmanModel& model);

/// A^tau * e in closed form: position components pick up tau times the
/// corresponding velocity component, velocities pass through.
Vector8d accumulated_error(const Vector8d& e, int tau);

enum class SpeedFilter { Mean, Gaussian, Laplacian };

/// Ring of recently observed boxes for one tracklet, ordered by strictly
/// increasing frame index. Only matched (observed) boxes are pushed.
class SpeedBuffer {
 public:
  explicit SpeedBuffer(std::size_t capacity = 30);

  void push(int frame, const BoundingBox& box);
  void clear() { boxes_.clear(); }
  std::size_t size() const { return boxes_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return boxes_.empty(); }
  const BoundingBox& back() const { return boxes_.back().second; }
  const std::pair<int, BoundingBox>& at(std::size_t i) const { return boxes_[i]; }

 private:
  std::size_t capacity_;
  std::deque<std::pair<int, BoundingBox>> boxes_;
};

/// Averaged speed [vx, vy, vw, vh] of the buffered first differences.
/// Requires at least two buffered boxes.
Eigen::Vector4d filter_speeds(const SpeedBuffer& buf, SpeedFilter kind);

/// Per-component absolute difference between the normalized current speed
/// and the normalized filtered speed. Horizontal components are divided by
/// the last buffered width, vertical ones by the last buffered height.
Eigen::Vector4d speed_difference(const SpeedBuffer& buf, const BoundingBox& current,
                                 SpeedFilter kind = SpeedFilter::Mean);

struct SuppressionCoefficients {
  Eigen::Vector4d per_component;  // each entry is alpha0 or 1
  double mean = 1.0;
};

/// Component i is alpha0 when the speed difference exceeds theta_v, else 1.
SuppressionCoefficients suppression_coefficients(const Eigen::Vector4d& d,
                                                 double theta_v, double alpha0);

}  // namespace occtrack
