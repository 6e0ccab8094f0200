#include "occtrack/motion.hpp"

#include <cmath>
#include <stdexcept>

namespace occtrack {

KalmanModel::KalmanModel(double std_weight_position, double std_weight_velocity)
    : std_pos_(std_weight_position), std_vel_(std_weight_velocity) {
  transition_ = Matrix8d::Identity();
  transition_.topRightCorner<4, 4>() = Eigen::Matrix4d::Identity();
  observation_ = Matrix4x8d::Zero();
  observation_.leftCols<4>() = Eigen::Matrix4d::Identity();
}

Matrix8d KalmanModel::process_noise(double box_height) const {
  Vector8d std;
  std << std_pos_ * box_height, std_pos_ * box_height, std_pos_ * box_height,
      std_pos_ * box_height, std_vel_ * box_height, std_vel_ * box_height,
      std_vel_ * box_height, std_vel_ * box_height;
  return std.cwiseProduct(std).asDiagonal();
}

Eigen::Matrix4d KalmanModel::observation_noise(double box_height) const {
  Eigen::Vector4d std = Eigen::Vector4d::Constant(std_pos_ * box_height);
  return std.cwiseProduct(std).asDiagonal();
}

KalmanTrackState kf_init(const BoundingBox& b, const KalmanModel& model) {
  const CenterBox c = tlwh_to_center(b);
  KalmanTrackState st;
  st.mean << c.cx, c.cy, c.w, c.h, 0.0, 0.0, 0.0, 0.0;
  const double p = 2.0 * model.std_weight_position() * b.h;
  const double v = 10.0 * model.std_weight_velocity() * b.h;
  Vector8d std;
  std << p, p, p, p, v, v, v, v;
  st.covariance = std.cwiseProduct(std).asDiagonal();
  return st;
}

KalmanTrackState kf_predict(const KalmanTrackState& st, const KalmanModel& model) {
  const Matrix8d& A = model.transition();
  KalmanTrackState out;
  out.mean = A * st.mean;
  out.covariance = A * st.covariance * A.transpose() + model.process_noise(st.mean(3));
  return out;
}

KalmanTrackState kf_update(const KalmanTrackState& st, const BoundingBox& z,
                           double alpha, const KalmanModel& model) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("kf_update: alpha outside [0, 1]");
  const Matrix4x8d& H = model.observation();
  const Eigen::Matrix4d innovation_cov =
      H * st.covariance * H.transpose() + model.observation_noise(st.mean(3));
  const Eigen::LLT<Eigen::Matrix4d> llt(innovation_cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("kf_update: innovation covariance is not positive definite");

  // G = P H^T S^-1, computed as the solution of S G^T = H P^T.
  const Eigen::Matrix<double, 8, 4> gain =
      llt.solve(H * st.covariance.transpose()).transpose();

  const CenterBox c = tlwh_to_center(z);
  Eigen::Vector4d obs(c.cx, c.cy, c.w, c.h);

  KalmanTrackState out;
  out.mean = st.mean + alpha * (gain * (obs - H * st.mean));
  out.covariance = (Matrix8d::Identity() - gain * H) * st.covariance;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  // Keep the size components usable as a box.
  out.mean(2) = std::max(out.mean(2), 1e-3);
  out.mean(3) = std::max(out.mean(3), 1e-3);
  return out;
}

Vector8d accumulated_error(const Vector8d& e, int tau) {
  if (tau < 0) throw std::invalid_argument("accumulated_error: tau must be >= 0");
  Vector8d out = e;
  out.head<4>() += static_cast<double>(tau) * e.tail<4>();
  return out;
}

SpeedBuffer::SpeedBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 2) throw std::invalid_argument("SpeedBuffer: capacity must be >= 2");
}

void SpeedBuffer::push(int frame, const BoundingBox& box) {
  if (!boxes_.empty() && frame <= boxes_.back().first)
    throw std::invalid_argument("SpeedBuffer: frame indices must strictly increase");
  boxes_.emplace_back(frame, box);
  if (boxes_.size() > capacity_) boxes_.pop_front();
}

namespace {

Eigen::Matrix4Xd first_differences(const SpeedBuffer& buf) {
  const Eigen::Index n = static_cast<Eigen::Index>(buf.size()) - 1;
  Eigen::Matrix4Xd diffs(4, n);
  for (Eigen::Index i = 0; i < n; ++i)
    diffs.col(i) = buf.at(static_cast<std::size_t>(i) + 1).second.to_vector() -
                   buf.at(static_cast<std::size_t>(i)).second.to_vector();
  return diffs;
}

}  // namespace

Eigen::Vector4d filter_speeds(const SpeedBuffer& buf, SpeedFilter kind) {
  if (buf.size() < 2)
    throw std::runtime_error("filter_speeds: need at least two buffered boxes");
  const Eigen::Matrix4Xd diffs = first_differences(buf);
  const Eigen::Index n = diffs.cols();

  Eigen::VectorXd weights(n);
  switch (kind) {
    case SpeedFilter::Mean:
      weights.setConstant(1.0 / static_cast<double>(n));
      break;
    case SpeedFilter::Gaussian: {
      // Kernel centered on the newest difference, truncated at the window
      // boundary and renormalized.
      const double sigma = static_cast<double>(n) / 4.0;
      const double denom = 2.0 * std::max(sigma, 1e-12) * std::max(sigma, 1e-12);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dist = static_cast<double>(n - 1 - i);
        weights(i) = std::exp(-dist * dist / denom);
      }
      weights /= weights.sum();
      break;
    }
    case SpeedFilter::Laplacian: {
      for (Eigen::Index i = 0; i < n; ++i)
        weights(i) = std::exp(-static_cast<double>(n - 1 - i) / 2.0);
      weights /= weights.sum();
      break;
    }
  }
  return diffs * weights;
}

Eigen::Vector4d speed_difference(const SpeedBuffer& buf, const BoundingBox& current,
                                 SpeedFilter kind) {
  const Eigen::Vector4d averaged = filter_speeds(buf, kind);
  const BoundingBox& last = buf.back();
  const Eigen::Vector4d speed = current.to_vector() - last.to_vector();
  Eigen::Vector4d scale(last.w, last.h, last.w, last.h);
  return ((speed - averaged).cwiseQuotient(scale)).cwiseAbs();
}

SuppressionCoefficients suppression_coefficients(const Eigen::Vector4d& d,
                                                 double theta_v, double alpha0) {
  if (theta_v < 0.0) throw std::invalid_argument("suppression_coefficients: theta_v < 0");
  if (!(alpha0 >= 0.0 && alpha0 <= 1.0))
    throw std::invalid_argument("suppression_coefficients: alpha0 outside [0, 1]");
  SuppressionCoefficients out;
  for (int i = 0; i < 4; ++i) out.per_component(i) = d(i) <= theta_v ? 1.0 : alpha0;
  out.mean = out.per_component.mean();
  return out;
}

}  // namespace occtrack
