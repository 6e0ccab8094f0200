#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace occtrack {

using Embedding = Eigen::VectorXd;

/// Spatial feature map with C channels. Pixels are flattened row-major:
/// row (h * width + w) of `values` holds the C-vector at pixel (h, w).
/// Values are nonnegative.
struct FeatureMap {
  int height = 0;
  int width = 0;
  Eigen::MatrixXd values;  // (height * width) x channels

  int channels() const { return static_cast<int>(values.cols()); }
  int pixels() const { return height * width; }
};

/// Per-keypoint confidence heatmaps in [0, 1], one channel per COCO keypoint.
/// The confidence vector is the spatial peak of each channel.
struct KeypointHeatmaps {
  static constexpr int kKeypointCount = 17;

  int height = 0;
  int width = 0;
  Eigen::MatrixXd values;  // (height * width) x 17
  Eigen::Matrix<double, kKeypointCount, 1> confidence =
      Eigen::Matrix<double, kKeypointCount, 1>::Zero();
};

/// Keypoint channels summed into six body parts and clamped to [0, 1].
struct PartHeatmaps {
  static constexpr int kPartCount = 6;

  int height = 0;
  int width = 0;
  Eigen::MatrixXd values;  // (height * width) x 6
  Eigen::Matrix<double, kPartCount, 1> confidence =
      Eigen::Matrix<double, kPartCount, 1>::Zero();
};

/// COCO-17 keypoint indices of each body part, in part order
/// head, torso, left arm, right arm, left leg, right leg.
/// The six lists partition the 17 keypoints.
const std::array<std::vector<int>, PartHeatmaps::kPartCount>& part_keypoints();

/// Sum member keypoint channels per part, clamp to [0, 1]; part confidence
/// is the max member keypoint confidence.
PartHeatmaps group_heatmaps(const KeypointHeatmaps& h);

/// Spatial sum of the feature map masked by each part channel.
std::array<Embedding, PartHeatmaps::kPartCount> part_embeddings(const FeatureMap& f,
                                                                const PartHeatmaps& p);

/// Linear projection of the concatenated part embeddings (6C -> C).
Embedding local_neck(const std::array<Embedding, PartHeatmaps::kPartCount>& parts,
                     const Eigen::MatrixXd& projection);

/// Default projection: the mean of the six part embeddings.
Eigen::MatrixXd block_average_projection(int channels);

/// Global average pooling per channel.
Embedding global_neck(const FeatureMap& f);

/// Number of parts with confidence strictly above theta_p.
int count_confident_parts(const PartHeatmaps& p, double theta_p);

/// (n/6) * local + ((6-n)/6) * global.
Embedding adaptive_fuse(const Embedding& local, const Embedding& global, int n_confident);

/// (1-beta) * track + beta * detection, renormalized to unit length.
Embedding ema_update(const Embedding& track_e, const Embedding& det_e, double beta);

/// 1 - cos(a, b), in [0, 2]. Throws on zero-length inputs.
double cosine_distance(const Embedding& a, const Embedding& b);

/// v / |v|; throws when |v| is numerically zero.
Embedding l2_normalized(const Embedding& v);

}  // namespace occtrack
