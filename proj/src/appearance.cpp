#include "occtrack/appearance.hpp"

#include <stdexcept>
#include <vector>

namespace occtrack {

const std::array<std::vector<int>, PartHeatmaps::kPartCount>& part_keypoints() {
  // COCO order: 0 nose, 1/2 eyes, 3/4 ears, 5/6 shoulders, 7/8 elbows,
  // 9/10 wrists, 11/12 hips, 13/14 knees, 15/16 ankles.
  static const std::array<std::vector<int>, PartHeatmaps::kPartCount> groups = {{
      {0, 1, 2, 3, 4},  // head
      {5, 6, 11, 12},   // torso (shoulders + hips)
      {7, 9},           // left arm
      {8, 10},          // right arm
      {13, 15},         // left leg
      {14, 16},         // right leg
  }};
  return groups;
}

PartHeatmaps group_heatmaps(const KeypointHeatmaps& h) {
  PartHeatmaps p;
  p.height = h.height;
  p.width = h.width;
  p.values.setZero(h.values.rows(), PartHeatmaps::kPartCount);
  const auto& groups = part_keypoints();
  for (int part = 0; part < PartHeatmaps::kPartCount; ++part) {
    for (int kp : groups[static_cast<std::size_t>(part)]) {
      p.values.col(part) += h.values.col(kp);
      p.confidence(part) = std::max(p.confidence(part), h.confidence(kp));
    }
  }
  p.values = p.values.cwiseMax(0.0).cwiseMin(1.0);
  return p;
}

std::array<Embedding, PartHeatmaps::kPartCount> part_embeddings(const FeatureMap& f,
                                                                const PartHeatmaps& p) {
  if (f.height != p.height || f.width != p.width)
    throw std::invalid_argument("part_embeddings: spatial dimensions differ");
  std::array<Embedding, PartHeatmaps::kPartCount> out;
  for (int part = 0; part < PartHeatmaps::kPartCount; ++part)
    out[static_cast<std::size_t>(part)] = f.values.transpose() * p.values.col(part);
  return out;
}

Embedding local_neck(const std::array<Embedding, PartHeatmaps::kPartCount>& parts,
                     const Eigen::MatrixXd& projection) {
  Eigen::Index channels = parts[0].size();
  for (const auto& e : parts)
    if (e.size() != channels)
      throw std::invalid_argument("local_neck: part embedding sizes differ");
  if (projection.cols() != PartHeatmaps::kPartCount * channels)
    throw std::invalid_argument("local_neck: projection shape does not match parts");
  Eigen::VectorXd cat(PartHeatmaps::kPartCount * channels);
  for (int part = 0; part < PartHeatmaps::kPartCount; ++part)
    cat.segment(part * channels, channels) = parts[static_cast<std::size_t>(part)];
  return projection * cat;
}

Eigen::MatrixXd block_average_projection(int channels) {
  Eigen::MatrixXd proj(channels, PartHeatmaps::kPartCount * channels);
  for (int part = 0; part < PartHeatmaps::kPartCount; ++part)
    proj.middleCols(part * channels, channels) =
        Eigen::MatrixXd::Identity(channels, channels) / PartHeatmaps::kPartCount;
  return proj;
}

Embedding global_neck(const FeatureMap& f) {
  return f.values.colwise().mean();
}

int count_confident_parts(const PartHeatmaps& p, double theta_p) {
  return static_cast<int>((p.confidence.array() > theta_p).count());
}

Embedding adaptive_fuse(const Embedding& local, const Embedding& global, int n_confident) {
  if (local.size() != global.size())
    throw std::invalid_argument("adaptive_fuse: embedding sizes differ");
  if (n_confident < 0 || n_confident > PartHeatmaps::kPartCount)
    throw std::invalid_argument("adaptive_fuse: part count outside [0, 6]");
  const double w = static_cast<double>(n_confident) / PartHeatmaps::kPartCount;
  return w * local + (1.0 - w) * global;
}

Embedding ema_update(const Embedding& track_e, const Embedding& det_e, double beta) {
  if (track_e.size() != det_e.size())
    throw std::invalid_argument("ema_update: embedding sizes differ");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("ema_update: beta outside [0, 1]");
  return l2_normalized((1.0 - beta) * track_e + beta * det_e);
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine_distance: embedding sizes differ");
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-12 || nb < 1e-12)
    throw std::invalid_argument("cosine_distance: zero-length embedding");
  return 1.0 - a.dot(b) / (na * nb);
}

Embedding l2_normalized(const Embedding& v) {
  const double n = v.norm();
  if (n < 1e-12) throw std::invalid_argument("l2_normalized: zero-length vector");
  return v / n;
}

}  // namespace occtrack
