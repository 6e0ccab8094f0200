#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "occtrack/appearance.hpp"
#include "occtrack/geometry.hpp"

namespace occtrack {

/// Whether a tracklet was matched in the previous frame (Tracked) or is
/// currently unobserved and treated as occluded (Untracked).
enum class TrackingState { Tracked, Untracked };

/// Per-tracklet IoU-distance gate of the appearance test. Untracked rows
/// get theta0 + offset, clamped to 1.
Eigen::VectorXd occlusion_thresholds(const std::vector<TrackingState>& statuses,
                                     double theta0, double offset);

/// Entry (i, j) keeps d_cos(i, j) only when it beats theta_emb and the IoU
/// distance beats row i's gate; otherwise 1.
Eigen::MatrixXd gated_embedding_distance(const Eigen::MatrixXd& d_cos,
                                         const Eigen::MatrixXd& d_iou,
                                         double theta_emb,
                                         const Eigen::VectorXd& iou_thresholds);

/// Entrywise minimum of the IoU and gated appearance distances.
Eigen::MatrixXd fused_distance(const Eigen::MatrixXd& d_iou,
                               const Eigen::MatrixXd& d_cos_hat);

struct MatchResult {
  std::vector<std::pair<int, int>> matches;  // (row, column)
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Minimum-total-cost bipartite assignment. Rectangular inputs are padded
/// with gate-level costs; assigned pairs costing >= gate are demoted to
/// unmatched. Deterministic for identical inputs.
MatchResult hungarian(const Eigen::MatrixXd& cost, double gate);

struct AssociationTracks {
  std::vector<BoundingBox> boxes;          // predicted boxes, one per tracklet
  std::vector<TrackingState> states;       // occlusion states for Eq. thresholds
  std::vector<char> active;                // eligible for the low-score stage
  std::vector<Embedding> embeddings;       // size-0 vector = no appearance
};

struct AssociationParams {
  double theta_emb = 0.25;
  double theta_iou = 0.5;
  double offset = 0.2;
  double stage1_gate = 0.8;
  double stage2_gate = 0.5;
};

struct TwoStageResult {
  MatchResult high;  // rows = tracklet indices, cols = high-detection indices
  MatchResult low;   // rows = tracklet indices, cols = low-detection indices
};

/// Stage 1 matches every tracklet against the high-score detections with the
/// occlusion-aware fused distance; stage 2 matches the remaining active
/// tracklets against low-score detections on IoU distance alone.
TwoStageResult associate_two_stage(const AssociationTracks& tracks,
                                   const std::vector<BoundingBox>& high_boxes,
                                   const std::vector<Embedding>& high_embeddings,
                                   const std::vector<BoundingBox>& low_boxes,
                                   const AssociationParams& params);

}  // namespace occtrack
