#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "occtrack/association.hpp"
#include "occtrack/detections.hpp"
#include "occtrack/motion.hpp"

namespace occtrack {

/// 2x3 affine camera-motion transform from the previous frame to the
/// current one.
using WarpMatrix = Eigen::Matrix<double, 2, 3>;

inline WarpMatrix identity_warp() {
  WarpMatrix w = WarpMatrix::Zero();
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;
  return w;
}

enum class TrackStatus { New, Tracked, Lost, Removed };

struct TrackerConfig {
  double theta_det = 0.6;        // high/low score split
  double theta_new_track = 0.7;  // minimum score to start a tracklet
  double alpha0 = 0.2;           // suppressed gain scale
  double theta_v = 0.2;          // abnormal-motion threshold
  double theta_iou = 0.5;        // base IoU-distance gate for appearance
  double offset = 0.2;           // gate relaxation for occluded tracklets
  double theta_emb = 0.25;       // appearance proximity gate
  double beta = 0.9;             // EMA weight of the new detection
  double theta_part = 0.5;       // body-part confidence threshold
  std::size_t buffer_len = 30;   // speed/embedding buffer capacity
  int max_lost = 30;             // frames before a lost tracklet is removed
  SpeedFilter filter = SpeedFilter::Mean;
  double stage1_gate = 0.8;
  double stage2_gate = 0.5;
  bool suppress_abnormal_motion = true;  // scale gains by the suppression mean
  bool occlusion_aware = true;           // apply the offset for lost tracklets
  bool adaptive_fusion = true;           // fuse local+global; off = global only
  int interpolation_max_gap = 20;
};

struct TrackEntry {
  int frame = 0;
  BoundingBox box;
  bool observed = true;
};

struct TrackRecord {
  int id = 0;
  std::vector<TrackEntry> entries;  // frame-sorted
};

struct Tracklet {
  int id = 0;
  TrackStatus status = TrackStatus::New;
  KalmanTrackState kalman;
  SpeedBuffer speed_buffer;
  Embedding embedding;  // size 0 until the first appearance input
  int frames_since_update = 0;
  std::vector<TrackEntry> history;
};

/// Per-frame outcome, including enough bookkeeping to audit associations.
/// Detection indices refer to the frame's original detection list.
struct StepResult {
  struct ActiveTrack {
    int id = 0;
    TrackStatus status = TrackStatus::Tracked;
    BoundingBox box;
  };
  std::vector<std::pair<int, BoundingBox>> predictions;  // (track id, predicted box)
  std::vector<std::pair<int, int>> stage1_matches;       // (track id, detection index)
  std::vector<std::pair<int, int>> stage2_matches;
  std::vector<std::pair<int, int>> new_tracks;           // (track id, detection index)
  std::vector<int> removed;
  std::vector<ActiveTrack> active;
};

/// Indices of high-score (score > theta_det) and low-score detections.
std::pair<std::vector<int>, std::vector<int>> split_detections(
    const FrameObservations& obs, double theta_det);

/// Apply an affine camera-motion warp to the state: each (x, y)-style pair
/// of the mean is multiplied by the linear part, the translation moves the
/// center, and the covariance is conjugated accordingly.
KalmanTrackState motion_compensate(const KalmanTrackState& st, const WarpMatrix& w);

/// Fill unobserved gaps up to max_gap frames by linear interpolation between
/// observed endpoints. Inserted entries carry observed = false.
std::vector<TrackRecord> interpolate(std::vector<TrackRecord> records, int max_gap = 20);

/// Online multi-pedestrian tracker: score split, prediction with camera
/// compensation, two-stage occlusion-aware association, suppression-scaled
/// Kalman updates, EMA appearance maintenance, and tracklet lifecycle.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {});

  /// Process one frame. Frame indices must strictly increase.
  StepResult step(int frame, const FrameObservations& obs,
                  const WarpMatrix& warp = identity_warp());

  /// Histories of all confirmed tracklets (live and removed), id-sorted.
  std::vector<TrackRecord> records() const;

  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Tracklet>& tracklets() const { return tracks_; }

  /// Override the local-neck projection (default: block average).
  void set_projection(Eigen::MatrixXd projection) { projection_ = std::move(projection); }

 private:
  Embedding detection_embedding(const Detection& det) const;
  void apply_match(Tracklet& t, int frame, const BoundingBox& box,
                   const Embedding& det_embedding);

  TrackerConfig cfg_;
  KalmanModel model_;
  std::vector<Tracklet> tracks_;
  std::vector<TrackRecord> finished_;
  std::optional<Eigen::MatrixXd> projection_;
  int next_id_ = 1;
  int last_frame_ = 0;
  bool started_ = false;
};

}  // namespace occtrack
