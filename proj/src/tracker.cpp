#include "occtrack/tracker.hpp"

#include <algorithm>
#include <stdexcept>

namespace occtrack {

std::pair<std::vector<int>, std::vector<int>> split_detections(
    const FrameObservations& obs, double theta_det) {
  std::vector<int> high, low;
  for (int i = 0; i < static_cast<int>(obs.detections.size()); ++i) {
    if (obs.detections[static_cast<std::size_t>(i)].score > theta_det)
      high.push_back(i);
    else
      low.push_back(i);
  }
  return {high, low};
}

KalmanTrackState motion_compensate(const KalmanTrackState& st, const WarpMatrix& w) {
  const Eigen::Matrix2d linear = w.leftCols<2>();
  const Eigen::Vector2d shift = w.col(2);
  Matrix8d conj = Matrix8d::Zero();
  for (int b = 0; b < 4; ++b) conj.block<2, 2>(2 * b, 2 * b) = linear;
  KalmanTrackState out;
  out.mean = conj * st.mean;
  out.mean.head<2>() += shift;
  out.covariance = conj * st.covariance * conj.transpose();
  return out;
}

std::vector<TrackRecord> interpolate(std::vector<TrackRecord> records, int max_gap) {
  for (TrackRecord& rec : records) {
    std::sort(rec.entries.begin(), rec.entries.end(),
              [](const TrackEntry& a, const TrackEntry& b) { return a.frame < b.frame; });
    std::vector<TrackEntry> filled;
    filled.reserve(rec.entries.size());
    for (std::size_t i = 0; i < rec.entries.size(); ++i) {
      if (i > 0) {
        const TrackEntry& prev = filled.back();
        const TrackEntry& next = rec.entries[i];
        const int gap = next.frame - prev.frame - 1;
        if (gap > 0 && gap <= max_gap && prev.observed && next.observed) {
          const Eigen::Vector4d a = prev.box.to_vector();
          const Eigen::Vector4d b = next.box.to_vector();
          for (int f = prev.frame + 1; f < next.frame; ++f) {
            const double t = static_cast<double>(f - prev.frame) /
                             static_cast<double>(next.frame - prev.frame);
            filled.push_back({f, BoundingBox::from_vector(a + t * (b - a)), false});
          }
        }
      }
      filled.push_back(rec.entries[i]);
    }
    rec.entries = std::move(filled);
  }
  return records;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg) {}

Embedding Tracker::detection_embedding(const Detection& det) const {
  if (det.feature_map && det.heatmaps) {
    const Embedding global = global_neck(*det.feature_map);
    if (!cfg_.adaptive_fusion) return l2_normalized(global);
    const PartHeatmaps parts = group_heatmaps(*det.heatmaps);
    const auto part_embs = part_embeddings(*det.feature_map, parts);
    const Eigen::MatrixXd proj =
        projection_ ? *projection_ : block_average_projection(det.feature_map->channels());
    const Embedding local = local_neck(part_embs, proj);
    const int n = count_confident_parts(parts, cfg_.theta_part);
    return l2_normalized(adaptive_fuse(local, global, n));
  }
  if (det.embedding.size() > 0) return l2_normalized(det.embedding);
  return Embedding();
}

void Tracker::apply_match(Tracklet& t, int frame, const BoundingBox& box,
                          const Embedding& det_embedding) {
  double alpha = 1.0;
  if (cfg_.suppress_abnormal_motion && t.speed_buffer.size() >= 2) {
    const Eigen::Vector4d d = speed_difference(t.speed_buffer, box, cfg_.filter);
    alpha = suppression_coefficients(d, cfg_.theta_v, cfg_.alpha0).mean;
  }
  t.kalman = kf_update(t.kalman, box, alpha, model_);

  if (t.status == TrackStatus::Lost) t.speed_buffer.clear();
  t.speed_buffer.push(frame, box);
  t.status = TrackStatus::Tracked;
  t.frames_since_update = 0;
  t.history.push_back({frame, box, true});

  if (det_embedding.size() > 0)
    t.embedding = t.embedding.size() == 0
                      ? det_embedding
                      : ema_update(t.embedding, det_embedding, cfg_.beta);
}

StepResult Tracker::step(int frame, const FrameObservations& obs, const WarpMatrix& warp) {
  if (started_ && frame <= last_frame_)
    throw std::invalid_argument("Tracker::step: frame indices must strictly increase");
  started_ = true;
  last_frame_ = frame;

  StepResult result;
  const auto [high_idx, low_idx] = split_detections(obs, cfg_.theta_det);

  std::vector<BoundingBox> high_boxes, low_boxes;
  std::vector<Embedding> high_embeddings;
  for (int i : high_idx) {
    const Detection& det = obs.detections[static_cast<std::size_t>(i)];
    high_boxes.push_back(det.box);
    high_embeddings.push_back(detection_embedding(det));
  }
  for (int i : low_idx) low_boxes.push_back(obs.detections[static_cast<std::size_t>(i)].box);

  // Predict and compensate every live tracklet.
  AssociationTracks assoc;
  for (Tracklet& t : tracks_) {
    t.kalman = motion_compensate(kf_predict(t.kalman, model_), warp);
    result.predictions.emplace_back(t.id, t.kalman.tlwh());
    assoc.boxes.push_back(t.kalman.tlwh());
    assoc.states.push_back(t.status == TrackStatus::Lost ? TrackingState::Untracked
                                                         : TrackingState::Tracked);
    assoc.active.push_back(t.status == TrackStatus::Tracked ? 1 : 0);
    // Unconfirmed tracklets associate on IoU alone.
    assoc.embeddings.push_back(t.status == TrackStatus::New ? Embedding() : t.embedding);
  }

  AssociationParams params;
  params.theta_emb = cfg_.theta_emb;
  params.theta_iou = cfg_.theta_iou;
  params.offset = cfg_.occlusion_aware ? cfg_.offset : 0.0;
  params.stage1_gate = cfg_.stage1_gate;
  params.stage2_gate = cfg_.stage2_gate;

  const TwoStageResult matches =
      associate_two_stage(assoc, high_boxes, high_embeddings, low_boxes, params);

  std::vector<char> track_matched(tracks_.size(), 0);
  std::vector<char> det_matched(obs.detections.size(), 0);

  for (const auto& [row, col] : matches.high.matches) {
    Tracklet& t = tracks_[static_cast<std::size_t>(row)];
    const int det_index = high_idx[static_cast<std::size_t>(col)];
    apply_match(t, frame, high_boxes[static_cast<std::size_t>(col)],
                high_embeddings[static_cast<std::size_t>(col)]);
    track_matched[static_cast<std::size_t>(row)] = 1;
    det_matched[static_cast<std::size_t>(det_index)] = 1;
    result.stage1_matches.emplace_back(t.id, det_index);
  }
  const Embedding no_embedding;
  for (const auto& [row, col] : matches.low.matches) {
    Tracklet& t = tracks_[static_cast<std::size_t>(row)];
    const int det_index = low_idx[static_cast<std::size_t>(col)];
    apply_match(t, frame, low_boxes[static_cast<std::size_t>(col)], no_embedding);
    track_matched[static_cast<std::size_t>(row)] = 1;
    det_matched[static_cast<std::size_t>(det_index)] = 1;
    result.stage2_matches.emplace_back(t.id, det_index);
  }

  // Lifecycle for unmatched tracklets.
  std::vector<Tracklet> survivors;
  survivors.reserve(tracks_.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Tracklet& t = tracks_[i];
    if (!track_matched[i]) {
      if (t.status == TrackStatus::New) {
        // Unconfirmed and unmatched: discard without a trace.
        result.removed.push_back(t.id);
        continue;
      }
      t.status = TrackStatus::Lost;
      ++t.frames_since_update;
      if (t.frames_since_update > cfg_.max_lost) {
        result.removed.push_back(t.id);
        finished_.push_back({t.id, std::move(t.history)});
        continue;
      }
    }
    survivors.push_back(std::move(t));
  }
  tracks_ = std::move(survivors);

  // Births from unmatched high-score detections.
  for (std::size_t pos = 0; pos < high_idx.size(); ++pos) {
    const int i = high_idx[pos];
    if (det_matched[static_cast<std::size_t>(i)]) continue;
    const Detection& det = obs.detections[static_cast<std::size_t>(i)];
    if (det.score <= cfg_.theta_new_track) continue;
    Tracklet t;
    t.id = next_id_++;
    t.status = TrackStatus::New;
    t.kalman = kf_init(det.box, model_);
    t.speed_buffer = SpeedBuffer(cfg_.buffer_len);
    t.speed_buffer.push(frame, det.box);
    t.embedding = high_embeddings[pos];
    t.history.push_back({frame, det.box, true});
    result.new_tracks.emplace_back(t.id, i);
    tracks_.push_back(std::move(t));
  }

  for (const Tracklet& t : tracks_)
    if (t.status == TrackStatus::Tracked)
      result.active.push_back({t.id, t.status, t.history.back().box});
  return result;
}

std::vector<TrackRecord> Tracker::records() const {
  std::vector<TrackRecord> out = finished_;
  for (const Tracklet& t : tracks_)
    if (t.status != TrackStatus::New) out.push_back({t.id, t.history});
  std::sort(out.begin(), out.end(),
            [](const TrackRecord& a, const TrackRecord& b) { return a.id < b.id; });
  return out;
}

}  // namespace occtrack
