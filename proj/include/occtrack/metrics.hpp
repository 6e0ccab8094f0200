#pragma once

#include <map>
#include <string>
#include <vector>

#include "occtrack/geometry.hpp"

namespace occtrack {

struct TrackRow {
  int frame = 0;
  int id = 0;
  BoundingBox box;
};

/// Flat (frame, id, box) table, the interchange form for ground truth and
/// tracking results. (frame, id) pairs are unique.
struct TrackTable {
  std::vector<TrackRow> rows;

  void sort_rows();
  int frame_count() const;
};

struct MetricsReport {
  double mota = 0.0;
  double idf1 = 0.0;
  long id_switches = 0;
  long false_positives = 0;
  long false_negatives = 0;
  long gt_count = 0;
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
};

struct MetricsEvent {
  enum class Kind { FalsePositive, FalseNegative, IdSwitch };
  Kind kind;
  int frame = 0;
  int gt_id = -1;
  int pred_id = -1;
};

struct FrameBoxes {
  std::vector<int> ids;
  std::vector<BoundingBox> boxes;
};

struct FrameMatch {
  std::vector<std::pair<int, int>> matches;  // (gt index, pred index)
  std::vector<int> unmatched_gt;
  std::vector<int> unmatched_pred;
};

/// One frame of CLEAR correspondence: carry-over pairs that still clear the
/// IoU gate persist; the remainder is matched by minimum IoU distance.
/// `carry` maps gt id to the predicted id matched in the previous frame.
FrameMatch match_frame(const FrameBoxes& gt, const FrameBoxes& pred, double iou_thr,
                       const std::map<int, int>& carry);

/// CLEAR counts plus the global-identity IDF1 over the two tables.
MetricsReport evaluate(const TrackTable& gt, const TrackTable& pred,
                       double iou_thr = 0.5,
                       std::vector<MetricsEvent>* events = nullptr);

/// Pool per-sequence counts; MOTA and IDF1 are recomputed from the sums.
MetricsReport merge_reports(const std::vector<MetricsReport>& reports);

std::string format_report(const MetricsReport& r);

}  // namespace occtrack
